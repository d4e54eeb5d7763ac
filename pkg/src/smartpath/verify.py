"""Identity and inequality checks over the interpolation family.

Every check turns one statement about the family into a :class:`CheckReport`
holding the probed grid, both sides, deviations and a pass/fail verdict at
fixed tolerances. Rows are either identities (deviation = |lhs - rhs|) or
one-sided bounds (deviation = positive part of lhs - rhs); a report passes
when its maximal absolute deviation is inside ``tolerance_abs`` or its
maximal relative deviation is inside ``tolerance_rel``.

Checks whose mathematical hypotheses fail on the supplied model (no density,
mean mismatch, divergent Stein discrepancy, ...) return status ``skipped``
instead of failing: a skipped hypothesis is misuse, not a falsified theorem.
"""

from __future__ import annotations

import math
import os
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate as _integrate
from scipy.special import digamma as _digamma

from . import information as info
from .measures import gamma_log_pdf, gamma_pdf
from .numerics import (
    DEFAULT_CONFIG,
    NumericConfig,
    derivative_fd,
    ks_two_sample_quantile,
    stream,
    two_sample_ks,
)
from .path import SmartPathModel
from .specfun import log_gamma

__all__ = [
    "CheckReport",
    "chebyshev_tau_grid",
    "fisher_time_integral",
    "check_debruijn_local",
    "check_debruijn_integrated",
    "check_shannon_bridge",
    "check_cramer_rao",
    "check_fisher_bounds",
    "check_fisher_monotonicity",
    "check_lsi",
    "check_hsi",
    "check_representations",
    "check_pde",
    "check_small_u",
    "check_endpoints",
    "ALL_CHECK_NAMES",
    "expand_check_names",
    "run_checks",
]

_REL_FLOOR = 1e-12


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one verification run."""

    check_name: str
    grid: tuple
    lhs: tuple
    rhs: tuple
    max_abs_dev: float
    max_rel_dev: float
    tolerance_abs: float
    tolerance_rel: float
    passed: bool
    status: str  # "passed" | "failed" | "skipped" | "error"
    detail: str = ""
    runtime_ms: int = 0


def chebyshev_tau_grid(n: int = 9, lo: float = 0.05, hi: float = 0.95):
    """Chebyshev-spaced interpolation parameters on [lo, hi], increasing."""
    k = np.arange(1, n + 1)
    nodes = 0.5 * (lo + hi) + 0.5 * (hi - lo) * np.cos((2 * k - 1) * np.pi / (2 * n))
    return tuple(float(t) for t in sorted(nodes))


def _row_devs(lhs, rhs, kinds):
    devs = []
    rels = []
    for l, r, kind in zip(lhs, rhs, kinds):
        d = abs(l - r) if kind == "eq" else max(l - r, 0.0)
        scale = max(abs(l), abs(r))
        devs.append(d)
        rels.append(d / scale if scale > _REL_FLOOR else 0.0)
    return devs, rels


def _make_report(name, grid, lhs, rhs, kinds, tol_abs, tol_rel, t0, detail=""):
    devs, rels = _row_devs(lhs, rhs, kinds)
    max_abs = max(devs) if devs else math.nan
    max_rel = max(rels) if rels else math.nan
    passed = bool(max_abs <= tol_abs or max_rel <= tol_rel)
    return CheckReport(
        check_name=name,
        grid=tuple(float(g) for g in grid),
        lhs=tuple(float(v) for v in lhs),
        rhs=tuple(float(v) for v in rhs),
        max_abs_dev=float(max_abs),
        max_rel_dev=float(max_rel),
        tolerance_abs=tol_abs,
        tolerance_rel=tol_rel,
        passed=passed,
        status="passed" if passed else "failed",
        detail=detail,
        runtime_ms=int(1000 * (time.perf_counter() - t0)),
    )


def _skipped(name, reason, tol_abs, tol_rel, t0):
    return CheckReport(
        check_name=name,
        grid=(),
        lhs=(),
        rhs=(),
        max_abs_dev=math.nan,
        max_rel_dev=math.nan,
        tolerance_abs=tol_abs,
        tolerance_rel=tol_rel,
        passed=False,
        status="skipped",
        detail=f"hypothesis unmet: {reason}",
        runtime_ms=int(1000 * (time.perf_counter() - t0)),
    )


def _mean_matched(model, tol=1e-10):
    return abs(model.source.mean() - model.target.mean) <= tol


def _has_finite_moment(model, order):
    try:
        model.source.moment(order)
        return True
    except ValueError:
        return False


def _entropy_tau_derivative(model, tau, cfg):
    """Richardson finite difference of tau -> D(X_tau || gamma), with the step
    shrunk near the interval ends so every evaluation stays inside (0, 1)."""
    h = min(cfg.fd_step, 0.45 * tau, 0.45 * (1.0 - tau))
    local = replace(cfg, fd_step=h)
    return derivative_fd(lambda s: info.relative_entropy(model, s, cfg).value, tau, local)


def check_debruijn_local(model, tau_grid=None, cfg: NumericConfig = DEFAULT_CONFIG):
    """d/dtau D(X_tau || gamma) = J(X_tau)/(lam tau) on a tau grid.

    The two sides come from independent pipelines: a finite difference of the
    entropy quadrature against the Fisher quadrature. Tolerance is set by the
    O(h^4) differencing error.
    """
    t0 = time.perf_counter()
    tol_abs, tol_rel = 1e-6, 1e-3
    name = "debruijn_local"
    if model.target.alpha < 0.5:
        return _skipped(name, "target shape below 1/2", tol_abs, tol_rel, t0)
    if not _has_finite_moment(model, model.target.alpha + 4.0):
        return _skipped(name, "source lacks the alpha+4 moment", tol_abs, tol_rel, t0)
    grid = tau_grid if tau_grid is not None else chebyshev_tau_grid()
    lam = model.target.rate
    lhs = [_entropy_tau_derivative(model, t, cfg) for t in grid]
    rhs = [info.standardized_fisher_path(model, t, cfg).value / (lam * t) for t in grid]
    return _make_report(name, grid, lhs, rhs, ["eq"] * len(grid), tol_abs, tol_rel, t0)


def fisher_time_integral(model, cfg: NumericConfig = DEFAULT_CONFIG, eps: float = 2e-5):
    """integral_eps^(1-eps) J(X_tau)/(lam tau) dtau plus an endpoint error bound.

    Substituting tau = exp(-s) removes the 1/tau factor; the remaining
    endpoint slivers are bounded through J(X_tau) <= tau J(X), which gives at
    most eps J(X)/lam of neglected mass at each end.
    """
    lam = model.target.rate
    s_lo = -math.log1p(-eps)
    s_hi = -math.log(eps)

    def integrand(s):
        return info.standardized_fisher_path(model, math.exp(-s), cfg).value / lam

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        value, quad_err = _integrate.quad(
            integrand, s_lo, s_hi, epsabs=1e-9, epsrel=3e-4, limit=30
        )
    endpoint_bound = 0.0
    if model.source.has_density:
        try:
            j_source = info.standardized_fisher_source(model.source, model.target, cfg)
            endpoint_bound = 2.0 * eps * j_source / lam
        except (ValueError, NotImplementedError):
            endpoint_bound = 0.0
    return value, quad_err + endpoint_bound


def check_debruijn_integrated(model, cfg: NumericConfig = DEFAULT_CONFIG):
    """D(X || gamma) equals the time integral of J(X_tau)/(lam tau) over (0, 1).

    Needs a mean-matched density source (the left side is the relative
    entropy of the source itself, computed by direct quadrature)."""
    t0 = time.perf_counter()
    tol_abs, tol_rel = 1e-8, 1e-2
    name = "debruijn_integrated"
    if model.target.alpha < 0.5:
        return _skipped(name, "target shape below 1/2", tol_abs, tol_rel, t0)
    if not model.source.has_density:
        return _skipped(name, "source carries no density", tol_abs, tol_rel, t0)
    if not _mean_matched(model):
        return _skipped(name, "source mean != alpha/lambda", tol_abs, tol_rel, t0)
    if not _has_finite_moment(model, model.target.alpha + 4.0):
        return _skipped(name, "source lacks the alpha+4 moment", tol_abs, tol_rel, t0)
    lhs = info.source_relative_entropy(model.source, model.target, cfg).value
    rhs, err = fisher_time_integral(model, cfg)
    return _make_report(
        name, [0.0], [lhs], [rhs], ["eq"], tol_abs, tol_rel, t0,
        detail=f"rhs error bound {err:.3e}",
    )


def check_shannon_bridge(model, cfg: NumericConfig = DEFAULT_CONFIG):
    """H(gamma) - H(X) equals the Fisher time integral when the source matches
    the target's mean and logarithmic moment; both entropies via quadrature."""
    t0 = time.perf_counter()
    tol_abs, tol_rel = 1e-8, 1e-2
    name = "shannon_bridge"
    p = model.target
    if p.alpha < 0.5:
        return _skipped(name, "target shape below 1/2", tol_abs, tol_rel, t0)
    if not model.source.has_density:
        return _skipped(name, "source carries no density (no Shannon entropy)", tol_abs, tol_rel, t0)
    if not _mean_matched(model, 1e-8):
        return _skipped(name, "source mean != alpha/lambda", tol_abs, tol_rel, t0)
    log_target = float(_digamma(p.alpha)) - math.log(p.rate)
    if abs(model.source.log_moment() - log_target) > 1e-6:
        return _skipped(name, "source log-moment differs from the target's", tol_abs, tol_rel, t0)
    h_gamma = info.shannon_entropy(lambda u: gamma_pdf(p, u), cfg, breakpoints=[p.mean])
    h_source = info.shannon_entropy(model.source.density, cfg, breakpoints=[model.source.mean()])
    lhs = h_gamma - h_source
    rhs, err = fisher_time_integral(model, cfg)
    return _make_report(
        name, [0.0], [lhs], [rhs], ["eq"], tol_abs, tol_rel, t0,
        detail=f"rhs error bound {err:.3e}",
    )


def check_cramer_rao(model, tau_grid=None, cfg: NumericConfig = DEFAULT_CONFIG):
    """J(X_tau) = I_tau(X_tau) - alpha lam tau^2/(1-tau)^2 >= 0 for mean-matched
    sources, plus the alpha >= 1 upper bound J <= alpha lam tau/(1-tau)."""
    t0 = time.perf_counter()
    tol_abs, tol_rel = 1e-8, 1e-6
    name = "cramer_rao"
    p = model.target
    if p.alpha < 0.5:
        return _skipped(name, "target shape below 1/2", tol_abs, tol_rel, t0)
    if not _mean_matched(model):
        return _skipped(name, "source mean != alpha/lambda", tol_abs, tol_rel, t0)
    grid = list(tau_grid if tau_grid is not None else chebyshev_tau_grid())
    rows_g, lhs, rhs, kinds = [], [], [], []
    for t in grid:
        j = info.standardized_fisher_path(model, t, cfg).value
        i = info.localized_fisher(model, t, cfg).value
        shift = p.alpha * p.rate * t * t / (1.0 - t) ** 2
        rows_g.append(t)
        lhs.append(j)
        rhs.append(i - shift)
        kinds.append("eq")
        # nonnegativity: -J <= 1e-8
        rows_g.append(t)
        lhs.append(-j)
        rhs.append(1e-8)
        kinds.append("le")
        if p.alpha >= 1.0:
            rows_g.append(t)
            lhs.append(j)
            rhs.append(p.alpha * p.rate * t / (1.0 - t) + 1e-9)
            kinds.append("le")
    return _make_report(name, rows_g, lhs, rhs, kinds, tol_abs, tol_rel, t0)


def check_fisher_bounds(model, tau_grid=None, cfg: NumericConfig = DEFAULT_CONFIG):
    """Finiteness bounds on the localized Fisher information of X_tau:
    I <= alpha lam tau/(1-tau)^2 for alpha >= 1, with the (1 + 1/alpha)
    inflation for alpha in (0, 1); both need a mean-matched source."""
    t0 = time.perf_counter()
    tol_abs, tol_rel = 1e-6, 1e-9
    name = "fisher_bounds"
    p = model.target
    if p.alpha < 0.5:
        return _skipped(name, "target shape below 1/2", tol_abs, tol_rel, t0)
    if not _mean_matched(model):
        return _skipped(name, "source mean != alpha/lambda", tol_abs, tol_rel, t0)
    grid = list(tau_grid if tau_grid is not None else chebyshev_tau_grid())
    factor = 1.0 if p.alpha >= 1.0 else (1.0 + 1.0 / p.alpha)
    lhs = [info.localized_fisher(model, t, cfg).value for t in grid]
    rhs = [factor * p.alpha * p.rate * t / (1.0 - t) ** 2 for t in grid]
    return _make_report(name, grid, lhs, rhs, ["le"] * len(grid), tol_abs, tol_rel, t0)


def check_fisher_monotonicity(model, tau_grid=None, cfg: NumericConfig = DEFAULT_CONFIG):
    """Contraction of the relative Fisher information: J(X_tau) <= tau J(X)."""
    t0 = time.perf_counter()
    tol_abs, tol_rel = 1e-6, 1e-9
    name = "fisher_monotonicity"
    if model.target.alpha < 0.5:
        return _skipped(name, "target shape below 1/2", tol_abs, tol_rel, t0)
    if not model.source.has_density:
        return _skipped(name, "source carries no density", tol_abs, tol_rel, t0)
    try:
        j_source = info.standardized_fisher_source(model.source, model.target, cfg)
    except (ValueError, NotImplementedError) as exc:
        return _skipped(name, f"source Fisher information unavailable ({exc})", tol_abs, tol_rel, t0)
    grid = list(tau_grid if tau_grid is not None else chebyshev_tau_grid())
    lhs = [info.standardized_fisher_path(model, t, cfg).value for t in grid]
    rhs = [t * j_source for t in grid]
    return _make_report(name, grid, lhs, rhs, ["le"] * len(grid), tol_abs, tol_rel, t0)


def check_lsi(model, cfg: NumericConfig = DEFAULT_CONFIG):
    """Logarithmic Sobolev inequality D(X || gamma) <= J(X)/lam (alpha >= 1/2)."""
    t0 = time.perf_counter()
    tol_abs, tol_rel = 1e-8, 1e-9
    name = "lsi"
    if model.target.alpha < 0.5:
        return _skipped(name, "target shape below 1/2", tol_abs, tol_rel, t0)
    if not model.source.has_density:
        return _skipped(name, "source carries no density", tol_abs, tol_rel, t0)
    try:
        j_source = info.standardized_fisher_source(model.source, model.target, cfg)
    except (ValueError, NotImplementedError) as exc:
        return _skipped(name, f"source Fisher information unavailable ({exc})", tol_abs, tol_rel, t0)
    d = info.source_relative_entropy(model.source, model.target, cfg).value
    return _make_report(
        name, [0.0], [d], [j_source / model.target.rate], ["le"], tol_abs, tol_rel, t0
    )


def check_hsi(model, cfg: NumericConfig = DEFAULT_CONFIG):
    """Entropy / Stein-discrepancy / Fisher bound
    D <= (S^2/2) log(1 + 2J/(lam S^2)), plus the fact that this bound never
    exceeds the logarithmic Sobolev bound J/lam."""
    t0 = time.perf_counter()
    tol_abs, tol_rel = 1e-8, 1e-9
    name = "hsi"
    p = model.target
    if p.alpha < 0.5:
        return _skipped(name, "target shape below 1/2", tol_abs, tol_rel, t0)
    if not model.source.has_density:
        return _skipped(name, "source carries no density", tol_abs, tol_rel, t0)
    if not _mean_matched(model, 1e-8):
        return _skipped(name, "source mean != alpha/lambda", tol_abs, tol_rel, t0)
    try:
        j_source = info.standardized_fisher_source(model.source, model.target, cfg)
        s2 = info.stein_discrepancy(model.source, p, cfg)
    except (ValueError, NotImplementedError) as exc:
        return _skipped(name, f"Stein discrepancy or Fisher unavailable ({exc})", tol_abs, tol_rel, t0)
    d = info.source_relative_entropy(model.source, p, cfg).value
    lsi_bound = j_source / p.rate
    if s2 <= 1e-12:
        # Degenerate branch: only the exact fixed point has vanishing
        # discrepancy, where the entropy must vanish as well.
        return _make_report(
            name, [0.0], [d], [0.0], ["le"], tol_abs, tol_rel, t0,
            detail="degenerate branch: S^2 = 0",
        )
    hsi_bound = 0.5 * s2 * math.log1p(2.0 * j_source / (p.rate * s2))
    grid = [0.0, 1.0]
    lhs = [d, hsi_bound]
    rhs = [hsi_bound, lsi_bound]
    detail = f"D={d:.6e} S2={s2:.6e} J={j_source:.6e}"
    return _make_report(name, grid, lhs, rhs, ["le", "le"], tol_abs, tol_rel, t0, detail)


def check_representations(model, taus=(0.3, 0.7), n: int = 100_000, seed: int = 0,
                          cfg: NumericConfig = DEFAULT_CONFIG):
    """Equality in law of the alternative samplers against the three-stage one.

    Compares the squared-Gaussian-coordinates sampler (when 2 alpha is an
    integer) and the half-shift sampler with the reference sampler through
    the two-sample KS statistic at the 99% null quantile; a sanity row draws
    the reference sampler twice.
    """
    t0 = time.perf_counter()
    tol_abs, tol_rel = 0.0, 0.0
    name = "representations"
    p = model.target
    taus = (taus,) if np.ndim(taus) == 0 else tuple(taus)
    threshold = ks_two_sample_quantile(n, n, 0.99)
    grid, lhs, rhs, kinds = [], [], [], []
    labels = []
    task = 0
    for t in taus:
        ref = model.sample_many(t, stream(seed, task), n)
        task += 1
        comparisons = []
        ref2 = model.sample_many(t, stream(seed, task), n)
        task += 1
        comparisons.append(("three_stage_rerun", ref2))
        if abs(2.0 * p.alpha - round(2.0 * p.alpha)) < 1e-12:
            chi = model.sample_chi2_rep(t, stream(seed, task), n)
            task += 1
            comparisons.append(("chi_square_rep", chi))
        if p.alpha >= 0.5:
            half = model.sample_halfshift_rep(t, stream(seed, task), n).value
            task += 1
            comparisons.append(("halfshift_rep", half))
        for label, draws in comparisons:
            grid.append(t)
            lhs.append(two_sample_ks(ref, draws))
            rhs.append(threshold)
            kinds.append("le")
            labels.append(f"tau={t}:{label}")
    detail = "; ".join(labels)
    return _make_report(name, grid, lhs, rhs, kinds, tol_abs, tol_rel, t0, detail)


_DEFAULT_PDE_POINTS = ((0.5, 1.3), (0.3, 0.8), (0.7, 2.2))


def _pde_eq15(model, tau, u, cfg):
    p = model.target
    lhs = derivative_fd(lambda v: model.density(tau, v, cfg), u, cfg)
    g = model.density(tau, u, cfg)
    h = model.h_function(tau, u, cfg)
    rhs = ((p.alpha - 1.0) / u - p.rate / (1.0 - tau)) * g + h
    return lhs, rhs


def _pde_eq16(model, tau, u, cfg):
    # Divergence form of the tau-derivative:
    #   lam tau d/dtau g = -d/du ( g u d/du log(g/gamma) ),
    # the sign that makes the entropy production nonnegative.
    p = model.target
    lam = p.rate
    lhs = lam * tau * derivative_fd(lambda s: model.density(s, u, cfg), tau, cfg)

    def flux(v):
        g = model.density(tau, v, cfg)
        dlog = derivative_fd(
            lambda w: model.log_density(tau, w, cfg) - gamma_log_pdf(p, w), v, cfg
        )
        return g * v * dlog

    rhs = -derivative_fd(flux, u, cfg)
    return lhs, rhs


def _pde_eq17(model, tau, u, cfg):
    p = model.target
    lam = p.rate
    om = 1.0 - tau
    lhs = -lam * tau * derivative_fd(lambda s: model.density(s, u, cfg), tau, cfg)
    g = model.density(tau, u, cfg)
    h = model.h_function(tau, u, cfg)
    k = model.k_function(tau, u, cfg)
    rhs = (
        g * (u * lam * lam * tau / om**2 - lam * p.alpha * tau / om)
        + h * (p.alpha - u * lam * (1.0 + tau) / om)
        + u * k
    )
    return lhs, rhs


_PDE_EQS = {
    "pde_eq15": (_pde_eq15, 1e-4),  # single Richardson FD in u
    "pde_eq16": (_pde_eq16, 1e-3),  # nested FD compounds the truncation error
    "pde_eq17": (_pde_eq17, 1e-3),
}


def _check_pde_single(eq_name, model, points, cfg):
    t0 = time.perf_counter()
    fn, tol_rel = _PDE_EQS[eq_name]
    tol_abs = 1e-9
    if model.target.alpha < 0.5:
        return _skipped(eq_name, "target shape below 1/2", tol_abs, tol_rel, t0)
    grid, lhs, rhs = [], [], []
    for tau, u in points:
        l, r = fn(model, tau, u, cfg)
        grid.append(tau)
        lhs.append(l)
        rhs.append(r)
    return _make_report(eq_name, grid, lhs, rhs, ["eq"] * len(grid), tol_abs, tol_rel, t0)


def check_pde(model, points=_DEFAULT_PDE_POINTS, cfg: NumericConfig = DEFAULT_CONFIG):
    """Differential structure of the density: the u-derivative identity and the
    two equivalent forms of the tau-derivative, all probed by Richardson
    finite differences at interior (tau, u) points."""
    return [
        _check_pde_single(name, model, points, cfg) for name in sorted(_PDE_EQS)
    ]


def check_small_u(model, tau: float = 0.5, cfg: NumericConfig = DEFAULT_CONFIG):
    """Power-law behaviour of the density at 0: log g ~ (alpha-1) log u + log C
    with C = lam^alpha (1-tau)^(-alpha) L_X(lam tau/(1-tau)) / Gamma(alpha),
    fitted by least squares on u in [1e-6, 1e-4]."""
    t0 = time.perf_counter()
    tol_abs, tol_rel = 1e-2, 1e-9
    name = "small_u"
    p = model.target
    us = np.geomspace(1e-6, 1e-4, 20)
    logs = np.array([model.log_density(tau, float(u), cfg) for u in us])
    design = np.column_stack([np.ones_like(us), np.log(us)])
    coef, *_ = np.linalg.lstsq(design, logs, rcond=None)
    intercept, slope = float(coef[0]), float(coef[1])
    theta = p.rate * tau / (1.0 - tau)
    log_c = (
        p.alpha * (math.log(p.rate) - math.log1p(-tau))
        + math.log(model.source.laplace(theta))
        - log_gamma(p.alpha)
    )
    grid = [0.0, 1.0]
    lhs = [slope, intercept]
    rhs = [p.alpha - 1.0, log_c]
    return _make_report(
        name, grid, lhs, rhs, ["eq", "eq"], tol_abs, tol_rel, t0,
        detail="rows: slope, intercept",
    )


def check_endpoints(model, mu_grid=(0.5, 1.0, 2.0), cfg: NumericConfig = DEFAULT_CONFIG):
    """Endpoint behaviour of the Laplace transform, plus the entropy start bound.

    As tau -> 0 the transform approaches the gamma transform and as tau -> 1
    the source transform. Convergence is asserted over the whole probed grid
    (the final deviation must drop well below the first); stepwise
    monotonicity is asserted only on the innermost grid points, because the
    signed deviation may cross zero farther from an endpoint, which makes its
    modulus locally non-monotone without contradicting the limit. The entropy
    rows assert D(X_a || gamma) <= -alpha log(1 - a) near a = 0.
    """
    t0 = time.perf_counter()
    tol_abs, tol_rel = 1e-12, 1e-9
    name = "endpoints"
    p = model.target
    down = (0.2, 0.1, 0.05, 0.02, 0.01, 0.005, 0.001)
    up = tuple(1.0 - t for t in down)
    monotone_steps = 3  # innermost steps where leading-order decay dominates
    grid, lhs, rhs, kinds = [], [], [], []

    def add_direction(taus, target_value):
        devs = [abs(model.laplace(t, mu) - target_value) for t in taus]
        for i in range(len(devs) - monotone_steps, len(devs)):
            grid.append(taus[i])
            lhs.append(devs[i])
            rhs.append(devs[i - 1])
            kinds.append("le")
        grid.append(taus[-1])
        lhs.append(devs[-1])
        rhs.append(max(0.25 * devs[0], 1e-8))
        kinds.append("le")

    for mu in mu_grid:
        add_direction(down, (1.0 + mu / p.rate) ** (-p.alpha))
        add_direction(up, model.source.laplace(mu))
    if p.alpha >= 0.5:
        for a in (0.01, 0.05, 0.1):
            grid.append(a)
            lhs.append(info.relative_entropy(model, a, cfg).value)
            rhs.append(-p.alpha * math.log1p(-a))
            kinds.append("le")
    return _make_report(name, grid, lhs, rhs, kinds, tol_abs, tol_rel, t0)


# --- suite runner ----------------------------------------------------------

# Fixed registry order: the per-check stream index comes from this table, so
# a check draws the same randomness whether it runs alone or in a full suite.
_REGISTRY = (
    ("cramer_rao", lambda model, cfg, seed, grid: [check_cramer_rao(model, grid, cfg=cfg)]),
    ("debruijn_integrated", lambda model, cfg, seed, grid: [check_debruijn_integrated(model, cfg=cfg)]),
    ("debruijn_local", lambda model, cfg, seed, grid: [check_debruijn_local(model, grid, cfg=cfg)]),
    ("endpoints", lambda model, cfg, seed, grid: [check_endpoints(model, cfg=cfg)]),
    ("fisher_bounds", lambda model, cfg, seed, grid: [check_fisher_bounds(model, grid, cfg=cfg)]),
    ("fisher_monotonicity", lambda model, cfg, seed, grid: [check_fisher_monotonicity(model, grid, cfg=cfg)]),
    ("hsi", lambda model, cfg, seed, grid: [check_hsi(model, cfg=cfg)]),
    ("lsi", lambda model, cfg, seed, grid: [check_lsi(model, cfg=cfg)]),
    ("pde_eq15", lambda model, cfg, seed, grid: [_check_pde_single("pde_eq15", model, _DEFAULT_PDE_POINTS, cfg)]),
    ("pde_eq16", lambda model, cfg, seed, grid: [_check_pde_single("pde_eq16", model, _DEFAULT_PDE_POINTS, cfg)]),
    ("pde_eq17", lambda model, cfg, seed, grid: [_check_pde_single("pde_eq17", model, _DEFAULT_PDE_POINTS, cfg)]),
    ("representations", lambda model, cfg, seed, grid: [check_representations(model, seed=seed, cfg=cfg)]),
    ("shannon_bridge", lambda model, cfg, seed, grid: [check_shannon_bridge(model, cfg=cfg)]),
    ("small_u", lambda model, cfg, seed, grid: [check_small_u(model, cfg=cfg)]),
)

ALL_CHECK_NAMES = tuple(name for name, _ in _REGISTRY)
_ALIASES = {"pde": ("pde_eq15", "pde_eq16", "pde_eq17")}


def expand_check_names(names):
    """Resolve user-facing check names ("all" and aliases included)."""
    if isinstance(names, str):
        names = [names]
    out = []
    for name in names:
        if name == "all":
            out.extend(ALL_CHECK_NAMES)
        elif name in _ALIASES:
            out.extend(_ALIASES[name])
        elif name in ALL_CHECK_NAMES:
            out.append(name)
        else:
            valid = ", ".join(("all",) + ALL_CHECK_NAMES + tuple(_ALIASES))
            raise ValueError(f"unknown check {name!r}; valid names: {valid}")
    seen = set()
    ordered = []
    for name in out:
        if name not in seen:
            seen.add(name)
            ordered.append(name)
    return ordered


def _error_report(name, exc):
    return CheckReport(
        check_name=name,
        grid=(),
        lhs=(),
        rhs=(),
        max_abs_dev=math.nan,
        max_rel_dev=math.nan,
        tolerance_abs=0.0,
        tolerance_rel=0.0,
        passed=False,
        status="error",
        detail=f"{type(exc).__name__}: {exc}",
    )


def run_checks(model: SmartPathModel, names="all", cfg: NumericConfig = DEFAULT_CONFIG,
               seed: int = 0, workers: int | None = None, tau_grid=None):
    """Run the selected checks and return their reports sorted by name.

    Each check derives its random stream from (seed, registry position), and
    reports are merged in name order, so the output is identical for any
    worker-pool size. Worker count defaults to the SMARTPATH_THREADS
    environment variable (1 if unset). Exceptions inside a check become a
    status="error" report instead of aborting the suite.
    """
    selected = expand_check_names(names)
    grid = tuple(tau_grid) if tau_grid is not None else chebyshev_tau_grid()
    if workers is None:
        workers = max(int(os.environ.get("SMARTPATH_THREADS", "1")), 1)
    builders = {name: (idx, fn) for idx, (name, fn) in enumerate(_REGISTRY)}

    def run_one(name):
        idx, fn = builders[name]
        try:
            return fn(model, cfg, seed + (idx << 20), grid)
        except Exception as exc:  # keep the rest of the suite alive
            return [_error_report(name, exc)]

    reports = []
    if workers <= 1:
        for name in selected:
            reports.extend(run_one(name))
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for batch in pool.map(run_one, selected):
                reports.extend(batch)
    return sorted(reports, key=lambda r: r.check_name)
