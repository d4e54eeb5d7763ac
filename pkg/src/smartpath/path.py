"""The gamma interpolation family X_tau between a source law and a gamma target.

For a target (alpha, lambda) and a source law P_X, the family is built by the
three-stage procedure: draw x from P_X, draw a Poisson count K with parameter
x*lam*tau/(1-tau), draw Y ~ Gamma(K, rate=lam*tau/(1-tau)) (Y = 0 when K = 0),
and set

    X_tau = (1 - tau) * Gamma(alpha, lam) + tau * Y .

Its density and the two companion integrals that express the u- and
tau-derivatives of the density share one kernel shape, indexed by j = 0, 1, 2:

    prefactor (lam/(1-tau))^(j+1) * (u/(tau x))^((alpha-1-j)/2)
    * exp(-lam(u + tau x)/(1-tau)) * I_{alpha-1+j}(2 lam sqrt(u x tau)/(1-tau))

integrated against P_X(dx). All evaluations assemble the log of that kernel,
combining the exponentials as -lam(sqrt(u)-sqrt(x tau))^2/(1-tau) plus the
log-scaled Bessel factor, so nothing overflows even deep in the tau -> 1
regime; the result is exponentiated once at the end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import logsumexp

from .measures import GammaParams, SourceMeasure
from .numerics import DEFAULT_CONFIG, NumericConfig, QuadratureError, integrate_halfline
from .specfun import (
    kummer_1f1,
    log_bessel_i,
    log_bessel_i_scaled,
    log_gamma,
    log_kummer_1f1,
)

__all__ = [
    "Tau",
    "SmartPathModel",
    "PathSample",
    "HalfshiftDraws",
    "sample_convolution",
]


@dataclass(frozen=True)
class Tau:
    """Interpolation parameter, strictly inside (0, 1).

    Endpoints are reached only as limits; passing tau = 0 or 1 is an error.
    """

    value: float

    def __post_init__(self):
        if not (0.0 < self.value < 1.0):
            raise ValueError(f"tau must lie strictly in (0, 1), got {self.value}")


def _tau_value(tau) -> float:
    t = tau.value if isinstance(tau, Tau) else float(tau)
    if not (0.0 < t < 1.0):
        raise ValueError(f"tau must lie strictly in (0, 1), got {t}")
    return t


@dataclass(frozen=True)
class PathSample:
    """One draw of X_tau together with the internal stage draws."""

    value: float
    x: float
    k: int
    y: float
    gamma_part: float


@dataclass(frozen=True)
class HalfshiftDraws:
    """Draws of the half-shifted representation, with internals exposed.

    value = (1-tau) gamma_part + (sqrt(tau) sqrt(x) + sqrt((1-tau)/(2 lam)) z)^2
    """

    value: np.ndarray
    x: np.ndarray
    z: np.ndarray
    gamma_part: np.ndarray


def _log_kernel_terms(p: GammaParams, tau: float, u, x, j: int):
    """Log of the order-j kernel factor, broadcast over u and x (both > 0)."""
    lam = p.rate
    om = 1.0 - tau
    u = np.asarray(u, dtype=float)
    x = np.asarray(x, dtype=float)
    power = 0.5 * (p.alpha - 1.0 - j)
    nu = p.alpha - 1.0 + j
    z = 2.0 * lam * np.sqrt(u * x * tau) / om
    out = (
        (j + 1) * (math.log(lam) - math.log(om))
        + power * (np.log(u) - np.log(x) - math.log(tau))
        - lam * (np.sqrt(u) - np.sqrt(x * tau)) ** 2 / om
        + log_bessel_i_scaled(nu, z)
    )
    return out


def _log_kernel_scalar(p: GammaParams, tau: float, u: float, x: float, j: int) -> float:
    """Scalar fast path of :func:`_log_kernel_terms` (hot inner-quadrature loop)."""
    lam = p.rate
    om = 1.0 - tau
    power = 0.5 * (p.alpha - 1.0 - j)
    nu = p.alpha - 1.0 + j
    z = 2.0 * lam * math.sqrt(u * x * tau) / om
    lb = log_bessel_i(nu, z) - z
    return (
        (j + 1) * (math.log(lam) - math.log(om))
        + power * (math.log(u) - math.log(x) - math.log(tau))
        - lam * (math.sqrt(u) - math.sqrt(x * tau)) ** 2 / om
        + lb
    )


def _refine_max(fn, a, b, iters=24):
    """Golden-section maximum of a unimodal scalar function on [a, b]."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = fn(d)
    return (c, fc) if fc >= fd else (d, fd)


def _log_source_integral(model, tau, u_scalar, j, cfg):
    """log of  integral exp(kernel_j(u, x)) f_X(x) dx  for a density source.

    Substituting x = y^2 turns the dominant exponential into a Gaussian in y
    centred at y0 = sqrt(u/tau) with scale sigma = sqrt((1-tau)/(2 lam tau)).
    The log-integrand is close to concave in y, so its maximum is located by
    a coarse scan plus golden-section refinement; that maximum is used both
    as the overflow-safe shift and as the split point handed to the adaptive
    rule. The true peak can sit between the kernel centre and the source
    bulk (the scan range covers both).
    """
    p = model.target
    src = model.source
    lam = p.rate
    y0 = math.sqrt(u_scalar / tau)
    sigma = math.sqrt((1.0 - tau) / (2.0 * lam * tau))
    y_src = math.sqrt(max(src.mean(), 1e-12))

    def log_integrand_y(y):
        lf = src.log_density(y * y)
        if not math.isfinite(lf):
            return -math.inf
        return _log_kernel_scalar(p, tau, u_scalar, y * y, j) + lf

    s_hi = max(y0 + 12.0 * sigma, 4.0 * y_src)
    s_lo = min(sigma, y_src, y0 if y0 > 0 else y_src) * 1e-6
    cand = np.geomspace(s_lo, s_hi, 40)
    cand = np.unique(np.concatenate([cand, [y0, y0 - sigma, y0 + sigma, y_src]]))
    cand = cand[cand > 0.0]
    xs = cand * cand
    with np.errstate(invalid="ignore"):
        vals = _log_kernel_terms(p, tau, u_scalar, xs, j) + np.asarray(
            src.log_density(xs), dtype=float
        )
    vals = np.where(np.isnan(vals), -np.inf, vals)
    i_best = int(np.argmax(vals))
    if not math.isfinite(vals[i_best]):
        return -math.inf, 0.0
    lo = cand[max(i_best - 1, 0)]
    hi = cand[min(i_best + 1, len(cand) - 1)]
    y_peak, shift = _refine_max(log_integrand_y, lo, hi)
    shift = max(shift, float(vals[i_best]))

    def integrand(y):
        if y <= 0.0:
            return 0.0
        lt = log_integrand_y(y) - shift
        if lt > 705.0:
            raise QuadratureError("log-shift failed to bound the source integrand")
        return 0.0 if lt < -745.0 else math.exp(lt) * 2.0 * y

    cuts = sorted(
        {
            y
            for y in (y_peak - 3 * sigma, y_peak, y_peak + 3 * sigma, y_src)
            if y > 0.0
        }
    )
    est = integrate_halfline(integrand, cfg, breakpoints=cuts)
    if est.value <= 0.0:
        return -math.inf, est.error_bound
    rel_err = est.error_bound / est.value
    return shift + math.log(est.value), rel_err


@lru_cache(maxsize=1 << 20)
def _log_source_integral_cached(model, tau, u, j, cfg):
    return _log_source_integral(model, tau, u, j, cfg)[0]


def _log_eval_gamma_mixture(model, tau, uu, j):
    """Closed form of the order-j kernel integral for gamma-mixture sources.

    Expanding the Bessel factor and integrating termwise against a
    Gamma(a, mu) component collapses the x-integral to a Kummer function:

      F_j(tau, u) = sum_c w_c K_c u^(alpha-1) e^(-lam u/(1-tau))
                    * 1F1(a_c + j, alpha + j, wscale_c u),

    wscale_c = lam^2 tau / ((1-tau)^2 (theta + mu_c)), theta = lam tau/(1-tau),
    and K_c collecting the constant factors. Every piece is assembled in log
    space, so the overflow behaviour matches the quadrature path.
    """
    p = model.target
    lam = p.rate
    om = 1.0 - tau
    theta = lam * tau / om
    log_c = math.log(lam) + 0.5 * math.log(tau) - math.log(om)
    p_j = 0.5 * (p.alpha - 1.0 - j)
    nu_j = p.alpha - 1.0 + j
    pieces = []
    for a, mu, w in model.source.gamma_components():
        wscale = lam * lam * tau / (om * om * (theta + mu))
        log_k = (
            (j + 1) * (math.log(lam) - math.log(om))
            - p_j * math.log(tau)
            + a * math.log(mu)
            - log_gamma(a)
            + nu_j * log_c
            + log_gamma(a + j)
            - (a + j) * math.log(theta + mu)
            - log_gamma(nu_j + 1.0)
        )
        f1 = np.array([log_kummer_1f1(a + j, p.alpha + j, wscale * v) for v in uu])
        pieces.append(math.log(w) + log_k + (p.alpha - 1.0) * np.log(uu) - lam * uu / om + f1)
    out = np.stack(pieces)
    return logsumexp(out, axis=0)


def _log_eval(model, tau, u, j, cfg):
    """log of g (j=0), h (j=1) or k (j=2) at the points u."""
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0.0):
        raise ValueError("u must be strictly positive")
    scalar = u.ndim == 0
    uu = np.atleast_1d(u)
    atoms = model.source.atoms()
    if atoms is not None:
        xs, ws = atoms
        terms = _log_kernel_terms(model.target, tau, uu[:, None], xs[None, :], j)
        out = logsumexp(terms, axis=1, b=ws[None, :])
    elif model.source.gamma_components() is not None:
        out = _log_eval_gamma_mixture(model, tau, uu, j)
    else:
        if not model.source.has_density:
            raise NotImplementedError(
                "source must be atomic or carry a density for pointwise evaluation"
            )
        out = np.array(
            [_log_source_integral_cached(model, tau, float(v), j, cfg) for v in uu]
        )
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class SmartPathModel:
    """A (source law, gamma target) pair defining the family {X_tau}."""

    source: SourceMeasure
    target: GammaParams

    # -- pointwise functions ------------------------------------------------

    def log_density(self, tau, u, cfg: NumericConfig = DEFAULT_CONFIG):
        return _log_eval(self, _tau_value(tau), u, 0, cfg)

    def density(self, tau, u, cfg: NumericConfig = DEFAULT_CONFIG):
        """Density g(tau, u) of X_tau at u > 0."""
        return np.exp(self.log_density(tau, u, cfg))

    def log_h(self, tau, u, cfg: NumericConfig = DEFAULT_CONFIG):
        self.target.require_half_shape("h_function")
        return _log_eval(self, _tau_value(tau), u, 1, cfg)

    def h_function(self, tau, u, cfg: NumericConfig = DEFAULT_CONFIG):
        """Companion integral h(tau, u): du g = ((alpha-1)/u - lam/(1-tau)) g + h."""
        return np.exp(self.log_h(tau, u, cfg))

    def log_k(self, tau, u, cfg: NumericConfig = DEFAULT_CONFIG):
        self.target.require_half_shape("k_function")
        return _log_eval(self, _tau_value(tau), u, 2, cfg)

    def k_function(self, tau, u, cfg: NumericConfig = DEFAULT_CONFIG):
        """Second companion integral k(tau, u) entering the tau-derivative of g."""
        return np.exp(self.log_k(tau, u, cfg))

    def score_shift(self, tau, u, cfg: NumericConfig = DEFAULT_CONFIG):
        """h/g at u, i.e. the score of X_tau minus (alpha-1)/u - lam/(1-tau)."""
        return np.exp(self.log_h(tau, u, cfg) - self.log_density(tau, u, cfg))

    # -- transforms and moments ---------------------------------------------

    def laplace(self, tau, mu: float) -> float:
        """E[exp(-mu X_tau)] = (1 + mu(1-tau)/lam)^(-alpha) L_X(mu tau / (1 + mu(1-tau)/lam))."""
        t = _tau_value(tau)
        if not (math.isfinite(mu) and mu > 0.0):
            raise ValueError(f"mu must be positive and finite, got {mu}")
        lam = self.target.rate
        denom = 1.0 + mu * (1.0 - t) / lam
        return denom ** (-self.target.alpha) * self.source.laplace(mu * t / denom)

    def mean(self, tau) -> float:
        """E[X_tau] = (1-tau) alpha/lam + tau E[X]."""
        t = _tau_value(tau)
        return (1.0 - t) * self.target.mean + t * self.source.mean()

    def moment(self, tau, beta: float, cfg: NumericConfig = DEFAULT_CONFIG) -> float:
        """E[X_tau^beta] for alpha + beta > 0 via the confluent-hypergeometric form.

        E[X_tau^beta] = (lam/(1-tau))^(-beta) Gamma(alpha+beta)/Gamma(alpha)
                        * E_X[ exp(-theta X) 1F1(alpha+beta, alpha, theta X) ],
        theta = lam tau/(1-tau). Exact finite sum for atomic sources.
        """
        t = _tau_value(tau)
        alpha = self.target.alpha
        if alpha + beta <= 0.0:
            raise ValueError(f"moment requires alpha + beta > 0, got {alpha + beta}")
        if beta == 0.0:
            return 1.0
        self.source.moment(beta)  # raises if the source moment diverges
        theta = self.target.rate * t / (1.0 - t)

        def log_weight(x):
            lsv = kummer_1f1(alpha + beta, alpha, theta * x)
            return -theta * x + lsv.log_magnitude

        prefactor = -beta * math.log(theta / t) + log_gamma(alpha + beta) - log_gamma(alpha)
        atoms = self.source.atoms()
        if atoms is not None:
            xs, ws = atoms
            lw = np.array([log_weight(float(x)) for x in xs])
            return float(np.exp(logsumexp(lw, b=ws) + prefactor))
        est = integrate_halfline(
            lambda x: math.exp(log_weight(x)) * self.source.density(x),
            cfg,
            breakpoints=[self.source.mean()],
        )
        return est.value * math.exp(prefactor)

    def exp_moment(self, tau, mu: float):
        """The pair (s(mu, tau), E[exp(s X_tau)]) with s = mu/(tau + mu(1-tau)/lam).

        E[exp(s X_tau)] = (1 + mu(1-tau)/(lam tau))^(-alpha) E[exp(mu X)].
        """
        t = _tau_value(tau)
        if not (math.isfinite(mu) and mu > 0.0):
            raise ValueError(f"mu must be positive and finite, got {mu}")
        source_value = self.source.exp_moment(mu)
        lam = self.target.rate
        s = mu / (t + mu * (1.0 - t) / lam)
        value = (1.0 + mu * (1.0 - t) / (lam * t)) ** (-self.target.alpha) * source_value
        return s, value

    # -- sampling -----------------------------------------------------------

    def sample(self, tau, rng) -> PathSample:
        """One three-stage draw, exposing (x, K, Y, gamma) for conditioning tests."""
        t = _tau_value(tau)
        lam = self.target.rate
        rate = lam * t / (1.0 - t)
        x = float(self.source.sample(rng, 1)[0])
        k = int(rng.poisson(x * rate))
        y = float(rng.gamma(k, 1.0 / rate)) if k > 0 else 0.0
        gamma_part = float(self.target.sample(rng))
        return PathSample((1.0 - t) * gamma_part + t * y, x, k, y, gamma_part)

    def sample_many(self, tau, rng, n: int) -> np.ndarray:
        """Vectorized three-stage draws of X_tau."""
        t = _tau_value(tau)
        lam = self.target.rate
        rate = lam * t / (1.0 - t)
        xs = np.asarray(self.source.sample(rng, n), dtype=float)
        ks = rng.poisson(xs * rate)
        ys = rng.gamma(ks, 1.0 / rate)  # shape 0 draws are exactly 0
        gammas = self.target.sample(rng, n)
        return (1.0 - t) * gammas + t * ys

    def sample_chi2_rep(self, tau, rng, n: int) -> np.ndarray:
        """Draws via the squared-Gaussian-coordinates representation.

        Requires alpha = p/2 for a positive integer p:
        X_tau =d sum_{i<=p} (sqrt(tau) sqrt(X/p) + sqrt((1-tau)/(2 lam)) Z_i)^2.
        """
        t = _tau_value(tau)
        p_float = 2.0 * self.target.alpha
        p = int(round(p_float))
        if abs(p_float - p) > 1e-12 or p < 1:
            raise ValueError(
                f"chi-square representation needs 2*alpha integral, got alpha={self.target.alpha}"
            )
        xs = np.asarray(self.source.sample(rng, n), dtype=float)
        zs = rng.standard_normal((n, p))
        shift = np.sqrt(t * xs / p)[:, None]
        scale = math.sqrt((1.0 - t) / (2.0 * self.target.rate))
        return np.sum((shift + scale * zs) ** 2, axis=1)

    def sample_halfshift_rep(self, tau, rng, n: int) -> HalfshiftDraws:
        """Draws via the half-shifted representation (alpha >= 1/2).

        X_tau =d (1-tau) Gamma(alpha - 1/2, lam)
               + (sqrt(tau) sqrt(X) + sqrt((1-tau)/(2 lam)) Z)^2,
        with the Gamma part identically 0 at alpha = 1/2. The internal draws
        are exposed for the score-representation estimator.
        """
        t = _tau_value(tau)
        self.target.require_half_shape("sample_halfshift_rep")
        lam = self.target.rate
        xs = np.asarray(self.source.sample(rng, n), dtype=float)
        zs = rng.standard_normal(n)
        gpart = rng.gamma(self.target.alpha - 0.5, 1.0 / lam, n) if self.target.alpha > 0.5 else np.zeros(n)
        w = np.sqrt(t * xs) + math.sqrt((1.0 - t) / (2.0 * lam)) * zs
        return HalfshiftDraws((1.0 - t) * gpart + w * w, xs, zs, gpart)

    # -- grid hints ----------------------------------------------------------

    def u_breakpoints(self, tau):
        """Interior split points for integrals over u: the conditional means
        (1-tau) alpha/lam + tau x_i per atom, or the overall mean."""
        t = _tau_value(tau)
        base = (1.0 - t) * self.target.mean
        atoms = self.source.atoms()
        if atoms is not None:
            xs, _ = atoms
            return [base + t * float(x) for x in xs]
        return [self.mean(t)]


def sample_convolution(models, tau, rng, n: int) -> np.ndarray:
    """Draws of the interpolation for a sum of independent sources.

    Each component contributes (1-tau) Gamma(alpha_i, lam) + tau Y_i built
    from its own source; all targets must share the same rate. The sum is
    distributed as X_tau for source sum(X_i) and target (sum(alpha_i), lam).
    """
    models = list(models)
    if not models:
        raise ValueError("need at least one component model")
    rate = models[0].target.rate
    for m in models[1:]:
        if m.target.rate != rate:
            raise ValueError("all component targets must share the same rate")
    out = np.zeros(n)
    for m in models:
        out += m.sample_many(tau, rng, n)
    return out
