"""Shared numerical substrate: adaptive quadrature on (0, inf), Richardson
finite differences, seeded Monte-Carlo means, and two-sample statistics.

Monte-Carlo reproducibility contract: every stream is derived from a
counter-based generator keyed by ``(seed, task_index)``, and chunked
reductions always run in task-index order, so results are bit-identical
regardless of how much parallelism a caller applies.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox
from scipy import integrate as _integrate

__all__ = [
    "QuadratureError",
    "NumericConfig",
    "DEFAULT_CONFIG",
    "Estimate",
    "integrate_halfline",
    "derivative_fd",
    "stream",
    "mc_mean",
    "two_sample_ks",
    "ks_two_sample_quantile",
]

_MASK64 = (1 << 64) - 1
_MC_CHUNK = 1 << 14


class QuadratureError(RuntimeError):
    """Adaptive integration failed (non-convergence or NaN integrand)."""


@dataclass(frozen=True)
class NumericConfig:
    """Quadrature and Monte-Carlo controls shared across the package."""

    quad_rel_tol: float = 1e-10
    quad_abs_tol: float = 1e-12
    quad_max_subdiv: int = 200
    tail_cutoff_mass: float = 1e-12
    mc_samples: int = 100_000
    mc_seed: int = 20240
    fd_step: float = 1e-3

    def __post_init__(self):
        if not (self.quad_rel_tol > 0.0 and self.quad_abs_tol > 0.0):
            raise ValueError("quadrature tolerances must be positive")
        if self.quad_max_subdiv < 10:
            raise ValueError("quad_max_subdiv must be at least 10")
        if not 0.0 < self.tail_cutoff_mass < 1e-8:
            raise ValueError("tail_cutoff_mass must lie in (0, 1e-8)")
        if self.mc_samples < 1000:
            raise ValueError("mc_samples must be at least 10^3")
        if not self.fd_step > 0.0:
            raise ValueError("fd_step must be positive")


DEFAULT_CONFIG = NumericConfig()


@dataclass(frozen=True)
class Estimate:
    """A numeric estimate with an error bound.

    ``error_bound`` is a one-sigma standard error for ``kind="monte_carlo"``
    and an absolute error estimate for ``kind="quadrature"``.
    """

    value: float
    error_bound: float
    kind: str

    def __post_init__(self):
        if self.kind not in ("quadrature", "monte_carlo"):
            raise ValueError(f"unknown estimate kind {self.kind!r}")
        if self.error_bound < 0.0:
            raise ValueError("error_bound must be nonnegative")


def _checked(f):
    def g(u):
        v = f(u)
        if math.isnan(v):
            raise QuadratureError(f"integrand returned NaN at u={u!r}")
        return v

    return g


def integrate_halfline(f, cfg: NumericConfig = DEFAULT_CONFIG, breakpoints=(), scan=None):
    """Integrate a scalar function over (0, inf) adaptively.

    The axis is split at ``breakpoints`` (interior hints such as known peaks
    or atoms) and, unless hints were supplied, additionally at the
    integrand's approximate mode located by a coarse log-spaced scan. Each
    bounded piece uses adaptive Gauss-Kronrod; the final piece runs to
    infinity through the QUADPACK semi-infinite transformation, which handles
    exponentially decaying tails without an explicit truncation point.
    Endpoint-singular integrands (u^{alpha-1} behaviour with alpha < 1) are
    integrable by the extrapolating finite-interval rule.

    Returns an :class:`Estimate` whose ``error_bound`` is the summed
    QUADPACK error estimate. Raises :class:`QuadratureError` on NaN or on
    non-convergence past ``cfg.quad_max_subdiv`` subdivisions.
    """
    g = _checked(f)
    pts = sorted(float(b) for b in breakpoints if math.isfinite(b) and b > 0.0)
    if scan is None:
        scan = not pts
    if scan:
        grid = np.geomspace(1e-8, 1e8, 200)
        vals = np.array([abs(g(u)) for u in grid])
        if np.any(vals > 0.0):
            pts.append(float(grid[int(np.argmax(vals))]))
        else:
            pts.append(1.0)
    edges = [0.0] + sorted(set(pts)) + [math.inf]

    total = 0.0
    err = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            out = _integrate.quad(
                g,
                a,
                b,
                epsabs=cfg.quad_abs_tol,
                epsrel=cfg.quad_rel_tol,
                limit=cfg.quad_max_subdiv,
                full_output=1,
            )
        val, abserr = out[0], out[1]
        if math.isnan(val):
            raise QuadratureError(f"integration produced NaN on ({a}, {b})")
        if len(out) > 3 and abserr > 100.0 * max(cfg.quad_abs_tol, abs(val) * cfg.quad_rel_tol):
            raise QuadratureError(
                f"integration did not converge on ({a}, {b}): {out[3].splitlines()[0]}"
            )
        total += val
        err += abserr
    return Estimate(total, err, "quadrature")


def integrate_tail(f, a: float, cfg: NumericConfig = DEFAULT_CONFIG, breakpoints=()) -> Estimate:
    """Integrate a scalar function over (a, inf), splitting at interior hints."""
    if not (math.isfinite(a) and a >= 0.0):
        raise ValueError(f"lower limit must be finite and nonnegative, got {a}")
    g = _checked(f)
    edges = [a] + sorted(float(b) for b in breakpoints if math.isfinite(b) and b > a) + [math.inf]
    total = 0.0
    err = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            out = _integrate.quad(
                g,
                lo,
                hi,
                epsabs=cfg.quad_abs_tol,
                epsrel=cfg.quad_rel_tol,
                limit=cfg.quad_max_subdiv,
                full_output=1,
            )
        val, abserr = out[0], out[1]
        if math.isnan(val):
            raise QuadratureError(f"integration produced NaN on ({lo}, {hi})")
        if len(out) > 3 and abserr > 100.0 * max(cfg.quad_abs_tol, abs(val) * cfg.quad_rel_tol):
            raise QuadratureError(
                f"integration did not converge on ({lo}, {hi}): {out[3].splitlines()[0]}"
            )
        total += val
        err += abserr
    return Estimate(total, err, "quadrature")


def derivative_fd(f, x: float, cfg: NumericConfig = DEFAULT_CONFIG) -> float:
    """First derivative by central differences with one Richardson step.

    Combines steps ``fd_step`` and ``fd_step/2`` to cancel the leading h^2
    term, giving an O(h^4) truncation error for smooth f.
    """
    h = cfg.fd_step
    d1 = (f(x + h) - f(x - h)) / (2.0 * h)
    d2 = (f(x + 0.5 * h) - f(x - 0.5 * h)) / h
    return (4.0 * d2 - d1) / 3.0


def stream(seed: int, index: int = 0) -> Generator:
    """Independent counter-based random stream for task ``(seed, index)``."""
    key = np.array([seed & _MASK64, index & _MASK64], dtype=np.uint64)
    return Generator(Philox(key=key))


def mc_mean(sampler, cfg: NumericConfig = DEFAULT_CONFIG) -> Estimate:
    """Monte-Carlo mean of ``sampler(rng, size) -> ndarray`` draws.

    Draws ``cfg.mc_samples`` values in fixed-size chunks; chunk ``i`` uses
    ``stream(cfg.mc_seed, i)`` and partial sums are reduced in chunk order,
    so the estimate is reproducible and independent of any parallel
    scheduling of the chunks. ``error_bound`` is the one-sigma standard
    error of the mean.
    """
    n = cfg.mc_samples
    total = 0.0
    total_sq = 0.0
    done = 0
    chunk = 0
    while done < n:
        m = min(_MC_CHUNK, n - done)
        draws = np.asarray(sampler(stream(cfg.mc_seed, chunk), m), dtype=float)
        if draws.shape != (m,):
            raise ValueError(f"sampler returned shape {draws.shape}, expected ({m},)")
        total += float(draws.sum())
        total_sq += float((draws * draws).sum())
        done += m
        chunk += 1
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0) * (n / (n - 1.0))
    return Estimate(mean, math.sqrt(var / n), "monte_carlo")


def two_sample_ks(a, b) -> float:
    """Two-sample Kolmogorov-Smirnov statistic sup_t |F_a(t) - F_b(t)|."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be non-empty")
    support = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, support, side="right") / a.size
    cdf_b = np.searchsorted(b, support, side="right") / b.size
    return float(np.max(np.abs(cdf_a - cdf_b)))


def ks_two_sample_quantile(n: int, m: int, confidence: float = 0.99) -> float:
    """Asymptotic null quantile of the two-sample KS statistic.

    P(D > c(delta) * sqrt((n+m)/(n m))) = delta with
    c(delta) = sqrt(-log(delta/2)/2) and delta = 1 - confidence.
    """
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must lie in (0, 1)")
    delta = 1.0 - confidence
    c = math.sqrt(-math.log(delta / 2.0) / 2.0)
    return c * math.sqrt((n + m) / (n * m))
