"""Transition kernel and derivative representations of the gamma-reversible
semigroup, parametrized multiplicatively: composing parameters tau1 and tau2
gives tau1*tau2 (the additive time is t = -log(tau)/lam).

The kernel is exactly the interpolation density started from a point source,

  p_tau(x, u) = lam/(1-tau) (u/(tau x))^((alpha-1)/2) e^(-lam(u + tau x)/(1-tau))
                * I_{alpha-1}(2 lam sqrt(u x tau)/(1-tau)),

and is symmetric with respect to the gamma weight. Derivative formulas use
the weighted derivative dsigma(f)(x) = sqrt(x) f'(x): a one-draw intertwined
representation for the first derivative and a Hermite-weighted Gaussian
expectation for arbitrary order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .measures import GammaParams
from .numerics import DEFAULT_CONFIG, Estimate, NumericConfig, integrate_halfline
from .path import Tau, _log_kernel_terms, _tau_value
from .specfun import hermite

__all__ = [
    "KernelPoint",
    "log_kernel",
    "kernel",
    "apply",
    "apply_mc",
    "dsigma_apply",
    "bismut",
    "halfshift_point_draws",
]


@dataclass(frozen=True)
class KernelPoint:
    """A (start, end, tau) triple on the kernel's domain."""

    x: float
    u: float
    tau: Tau

    def __post_init__(self):
        if not (self.x > 0.0 and self.u > 0.0):
            raise ValueError("kernel endpoints must be strictly positive")


def log_kernel(p: GammaParams, tau, x, u):
    """log p_tau(x, u); broadcasts over x and u."""
    t = _tau_value(tau)
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    if np.any(x <= 0.0) or np.any(u <= 0.0):
        raise ValueError("kernel endpoints must be strictly positive")
    out = _log_kernel_terms(p, t, u, x, 0)
    return float(out) if out.ndim == 0 else out


def kernel(p: GammaParams, tau, x, u):
    """Transition density p_tau(x, u) >= 0, evaluated in log space."""
    return np.exp(log_kernel(p, tau, x, u))


def apply(p: GammaParams, f, tau, x: float, cfg: NumericConfig = DEFAULT_CONFIG) -> float:
    """Semigroup action (P_tau f)(x) by deterministic kernel quadrature."""
    t = _tau_value(tau)
    mean_end = (1.0 - t) * p.mean + t * x

    def integrand(u):
        return f(u) * math.exp(float(_log_kernel_terms(p, t, u, x, 0)))

    return integrate_halfline(integrand, cfg, breakpoints=[mean_end]).value


def halfshift_point_draws(p: GammaParams, tau, x: float, rng, n: int):
    """Draws (w, z, gamma_part, end) of the point-started half-shift representation.

    end = (1-tau) Gamma(alpha-1/2, lam) + w^2 with
    w = sqrt(tau x) + sqrt((1-tau)/(2 lam)) Z; requires alpha >= 1/2.
    """
    t = _tau_value(tau)
    p.require_half_shape("stochastic semigroup representation")
    z = rng.standard_normal(n)
    gpart = rng.gamma(p.alpha - 0.5, 1.0 / p.rate, n) if p.alpha > 0.5 else np.zeros(n)
    w = math.sqrt(t * x) + math.sqrt((1.0 - t) / (2.0 * p.rate)) * z
    end = (1.0 - t) * gpart + w * w
    return w, z, gpart, end


def _mc_estimate(values: np.ndarray) -> Estimate:
    n = values.size
    mean = float(values.mean())
    stderr = float(values.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return Estimate(mean, stderr, "monte_carlo")


def apply_mc(p: GammaParams, f, tau, x: float, rng, n: int) -> Estimate:
    """Monte-Carlo cross-check of :func:`apply` via the stochastic representation."""
    _, _, _, end = halfshift_point_draws(p, tau, x, rng, n)
    return _mc_estimate(np.asarray(f(end), dtype=float))


def dsigma_apply(p: GammaParams, f, tau, x: float, rng, n: int, f_deriv=None) -> Estimate:
    """sqrt(x) d/dx (P_tau f)(x) via the intertwined one-draw representation.

    Estimates sqrt(tau) E[ (w / sqrt(end)) * dsigma(f)(end) ] where the weight
    w/sqrt(end) has modulus at most 1 on every draw. ``f_deriv`` defaults to a
    central difference of f.
    """
    t = _tau_value(tau)
    if f_deriv is None:
        h = DEFAULT_CONFIG.fd_step

        def f_deriv(u):
            return (f(u + h) - f(u - h)) / (2.0 * h)

    w, _, _, end = halfshift_point_draws(p, tau, x, rng, n)
    weight = w / np.sqrt(end)
    values = math.sqrt(t) * weight * np.sqrt(end) * np.asarray(f_deriv(end), dtype=float)
    return _mc_estimate(values)


def bismut(p: GammaParams, f, tau, x: float, k: int, rng, n: int) -> Estimate:
    """k-th weighted derivative of the semigroup action, as a Gaussian expectation.

    (dsigma)^k (P_tau f)(x) = (lam/2)^(k/2) (tau/(1-tau))^(k/2) E[H_k(Z) f(end)]
    with H_k the probabilists' Hermite polynomial of the shared normal draw.
    """
    t = _tau_value(tau)
    if k < 1 or k != int(k):
        raise ValueError(f"derivative order must be a positive integer, got {k}")
    _, z, _, end = halfshift_point_draws(p, tau, x, rng, n)
    prefactor = (0.5 * p.rate * t / (1.0 - t)) ** (0.5 * k)
    values = prefactor * hermite(int(k), z) * np.asarray(f(end), dtype=float)
    return _mc_estimate(values)
