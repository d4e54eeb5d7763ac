"""Scalar special functions behind the closed-form gamma-interpolation formulas.

Everything here is pure, reentrant and numerically guarded: the modified
Bessel function I_nu is always handled in exponentially scaled (or log) form
so that the huge-argument regime cannot overflow, and the Kummer confluent
hypergeometric function 1F1 is returned log-scaled for the same reason.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _sp

__all__ = [
    "ConvergenceError",
    "LogScaledValue",
    "bessel_i_scaled",
    "log_bessel_i_scaled",
    "log_bessel_i",
    "kummer_1f1",
    "log_kummer_1f1",
    "log_gamma",
    "hermite",
]

_MAX_1F1_TERMS = 100_000


class ConvergenceError(RuntimeError):
    """A series failed to converge within its term budget."""


@dataclass(frozen=True)
class LogScaledValue:
    """A real number stored as ``sign * exp(log_magnitude)``.

    ``sign == 0`` encodes an exact zero (log_magnitude is then ``-inf``).
    Reconstruction through :meth:`value` cannot overflow for
    ``log_magnitude < ~709``; callers that combine several log-scaled factors
    should add the log magnitudes and exponentiate once.
    """

    log_magnitude: float
    sign: int

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or +1, got {self.sign}")
        if self.sign == 0 and not math.isinf(self.log_magnitude):
            raise ValueError("zero values must carry log_magnitude = -inf")

    @classmethod
    def zero(cls) -> "LogScaledValue":
        return cls(-math.inf, 0)

    def value(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_magnitude)


def _check_finite(name, x):
    if not math.isfinite(x):
        raise ValueError(f"{name} must be finite, got {x}")


def bessel_i_scaled(nu: float, z: float) -> float:
    """Exponentially scaled modified Bessel function ``exp(-z) * I_nu(z)``.

    Valid for ``nu >= -1/2`` and ``z >= 0``; the scaled form decays like
    ``1/sqrt(2 pi z)`` for large ``z`` and therefore never overflows.
    """
    _check_finite("nu", nu)
    _check_finite("z", z)
    if nu < -0.5:
        raise ValueError(f"order must satisfy nu >= -1/2, got {nu}")
    if z < 0.0:
        raise ValueError(f"argument must satisfy z >= 0, got {z}")
    if z == 0.0:
        return 1.0 if nu == 0.0 else 0.0
    out = float(_sp.ive(nu, z))
    if out == 0.0 and nu > 0.0:
        # ive underflowed (tiny z, larger nu): restore from the log form,
        # which may still underflow to 0.0 -- that is then the honest answer.
        lg = log_bessel_i(nu, z) - z
        out = math.exp(lg) if lg > -745.0 else 0.0
    return out


def log_bessel_i(nu: float, z: float) -> float:
    """``log I_nu(z)`` for ``nu >= -1/2``, ``z >= 0`` (``-inf`` where I_nu = 0)."""
    _check_finite("nu", nu)
    _check_finite("z", z)
    if nu < -0.5:
        raise ValueError(f"order must satisfy nu >= -1/2, got {nu}")
    if z < 0.0:
        raise ValueError(f"argument must satisfy z >= 0, got {z}")
    if z == 0.0:
        return 0.0 if nu == 0.0 else -math.inf
    v = float(_sp.ive(nu, z))
    if v > 0.0:
        return math.log(v) + z
    # Leading series term with two corrections; only reached when ive
    # underflows, i.e. z is small enough that the correction is ~exact.
    t = 0.25 * z * z
    corr = t / (nu + 1.0) * (1.0 + t / (2.0 * (nu + 2.0)))
    return nu * math.log(0.5 * z) - float(_sp.gammaln(nu + 1.0)) + math.log1p(corr)


def log_bessel_i_scaled(nu: float, z):
    """Vectorized ``log(exp(-z) * I_nu(z))`` over an array of arguments ``z``.

    Same domain as :func:`bessel_i_scaled`; the small-z underflow of
    ``scipy.special.ive`` is patched with the leading series term.
    """
    _check_finite("nu", nu)
    if nu < -0.5:
        raise ValueError(f"order must satisfy nu >= -1/2, got {nu}")
    z = np.asarray(z, dtype=float)
    if np.any(z < 0.0) or not np.all(np.isfinite(z)):
        raise ValueError("argument must satisfy z >= 0 and be finite")
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    with np.errstate(divide="ignore"):
        out = np.log(_sp.ive(nu, z))
    bad = ~np.isfinite(out)
    if np.any(bad):
        if nu == 0.0:
            out[bad & (z == 0.0)] = 0.0
            bad &= z > 0.0
        for i in np.nonzero(bad)[0]:
            out[i] = log_bessel_i(nu, float(z[i])) - z[i]
    return float(out[0]) if scalar else out


def kummer_1f1(a: float, b: float, z: float) -> LogScaledValue:
    """Kummer confluent hypergeometric function 1F1(a, b, z), log-scaled.

    Restricted to ``a > 0``, ``b > 0``, ``z >= 0`` where every series term is
    positive, so the direct series with compensated (Kahan) summation loses no
    precision to cancellation. The partial sum is rescaled whenever it grows
    past 1e250, which keeps the routine exact for arguments far beyond the
    overflow threshold of a plain float evaluation.
    """
    _check_finite("a", a)
    _check_finite("b", b)
    _check_finite("z", z)
    if b <= 0.0:
        raise ValueError(f"second parameter must satisfy b > 0, got {b}")
    if a <= 0.0:
        raise ValueError(f"first parameter must satisfy a > 0, got {a}")
    if z < 0.0:
        raise ValueError(f"argument must satisfy z >= 0, got {z}")
    if z == 0.0:
        return LogScaledValue(0.0, 1)

    total = 1.0
    term = 1.0
    comp = 0.0
    log_scale = 0.0
    n = 0
    while n < _MAX_1F1_TERMS:
        term *= (a + n) * z / ((b + n) * (n + 1.0))
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        n += 1
        if term <= total * 1e-17 and (a + n) * z < (b + n) * (n + 1.0):
            return LogScaledValue(log_scale + math.log(total), 1)
        if total > 1e250:
            log_scale += math.log(total)
            term /= total
            comp /= total
            total = 1.0
    raise ConvergenceError(
        f"1F1({a}, {b}, {z}) did not converge within {_MAX_1F1_TERMS} terms"
    )


def _log_1f1_asymptotic(a: float, b: float, z: float) -> float:
    """Large-z expansion log 1F1(a,b,z) ~ lgamma(b) - lgamma(a) + z
    + (a-b) log z + log sum_k (b-a)_k (1-a)_k / (k! z^k)."""
    total = 1.0
    term = 1.0
    for k in range(60):
        term *= (b - a + k) * (1.0 - a + k) / ((k + 1.0) * z)
        total += term
        if abs(term) < 1e-17 * abs(total):
            break
    else:
        raise ConvergenceError(f"1F1 asymptotic series stalled at z={z}")
    if total <= 0.0:
        raise ConvergenceError(f"1F1 asymptotic series lost positivity at z={z}")
    return (
        float(_sp.gammaln(b)) - float(_sp.gammaln(a)) + z + (a - b) * math.log(z)
        + math.log(total)
    )


def log_kummer_1f1(a: float, b: float, z: float) -> float:
    """log 1F1(a, b, z) for a, b > 0 and z >= 0.

    Direct series below z = 750, large-z expansion above (the series would
    need ~z terms there); both branches agree to ~1e-13 around the seam.
    """
    if z <= 750.0:
        return kummer_1f1(a, b, z).log_magnitude
    return _log_1f1_asymptotic(a, b, z)


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for ``x > 0``."""
    _check_finite("x", x)
    if x <= 0.0:
        raise ValueError(f"log_gamma requires x > 0, got {x}")
    return float(_sp.gammaln(x))


def hermite(k: int, z):
    """Probabilists' Hermite polynomial H_k(z) (monic convention).

    Three-term recurrence H_{k+1} = z H_k - k H_{k-1}; works elementwise on
    arrays. H_1(z) = z, H_2(z) = z^2 - 1, ...
    """
    if k != int(k) or k < 0:
        raise ValueError(f"degree must be a nonnegative integer, got {k}")
    z = np.asarray(z, dtype=float)
    h_prev = np.zeros_like(z)
    h = np.ones_like(z)
    for j in range(int(k)):
        h_prev, h = h, z * h - j * h_prev
    return float(h) if h.ndim == 0 else h
