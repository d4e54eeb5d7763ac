"""Interpolation between an arbitrary positive law and a gamma target:
density and companion functions, entropy and Fisher functionals, Stein
kernels, and a harness that numerically verifies the identities and
inequalities they satisfy."""

from .measures import (
    AtomMixture,
    DensitySource,
    DiracAtom,
    GammaMixtureSource,
    GammaParams,
    GammaSource,
    SourceMeasure,
    gamma_entropy,
    gamma_log_pdf,
    gamma_pdf,
    gamma_quantile,
    gamma_score,
)
from .numerics import (
    DEFAULT_CONFIG,
    Estimate,
    NumericConfig,
    QuadratureError,
    derivative_fd,
    integrate_halfline,
    integrate_tail,
    ks_two_sample_quantile,
    mc_mean,
    stream,
    two_sample_ks,
)
from .path import PathSample, SmartPathModel, Tau, sample_convolution
from .specfun import (
    ConvergenceError,
    LogScaledValue,
    bessel_i_scaled,
    hermite,
    kummer_1f1,
    log_gamma,
)
from .verify import ALL_CHECK_NAMES, CheckReport, chebyshev_tau_grid, run_checks

__all__ = [
    "AtomMixture",
    "DensitySource",
    "DiracAtom",
    "GammaMixtureSource",
    "GammaParams",
    "GammaSource",
    "SourceMeasure",
    "gamma_entropy",
    "gamma_log_pdf",
    "gamma_pdf",
    "gamma_quantile",
    "gamma_score",
    "DEFAULT_CONFIG",
    "Estimate",
    "NumericConfig",
    "QuadratureError",
    "derivative_fd",
    "integrate_halfline",
    "integrate_tail",
    "ks_two_sample_quantile",
    "mc_mean",
    "stream",
    "two_sample_ks",
    "PathSample",
    "SmartPathModel",
    "Tau",
    "sample_convolution",
    "ConvergenceError",
    "LogScaledValue",
    "bessel_i_scaled",
    "hermite",
    "kummer_1f1",
    "log_gamma",
    "ALL_CHECK_NAMES",
    "CheckReport",
    "chebyshev_tau_grid",
    "run_checks",
]

__version__ = "0.1.0"
