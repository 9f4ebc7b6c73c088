"""Partition functions, spectral zeta functions, determinants and Rabi-Bernoulli polynomials."""

from .omega import omega, omega_odd, omega_terms, partition, partition_parity
from .rb import RBPoly, omega_series, rb_polynomial
from .zeta import (
    ContinuationWarning,
    HankelContour,
    log_spectral_determinant,
    spectral_determinant,
    zeta_contour,
    zeta_mellin,
    zeta_prime_zero,
)

__all__ = [
    "omega",
    "omega_odd",
    "omega_terms",
    "partition",
    "partition_parity",
    "RBPoly",
    "omega_series",
    "rb_polynomial",
    "ContinuationWarning",
    "HankelContour",
    "zeta_contour",
    "zeta_mellin",
    "zeta_prime_zero",
    "log_spectral_determinant",
    "spectral_determinant",
]
