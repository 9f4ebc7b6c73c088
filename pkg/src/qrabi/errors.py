"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes, so new failure modes should subclass one
of the three leaves rather than ``QRabiError`` directly.
"""


class QRabiError(Exception):
    """Base class for all package errors."""


class DomainError(QRabiError, ValueError):
    """An argument lies outside the domain where a formula is valid."""


class ConvergenceError(QRabiError, ArithmeticError):
    """A series, quadrature or continuation did not reach its tolerance."""


class QuadratureError(ConvergenceError):
    """Simplex quadrature could not meet its error target."""


class ContinuationError(ConvergenceError):
    """Analytic continuation was requested outside its validated window."""
