"""Spectral zeta functions and zeta-regularized determinants.

zeta(s; tau) = sum_j (lambda_j + tau)^(-s) is evaluated two ways:

* Mellin:  (1/Gamma(s)) int_0^inf t^(s-1) h(t) dt,  Re s > 1,
* Hankel:  -Gamma(1-s)/(2 pi i) int_inf^(0+) (-w)^(s-1) h(w) dw,  all s,

with h(w) = Omega(w) e^(-tau w) / (1 - e^-w) for the full model and
h(w) = (1/2)[Omega(w)/(1-e^-w) -+ Omega_odd(w)/(1+e^-w)] e^(-tau w) for a
parity.  The Hankel contour is split into the circle |w| = r, traversed
counterclockwise from arg w = 0 to 2 pi, and the two rays; with the
principal branch of (-w)^(s-1) the rays combine into R(s)/Gamma(s) where
R(s) = int_r^inf rho^(s-1) h(rho) d rho.  Both routes share the ray part, so
they differ only in how the neighbourhood of the origin is handled.

Omega values are memoized per (model, node), so repeated calls with other
s or tau only pay for the exponential factors.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

from ..errors import ContinuationError, ConvergenceError, DomainError
from ..kernel_core import ModelParams, normalize_parity
from ..numerics.quadrature import DEFAULT_SCHEME, QuadratureScheme
from .omega import omega, omega_odd

__all__ = [
    "HankelContour",
    "zeta_mellin",
    "zeta_contour",
    "zeta_prime_zero",
    "spectral_determinant",
    "log_spectral_determinant",
    "ContinuationWarning",
]

EULER_GAMMA = float(np.euler_gamma)


class ContinuationWarning(UserWarning):
    """tau lies outside the window where the representation is validated."""


@dataclass(frozen=True)
class HankelContour:
    """Circle radius r (< pi), node counts, ray extent and the relative tail at which rays stop."""

    r: float = 1.0
    circle_nodes: int = 32
    panel_nodes: int = 12
    W: float = 128.0
    cutoff: float = 1e-30
    rel_tail: float = 1e-12

    def __post_init__(self):
        if not 0 < self.r < math.pi:
            raise DomainError("contour radius must satisfy 0 < r < pi")
        if self.W <= self.r:
            raise DomainError("ray cutoff W must exceed r")
        if self.circle_nodes < 4 or self.panel_nodes < 2:
            raise DomainError("too few contour nodes")

    def panels(self):
        """Panel edges r, 2r, 4r, ... up to W (doubling widths)."""
        edges = [self.r]
        while edges[-1] < self.W:
            edges.append(min(self.W, 2 * edges[-1]))
        return list(zip(edges[:-1], edges[1:]))


DEFAULT_CONTOUR = HankelContour()
OMEGA_TOL = 1e-12
OMEGA_TOL_CAP = 1e-3


def node_tolerance(w: complex) -> float:
    """Relative accuracy asked of Omega at a contour node.

    Far ray nodes carry weights that fall off like exp(-(tau + lambda_0) rho),
    so the tolerance is relaxed by a decade every 4 units of |w|.  The decay
    beats this relaxation whenever tau + lambda_0 > log(10)/4 ~ 0.58.
    """
    return min(OMEGA_TOL_CAP, OMEGA_TOL * 10 ** (max(abs(w) - 1.0, 0.0) / 4))


@lru_cache(maxsize=100_000)
def _omega_node(p: ModelParams, w: complex, scheme: QuadratureScheme, odd: bool) -> complex:
    fn = omega_odd if odd else omega
    return complex(fn(w, p, node_tolerance(w), scheme))


def _omega_values(w: np.ndarray, p, scheme, odd: bool) -> np.ndarray:
    return np.array([_omega_node(p, complex(wi), scheme, odd) for wi in w.ravel()]).reshape(w.shape)


def _h(w: np.ndarray, tau, p, which, scheme):
    """h(w) = Omega e^(-tau w)/(1 - e^-w), or its parity version, at each node."""
    w = np.asarray(w, dtype=complex)
    om = _omega_values(w, p, scheme, False)
    e = np.exp(-tau * w)
    if which == "full":
        return om * e / -np.expm1(-w)
    oo = _omega_values(w, p, scheme, True)
    sign = 1.0 if which == "+" else -1.0
    return 0.5 * (om / -np.expm1(-w) - sign * oo / (1 + np.exp(-w))) * e


def _check_tau(tau, p: ModelParams, allow_continuation: bool = False):
    tau = complex(tau)
    bound = abs(p.delta) + p.g**2
    if tau.real > bound:
        return tau
    if allow_continuation:
        return tau
    raise DomainError(f"need Re tau > |Delta| + g^2 = {bound:.6g}, got tau={tau}")


def _ray_integral(s, tau, p, which, contour: HankelContour, scheme, log_power: int = 0):
    """R(s) = int_r^W rho^(s-1) (log rho)^k h(rho) d rho with adaptive panel stopping.

    Returns (value, error): the error adds the Omega tolerance at each node,
    weighted by |f|, to the estimated exponential tail beyond the last panel.
    """
    x, wq = np.polynomial.legendre.leggauss(contour.panel_nodes)
    total = 0j
    err = 0.0
    for a, b in contour.panels():
        rho = 0.5 * (b - a) * x + 0.5 * (b + a)
        f = rho ** (s - 1) * _h(rho, tau, p, which, scheme)
        if log_power:
            f = f * np.log(rho) ** log_power
        if not np.all(np.isfinite(f)):
            raise ConvergenceError("ray integrand not finite")
        total += 0.5 * (b - a) * np.dot(wq, f)
        err += 0.5 * (b - a) * float(np.dot(wq, np.abs(f) * [node_tolerance(r) for r in rho]))
        # exponential tail beyond b, with the decay rate read off the last two nodes
        f1, f2 = abs(f[-2]), abs(f[-1])
        if f2 < f1:
            rate = math.log(f1 / f2) / (rho[-1] - rho[-2])
            tail = f2 / rate
            if tail <= contour.rel_tail * max(abs(total), 1e-300) or f2 < contour.cutoff:
                return total, err + tail
    raise ConvergenceError(
        f"ray integrand {abs(f[-1]):.2e} not negligible at W={contour.W}; "
        "tau too close to the edge of the convergence region"
    )


def _circle(s, tau, p, which, contour: HankelContour, scheme, derivative: bool = False):
    """C(s) = counterclockwise circle integral of (-w)^(s-1) h(w) dw, arg w in [0, 2 pi].

    With ``derivative`` also returns dC/ds (an extra log(-w) factor).
    """
    x, wq = np.polynomial.legendre.leggauss(contour.circle_nodes)
    phi = np.pi * (x + 1.0)
    wts = np.pi * wq
    r = contour.r
    w = r * np.exp(1j * phi)
    log_mw = math.log(r) + 1j * (phi - np.pi)  # principal log(-w)
    f = np.exp((s - 1) * log_mw) * _h(w, tau, p, which, scheme) * 1j * w
    C = np.dot(wts, f)
    err = float(np.dot(wts, np.abs(f))) * node_tolerance(r)
    if derivative:
        return C, np.dot(wts, f * log_mw), err
    return C, err


def _is_positive_integer(s, eps=1e-12):
    s = complex(s)
    return abs(s.imag) < eps and s.real > 1.5 and abs(s.real - round(s.real)) < eps


def _nonpositive_integer(s, eps=1e-14):
    s = complex(s)
    return abs(s.imag) < eps and s.real < 0.5 and abs(s.real - round(s.real)) < eps


def _real_if_possible(s, tau, val):
    if complex(s).imag == 0 and complex(tau).imag == 0:
        return float(val.real)
    return complex(val)


def _finish(s, tau, val, err, tol, return_error):
    if tol is not None and err > tol * max(1.0, abs(val)):
        raise ConvergenceError(f"zeta error estimate {err:.2e} exceeds tolerance {tol:.1e}")
    val = _real_if_possible(s, tau, val)
    return (val, err) if return_error else val


def zeta_contour(s, tau, p: ModelParams, contour: HankelContour = DEFAULT_CONTOUR, method="full",
                 scheme: QuadratureScheme = DEFAULT_SCHEME, allow_continuation: bool = False,
                 tol: float | None = 1e-6, return_error: bool = False):
    """Hankel-contour spectral zeta; defined for all s except s = 1.

    For s = 1 - k (k = 1, 2, ...) the rays cancel exactly and only the
    circle contributes.  Positive integers s >= 2 hit the poles of
    Gamma(1 - s) and must go through :func:`zeta_mellin`.  The error
    estimate propagates the Omega tolerances and the ray tail; it raises
    ConvergenceError if it exceeds ``tol`` (relative, or absolute below 1).
    """
    which = normalize_parity(method)
    tau = _check_tau(tau, p, allow_continuation)
    s = complex(s)
    if _is_positive_integer(s):
        raise DomainError(f"s={s.real:g} is a pole of Gamma(1-s); use zeta_mellin")
    if s == 1:
        raise DomainError("s = 1 is the pole of the zeta function")
    C, cerr = _circle(s, tau, p, which, contour, scheme)
    g1 = special.gamma(1 - s)
    val = -g1 * C / (2j * math.pi)
    err = abs(g1) * cerr / (2 * math.pi)
    if not _nonpositive_integer(s):
        R, rerr = _ray_integral(s, tau, p, which, contour, scheme)
        rg = special.rgamma(s)
        val += R * rg
        err += abs(rg) * rerr
    return _finish(s, tau, val, err, tol, return_error)


def zeta_mellin(s, tau, p: ModelParams, tol: float | None = 1e-6, method="full",
                scheme: QuadratureScheme = DEFAULT_SCHEME, contour: HankelContour = DEFAULT_CONTOUR,
                near_nodes: int = 20, return_error: bool = False):
    """Mellin-transform spectral zeta for Re s > 1 and tau > |Delta| + g^2.

    [0, r] uses Gauss-Jacobi with weight rho^(Re s - 2) applied to
    rho^(i Im s) * rho h(rho); [r, W] uses the shared ray panels.
    """
    which = normalize_parity(method)
    s = complex(s)
    if not s.real > 1:
        raise DomainError("zeta_mellin needs Re s > 1")
    tau = _check_tau(tau, p)
    r = contour.r
    x, wq = special.roots_jacobi(near_nodes, 0.0, s.real - 2.0)
    rho = 0.5 * r * (x + 1.0)
    wts = wq * (0.5 * r) ** (s.real - 1.0)
    q = rho * _h(rho, tau, p, which, scheme) * rho ** (1j * s.imag)
    near = np.dot(wts, q)
    nerr = float(np.dot(np.abs(wts), np.abs(q))) * node_tolerance(r)
    far, ferr = _ray_integral(s, tau, p, which, contour, scheme)
    rg = special.rgamma(s)
    return _finish(s, tau, (near + far) * rg, abs(rg) * (nerr + ferr), tol, return_error)


def zeta_prime_zero(tau, p: ModelParams, method="full", contour: HankelContour = DEFAULT_CONTOUR,
                    scheme: QuadratureScheme = DEFAULT_SCHEME, fd_check: bool = False,
                    allow_continuation: bool = False):
    """d/ds zeta(s; tau) at s = 0.

    zeta'(0) = -[gamma_E C(0) + C'(0)]/(2 pi i) + R(0), from differentiating
    -Gamma(1-s) C(s)/(2 pi i) + R(s)/Gamma(s).  With ``fd_check`` the value is
    compared with a Richardson-extrapolated central difference (h = 1e-3)
    and the discrepancy returned alongside.
    """
    which = normalize_parity(method)
    tau = _check_tau(tau, p, allow_continuation)
    C0, dC0, _ = _circle(0.0, tau, p, which, contour, scheme, derivative=True)
    R0, _ = _ray_integral(0.0, tau, p, which, contour, scheme)
    val = -(EULER_GAMMA * C0 + dC0) / (2j * math.pi) + R0
    if not fd_check:
        return complex(val)

    def z(s):
        return complex(zeta_contour(s, tau, p, contour, which, scheme, allow_continuation=True, tol=None))

    h = 1e-3
    d1 = (z(h) - z(-h)) / (2 * h)
    d2 = (z(h / 2) - z(-h / 2)) / h
    fd = (4 * d2 - d1) / 3
    return complex(val), abs(val - fd)


def _decay_edge(p: ModelParams, scheme, contour: HankelContour) -> float:
    """Estimate -lambda_0 from the growth of Omega on the far ray.

    Omega(t) ~ c exp(-lambda_0 t), so the log-slope between two far nodes
    approximates -lambda_0.  Used only to decide how far the ray integral
    can be continued in tau; never as a spectral result.
    """
    t1, t2 = 16.0, 24.0
    o1 = abs(_omega_node(p, complex(t1), scheme, False))
    o2 = abs(_omega_node(p, complex(t2), scheme, False))
    return math.log(o2 / o1) / (t2 - t1)


def log_spectral_determinant(tau, p: ModelParams, parity="full", contour: HankelContour = DEFAULT_CONTOUR,
                             scheme: QuadratureScheme = DEFAULT_SCHEME, margin: float = 0.5,
                             return_error: bool = False):
    """-zeta'(0; tau), the logarithm of the zeta-regularized product of (lambda_j + tau).

    Validated for Re tau > |Delta| + g^2.  Between that bound and the
    estimated edge of convergence of the ray integral (-lambda_0 plus
    ``margin``) the same integral is used with a :class:`ContinuationWarning`.
    Beyond that edge, which includes every zero of the determinant, a
    :class:`ContinuationError` is raised.  ``return_error`` adds the
    discrepancy with the finite-difference self-check as an error estimate.
    """
    tau = complex(tau)
    bound = abs(p.delta) + p.g**2
    if tau.real <= bound:
        edge = _decay_edge(p, scheme, contour) + margin
        if tau.real <= edge:
            raise ContinuationError(
                f"tau={tau.real:.6g} is outside the convergence region of the ray integral "
                f"(estimated edge {edge:.4g}); the determinant cannot be continued there"
            )
        warnings.warn(f"tau={tau} outside the validated window Re tau > {bound:.4g}", ContinuationWarning,
                      stacklevel=2)
    which = normalize_parity(parity)
    if return_error:
        val, err = zeta_prime_zero(tau, p, which, contour, scheme, fd_check=True, allow_continuation=True)
        return -val, err
    return -zeta_prime_zero(tau, p, which, contour, scheme, allow_continuation=True)


def spectral_determinant(tau, p: ModelParams, parity="full", contour: HankelContour = DEFAULT_CONTOUR,
                         scheme: QuadratureScheme = DEFAULT_SCHEME, return_error: bool = False):
    """exp(-zeta'(0; tau)): the regularized product of (lambda_j + tau); vanishes at tau = -lambda_j.

    The full determinant equals the product of the two parity determinants.
    """
    if return_error:
        logd, err = log_spectral_determinant(tau, p, parity, contour, scheme, return_error=True)
        val = np.exp(logd)
        return _real_if_possible(0.0, tau, val), abs(val) * err
    val = np.exp(log_spectral_determinant(tau, p, parity, contour, scheme))
    return _real_if_possible(0.0, tau, val)
