"""Heat kernels, propagators and wavepacket evolution for the Rabi model.

The lam-th term of every series is an integral over the ordered lam-simplex
of exp(P_lam(mu)) times cosh or sinh of theta_lam(x, y, mu).  Since theta is
linear in (x, y), theta = g (x A(mu) + y B(mu)), one set of quadrature nodes
serves every coordinate pair: the integral becomes a weighted sum of
exp(+-g x A) exp(+-g y B), i.e. a matrix product when evaluating on a grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConvergenceError, DomainError
from .kernel_core import (
    ModelParams,
    base_exponent,
    check_heat_domain,
    check_real_time,
    mehler_prefactor,
    normalize_parity,
    theta_coefficients,
)
from .numerics.quadrature import DEFAULT_SCHEME, QuadratureScheme, simplex_rule

__all__ = [
    "KernelMatrix",
    "heat_kernel",
    "heat_kernel_parity",
    "propagator",
    "propagator_parity",
    "kernel_grid",
    "evolve_state",
    "EvolvedState",
]

LAM_CAP = 40


@dataclass(frozen=True)
class KernelMatrix:
    """2x2 kernel value; rows/columns ordered (spin up, spin down)."""

    entries: np.ndarray
    terms_used: int
    tail_estimate: np.ndarray = field(repr=False)
    quad_error: float = 0.0

    def __post_init__(self):
        if not np.all(np.isfinite(self.entries)):
            raise ConvergenceError("kernel entries are not finite")

    def __getitem__(self, idx):
        return self.entries[idx]

    @property
    def error_estimate(self) -> float:
        return float(np.max(self.tail_estimate)) + self.quad_error


def _lambda_moments(lam, t, p, xs, ys, scheme, rotated, parity_sign=None):
    """Integrals over the lam-simplex of exp(P) exp(s1 g x A) exp(s2 g y B).

    Returns a dict keyed by (s1, s2) in {+1, -1}^2 with arrays of shape
    (len(xs), len(ys)), plus a quadrature error estimate from the
    differences with a coarser rule (zero for lam = 0).
    """
    rule = simplex_rule(lam, scheme)
    tt = 1j * t if rotated else t
    out = {}
    nodes = rule.nodes
    A, B = theta_coefficients(lam, nodes, tt)
    P = base_exponent(lam, nodes, tt, p)
    A = np.atleast_1d(A)
    B = np.atleast_1d(B)
    P = np.atleast_1d(P) * np.ones_like(A)
    w = rule.weights * np.exp(P)
    gx = p.g * np.asarray(xs, dtype=float)[:, None] * A[None, :]
    gy = p.g * np.asarray(ys, dtype=float)[:, None] * B[None, :]
    ex = {+1: np.exp(gx), -1: np.exp(-gx)}
    ey = {+1: np.exp(gy), -1: np.exp(-gy)}
    for s1 in (+1, -1):
        for s2 in (+1, -1):
            out[(s1, s2)] = (ex[s1] * w) @ ey[s2].T
    return out


def _chunks(n, size):
    for i in range(0, n, size):
        yield slice(i, min(n, i + size))


def _moments_chunked(lam, t, p, xs, ys, scheme, rotated, pairs=("cc", "ss")):
    """cosh/sinh moments, chunking over nodes to bound memory.

    Returns C = int e^P cosh(theta), S = int e^P sinh(theta) on the x-by-y grid.
    """
    rule = simplex_rule(lam, scheme)
    tt = 1j * t if rotated else t
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    C = np.zeros((xs.size, ys.size), dtype=complex)
    S = np.zeros_like(C)
    budget = max(1, int(4e7 // max(1, xs.size + ys.size)))
    for sl in _chunks(rule.size, budget):
        nodes = rule.nodes[sl]
        A, B = theta_coefficients(lam, nodes, tt)
        P = base_exponent(lam, nodes, tt, p)
        A = np.atleast_1d(A)
        B = np.atleast_1d(B)
        w = rule.weights[sl] * np.exp(np.atleast_1d(P) * np.ones_like(A))
        ex = np.exp(p.g * xs[:, None] * A[None, :])
        ey = np.exp(p.g * ys[:, None] * B[None, :])
        exm = np.exp(-p.g * xs[:, None] * A[None, :])
        eym = np.exp(-p.g * ys[:, None] * B[None, :])
        pp = (ex * w) @ ey.T
        mm = (exm * w) @ eym.T
        C += 0.5 * (pp + mm)
        S += 0.5 * (pp - mm)
    return C, S


def _sum_series(term, tol, lam_cap=LAM_CAP, start=0, step=1):
    """Sum term(lam) for lam = start, start+step, ... with the two-small-terms rule."""
    total = None
    small = 0
    mags = []
    lam = start
    for _ in range(lam_cap):
        val = term(lam)
        total = val if total is None else total + val
        mag = float(np.max(np.abs(val)))
        scale = float(np.max(np.abs(total)))
        mags.append(mag)
        small = small + 1 if (mag <= tol * max(scale, 1e-300) or mag == 0) else 0
        if small >= 2:
            break
        lam += step
    else:
        raise ConvergenceError(f"lambda series not converged after {lam_cap} terms")
    if len(mags) >= 2 and 0 < mags[-1] < mags[-2]:
        r = mags[-1] / mags[-2]
        tail = mags[-1] * r / (1 - r)
    else:
        tail = mags[-1]
    return total, len(mags), tail


def kernel_grid(xs, ys, t, p: ModelParams, tol: float = 1e-12, rotated: bool = False,
                scheme: QuadratureScheme = DEFAULT_SCHEME):
    """Full 2x2 kernel on the grid xs x ys; returns (array (2,2,nx,ny), terms, tail).

    ``rotated`` evaluates the propagator U(x, y, t) = K(x, y, i t).
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    tt = 1j * t if rotated else t
    k0 = mehler_prefactor(xs[:, None], ys[None, :], t, p, rotated=rotated)
    tdelta = tt * p.delta

    def term(lam):
        C, S = _moments_chunked(lam, t, p, xs, ys, scheme, rotated)
        c = tdelta**lam
        sgn = -1.0 if lam % 2 else 1.0
        return c * np.stack([np.stack([sgn * C, -sgn * S]), np.stack([-S, C])])

    total, used, tail = _sum_series(term, tol)
    return k0 * total, used, tail * float(np.max(np.abs(k0)))


def _kernel_point(x, y, t, p, tol, rotated, scheme):
    vals, used, tail = kernel_grid([x], [y], t, p, tol, rotated, scheme)
    ent = vals[:, :, 0, 0]
    if not rotated and np.isreal(t):
        ent = ent.real
    return KernelMatrix(ent, used, np.full((2, 2), tail))


def heat_kernel(x: float, y: float, t, p: ModelParams, tol: float = 1e-12,
                scheme: QuadratureScheme = DEFAULT_SCHEME, general: bool = False) -> KernelMatrix:
    """K_Rabi(x, y, t) for t in the heat-kernel domain (complex allowed).

    Purely imaginary t is routed through the circular-function series unless
    ``general`` is set, in which case the hyperbolic series is evaluated
    directly at complex t (an independent route used to test the rotation).
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    t = check_heat_domain(t)
    if general:
        pass
    elif t.imag == 0:
        t = t.real
        if t <= 0:
            raise DomainError("real t must be positive")
        return _kernel_point(x, y, t, p, tol, False, scheme)
    elif t.real == 0:
        return _kernel_point(x, y, t.imag, p, tol, True, scheme)
    # general complex time: theta is still linear in (x, y)
    k0 = mehler_prefactor(x, y, t, p)
    def term(lam):
        rule = simplex_rule(lam, scheme)
        A, B = theta_coefficients(lam, rule.nodes, t)
        P = base_exponent(lam, rule.nodes, t, p)
        th = p.g * (x * np.atleast_1d(A) + y * np.atleast_1d(B))
        w = rule.weights * np.exp(np.atleast_1d(P) * np.ones_like(th))
        C, S = np.dot(w, np.cosh(th)), np.dot(w, np.sinh(th))
        sgn = -1.0 if lam % 2 else 1.0
        return (t * p.delta) ** lam * np.array([[sgn * C, -sgn * S], [-S, C]])
    total, used, tail = _sum_series(term, tol)
    return KernelMatrix(k0 * total, used, np.full((2, 2), tail * abs(k0)))


def _parity_grid(xs, ys, t, parity, p, tol, rotated, scheme):
    """K_pm on a grid: even sub-series at (x, y), odd sub-series at (x, -y)."""
    sign = 1.0 if normalize_parity(parity) == "+" else -1.0
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    tt = 1j * t if rotated else t
    k0 = mehler_prefactor(xs[:, None], ys[None, :], t, p, rotated=rotated)
    k0m = mehler_prefactor(xs[:, None], -ys[None, :], t, p, rotated=rotated)
    td = tt * p.delta

    def even(lam):
        C, S = _moments_chunked(lam, t, p, xs, ys, scheme, rotated)
        return td**lam * (C - S)  # Phi^- : exp(... - theta)

    def odd(lam):
        C, S = _moments_chunked(lam, t, p, xs, -ys, scheme, rotated)
        return td**lam * (C + S)  # Phi^+ at (x, -y)

    ev, n1, t1 = _sum_series(even, tol, start=0, step=2)
    if p.delta == 0:
        od, n2, t2 = np.zeros_like(ev), 0, 0.0
    else:
        od, n2, t2 = _sum_series(odd, tol, start=1, step=2)
    val = k0 * ev - sign * k0m * od
    tail = t1 * float(np.max(np.abs(k0))) + t2 * float(np.max(np.abs(k0m)))
    return val, n1 + n2, tail


def heat_kernel_parity(x: float, y: float, t, parity, p: ModelParams, tol: float = 1e-12,
                       scheme: QuadratureScheme = DEFAULT_SCHEME, return_error: bool = False):
    """<x| exp(-t H_pm) |y> for real t > 0 (or purely imaginary t)."""
    t = check_heat_domain(t)
    if t.imag == 0 and t.real > 0:
        val, used, tail = _parity_grid([x], [y], t.real, parity, p, tol, False, scheme)
        v = float(val[0, 0].real)
    elif t.real == 0:
        val, used, tail = _parity_grid([x], [y], t.imag, parity, p, tol, True, scheme)
        v = complex(val[0, 0])
    else:
        raise DomainError("parity kernel implemented for real or imaginary t")
    return (v, tail) if return_error else v


def propagator(x: float, y: float, t: float, p: ModelParams, tol: float = 1e-12,
               scheme: QuadratureScheme = DEFAULT_SCHEME) -> KernelMatrix:
    """U_Rabi(x, y, t), the kernel of exp(-i t H), from the circular-function series."""
    t = check_real_time(t)
    return _kernel_point(x, y, t, p, tol, True, scheme)


def propagator_parity(x: float, y: float, t: float, parity, p: ModelParams, tol: float = 1e-12,
                      scheme: QuadratureScheme = DEFAULT_SCHEME, return_error: bool = False):
    t = check_real_time(t)
    val, used, tail = _parity_grid([x], [y], t, parity, p, tol, True, scheme)
    v = complex(val[0, 0])
    return (v, tail) if return_error else v


@dataclass(frozen=True)
class EvolvedState:
    grid: np.ndarray
    values: np.ndarray  # (2, n) for the full model, (n,) for a parity
    norm: float
    norm_drift: float
    terms_used: int


EVOLVE_SCHEME = QuadratureScheme(order=16, budget=2**14, qmc_points=2**12)


def evolve_state(initial, t: float, p: ModelParams, L: float = 10.0, n: int = 801, parity="full",
                 tol: float = 1e-12, scheme: QuadratureScheme = EVOLVE_SCHEME,
                 drift_threshold: Optional[float] = 1e-4) -> EvolvedState:
    """psi(x, t) = int U(x, y, t) psi_0(y) dy on the uniform grid [-L, L] with n points.

    ``initial`` is either a callable of y (returning shape (n,) for a parity or
    (2, n) for the full model) or the sampled array itself.  The integral
    uses the trapezoid rule, which is spectrally accurate for wavepackets
    that vanish at the grid ends.  The initial state is normalized first and
    the norm drift is reported; drift above ``drift_threshold`` raises.
    """
    t = check_real_time(t)
    grid = np.linspace(-L, L, n)
    h = grid[1] - grid[0]
    psi0 = np.asarray(initial(grid) if callable(initial) else initial, dtype=complex)
    which = normalize_parity(parity)
    norm0 = math.sqrt(float(np.sum(np.abs(psi0) ** 2) * h))
    psi0 = psi0 / norm0
    if which == "full":
        if psi0.shape != (2, n):
            raise DomainError("full-model state must have shape (2, n)")
        U, used, _ = kernel_grid(grid, grid, t, p, tol, rotated=True, scheme=scheme)
        out = np.einsum("abxy,by->ax", U, psi0) * h
    else:
        if psi0.shape != (n,):
            raise DomainError("parity state must have shape (n,)")
        U, used, _ = _parity_grid(grid, grid, t, which, p, tol, True, scheme)
        out = U @ psi0 * h
    norm = math.sqrt(float(np.sum(np.abs(out) ** 2) * h))
    drift = abs(norm - 1.0)
    if drift_threshold is not None and drift > drift_threshold:
        raise ConvergenceError(f"norm drift {drift:.2e} exceeds {drift_threshold:.1e}; refine the grid")
    return EvolvedState(grid, out, norm, drift, used)
