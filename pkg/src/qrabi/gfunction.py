"""Braak G-functions of the parity Hamiltonians and eigenvalue extraction.

With x = lambda + g^2 and

    f_n(x) = 2g + (n - x + Delta^2/(x - n)) / (2g),
    n K_n = f_{n-1} K_{n-1} - K_{n-2},   K_0 = 1, K_1 = f_0,

the G-functions are G_pm(x) = sum_n K_n(x) (1 -+ Delta/(x - n)) g^n.  They have
simple poles at x = N in Z>=0; the complete G-function
calG_pm(x) = G_pm(x) / Gamma(-x) is entire and its zeros are exactly the
shifted eigenvalues x = lambda + g^2 of H_pm.

Near an integer N we never form G itself.  With eps = x - N the rescaled
coefficients K~_n = eps K_n (n >= N) satisfy the same recurrence, except
that the step into n = N + 1 uses eps f_N = eps (2g - eps/(2g)) + Delta^2/(2g),
which is regular at eps = 0.  That yields eps G(x) without cancellation, and
calG = eps G * (-1)^(N+1) Gamma(1 + x) sinc(eps).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np
from scipy import special
from scipy.optimize import brentq

from .errors import ConvergenceError, DomainError
from .kernel_core import ModelParams, normalize_parity
from .numerics.special import reciprocal_gamma

__all__ = [
    "GCoeffs",
    "EigenvalueRecord",
    "coeff_K",
    "g_function",
    "constraint_K",
    "g_exceptional",
    "residue_at",
    "complete_g",
    "find_eigenvalues",
]

NMAX = 200
POLE_GUARD = 1e-3
SMALL_RUN = 5


@dataclass(frozen=True)
class GCoeffs:
    x: float
    K: np.ndarray
    params: ModelParams


@dataclass(frozen=True)
class EigenvalueRecord:
    value: float
    parity: str
    classification: str  # "regular", "Juddian" or "non-Juddian exceptional"
    residual: float


def _require_g(p: ModelParams):
    if p.g <= 0:
        raise DomainError("G-functions need g > 0")


def _parity_sign(parity) -> float:
    par = normalize_parity(parity)
    if par == "full":
        raise DomainError("G-functions are defined per parity ('+' or '-')")
    return 1.0 if par == "+" else -1.0


def _f(n: int, x: float, p: ModelParams) -> float:
    return 2 * p.g + (n - x + p.delta**2 / (x - n)) / (2 * p.g)


def coeff_K(x: float, nmax: int, p: ModelParams) -> GCoeffs:
    """K_0 .. K_nmax at x; x must avoid the integers 0..nmax-1 used by f_n."""
    _require_g(p)
    x = float(x)
    for n in range(nmax):
        if x == n:
            raise DomainError(f"x={x} is a pole of f_{n}")
    K = np.empty(nmax + 1)
    K[0] = 1.0
    if nmax >= 1:
        K[1] = _f(0, x, p)
    for n in range(2, nmax + 1):
        K[n] = (_f(n - 1, x, p) * K[n - 1] - K[n - 2]) / n
    return GCoeffs(x, K, p)


def _sum_tail(terms_iter, tol: float, nmax: int, start_total: float = 0.0) -> float:
    total = start_total
    run = 0
    n = -1
    for n, term in terms_iter:
        total += term
        if abs(term) <= tol * max(abs(total), 1e-300):
            run += 1
            if run >= SMALL_RUN:
                return total
        else:
            run = 0
        if not math.isfinite(total):
            break
    raise ConvergenceError(f"G-series not converged by n={n} (cap {nmax})")


def g_function(x: float, parity, p: ModelParams, tol: float = 1e-16, nmax: int = NMAX,
               guard: float = POLE_GUARD) -> float:
    """G_pm(x); x must stay at least ``guard`` away from the nonnegative integers.

    Closer than the default 1e-3 the Delta/(x - n) term cancels badly; a
    smaller ``guard`` accepts that loss knowingly (e.g. for limit checks).
    """
    _require_g(p)
    sign = _parity_sign(parity)
    x = float(x)
    if x > -0.5 and abs(x - round(x)) < guard:
        raise DomainError(f"x={x} within {guard} of a pole; use complete_g or residue_at")

    def terms():
        km2, km1 = 0.0, 1.0
        gn = 1.0
        for n in range(nmax + 1):
            if n == 0:
                k = 1.0
            else:
                k = (_f(n - 1, x, p) * km1 - km2) / n
                km2, km1 = km1, k
            yield n, k * (1 - sign * p.delta / (x - n)) * gn
            gn *= p.g

    return _sum_tail(terms(), tol, nmax)


def _k_at_integer(N: int, upto: int, p: ModelParams, start: str) -> np.ndarray:
    """Recurrence at x = N.

    ``start="zero"``: K_0 = 1, ... K_N (all f_n(N), n < N, are finite).
    ``start="restart"``: K_N = 0, K_{N+1} = 1 and onwards.
    """
    x = float(N)
    K = np.zeros(upto + 1)
    if start == "zero":
        K[0] = 1.0
        if upto >= 1:
            K[1] = _f(0, x, p) if N >= 1 else 0.0
        for n in range(2, upto + 1):
            K[n] = (_f(n - 1, x, p) * K[n - 1] - K[n - 2]) / n
        return K
    K[N + 1] = 1.0
    for n in range(N + 2, upto + 1):
        K[n] = (_f(n - 1, x, p) * K[n - 1] - K[n - 2]) / n
    return K


def constraint_K(N: int, p: ModelParams) -> float:
    """K_N(N; g, Delta); its zeros in (g, Delta) give the Juddian points."""
    _require_g(p)
    if N < 0:
        raise DomainError("N must be nonnegative")
    if N == 0:
        return 1.0
    return float(_k_at_integer(N, N, p, "zero")[N])


def g_exceptional(N: int, parity, p: ModelParams, tol: float = 1e-16, nmax: int = NMAX) -> float:
    """G^(N)_pm(g, Delta) = -+2(N+1)/Delta + sum_{n>N} K_n(N) (1 -+ Delta/(N - n)) g^(n-N-1).

    K_n(N) restarts the recurrence at K_N = 0, K_{N+1} = 1.  The signs are
    the ones for which residue_at reproduces the actual residue of G_pm at
    x = N, and they give G^(N)_-(g, Delta) = G^(N)_+(g, -Delta).
    """
    _require_g(p)
    sign = _parity_sign(parity)
    if p.delta == 0:
        raise DomainError("G^(N) is singular at Delta = 0")
    x = float(N)

    def terms():
        km2, km1 = 0.0, 1.0
        yield N + 1, km1 * (1 - sign * p.delta / (N - (N + 1)))
        gp = p.g
        for n in range(N + 2, N + 1 + nmax):
            k = (_f(n - 1, x, p) * km1 - km2) / n
            km2, km1 = km1, k
            yield n, k * (1 - sign * p.delta / (N - n)) * gp
            gp *= p.g

    return _sum_tail(terms(), tol, nmax, start_total=-sign * 2 * (N + 1) / p.delta)


def residue_at(N: int, parity, p: ModelParams) -> float:
    """Res_{x=N} G_pm = Delta^2 g^N K_N(N) G^(N)_pm / (2(N+1))."""
    _require_g(p)
    _parity_sign(parity)
    if p.delta == 0:
        return 0.0
    kn = constraint_K(N, p)
    if kn == 0.0:
        return 0.0
    return p.delta**2 * p.g**N / (2 * (N + 1)) * kn * g_exceptional(N, parity, p)


def _eps_g(x: float, N: int, sign: float, p: ModelParams, tol: float, nmax: int) -> float:
    """(x - N) G_pm(x) through the rescaled recurrence; exact for any x, regular at x = N."""
    eps = x - N
    total = 0.0
    km2, km1 = 0.0, 0.0
    gn = 1.0
    # n < N: ordinary coefficients, scaled by eps at the end of the sum
    head = 0.0
    for n in range(N):
        k = 1.0 if n == 0 else (_f(n - 1, x, p) * km1 - km2) / n
        km2, km1 = km1, k
        head += k * (1 - sign * p.delta / (x - n)) * gn
        gn *= p.g
    kN = 1.0 if N == 0 else (_f(N - 1, x, p) * km1 - km2) / N
    total = eps * head + kN * (eps - sign * p.delta) * gn
    # rescaled: Kt_N = eps K_N, Kt_{N-1} = eps K_{N-1}
    kt_prev, kt = eps * km1, eps * kN
    eps_fN = eps * (2 * p.g - eps / (2 * p.g)) + p.delta**2 / (2 * p.g)
    kt_next = (eps_fN * kN - kt_prev) / (N + 1)
    kt_prev, kt = kt, kt_next
    gn *= p.g
    run = 0
    for n in range(N + 1, N + 1 + nmax):
        if n > N + 1:
            k_new = (_f(n - 1, x, p) * kt - kt_prev) / n
            kt_prev, kt = kt, k_new
        term = kt * (1 - sign * p.delta / (x - n)) * gn
        total += term
        gn *= p.g
        if abs(term) <= tol * max(abs(total), 1e-300):
            run += 1
            if run >= SMALL_RUN:
                return total
        else:
            run = 0
    raise ConvergenceError("rescaled G-series not converged")


def complete_g(x: float, parity, p: ModelParams, tol: float = 1e-16, nmax: int = NMAX,
               switch: float = POLE_GUARD) -> float:
    """calG_pm(x) = G_pm(x) / Gamma(-x), finite for every real x."""
    _require_g(p)
    sign = _parity_sign(parity)
    x = float(x)
    N = int(round(x))
    if N >= 0 and abs(x - N) < switch:
        eps = x - N
        eg = _eps_g(x, N, sign, p, tol, nmax)
        return eg * (-1) ** (N + 1) * special.gamma(1 + x) * float(np.sinc(eps))
    return g_function(x, parity, p, tol, nmax) * float(reciprocal_gamma(-x))


def find_eigenvalues(parity, x_window: Sequence[float], p: ModelParams, grid_step: float = 0.01,
                     tol: float = 1e-10, exceptional_tol: float = 1e-8) -> List[EigenvalueRecord]:
    """Zeros of calG_pm in [x_lo, x_hi], reported as eigenvalues lambda = x - g^2.

    Sign changes of the entire function calG on a uniform grid are refined
    by Brent's method to ``tol`` in x.  A zero within ``exceptional_tol`` of
    an integer N is exceptional: Juddian if |K_N(N)| < exceptional_tol.
    """
    _require_g(p)
    par = normalize_parity(parity)
    _parity_sign(par)
    lo, hi = map(float, x_window)
    if not hi > lo:
        raise DomainError("empty x window")
    n = max(2, int(math.ceil((hi - lo) / grid_step)) + 1)
    xs = np.linspace(lo, hi, n)
    # keep grid points off the integers so exceptional zeros show up as sign changes
    xs = np.where(np.abs(xs - np.round(xs)) < 1e-9, xs + 1e-7, xs)

    def fun(x):
        return complete_g(x, par, p)

    vals = np.array([fun(x) for x in xs])
    out = []
    for i in range(n - 1):
        a, b, fa, fb = xs[i], xs[i + 1], vals[i], vals[i + 1]
        if fa == 0.0:
            root = a
        elif fa * fb < 0:
            root = brentq(fun, a, b, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=200)
        else:
            continue
        N = int(round(root))
        if N >= 0 and abs(root - N) < exceptional_tol:
            kind = "Juddian" if abs(constraint_K(N, p)) < exceptional_tol else "non-Juddian exceptional"
        else:
            kind = "regular"
        out.append(EigenvalueRecord(root - p.g**2, par, kind, abs(fun(root))))
    return out
