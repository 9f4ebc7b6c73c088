"""Exponent building blocks of the heat-kernel series.

All functions accept the ordered simplex point ``mu`` either as a single
tuple ``(mu_1, ..., mu_lam)`` or as an ``(N, lam)`` array of points, and
return a scalar or an ``(N,)`` array accordingly.  The convention
``mu_0 = 0`` is built in; callers never pass it.

Differences of hyperbolic functions that cancel as t -> 0 are rewritten as
products of sinh, e.g. cosh a - cosh b = 2 sinh((a+b)/2) sinh((a-b)/2), so the
exponents stay accurate for small |t|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "ModelParams",
    "normalize_parity",
    "check_heat_domain",
    "check_omega_domain",
    "check_real_time",
    "theta",
    "theta_coefficients",
    "xi",
    "psi",
    "theta_bar",
    "xi_bar",
    "base_exponent",
    "mehler_prefactor",
]

SQRT2 = math.sqrt(2.0)
SINGULAR_GUARD = 1e-3


@dataclass(frozen=True)
class ModelParams:
    """Coupling ``g`` and level splitting ``delta``; the mode frequency is 1.

    ``delta`` may be negative: several identities relate the model at
    Delta and -Delta, and the formulas are polynomial in Delta.
    """

    g: float
    delta: float

    def __post_init__(self):
        if not (np.isfinite(self.g) and np.isfinite(self.delta)):
            raise DomainError("g and delta must be finite")
        if self.g < 0:
            raise DomainError("coupling g must be nonnegative")
        object.__setattr__(self, "g", float(self.g))
        object.__setattr__(self, "delta", float(self.delta))

    def flipped(self) -> "ModelParams":
        return ModelParams(self.g, -self.delta)


_PARITY_ALIASES = {
    "+": "+", "plus": "+", "p": "+", 1: "+", "1": "+", "+1": "+",
    "-": "-", "minus": "-", "m": "-", -1: "-", "-1": "-",
    "full": "full", "rabi": "full", None: "full",
}


def normalize_parity(parity) -> str:
    """Map the accepted spellings of a parity tag onto '+', '-' or 'full'."""
    key = parity.lower() if isinstance(parity, str) else parity
    try:
        return _PARITY_ALIASES[key]
    except (KeyError, TypeError):
        raise DomainError(f"unknown parity {parity!r}") from None


# --- domain checks ------------------------------------------------------------

def check_heat_domain(t) -> complex:
    """Reject t on the cuts {a + i pi n : a <= 0}."""
    t = complex(t)
    if not np.isfinite(t):
        raise DomainError("t must be finite")
    n = t.imag / math.pi
    if t.real <= 0 and abs(n - round(n)) < 1e-12:
        raise DomainError(f"t={t} lies on a cut of the heat-kernel domain")
    return t


def check_omega_domain(w) -> complex:
    w = complex(w)
    if not (w.real > 0 or abs(w) < math.pi):
        raise DomainError(f"w={w} outside Re w > 0 union |w| < pi")
    return w


def check_real_time(t, guard: float = SINGULAR_GUARD) -> float:
    if np.iscomplexobj(t) and np.imag(t) != 0:
        raise DomainError("propagator time must be real")
    t = float(np.real(t))
    k = round(t / math.pi)
    if abs(t - k * math.pi) < guard:
        raise DomainError(f"t={t} within {guard} of the singular set pi*Z")
    return t


# --- helpers ------------------------------------------------------------------

def _as_points(mu, lam: int) -> tuple[np.ndarray, bool]:
    """Return (N, lam+1) array with the mu_0 = 0 column prepended."""
    arr = np.asarray(mu, dtype=float)
    single = arr.ndim <= 1
    arr = arr.reshape(1, -1) if single else arr
    if arr.shape[1] != lam:
        raise DomainError(f"expected {lam} simplex coordinates, got {arr.shape[1]}")
    if lam and (np.any(np.diff(arr, axis=1) < -1e-14) or arr.min() < -1e-14 or arr.max() > 1 + 1e-14):
        raise DomainError("mu must satisfy 0 <= mu_1 <= ... <= mu_lam <= 1")
    m = np.concatenate([np.zeros((arr.shape[0], 1)), arr], axis=1)
    return m, single


def _out(v, single):
    return v[0] if single else v


def _alt_cosh_sum(m: np.ndarray, t, shift: float = 0.0) -> np.ndarray:
    """sum_{gamma=0}^{lam} (-1)^gamma cosh(t (shift - m_gamma)), pairwise-stable."""
    lam = m.shape[1] - 1
    u = shift - m
    total = np.zeros(m.shape[0], dtype=np.result_type(t, float))
    npairs = (lam + 1) // 2
    if npairs:
        a = u[:, 0 : 2 * npairs : 2]
        b = u[:, 1 : 2 * npairs : 2]
        # cosh(ta) - cosh(tb) = 2 sinh(t(a+b)/2) sinh(t(a-b)/2)
        total = total + np.sum(2.0 * np.sinh(t * (a + b) / 2) * np.sinh(t * (a - b) / 2), axis=1)
    if lam % 2 == 0:
        total = total + np.cosh(t * u[:, lam])
    return total


# --- exponents ------------------------------------------------------------------

def theta_coefficients(lam: int, mu, t):
    """(A, B) with theta_lam = g * (x A + y B); linear in x and y.

    Returned without the factor g so that callers can reuse them.
    """
    m, single = _as_points(mu, lam)
    odd = lam % 2
    sgn = -1.0 if odd else 1.0
    sh = np.sinh(t)
    coth_half = 1.0 / np.tanh(t / 2)
    ax = _alt_cosh_sum(m, t, shift=1.0)  # sum (-1)^g cosh(t(1-m_g))
    by = _alt_cosh_sum(m, t, shift=0.0)  # sum (-1)^g cosh(t m_g)
    A = 2 * SQRT2 * np.cosh(t) / sh * odd - SQRT2 * coth_half + 2 * SQRT2 * sgn / sh * ax
    B = -2 * SQRT2 / sh * odd + SQRT2 * coth_half - 2 * SQRT2 * sgn / sh * by
    return _out(A, single), _out(B, single)


def theta(lam: int, mu, x, y, t, p: ModelParams):
    """theta_lam(x, y, mu, t) for t in the heat domain."""
    t = check_heat_domain(t)
    A, B = theta_coefficients(lam, mu, t)
    return p.g * (x * A + y * B)


def _xi_raw(lam: int, m: np.ndarray, t, g2: float):
    if lam == 0:
        return np.zeros(m.shape[0], dtype=np.result_type(t, float))
    sh = np.sinh(t)
    sgn = -1.0 if lam % 2 else 1.0
    first = -8.0 * g2 / sh * np.sinh(t * (1 - m[:, lam]) / 2) ** 2 * sgn * _alt_cosh_sum(m, t)
    # A_beta = cosh(t(m_{b+1}-1)) - cosh(t(m_b-1)), beta = 0..lam-1
    lo, hi = m[:, :-1], m[:, 1:]
    Ab = 2.0 * np.sinh(t * (hi + lo - 2) / 2) * np.sinh(t * (hi - lo) / 2)
    # B_alpha = cosh(t m_a) - cosh(t m_{a+1}), alpha = 0..lam-1
    Ba = -2.0 * np.sinh(t * (lo + hi) / 2) * np.sinh(t * (hi - lo) / 2)
    # C_beta = sum over alpha < beta with beta - alpha odd
    par = np.arange(lam) % 2
    even_part = np.where(par == 0, Ba, 0)
    odd_part = np.where(par == 1, Ba, 0)
    cum_even = np.cumsum(even_part, axis=1) - even_part
    cum_odd = np.cumsum(odd_part, axis=1) - odd_part
    C = np.where(par == 0, cum_odd, cum_even)
    second = -4.0 * g2 / sh * np.sum(Ab * C, axis=1)
    return first + second


def xi(lam: int, mu, t, p: ModelParams):
    """xi_lam(mu, t); xi_0 := 0."""
    t = check_heat_domain(t)
    m, single = _as_points(mu, lam)
    return _out(_xi_raw(lam, m, t, p.g**2), single)


def psi(lam: int, mu, t, sign, p: ModelParams):
    """psi^pm_lam = (4 g^2 / sinh t) [sum (-1)^gamma f(t(1/2 - mu_gamma))]^2.

    f = sinh for sign '-', cosh for sign '+'.
    """
    t = check_heat_domain(t)
    m, single = _as_points(mu, lam)
    s = normalize_parity(sign)
    if s == "-":
        u = 0.5 - m
        alt = np.sum(np.sinh(t * u) * (-1.0) ** np.arange(lam + 1), axis=1)
    elif s == "+":
        alt = _alt_cosh_sum(m, t, shift=0.5)
    else:
        raise DomainError("psi needs sign '+' or '-'")
    return _out(4.0 * p.g**2 / np.sinh(t) * alt**2, single)


def base_exponent(lam: int, mu, t, p: ModelParams, with_xi: bool = True):
    """Parameter-only part of the lam-th exponent.

    lam = 0:   -2 g^2 tanh(t/2)
    lam odd:   -2 g^2 tanh(t/2) + xi_lam
    lam even:  -2 g^2 coth(t/2) + 4 g^2 cosh(t(1-mu_lam))/sinh t + xi_lam,
               with the two singular terms combined as
               g^2 (8 sinh^2(t(1-mu_lam)/2) - 4 sinh^2(t/2)) / sinh t.
    """
    m, single = _as_points(mu, lam)
    g2 = p.g**2
    if lam % 2:
        base = np.full(m.shape[0], -2.0 * g2 * np.tanh(t / 2), dtype=np.result_type(t, float))
    elif lam == 0:
        base = np.full(1, -2.0 * g2 * np.tanh(t / 2), dtype=np.result_type(t, float))
    else:
        base = g2 * (8.0 * np.sinh(t * (1 - m[:, lam]) / 2) ** 2 - 4.0 * np.sinh(t / 2) ** 2) / np.sinh(t)
    if with_xi:
        base = base + _xi_raw(lam, m, t, g2)
    return _out(base, single)


# --- circular (Wick-rotated) forms ----------------------------------------------

def _circular_time(t) -> float:
    if np.iscomplexobj(t) and np.imag(t) != 0:
        raise DomainError("circular forms need real t")
    t = float(np.real(t))
    if math.sin(t) == 0 or t == 0:
        raise DomainError("t on the singular set pi*Z")
    return t


def _alt_cos_sum(m, t, shift=0.0):
    lam = m.shape[1] - 1
    return np.sum(np.cos(t * (shift - m)) * (-1.0) ** np.arange(lam + 1), axis=1)


def theta_bar(lam: int, mu, x, y, t, p: ModelParams):
    """Circular form of theta_lam; equals theta(lam, mu, x, y, i t)."""
    t = _circular_time(t)
    m, single = _as_points(mu, lam)
    odd = lam % 2
    sgn = -1.0 if odd else 1.0
    isin = 1j * math.sin(t)
    val = (
        2 * SQRT2 * p.g / isin * (x * math.cos(t) - y) * odd
        + 1j * SQRT2 * p.g * (x - y) / math.tan(t / 2)
        + 2 * SQRT2 * p.g * sgn / isin * (x * _alt_cos_sum(m, t, 1.0) - y * _alt_cos_sum(m, t, 0.0))
    )
    return _out(val, single)


def xi_bar(lam: int, mu, t, p: ModelParams):
    """Circular form of xi_lam; equals xi(lam, mu, i t)."""
    t = _circular_time(t)
    m, single = _as_points(mu, lam)
    if lam == 0:
        return _out(np.zeros(m.shape[0], dtype=complex), single)
    g2 = p.g**2
    isin = 1j * math.sin(t)
    sgn = -1.0 if lam % 2 else 1.0
    first = 8.0 * g2 / isin * np.sin(t * (1 - m[:, lam]) / 2) ** 2 * sgn * _alt_cos_sum(m, t)
    second = 0.0
    for beta in range(lam):
        a_b = np.cos(t * (m[:, beta + 1] - 1)) - np.cos(t * (m[:, beta] - 1))
        for alpha in range(beta - 1, -1, -2):
            second = second + a_b * (np.cos(t * m[:, alpha]) - np.cos(t * m[:, alpha + 1]))
    return _out(first - 4.0 * g2 / isin * second, single)


# --- Mehler prefactor -------------------------------------------------------------

def mehler_prefactor(x, y, t, p: ModelParams, rotated: bool = False):
    """K_0(x, y, g, t), or U_0(x, y, g, t) when ``rotated``.

    Both use the principal branch of the square root; U_0(t) = K_0(i t).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    g2 = p.g**2
    if rotated:
        t = _circular_time(t)
        s, c = math.sin(t), math.cos(t)
        pref = np.exp(1j * t * (g2 + 0.5)) / np.sqrt(2j * math.pi * s)
        return pref * np.exp(-((x * x + y * y) * c - 2 * x * y) / (2j * s))
    t = check_heat_domain(t)
    if t.imag == 0:
        tr = t.real
        sh = math.sinh(tr)
        val = math.exp(tr * (g2 + 0.5)) / math.sqrt(2 * math.pi * sh) * np.exp(
            -((x * x + y * y) * math.cosh(tr) - 2 * x * y) / (2 * sh)
        )
        return val
    sh = np.sinh(t)
    return np.exp(t * (g2 + 0.5)) / np.sqrt(2 * np.pi * sh) * np.exp(-((x * x + y * y) * np.cosh(t) - 2 * x * y) / (2 * sh))
