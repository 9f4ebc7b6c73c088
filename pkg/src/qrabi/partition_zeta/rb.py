"""Exact Rabi-Bernoulli polynomials from the series expansion of Omega.

The generating functions are

    w Omega(w) e^(-tau w) / (1 - e^-w) = 2 sum_k (-1)^k RB_k w^k / k!,
    (w/2) [Omega/(1 - e^-w) -+ Omega_odd/(1 + e^-w)] e^(-tau w) = sum_k (-1)^k RB_k^pm w^k / k!.

Each simplex exponent is expanded as a power series in w whose coefficients
are polynomials in g^2 and the simplex coordinates.  The terms carrying
1/sinh(w) have numerators vanishing to second order, so the pole is removed
by a shift before exponentiating.  Simplex integrals of monomials are exact,
so the result lives in Q[tau, g^2, Delta^2] (full) or Q[tau, g^2, Delta]
(parity) with no rounding anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

from ..errors import DomainError
from ..kernel_core import normalize_parity
from ..numerics.polynomial import FormalSeries, MultiPoly, series_exp
from ..numerics.quadrature import monomial_simplex_integral

__all__ = ["RBPoly", "rb_polynomial", "omega_series", "RB_MAX_DEFAULT", "OUT_VARS"]

RB_MAX_DEFAULT = 10
OUT_VARS = ("tau", "g2", "D")


@dataclass(frozen=True)
class RBPoly:
    """RB_k as an exact polynomial; ``poly.ring`` says whether D means Delta^2 or Delta."""

    poly: MultiPoly
    k: int
    parity: str

    def __call__(self, tau, g, delta):
        d = delta**2 if self.poly.ring == "full" else delta
        return self.poly.evaluate({"tau": tau, "g2": g * g, "D": d})

    def __str__(self):
        return str(self.poly)


def _hyp(L: MultiPoly, n: int, odd: bool, variables):
    """sinh(w L) (odd) or cosh(w L) (even) as a series in w through w^n."""
    coeffs = []
    for j in range(n + 1):
        if (j % 2 == 1) == odd:
            coeffs.append(L**j / factorial(j))
        else:
            coeffs.append(MultiPoly.zero(variables))
    return FormalSeries(coeffs, 0, n, variables)


def _sinh(L, n, variables):
    return _hyp(L, n, True, variables)


def _cosh(L, n, variables):
    return _hyp(L, n, False, variables)


def _over_sinh(num: FormalSeries, n: int, variables):
    """num / sinh(w) through w^n, for num = O(w^2); the result is O(w)."""
    if num[0] or num[1]:
        raise DomainError("numerator does not vanish to second order; 1/sinh pole would survive")
    # sinh(w)/w = sum w^(2j) / (2j+1)!
    unit = FormalSeries([Fraction(1, factorial(j + 1)) if j % 2 == 0 else 0 for j in range(n + 2)],
                        0, n + 1, variables)
    q = num.shift(-1).truncate(n)
    q = FormalSeries(q.coeffs[1:], 0, n, variables)  # drop the (zero) w^-1 slot
    return q.divide_by_unit(unit)


@lru_cache(maxsize=None)
def _exponent_series(lam: int, n: int) -> FormalSeries:
    """Series in w (through w^n) of base + xi + psi for the lam-simplex term.

    Variables: g2 and m1..m_lam (m0 = 0).  Even lam pairs with psi^-, odd with
    psi^+, as in Omega and Omega_odd.
    """
    variables = ("g2",) + tuple(f"m{i}" for i in range(1, lam + 1))
    m = [MultiPoly.zero(variables)] + [MultiPoly.var(f"m{i}", variables) for i in range(1, lam + 1)]
    one = MultiPoly.constant(1, variables)
    G = MultiPoly.var("g2", variables)
    n1 = n + 1  # numerators are divided by sinh(w), which costs one order
    odd = lam % 2 == 1

    def S(L):
        return _sinh(L, n1, variables)

    def C(L):
        return _cosh(L, n1, variables)

    alt = FormalSeries.constant(0, n1, variables)
    for gam in range(lam + 1):
        term = C(m[gam])
        alt = alt + (term if gam % 2 == 0 else -term)
    s1 = S((one - m[lam]) * Fraction(1, 2))
    num = s1 * s1 * alt * (8 if odd else -8)
    # sum_beta A_beta C_beta
    cum = [FormalSeries.constant(0, n1, variables), FormalSeries.constant(0, n1, variables)]
    acc = FormalSeries.constant(0, n1, variables)
    for beta in range(lam):
        A = C(m[beta + 1] - one) - C(m[beta] - one)
        B = C(m[beta]) - C(m[beta + 1])
        acc = acc + A * cum[1 - beta % 2]
        cum[beta % 2] = cum[beta % 2] + B
    num = num - acc * 4
    if odd:
        inner = FormalSeries.constant(0, n1, variables)
        for gam in range(lam + 1):
            term = C(one * Fraction(1, 2) - m[gam])
            inner = inner + (term if gam % 2 == 0 else -term)
        num = num + inner * inner * 4
    else:
        inner = FormalSeries.constant(0, n1, variables)
        for gam in range(lam + 1):
            term = S(one * Fraction(1, 2) - m[gam])
            inner = inner + (term if gam % 2 == 0 else -term)
        num = num + inner * inner * 4
        sh = S(one * Fraction(1, 2))
        num = num + s1 * s1 * 8 - sh * sh * 4
    expo = _over_sinh(num, n, variables) * G
    if odd:
        # base exponent -2 g^2 tanh(w/2), with tanh(w/2) = (cosh w - 1) / sinh w
        tn = _over_sinh(C(one) - 1, n, variables)
        expo = expo - tn * (G * 2)
    return expo


def _integrate(p: MultiPoly, lam: int, variables_out):
    """Integrate the m-variables over the ordered lam-simplex; returns a polynomial in g2."""
    def fn(e, c):
        yield (e[0],), c * monomial_simplex_integral(e[1:])

    return p.map_terms(fn, ("g2",))


@lru_cache(maxsize=None)
def _simplex_coeffs(lam: int, n: int):
    """Coefficients (in g2) of w^j, j <= n, of the lam-simplex integral of exp(exponent)."""
    if lam == 0:
        return None
    ex = series_exp(_exponent_series(lam, n))
    return [_integrate(ex[j], lam, ("g2",)) for j in range(n + 1)]


def omega_series(order: int, odd: bool, ring: str):
    """Bracketed Omega (or Omega_odd) sum, without 2 e^(g^2 w), through w^order.

    Returns a FormalSeries over (tau, g2, D) in the requested ring.
    """
    out = [MultiPoly.zero(OUT_VARS, ring) for _ in range(order + 1)]
    if not odd:
        out[0] = MultiPoly.constant(1, OUT_VARS, ring)
    start = 1 if odd else 2
    for lam in range(start, order + 1, 2):
        if ring == "full":
            if lam % 2:
                raise DomainError("odd Delta powers do not live in the full ring")
            dpow = lam // 2
        else:
            dpow = lam
        coeffs = _simplex_coeffs(lam, order - lam)
        for j, cpoly in enumerate(coeffs):
            lifted = cpoly.map_terms(lambda e, c: [((0, e[0], dpow), c)], OUT_VARS, ring)
            out[lam + j] = out[lam + j] + lifted
    return FormalSeries(out, 0, order, OUT_VARS, ring)


def _exp_linear(a: MultiPoly, order: int, ring):
    """exp(a w) for a polynomial a (no w dependence)."""
    return FormalSeries([a**j / factorial(j) for j in range(order + 1)], 0, order, OUT_VARS, ring)


@lru_cache(maxsize=None)
def _rb_table(kmax: int, parity: str):
    ring = "full" if parity == "full" else "parity"
    n = kmax
    one = MultiPoly.constant(1, OUT_VARS, ring)
    tau = MultiPoly.var("tau", OUT_VARS, ring)
    g2 = MultiPoly.var("g2", OUT_VARS, ring)
    pref = _exp_linear(g2 - tau, n, ring)
    # w / (1 - e^-w) = 1 / ((1 - e^-w)/w),  (1 - e^-w)/w = sum (-1)^j w^j / (j+1)!
    denom = FormalSeries([Fraction((-1) ** j, factorial(j + 1)) for j in range(n + 1)], 0, n, OUT_VARS, ring)
    ev = pref.divide_by_unit(denom) * omega_series(n, False, ring) * 2
    if parity == "full":
        gen = ev * Fraction(1, 2)  # 2 e^(g^2 w) Omega-bracket / 2 = sum (-1)^k RB_k w^k/k!
    else:
        sign = 1 if parity == "+" else -1
        # w / (1 + e^-w) = w * (1/2) / (1 - w/2 + ...): (1 + e^-w)/2 = 1 + sum_{j>=1} (-1)^j w^j / (2 j!)
        half = FormalSeries([one] + [Fraction((-1) ** j, 2 * factorial(j)) for j in range(1, n + 1)],
                            0, n, OUT_VARS, ring)
        od = pref.divide_by_unit(half).shift(1).truncate(n) * Fraction(1, 2) * omega_series(n, True, ring) * 2
        gen = (ev - od * sign) * Fraction(1, 2)
    return [gen[k] * ((-1) ** k * factorial(k)) for k in range(n + 1)]


def rb_polynomial(k: int, parity="full", kmax: int = RB_MAX_DEFAULT) -> RBPoly:
    """k-th Rabi-Bernoulli polynomial, exactly; ``parity`` in {full, +, -}.

    The full version lives in Q[tau, g2, D] with D = Delta^2, the parity
    versions in Q[tau, g2, D] with D = Delta.
    """
    if k < 0:
        raise DomainError("k must be nonnegative")
    if k > kmax:
        raise DomainError(f"k={k} exceeds the configured maximum {kmax}; raise kmax explicitly")
    par = normalize_parity(parity)
    table = _rb_table(max(kmax, k), par)
    return RBPoly(table[k], k, par)
