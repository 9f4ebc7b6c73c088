"""Exact multivariate polynomials and truncated Laurent series over Q.

Coefficients are :class:`fractions.Fraction`, so nothing here ever rounds.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Dict, Iterable, Mapping, Sequence, Tuple, Union

from ..errors import DomainError

__all__ = ["MultiPoly", "FormalSeries", "series_exp"]

Exponent = Tuple[int, ...]
Scalar = Union[int, Fraction]

RINGS = ("full", "parity", None)


class MultiPoly:
    """Sparse polynomial in named indeterminates with rational coefficients.

    ``ring`` tags the intended interpretation of the variable ``D``: ``full``
    means D stands for Delta**2 (ring Q[tau, g^2, Delta^2]), ``parity`` means
    D is Delta itself.  Arithmetic refuses to mix tags or variable lists.
    """

    __slots__ = ("variables", "terms", "ring")

    def __init__(self, terms: Mapping[Exponent, Scalar], variables: Sequence[str], ring=None):
        if ring not in RINGS:
            raise ValueError(f"unknown ring tag {ring!r}")
        self.variables = tuple(variables)
        self.ring = ring
        n = len(self.variables)
        clean: Dict[Exponent, Fraction] = {}
        for e, c in terms.items():
            e = tuple(e)
            if len(e) != n:
                raise ValueError("exponent length does not match variables")
            c = Fraction(c)
            if c:
                clean[e] = clean.get(e, Fraction(0)) + c
                if not clean[e]:
                    del clean[e]
        self.terms = dict(sorted(clean.items()))

    # construction helpers -------------------------------------------------
    @classmethod
    def constant(cls, c: Scalar, variables: Sequence[str], ring=None) -> "MultiPoly":
        return cls({(0,) * len(variables): c}, variables, ring)

    @classmethod
    def zero(cls, variables: Sequence[str], ring=None) -> "MultiPoly":
        return cls({}, variables, ring)

    @classmethod
    def var(cls, name: str, variables: Sequence[str], ring=None, power: int = 1) -> "MultiPoly":
        variables = tuple(variables)
        e = [0] * len(variables)
        e[variables.index(name)] = power
        return cls({tuple(e): 1}, variables, ring)

    # algebra --------------------------------------------------------------
    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.variables != self.variables:
                raise ValueError("polynomials over different variables")
            if other.ring != self.ring and None not in (other.ring, self.ring):
                raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")
            return other
        if isinstance(other, (int, Fraction)):
            return MultiPoly.constant(other, self.variables, self.ring)
        return NotImplemented

    def _ring_with(self, other: "MultiPoly"):
        return self.ring if self.ring is not None else other.ring

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, Fraction(0)) + c
        return MultiPoly(terms, self.variables, self._ring_with(other))

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly({e: -c for e, c in self.terms.items()}, self.variables, self.ring)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            return MultiPoly({e: c * other for e, c in self.terms.items()}, self.variables, self.ring)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms: Dict[Exponent, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, Fraction(0)) + c1 * c2
        return MultiPoly(terms, self.variables, self._ring_with(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        result = MultiPoly.constant(1, self.variables, self.ring)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.constant(other, self.variables, self.ring)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.variables == other.variables and self.terms == other.terms

    def __hash__(self):
        return hash((self.variables, tuple(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    # inspection -----------------------------------------------------------
    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * len(self.variables), Fraction(0))

    def degree(self, name: str) -> int:
        i = self.variables.index(name)
        return max((e[i] for e in self.terms), default=-1)

    def coefficient(self, exponents: Mapping[str, int]) -> Fraction:
        e = tuple(exponents.get(v, 0) for v in self.variables)
        return self.terms.get(e, Fraction(0))

    def derivative(self, name: str) -> "MultiPoly":
        i = self.variables.index(name)
        terms = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                terms[tuple(ne)] = c * e[i]
        return MultiPoly(terms, self.variables, self.ring)

    def substitute(self, values: Mapping[str, Scalar]) -> "MultiPoly":
        """Set some variables to rational values, keeping the variable list."""
        idx = {self.variables.index(k): Fraction(v) for k, v in values.items()}
        terms: Dict[Exponent, Fraction] = {}
        for e, c in self.terms.items():
            ne = list(e)
            for i, v in idx.items():
                c = c * v ** e[i]
                ne[i] = 0
            ne = tuple(ne)
            terms[ne] = terms.get(ne, Fraction(0)) + c
        return MultiPoly(terms, self.variables, self.ring)

    def evaluate(self, values: Mapping[str, complex]):
        total = 0
        for e, c in self.terms.items():
            term = c
            for v, k in zip(self.variables, e):
                if k:
                    term = term * values[v] ** k
            total = total + term
        return total

    def map_terms(self, fn: Callable[[Exponent, Fraction], Iterable[Tuple[Exponent, Fraction]]],
                  variables: Sequence[str], ring=None) -> "MultiPoly":
        terms: Dict[Exponent, Fraction] = {}
        for e, c in self.terms.items():
            for ne, nc in fn(e, c):
                terms[ne] = terms.get(ne, Fraction(0)) + nc
        return MultiPoly(terms, variables, ring)

    def coefficient_list(self) -> list:
        """``[(exponent dict, "p/q"), ...]`` in canonical order; lossless for JSON."""
        out = []
        for e, c in self.terms.items():
            out.append(({v: k for v, k in zip(self.variables, e) if k}, f"{c.numerator}/{c.denominator}"))
        return out

    def __repr__(self):
        return f"MultiPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items(), key=lambda kv: (-sum(kv[0]), [-k for k in kv[0]])):
            mono = "*".join(
                (v if k == 1 else f"{v}^{k}") for v, k in zip(self.variables, e) if k
            )
            if mono:
                coef = "" if c == 1 else ("-" if c == -1 else f"{c}*")
                parts.append(f"{coef}{mono}")
            else:
                parts.append(str(c))
        return " + ".join(parts).replace("+ -", "- ")


class FormalSeries:
    """Truncated Laurent series  sum_{n=min_degree}^{t_max} c_n t^n  over MultiPoly.

    Coefficients above ``t_max`` are unknown, not zero; every operation
    propagates the order to which its result is still exact.
    """

    __slots__ = ("min_degree", "coeffs", "t_max", "variables", "ring")

    def __init__(self, coeffs: Sequence[MultiPoly], min_degree: int, t_max: int, variables, ring=None):
        self.variables = tuple(variables)
        self.ring = ring
        self.min_degree = min_degree
        self.t_max = t_max
        n = t_max - min_degree + 1
        cs = list(coeffs)[: max(n, 0)]
        zero = MultiPoly.zero(self.variables, ring)
        cs += [zero] * (n - len(cs))
        self.coeffs = [c if isinstance(c, MultiPoly) else MultiPoly.constant(c, self.variables, ring) for c in cs]

    @classmethod
    def from_callable(cls, fn: Callable[[int], MultiPoly], min_degree: int, t_max: int, variables, ring=None):
        return cls([fn(n) for n in range(min_degree, t_max + 1)], min_degree, t_max, variables, ring)

    @classmethod
    def constant(cls, c, t_max: int, variables, ring=None):
        return cls([c], 0, t_max, variables, ring)

    def __getitem__(self, n: int) -> MultiPoly:
        if n > self.t_max:
            raise IndexError(f"coefficient {n} lies beyond the truncation order {self.t_max}")
        if n < self.min_degree:
            return MultiPoly.zero(self.variables, self.ring)
        return self.coeffs[n - self.min_degree]

    def pole_order(self) -> int:
        """Order of the pole at 0 (0 if the series is regular)."""
        for n in range(self.min_degree, 0):
            if self[n]:
                return -n
        return 0

    def _like(self, coeffs, min_degree, t_max):
        return FormalSeries(coeffs, min_degree, t_max, self.variables, self.ring)

    def __add__(self, other):
        if not isinstance(other, FormalSeries):
            other = FormalSeries.constant(other, self.t_max, self.variables, self.ring)
        lo = min(self.min_degree, other.min_degree)
        hi = min(self.t_max, other.t_max)
        return self._like([self[n] + other[n] for n in range(lo, hi + 1)], lo, hi)

    __radd__ = __add__

    def __neg__(self):
        return self._like([-c for c in self.coeffs], self.min_degree, self.t_max)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, MultiPoly)):
            return self._like([c * other for c in self.coeffs], self.min_degree, self.t_max)
        lo = self.min_degree + other.min_degree
        hi = min(self.t_max + other.min_degree, other.t_max + self.min_degree)
        out = []
        for n in range(lo, hi + 1):
            acc = MultiPoly.zero(self.variables, self.ring or other.ring)
            for i in range(self.min_degree, n - other.min_degree + 1):
                a = self[i]
                if a:
                    b = other[n - i]
                    if b:
                        acc = acc + a * b
            out.append(acc)
        return FormalSeries(out, lo, hi, self.variables, self.ring or other.ring)

    __rmul__ = __mul__

    def shift(self, k: int) -> "FormalSeries":
        """Multiply by t**k."""
        return self._like(self.coeffs, self.min_degree + k, self.t_max + k)

    def truncate(self, t_max: int) -> "FormalSeries":
        if t_max > self.t_max:
            raise ValueError("cannot extend a truncated series")
        return self._like(self.coeffs, self.min_degree, t_max)

    def divide_by_unit(self, other: "FormalSeries") -> "FormalSeries":
        """``self / other`` where ``other`` starts with the constant 1 (rationally, a unit)."""
        lead = other[0]
        if other.pole_order() or not lead.is_constant() or lead.constant_term() == 0:
            raise DomainError("divisor must be a unit power series with nonzero rational constant term")
        c0 = lead.constant_term()
        hi = min(self.t_max, other.t_max + self.min_degree)
        out = []
        for n in range(self.min_degree, hi + 1):
            acc = self[n]
            for k in range(1, n - self.min_degree + 1):
                acc = acc - other[k] * out[n - k - self.min_degree]
            out.append(acc / c0)
        return self._like(out, self.min_degree, hi)

    def substitute_poly(self, fn: Callable[[MultiPoly], MultiPoly], variables, ring=None) -> "FormalSeries":
        return FormalSeries([fn(c) for c in self.coeffs], self.min_degree, self.t_max, variables, ring)

    def __repr__(self):
        body = ", ".join(f"[{n}] {self[n]}" for n in range(self.min_degree, self.t_max + 1) if self[n])
        return f"FormalSeries({body} + O(t^{self.t_max + 1}))"


def series_exp(s: FormalSeries) -> FormalSeries:
    """exp of a series with no pole part and vanishing constant term.

    Uses n F_n = sum_k k s_k F_{n-k}, which stays inside Q[...] as long as
    the constant term is zero (exp of a nonzero constant is not rational).
    """
    if s.pole_order():
        raise DomainError(f"cannot exponentiate: pole of order {s.pole_order()}")
    if s[0]:
        raise DomainError("constant term must vanish for exact exponentiation")
    one = MultiPoly.constant(1, s.variables, s.ring)
    out = [one]
    for n in range(1, s.t_max + 1):
        acc = MultiPoly.zero(s.variables, s.ring)
        for k in range(1, n + 1):
            sk = s[k]
            if sk:
                acc = acc + sk * (out[n - k] * k)
        out.append(acc / n)
    return FormalSeries(out, 0, s.t_max, s.variables, s.ring)
