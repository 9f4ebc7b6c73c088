import math
from fractions import Fraction

import numpy as np
import pytest

from qrabi.numerics import (
    FormalSeries,
    MultiPoly,
    QuadratureScheme,
    monomial_simplex_integral,
    reciprocal_gamma,
    series_exp,
    simplex_rule,
)
from qrabi.numerics.quadrature import gauss_simplex_rule

V = ("a", "b")


def test_multipoly_arithmetic_and_derivative():
    a = MultiPoly.var("a", V)
    b = MultiPoly.var("b", V)
    p = (a + b) * (a - b)
    assert p == a * a - b * b
    assert p.derivative("a") == a * 2
    assert (a * Fraction(1, 3)).substitute({"a": 3}) == MultiPoly.constant(1, V)


def test_multipoly_refuses_ring_mix():
    x = MultiPoly.var("a", V, "full")
    y = MultiPoly.var("a", V, "parity")
    with pytest.raises(ValueError):
        x + y


@pytest.mark.parametrize("exps", [(0,), (1,), (2, 0), (0, 3), (1, 1, 2)])
def test_monomial_integral_matches_quadrature(exps):
    rule = gauss_simplex_rule(len(exps), 12)
    num = np.sum(rule.weights * np.prod(rule.nodes ** np.array(exps), axis=1))
    assert abs(num - float(monomial_simplex_integral(exps))) < 1e-14


def test_simplex_volume():
    for d in range(1, 6):
        assert abs(simplex_rule(d).weights.sum() - 1 / math.factorial(d)) < 1e-13
    q = simplex_rule(8, QuadratureScheme(gauss_max_dim=6, qmc_points=2**10))
    assert q.kind == "qmc"
    assert abs(q.weights.sum() - 1 / math.factorial(8)) < 1e-15
    assert np.all(np.diff(q.nodes, axis=1) >= 0)


def test_series_exp_of_w():
    s = FormalSeries([0, 1], 0, 8, ())
    e = series_exp(s)
    assert e.t_max == 8
    for n in range(9):
        assert e[n] == MultiPoly.constant(Fraction(1, math.factorial(n)), ())
    with pytest.raises(IndexError):
        e[9]


def test_reciprocal_gamma_at_poles():
    assert reciprocal_gamma(0.0) == 0.0
    assert reciprocal_gamma(-3.0) == 0.0
    assert abs(reciprocal_gamma(0.5) - 1 / math.sqrt(math.pi)) < 1e-15
