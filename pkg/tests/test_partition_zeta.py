import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.special import zeta as hurwitz

from qrabi.errors import ContinuationError, DomainError
from qrabi.fock_oracle import oracle_partition
from qrabi.kernel_core import ModelParams
from qrabi.partition_zeta import (
    omega,
    omega_odd,
    partition,
    partition_parity,
    rb_polynomial,
    spectral_determinant,
    zeta_contour,
)

P0 = ModelParams(0.0, 0.4)


def test_omega_at_origin(p_main):
    assert omega(0.0, p_main) == 2.0
    assert omega_odd(0.0, p_main) == 0.0


@pytest.mark.parametrize("beta", [0.5, 1.0])
def test_partition_vs_oracle(p_main, beta):
    z, tail = oracle_partition(beta, 300, p_main)
    assert abs(partition(beta, p_main) - z) < 1e-10 * z + tail


def test_parity_partitions_sum_and_match_oracle(p_main):
    beta = 1.0
    zp = partition_parity(beta, "+", p_main)
    zm = partition_parity(beta, "-", p_main)
    assert abs(zp + zm - partition(beta, p_main)) < 1e-12
    for par, val in (("+", zp), ("-", zm)):
        z, tail = oracle_partition(beta, 300, p_main, par)
        assert abs(val - z) < 1e-10 * z + tail


def test_literal_prefactor_is_off_by_known_factor(p_main):
    beta = 0.8
    ratio = partition(beta, p_main, literal=True) / partition(beta, p_main)
    assert ratio == pytest.approx(1 / (1 + math.exp(-beta)), rel=1e-12)


def test_partition_domain(p_main):
    with pytest.raises(DomainError):
        partition(0.0, p_main)


def test_rb_low_orders():
    assert str(rb_polynomial(0)) == "1"
    assert str(rb_polynomial(1)) == "tau - g2 - 1/2"
    assert rb_polynomial(2)(2.5, 0.7, 0.4) == pytest.approx(2.5**2 - 2 * 2.5 * 0.49 + 0.49**2 - 2.5 + 0.49 + 0.16 + 1 / 6)


def test_rb_bernoulli_degeneration():
    bern = [Fraction(1), Fraction(-1, 2), Fraction(1, 6), Fraction(0), Fraction(-1, 30)]
    for k, b in enumerate(bern):
        const = rb_polynomial(k).poly.substitute({"tau": 0, "g2": 0, "D": 0})
        assert const.terms.get((0, 0, 0), Fraction(0)) == b


@pytest.mark.parametrize("parity", ["full", "+", "-"])
def test_rb_tau_derivative(parity):
    # the exact identity satisfied by the generating function
    for k in range(6):
        lhs = rb_polynomial(k + 1, parity).poly.derivative("tau")
        assert lhs == rb_polynomial(k, parity).poly * (k + 1)


def test_rb_parity_sum_and_flip():
    for k in range(5):
        plus = rb_polynomial(k, "+")
        minus = rb_polynomial(k, "-")
        for tau, g, d in ((0.3, 0.7, 0.4), (2.0, 1.1, -0.6)):
            assert plus(tau, g, d) + minus(tau, g, d) == pytest.approx(2 * rb_polynomial(k)(tau, g, d), abs=1e-12)
            assert plus(tau, g, -d) == pytest.approx(minus(tau, g, d), abs=1e-12)


def test_rb_order_cap():
    with pytest.raises(DomainError):
        rb_polynomial(12, kmax=10)


def test_zeta_uncoupled_matches_hurwitz():
    tau, s = 1.3, 2.5
    full = hurwitz(s, tau - 0.4) + hurwitz(s, tau + 0.4)
    assert zeta_contour(s, tau, P0) == pytest.approx(full, rel=1e-9)
    # H_+ at g = 0 has levels n + 0.4 (n even) and n - 0.4 (n odd)
    plus = 2.0**-s * (hurwitz(s, (tau + 0.4) / 2) + hurwitz(s, (tau + 0.6) / 2))
    assert zeta_contour(s, tau, P0, method="+") == pytest.approx(plus, rel=1e-9)


def test_determinant_refuses_divergent_region(p_main):
    with pytest.raises(ContinuationError):
        spectral_determinant(-0.6, p_main, "+")
