import math

import numpy as np
import pytest

from qrabi.errors import DomainError
from qrabi.kernel_core import (
    ModelParams,
    base_exponent,
    check_heat_domain,
    check_omega_domain,
    check_real_time,
    normalize_parity,
    psi,
    theta,
    theta_bar,
    xi,
    xi_bar,
)
from qrabi.numerics import simplex_rule
from qrabi.partition_zeta._kernels import omega_sums


def test_params_validation():
    with pytest.raises(DomainError):
        ModelParams(-0.1, 0.4)
    with pytest.raises(DomainError):
        ModelParams(float("nan"), 0.4)
    assert ModelParams(0.7, -0.4).flipped() == ModelParams(0.7, 0.4)


@pytest.mark.parametrize("tag,want", [("plus", "+"), (-1, "-"), ("Rabi", "full"), (None, "full")])
def test_parity_aliases(tag, want):
    assert normalize_parity(tag) == want


def test_parity_rejects_unknown():
    with pytest.raises(DomainError):
        normalize_parity("up")


def test_domains():
    with pytest.raises(DomainError):
        check_heat_domain(-1 + 1j * math.pi)
    check_heat_domain(-1 + 1j)
    with pytest.raises(DomainError):
        check_omega_domain(-4.0)
    check_omega_domain(-3.0)
    with pytest.raises(DomainError):
        check_real_time(math.pi + 1e-5)
    with pytest.raises(DomainError):
        check_real_time(1j)


def test_lambda_zero_conventions(p_main):
    t = 0.8
    assert xi(0, (), t, p_main) == 0.0
    assert base_exponent(0, (), t, p_main) == pytest.approx(-2 * p_main.g**2 * math.tanh(t / 2))


def test_small_t_continuity(p_main):
    # the sinh-product forms stay finite and smooth as t -> 0
    mu = (0.2, 0.5, 0.9)
    vals = [base_exponent(3, mu, t, p_main) for t in (1e-6, 1e-7, 1e-8)]
    assert all(np.isfinite(vals))
    assert abs(vals[-1]) < 1e-6


@pytest.mark.parametrize("lam", [1, 2, 4])
def test_theta_and_xi_are_rotations(p_main, lam):
    # the circular forms equal the hyperbolic ones at imaginary time
    mu = (0.15, 0.4, 0.7, 0.95)[:lam]
    x, y, t = 0.3, -0.8, 0.9
    assert abs(theta(lam, mu, x, y, 1j * t, p_main) - theta_bar(lam, mu, x, y, t, p_main)) < 1e-13
    assert abs(xi(lam, mu, 1j * t, p_main) - xi_bar(lam, mu, t, p_main)) < 1e-13


@pytest.mark.parametrize("lam", [1, 2, 3, 4, 5])
@pytest.mark.parametrize("t", [0.7, 2.3, 0.9 + 0.4j])
def test_compiled_exponent_matches_reference(p_main, lam, t):
    rule = simplex_rule(lam)
    sign = "+" if lam % 2 else "-"
    ref_exp = base_exponent(lam, rule.nodes, t, p_main) + psi(lam, rule.nodes, t, sign, p_main)
    ref = np.sum(rule.weights * np.exp(ref_exp))
    groups = np.zeros(rule.size, dtype=np.int64)
    got = omega_sums(np.ascontiguousarray(rule.nodes), np.ascontiguousarray(rule.weights), groups, 1,
                     complex(t), p_main.g**2)[0]
    assert abs(got - ref) <= 1e-13 * max(1.0, abs(ref))
