import numpy as np
import pytest

from qrabi.errors import DomainError
from qrabi.fock_oracle import oracle_heat_kernel
from qrabi.heat_propagator import (
    evolve_state,
    heat_kernel,
    heat_kernel_parity,
    kernel_grid,
    propagator,
    propagator_parity,
)

PTS = [(0.3, -0.5), (-1.2, 0.8), (1.7, 1.1)]


@pytest.mark.parametrize("t", [0.4, 1.3])
def test_kernel_vs_oracle(p_main, t):
    for x, y in PTS:
        K = heat_kernel(x, y, t, p_main)
        ref = oracle_heat_kernel(x, y, t, 300, p_main)
        assert np.max(np.abs(K.entries - ref)) < 1e-8
        assert K.error_estimate < 1e-8


@pytest.mark.parametrize("par", ["+", "-"])
def test_parity_kernel_vs_oracle(p_main, par):
    for x, y in PTS:
        v = heat_kernel_parity(x, y, 0.9, par, p_main)
        assert abs(v - oracle_heat_kernel(x, y, 0.9, 300, p_main, par)) < 1e-8


def test_kernel_symmetry(p_main):
    xs = np.array([-0.7, 0.2, 1.4])
    K, _, _ = kernel_grid(xs, xs, 0.6, p_main)
    assert np.allclose(K, np.transpose(K, (1, 0, 3, 2)), atol=1e-12)


def test_general_complex_route_agrees_on_real_axis(p_main):
    a = heat_kernel(0.4, -0.9, 0.7, p_main).entries
    b = heat_kernel(0.4, -0.9, 0.7 + 0j, p_main, general=True).entries
    assert np.max(np.abs(a - b)) < 1e-12


def test_propagator_is_rotated_kernel(p_main):
    for t in (0.5, 2.2):
        a = propagator(0.4, -0.9, t, p_main).entries
        b = heat_kernel(0.4, -0.9, 1j * t, p_main, general=True).entries
        assert np.max(np.abs(a - b)) < 1e-10


def test_propagator_parity_is_rotated_parity_kernel(p_main):
    a = propagator_parity(0.4, -0.9, 0.8, "+", p_main)
    b = heat_kernel_parity(0.4, -0.9, 0.8j, "+", p_main)
    assert a == b


def test_short_time_norm_conservation(p_main):
    st = evolve_state(lambda y: np.exp(-((y - 0.5) ** 2) / 2), 0.3, p_main, L=8.0, n=241, parity="+")
    assert st.norm_drift < 1e-6
    assert st.values.shape == (241,)


def test_domain_errors(p_main):
    with pytest.raises(DomainError):
        propagator(0.0, 0.0, np.pi, p_main)
    with pytest.raises(DomainError):
        heat_kernel(0.0, 0.0, -1.0, p_main)
    with pytest.raises(DomainError):
        evolve_state(lambda y: np.exp(-y * y), 0.5, p_main, n=101)
