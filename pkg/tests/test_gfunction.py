import numpy as np
import pytest

from qrabi.errors import DomainError
from qrabi.fock_oracle import parity_matrix, spectrum
from qrabi.gfunction import (
    complete_g,
    constraint_K,
    find_eigenvalues,
    g_exceptional,
    g_function,
    residue_at,
)
from qrabi.kernel_core import ModelParams


@pytest.mark.parametrize("par", ["+", "-"])
def test_zeros_match_oracle(p_main, par):
    ref = spectrum(parity_matrix(300, par, p_main)).values[:6]
    found = find_eigenvalues(par, (ref[0] + p_main.g**2 - 0.3, ref[5] + p_main.g**2 + 0.2), p_main)
    got = np.array([r.value for r in found])
    assert got.size == 6
    assert np.max(np.abs(got - ref)) < 1e-9


def test_flip_identity(p_main):
    q = p_main.flipped()
    for x in np.linspace(-0.9, 5.9, 35):
        assert g_function(x, "-", p_main) == g_function(x, "+", q)
    for N in range(4):
        assert g_exceptional(N, "-", p_main) == g_exceptional(N, "+", q)


@pytest.mark.parametrize("par", ["+", "-"])
@pytest.mark.parametrize("N", [0, 1, 2])
def test_residue_matches_limit(p_main, par, N):
    # (x - N) G(x) -> Res as x -> N; Richardson removes the O(eps) term
    v = {e: e * g_function(N + e, par, p_main, guard=0.0) for e in (1e-4, 1e-5)}
    lim = (10 * v[1e-5] - v[1e-4]) / 9
    assert abs(lim - residue_at(N, par, p_main)) < 1e-7 * max(1.0, abs(lim))


def test_complete_g_is_continuous_across_switch(p_main):
    for N in (1, 3):
        for side in (-1, 1):
            x = N + side * 1.5e-3
            near = complete_g(x, "+", p_main, switch=2e-3)  # rescaled route
            far = complete_g(x, "+", p_main, switch=1e-3)  # direct route
            assert abs(near - far) < 1e-9 * max(1.0, abs(far))


def test_juddian_point(p_judd):
    assert abs(constraint_K(1, p_judd)) < 1e-14
    for par in ("+", "-"):
        assert abs(residue_at(1, par, p_judd)) < 1e-14
        recs = find_eigenvalues(par, (0.5, 1.5), p_judd)
        judd = [r for r in recs if r.classification == "Juddian"]
        assert len(judd) == 1
        assert abs(judd[0].value - (1 - p_judd.g**2)) < 1e-8


def test_domain_errors(p_main):
    with pytest.raises(DomainError):
        g_function(2.0, "+", p_main)
    with pytest.raises(DomainError):
        g_function(0.5, "full", p_main)
    with pytest.raises(DomainError):
        g_function(0.5, "+", ModelParams(0.0, 0.4))
    with pytest.raises(DomainError):
        g_exceptional(1, "+", ModelParams(0.7, 0.0))
