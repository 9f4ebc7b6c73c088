import math

import numpy as np
import pytest
from scipy.special import zeta as hurwitz

from qrabi.errors import DomainError
from qrabi.fock_oracle import (
    counting,
    full_matrix,
    hermite_state,
    oracle_heat_kernel,
    oracle_partition,
    oracle_zeta,
    parity_matrix,
    spectrum,
)
from qrabi.kernel_core import ModelParams


def test_parity_spectra_merge_to_full(p_main):
    full = spectrum(full_matrix(200, p_main)).values[:40]
    both = np.sort(np.concatenate([spectrum(parity_matrix(200, s, p_main)).values[:30] for s in "+-"]))[:40]
    assert np.max(np.abs(full - both)) < 1e-10


def test_uncoupled_spectrum():
    p = ModelParams(0.0, 0.4)
    vals = spectrum(full_matrix(50, p)).values[:6]
    assert np.allclose(vals, [-0.4, 0.4, 0.6, 1.4, 1.6, 2.4])


def test_displaced_oscillator():
    # Delta = 0: two copies of the ladder n - g^2
    p = ModelParams(0.7, 0.0)
    vals = spectrum(parity_matrix(300, "+", p)).values[:10]
    assert np.allclose(vals, np.arange(10) - 0.49, atol=1e-12)


def test_hermite_normalization():
    x = np.linspace(-15, 15, 4001)
    for n in (0, 1, 7, 40):
        f = hermite_state(n, x)
        assert abs(np.trapezoid(f * f, x) - 1) < 1e-10


def test_heat_kernel_harmonic_limit():
    # g = Delta = 0: H = a^dag a, so each spin carries e^{t/2} times the Mehler kernel
    p = ModelParams(0.0, 0.0)
    x, y, t = 0.4, -0.3, 0.7
    K = oracle_heat_kernel(x, y, t, 120, p)
    mehler = (math.exp(-(((x * x + y * y) * math.cosh(t) - 2 * x * y) / (2 * math.sinh(t))))
              / math.sqrt(2 * math.pi * math.sinh(t))) * math.exp(t / 2)
    assert np.allclose(K, mehler * np.eye(2), atol=1e-12)


def test_partition_and_zeta_at_zero_coupling():
    p = ModelParams(0.0, 0.0)
    z, tail = oracle_partition(1.0, 200, p)
    assert abs(z - 2 / (1 - math.exp(-1))) < 1e-12 + tail
    assert abs(oracle_zeta(2.0, 0.5, 200, p) - 2 * hurwitz(2.0, 0.5)) < 1e-12


def test_counting_beyond_trust_raises(p_main):
    spec = spectrum(parity_matrix(100, "+", p_main))
    with pytest.raises(DomainError):
        counting(500, spec)
    assert counting(10, spec) == int(np.sum(spec.values <= 10))
    assert counting(spec.values[3], spec) == 4
