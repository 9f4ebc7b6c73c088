"""Compiled weighted sums of exp(exponent) over simplex nodes for Omega.

Implements, node by node, the same exponent as
``base_exponent(lam) + psi(lam, sign)`` in :mod:`qrabi.kernel_core` (with
sign '-' for even lam and '+' for odd lam), fused into a single pass so no
(N, lam) temporaries are allocated.  The test-suite checks the two against
each other.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _exponent(m, lam, t, g2, sh, th_half, sh_half2):
    # m has lam + 1 entries with m[0] = 0
    odd = lam % 2
    sgn = -1.0 if odd else 1.0
    # sum_{gamma} (-1)^gamma cosh(t m_gamma), pairwise-stable
    alt = 0.0 * t
    npairs = (lam + 1) // 2
    for k in range(npairs):
        a = m[2 * k]
        b = m[2 * k + 1]
        alt += 2.0 * np.sinh(t * (a + b) / 2) * np.sinh(t * (a - b) / 2)
    if not odd:
        alt += np.cosh(t * m[lam])
    s1 = np.sinh(t * (1.0 - m[lam]) / 2)
    first = -8.0 * g2 / sh * s1 * s1 * sgn * alt
    # sum_beta A_beta C_beta with C_beta over alpha < beta, beta - alpha odd
    cum_even = 0.0 * t
    cum_odd = 0.0 * t
    second = 0.0 * t
    for beta in range(lam):
        lo = m[beta]
        hi = m[beta + 1]
        dh = np.sinh(t * (hi - lo) / 2)
        A = 2.0 * np.sinh(t * (hi + lo - 2.0) / 2) * dh
        B = -2.0 * np.sinh(t * (lo + hi) / 2) * dh
        if beta % 2 == 0:
            second += A * cum_odd
            cum_even += B
        else:
            second += A * cum_even
            cum_odd += B
    xi = first - 4.0 * g2 / sh * second
    if odd:
        base = -2.0 * g2 * th_half
        # psi^+: sum (-1)^gamma cosh(t(1/2 - m_gamma)), pairwise-stable
        acc = 0.0 * t
        for k in range(npairs):
            a = 0.5 - m[2 * k]
            b = 0.5 - m[2 * k + 1]
            acc += 2.0 * np.sinh(t * (a + b) / 2) * np.sinh(t * (a - b) / 2)
    else:
        base = g2 * (8.0 * s1 * s1 - 4.0 * sh_half2) / sh
        acc = 0.0 * t
        for k in range(lam + 1):
            term = np.sinh(t * (0.5 - m[k]))
            if k % 2:
                acc -= term
            else:
                acc += term
    ps = 4.0 * g2 / sh * acc * acc
    return base + xi + ps


@njit(cache=True)
def omega_sums(nodes, weights, groups, ngroups, t, g2):
    """Per-group sums of weights * exp(exponent) for one lam (= nodes.shape[1])."""
    n, lam = nodes.shape
    out = np.zeros(ngroups, dtype=np.complex128)
    sh = np.sinh(t)
    th_half = np.tanh(t / 2)
    shh = np.sinh(t / 2)
    sh_half2 = shh * shh
    m = np.zeros(lam + 1, dtype=np.float64)
    for i in range(n):
        for j in range(lam):
            m[j + 1] = nodes[i, j]
        e = _exponent(m, lam, t, g2, sh, th_half, sh_half2)
        out[groups[i]] += weights[i] * np.exp(e)
    return out
