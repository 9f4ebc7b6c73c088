"""Omega, Omega_odd and the partition functions built from them.

    Z(beta)      = Omega(beta) / (1 - e^-beta)
    Z_pm(beta)   = (1/2) [Omega/(1 - e^-beta) -+ Omega_odd/(1 + e^-beta)]
"""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np

from ..errors import ConvergenceError, DomainError
from ..kernel_core import ModelParams, base_exponent, check_omega_domain, normalize_parity, psi
from ..numerics.quadrature import DEFAULT_SCHEME, QuadratureScheme, gauss_simplex_rule, simplex_rule
from ..numerics.series import SeriesValue
from ._kernels import omega_sums

__all__ = ["omega", "omega_odd", "partition", "partition_parity", "omega_terms"]

LAM_CAP = 60
ORDER_LADDER = (4, 6, 9, 12, 16, 20)
QMC_START = 2**10


def _rule_integral(rule, lam, w, p, sign, groups=None, ngroups=1):
    if lam == 0:
        expo = base_exponent(0, (), w, p) + psi(0, (), w, sign, p)
        return np.array([complex(np.exp(expo))])
    if groups is None:
        groups = np.zeros(rule.size, dtype=np.int64)
    t = float(w.real) if complex(w).imag == 0 else complex(w)  # real nodes take the cheaper real-arithmetic path
    return omega_sums(rule.nodes, rule.weights, groups, ngroups, t, p.g**2)


def _simplex_term(lam: int, w, p: ModelParams, sign: str, scheme: QuadratureScheme, abs_target: float):
    """Integral of exp(base + psi) over the lam-simplex to absolute accuracy ``abs_target``.

    Gauss dimensions raise the per-axis order until two successive orders
    agree; higher dimensions grow the QMC point set up to the scheme's size.  Returns (value, error).
    """
    if lam <= scheme.gauss_max_dim:
        qmax = scheme.gauss_order(lam)
        orders = [q for q in ORDER_LADDER if q < qmax] + [qmax]
        prev = None
        for q in orders:
            val = complex(_rule_integral(gauss_simplex_rule(lam, q), lam, w, p, sign)[0])
            if prev is not None and abs(val - prev) <= abs_target:
                break
            prev = val
        return val, abs(val - prev)
    # QMC: grow the point set until the replicate spread meets the target
    npts = min(QMC_START, scheme.qmc_points)
    while True:
        sub = scheme if npts >= scheme.qmc_points else replace(scheme, qmc_points=npts)
        rule = simplex_rule(lam, sub)
        sums = _rule_integral(rule, lam, w, p, sign, rule.groups.astype(np.int64), sub.qmc_replicates)
        reps = sums * sub.qmc_replicates
        err = float(np.std(reps, ddof=1) / math.sqrt(len(reps)))
        if err <= abs_target or npts >= scheme.qmc_points:
            return complex(sums.sum()), err
        npts *= 4


def omega_terms(w, p: ModelParams, odd: bool, tol: float, scheme: QuadratureScheme, lam_cap: int = LAM_CAP):
    """Sum over lam (even or odd) of (w Delta)^lam times the simplex integral.

    Returns a SeriesValue for the bracketed sum (without 2 e^{g^2 w}).
    """
    start = 1 if odd else 2
    total = 0j if odd else 1 + 0j
    if p.delta == 0:
        return SeriesValue(total, 1, 0.0)
    wd = w * p.delta
    small = 0
    mags = []
    quad_err = 0.0
    # scale guess for the absolute accuracy target; refined as terms arrive
    scale = max(1.0, abs(total))
    for lam in range(start, start + 2 * lam_cap, 2):
        c = wd**lam
        target = 0.1 * tol * scale / max(abs(c), 1e-300)
        val, err = _simplex_term(lam, w, p, "+" if odd else "-", scheme, target)
        term = c * val
        quad_err += abs(c) * err
        total += term
        scale = max(scale, abs(total))
        mags.append(abs(term))
        small = small + 1 if abs(term) <= tol * max(abs(total), 1e-300) else 0
        # the (w Delta)^lam / lam! envelope must also have peaked
        if small >= 2 and lam > abs(wd):
            break
    else:
        raise ConvergenceError(f"Omega series not converged after {lam_cap} terms at w={w}")
    if len(mags) >= 2 and 0 < mags[-1] < mags[-2]:
        r = mags[-1] / mags[-2]
        tail = mags[-1] * r / (1 - r)
    else:
        tail = mags[-1]
    return SeriesValue(total, len(mags), float(tail + quad_err))


def _real_if(w, v):
    return v.real if np.isreal(w) else v


def omega(w, p: ModelParams, tol: float = 1e-12, scheme: QuadratureScheme = DEFAULT_SCHEME,
          return_error: bool = False):
    """Omega(w) for w in Re w > 0 or |w| < pi.  Omega(0) = 2."""
    w = check_omega_domain(w)
    if w == 0:
        return (2.0, 0.0) if return_error else 2.0
    sv = omega_terms(w, p, False, tol, scheme)
    pref = 2 * np.exp(p.g**2 * w)
    val = _real_if(w, pref * sv.value)
    return (val, abs(pref) * sv.tail_estimate) if return_error else val


def omega_odd(w, p: ModelParams, tol: float = 1e-12, scheme: QuadratureScheme = DEFAULT_SCHEME,
              return_error: bool = False):
    """Omega_odd(w); odd in Delta, vanishes at w = 0."""
    w = check_omega_domain(w)
    if w == 0 or p.delta == 0:
        return (0.0, 0.0) if return_error else 0.0
    sv = omega_terms(w, p, True, tol, scheme)
    pref = 2 * np.exp(p.g**2 * w)
    val = _real_if(w, pref * sv.value)
    return (val, abs(pref) * sv.tail_estimate) if return_error else val


def _literal_prefactors(beta, p, which):
    """Alternative hyperbolic prefactors e^{beta(g^2+1)}/sinh and /cosh.

    Against the Omega normalization they lose a factor (1 + e^-beta) in
    the even part; kept only so the discrepancy can be displayed.
    """
    ev = math.exp(beta * (p.g**2 + 1)) / math.sinh(beta)
    od = math.exp(beta * (p.g**2 + 1)) / math.cosh(beta)
    return ev, od


def partition(beta: float, p: ModelParams, tol: float = 1e-12, scheme: QuadratureScheme = DEFAULT_SCHEME,
              literal: bool = False, return_error: bool = False):
    """Z_Rabi(beta) = Omega(beta) / (1 - e^-beta).

    ``literal=True`` evaluates the alternative hyperbolic-prefactor form instead
    (diagnostic only; it comes out smaller by the factor 1 + e^-beta).
    """
    beta = float(beta)
    if not beta > 0:
        raise DomainError("beta must be positive")
    om, err = omega(beta, p, tol, scheme, return_error=True)
    if literal:
        ev, _ = _literal_prefactors(beta, p, "full")
        val = ev * om / (2 * math.exp(p.g**2 * beta))
        err = ev * err / (2 * math.exp(p.g**2 * beta))
    else:
        d = -math.expm1(-beta)
        val, err = om / d, err / d
    return (val, err) if return_error else val


def partition_parity(beta: float, parity, p: ModelParams, tol: float = 1e-12,
                     scheme: QuadratureScheme = DEFAULT_SCHEME, literal: bool = False,
                     return_error: bool = False):
    """Z_pm(beta) = (1/2)[Omega/(1 - e^-beta) -+ Omega_odd/(1 + e^-beta)]."""
    beta = float(beta)
    if not beta > 0:
        raise DomainError("beta must be positive")
    par = normalize_parity(parity)
    if par == "full":
        return partition(beta, p, tol, scheme, literal, return_error)
    sign = 1.0 if par == "+" else -1.0
    om, e1 = omega(beta, p, tol, scheme, return_error=True)
    oo, e2 = omega_odd(beta, p, tol, scheme, return_error=True)
    if literal:
        ev, od = _literal_prefactors(beta, p, par)
        norm = 2 * math.exp(p.g**2 * beta)
        val = 0.5 * (ev * om - sign * od * oo) / norm
        err = 0.5 * (ev * e1 + od * e2) / norm
    else:
        d1, d2 = -math.expm1(-beta), 1 + math.exp(-beta)
        val = 0.5 * (om / d1 - sign * oo / d2)
        err = 0.5 * (e1 / d1 + e2 / d2)
    return (val, err) if return_error else val
