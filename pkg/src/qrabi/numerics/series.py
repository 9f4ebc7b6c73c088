"""Summation of the lambda-indexed series with an empirical tail bound."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from ..errors import ConvergenceError

__all__ = ["SeriesValue", "sum_lambda_series"]

Number = Union[complex, np.ndarray]


@dataclass(frozen=True)
class SeriesValue:
    """Partial sum of a series plus the bookkeeping needed to trust it.

    ``value`` may be a scalar or an array when the terms are evaluated on a
    batch of points; ``tail_estimate`` is then the bound for the worst entry.
    """

    value: Number
    terms_used: int
    tail_estimate: float

    def __post_init__(self):
        if not self.tail_estimate >= 0:
            raise ValueError("tail_estimate must be nonnegative")


def _mag(x) -> float:
    return float(np.max(np.abs(x))) if np.ndim(x) else abs(x)


def sum_lambda_series(
    term: Callable[[int], Number],
    tol: float = 1e-14,
    lam_cap: int = 40,
    start: int = 0,
    min_terms: int = 2,
) -> SeriesValue:
    """Sum ``term(start) + term(start + 1) + ...``.

    Stops once two consecutive terms are below ``tol`` times the running
    magnitude.  The tail is estimated from the ratio of the last two terms,
    assuming at least geometric decay from there on (the terms of interest
    decay factorially).  Raises :class:`ConvergenceError` if ``lam_cap``
    terms were summed without meeting the stopping rule.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if lam_cap < 1:
        raise ValueError("lam_cap must be at least 1")
    total = None
    small_run = 0
    prev_mag = None
    last_mag = 0.0
    used = 0
    for lam in range(start, start + lam_cap):
        t = term(lam)
        total = t if total is None else total + t
        used += 1
        mag = _mag(t)
        scale = _mag(total)
        if mag <= tol * scale or mag == 0.0:
            small_run += 1
        else:
            small_run = 0
        prev_mag, last_mag = last_mag if used > 1 else None, mag
        if small_run >= 2 and used >= min_terms:
            break
    else:
        raise ConvergenceError(
            f"series not converged after {lam_cap} terms (last term {last_mag:.3e})"
        )
    if prev_mag and last_mag < prev_mag:
        r = last_mag / prev_mag
        tail = last_mag * r / (1.0 - r)
    else:
        tail = last_mag
    return SeriesValue(total, used, float(tail))
