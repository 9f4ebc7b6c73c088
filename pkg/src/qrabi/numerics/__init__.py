"""Quadrature, series summation and exact algebra shared by the other modules."""

from .polynomial import FormalSeries, MultiPoly, series_exp
from .quadrature import (
    DEFAULT_SCHEME,
    QuadratureScheme,
    SimplexRule,
    monomial_simplex_integral,
    simplex_integrate,
    simplex_rule,
)
from .series import SeriesValue, sum_lambda_series
from .special import reciprocal_gamma

__all__ = [
    "DEFAULT_SCHEME",
    "FormalSeries",
    "MultiPoly",
    "QuadratureScheme",
    "SeriesValue",
    "SimplexRule",
    "monomial_simplex_integral",
    "reciprocal_gamma",
    "series_exp",
    "simplex_integrate",
    "simplex_rule",
    "sum_lambda_series",
]
