"""Arithmetic substrate: exact truncated series, roots, Chebyshev, jets."""

from .chebyshev import chebyshev_u, chebyshev_u_of_x
from .jets import TaylorJet, jet_eval
from .polyroots import (Polynomial, laurent_to_polynomial, poly_roots, reciprocal_to_w,
                        roots_in_unit_disk, sort_roots, w_to_x_roots)
from .series import (Rational, TruncatedSeries, series_mul, series_solve_fixed_point,
                     to_rational)

__all__ = [
    "Rational", "TruncatedSeries", "series_mul", "series_solve_fixed_point", "to_rational",
    "Polynomial", "poly_roots", "roots_in_unit_disk", "reciprocal_to_w", "laurent_to_polynomial",
    "sort_roots", "w_to_x_roots", "chebyshev_u", "chebyshev_u_of_x", "TaylorJet", "jet_eval",
]
