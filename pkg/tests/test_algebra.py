import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planargeo.algebra.chebyshev import chebyshev_u, chebyshev_u_of_x
from planargeo.algebra.jets import TaylorJet, cosh, exp, jet_eval, log, sinh, sqrt
from planargeo.algebra.polyroots import (Polynomial, laurent_to_polynomial, poly_roots,
                                         reciprocal_to_w, roots_in_unit_disk, sort_roots,
                                         w_to_x_roots)
from planargeo.algebra.series import TruncatedSeries, series_solve_fixed_point, to_rational
from planargeo.errors import DomainError, StructuralError, UsageError

small_ints = st.integers(-20, 20)
coeff_lists = st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=7), min_size=1,
                       max_size=7)


def uni(coeffs, cutoff=6):
    return TruncatedSeries.univariate(coeffs, "g", cutoff)


# -- rationals ---------------------------------------------------------------

@pytest.mark.parametrize("text, value", [("1/24", Fraction(1, 24)), ("0.1", Fraction(1, 10)),
                                         ("-3", Fraction(-3)), (" 2/6 ", Fraction(1, 3))])
def test_to_rational_parses_exactly(text, value):
    r = to_rational(text)
    assert Fraction(int(r.numerator), int(r.denominator)) == value


@pytest.mark.parametrize("bad", ["x", True, object()])
def test_to_rational_rejects(bad):
    with pytest.raises(UsageError):
        to_rational(bad)


# -- series ------------------------------------------------------------------

@given(coeff_lists, coeff_lists, coeff_lists)
def test_series_ring_laws(a, b, c):
    A, B, C = uni(a), uni(b), uni(c)
    assert (A * B) * C == A * (B * C)
    assert A * (B + C) == A * B + A * C
    assert A * B == B * A
    assert A - A == TruncatedSeries.zero(("g",), 6)


@given(coeff_lists.filter(lambda c: c[0] != 0))
def test_series_inverse(a):
    A = uni(a)
    assert A * A.inverse() == TruncatedSeries.constant(1, ("g",), 6)


@given(coeff_lists, st.floats(-0.5, 0.5))
def test_series_evaluate_matches_numpy(a, x):
    A = uni(a)
    ref = np.polyval([float(c) for c in reversed(a)], x)
    assert A.evaluate({"g": x}) == pytest.approx(ref, abs=1e-12)


@given(coeff_lists)
def test_series_json_round_trip(a):
    A = uni(a)
    assert TruncatedSeries.from_json(A.to_json()) == A


def test_catalan_fixed_point():
    # C = 1 + g C^2 has coefficients binom(2n, n)/(n+1)
    one = TruncatedSeries.constant(1, ("g",), 12)
    g = TruncatedSeries.var("g", ("g",), 12)
    C = series_solve_fixed_point(lambda X: one + g * X * X, one)
    assert [int(C.coefficient(n)) for n in range(13)] == [math.comb(2 * n, n) // (n + 1)
                                                          for n in range(13)]


def test_fixed_point_detects_non_contraction():
    one = TruncatedSeries.constant(1, ("g",), 4)
    with pytest.raises(StructuralError):
        series_solve_fixed_point(lambda X: X * 2 + one, one)


def test_multivariate_truncation_is_by_total_degree():
    vs = ("a", "b")
    a, b = TruncatedSeries.var("a", vs, 3), TruncatedSeries.var("b", vs, 3)
    p = (1 + a + b) ** 4
    assert p.coefficient({"a": 2, "b": 1}) == 12  # 4!/(1!2!1!)
    assert p.coefficient((2, 2)) == 0  # degree 4 dropped


def test_mismatched_series_raise():
    with pytest.raises(UsageError):
        uni([1], 3) + uni([1], 4)


# -- polynomial roots --------------------------------------------------------

@settings(max_examples=40)
@given(st.lists(st.floats(-3, 3).filter(lambda v: abs(v) > 1e-3), min_size=2, max_size=6))
def test_poly_roots_match_numpy(coeffs):
    p = Polynomial(coeffs)
    ours = sort_roots(poly_roots(p))
    ref = sort_roots(list(np.roots(list(reversed(coeffs)))))
    # compare as multisets through residuals rather than ordering
    for z in ours:
        assert min(abs(z - r) for r in ref) < 1e-6 * max(1, abs(z))


def test_reciprocal_round_trip():
    # (x^2 - 3x + 1)/x = w - 3 with w = x + 1/x
    poly, shift = laurent_to_polynomial({-1: 1.0, 0: -3.0, 1: 1.0})
    w = reciprocal_to_w(poly)
    assert w.coefficients == pytest.approx((-3.0, 1.0))
    inside = roots_in_unit_disk(poly)
    assert len(inside) == 1 and abs(inside[0] - (3 - math.sqrt(5)) / 2) < 1e-12


@given(st.floats(2.1, 50))
def test_w_to_x_roots_product_is_one(w):
    a, b = w_to_x_roots(w)
    assert abs(a * b - 1) < 1e-12 and abs(a + b - w) < 1e-10
    assert min(abs(a), abs(b)) <= 1


# -- Chebyshev ---------------------------------------------------------------

@given(st.integers(0, 40), st.floats(0.05, 3.0))
def test_chebyshev_matches_trigonometric_form(n, theta):
    w = 2 * math.cos(theta)
    ref = math.sin((n + 1) * theta) / math.sin(theta)
    assert chebyshev_u(n, w) == pytest.approx(ref, abs=1e-8 * max(1, abs(ref)))


@given(st.integers(-1, 30), st.floats(0.05, 0.95))
def test_chebyshev_x_form_agrees(n, x):
    w = math.sqrt(x) + 1 / math.sqrt(x)
    assert complex(chebyshev_u_of_x(n, x)).real == pytest.approx(chebyshev_u(n, w), rel=1e-9)


def test_chebyshev_rejects_negative_index():
    with pytest.raises(UsageError):
        chebyshev_u(-2, 1.0)


# -- jets --------------------------------------------------------------------

@given(st.floats(0.2, 3.0))
def test_jets_of_elementary_functions(r):
    t = TaylorJet.variable(r, 5)
    s = sinh(t * 2).coefficients
    for k in range(6):
        ref = 2 ** k * (math.sinh(2 * r) if k % 2 == 0 else math.cosh(2 * r))
        assert s[k] == pytest.approx(ref, rel=1e-12)
    lg = log(t).coefficients
    for k in range(1, 6):
        assert lg[k] == pytest.approx((-1) ** (k - 1) * math.factorial(k - 1) / r ** k, rel=1e-10)
    assert exp(t).coefficients == pytest.approx([math.exp(r)] * 6, rel=1e-12)
    assert (cosh(t) * cosh(t) - sinh(t) * sinh(t)).coefficients == pytest.approx(
        [1, 0, 0, 0, 0, 0], abs=1e-9 * math.cosh(r) ** 2)
    assert (sqrt(t) * sqrt(t)).coefficients == pytest.approx(t.coefficients, abs=1e-12)


def test_jet_reciprocal_matches_finite_difference():
    f = lambda z: 1 / (1 + z * z)
    t = TaylorJet.variable(0.7, 1)
    j = (t * t + 1).reciprocal()
    h = 1e-6
    fd = (f(0.7 + h) - f(0.7 - h)) / (2 * h)
    assert j.derivative(1) == pytest.approx(fd, rel=1e-7)


def test_jet_domain_errors():
    with pytest.raises(DomainError):
        log(TaylorJet.variable(-1.0, 2))
    with pytest.raises(DomainError):
        TaylorJet.variable(0.0, 2).reciprocal()
    with pytest.raises(UsageError):
        TaylorJet.variable(1.0, 7)


def test_complex_jets():
    t = TaylorJet.variable(0.5, 3)
    z = sinh(t * 1j)  # i sin(r)
    assert z.coefficients[0] == pytest.approx(1j * math.sin(0.5))
    assert z.coefficients[1] == pytest.approx(1j * math.cos(0.5))
    assert cmath.isclose(log(z).coefficients[1], math.cos(0.5) / math.sin(0.5))


def test_jet_eval():
    j = jet_eval(lambda t: t * t * t, 2.0, 3)
    assert list(j.coefficients) == pytest.approx([8, 12, 12, 6])
