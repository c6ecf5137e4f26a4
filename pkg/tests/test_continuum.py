import math
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from planargeo.continuum import (CONTINUUM_ODES, DiffPoly, ScalingFunction,
                                 coefficient_asymptotics, distance_probability, fractal_ratio,
                                 fractal_target, integrate_total_derivative, ising_critical_data,
                                 ising_quintic, ising_scaling_equivalence, ising_weight_map,
                                 kdv_difference, kdv_residue, multicritical_data,
                                 multicritical_polynomial, ode_residual, scaling_two_point,
                                 scaling_values, tetravalent_coefficient_table, tetravalent_data)
from planargeo.errors import DegenerateInputError, DomainError, StructuralError, UsageError
from planargeo.models import tetravalent
from planargeo.recursion import solve_sequences

SQ2, SQ3, SQ6 = math.sqrt(2), math.sqrt(3), math.sqrt(6)
TET = ScalingFunction.tetravalent()


def tet_F(r):
    return 3 / math.sinh(math.sqrt(1.5) * r) ** 2


# -- scaling functions --------------------------------------------------------

@given(st.floats(0.05, 8.0))
def test_tetravalent_F_formula(r):
    jet = scaling_two_point(TET, r, 2)
    assert jet.coefficients[0] == pytest.approx(tet_F(r), rel=1e-12)


@given(st.floats(0.1, 6.0))
def test_G_is_minus_derivative(r):
    (_, F, G), = scaling_values(TET, [r])
    h = 1e-5
    assert G == pytest.approx(-(tet_F(r + h) - tet_F(r - h)) / (2 * h), rel=1e-6)
    assert F > 0 and G > 0


def test_short_distance_behaviour():
    for fam in (TET, ScalingFunction.wronskian(2)):
        r = 1e-3
        F = scaling_two_point(fam, r, 0).coefficients[0]
        # r^2 F -> m(m+1)
        assert r * r * F == pytest.approx(2 if fam is TET else 6, rel=1e-4)


def test_wronskian_one_equals_tetravalent():
    w1 = ScalingFunction.wronskian(1)
    for r in (0.4, 1.0, 3.0):
        assert scaling_two_point(w1, r, 2).coefficients[0] == pytest.approx(tet_F(r), rel=1e-12)


@pytest.mark.parametrize("fam, tol", [
    (TET, 1e-10),
    (ScalingFunction.wronskian(2), 1e-7),
    (ScalingFunction.ising(), 1e-7),
    (ScalingFunction.ising(series=True), 1e-7),
])
def test_scaling_functions_solve_their_odes(fam, tol):
    assert ode_residual(fam, None, np.linspace(0.5, 4.0, 8)) < tol


def test_swapped_constant_assignment_also_solves_ode():
    # the series form solves the ODE for either assignment away from its pole
    fam = ScalingFunction.ising(series=True, lam=-12 * (17 + 12 * SQ2), mu=12 * (4 + 3 * SQ2))
    assert ode_residual(fam, "ising", [2.5, 3.0, 4.0]) < 1e-7


def test_ising_forms_agree_and_decay():
    assert ising_scaling_equivalence(np.linspace(0.3, 5.0, 12)) < 1e-10
    fam = ScalingFunction.ising()
    vals = [scaling_two_point(fam, r, 0).coefficients[0] for r in (2.0, 4.0, 6.0, 8.0)]
    assert all(v > 0 for v in vals) and vals == sorted(vals, reverse=True)
    # slowest decay e^{-sqrt6 r}
    assert math.log(vals[2] / vals[3]) / 2 == pytest.approx(SQ6, rel=2e-3)


def test_scaling_errors():
    with pytest.raises(DomainError):
        scaling_two_point(TET, 0.0)
    with pytest.raises(UsageError):
        ode_residual(TET, "painleve7", [1.0])


# -- KdV residues -------------------------------------------------------------

def test_low_residues():
    u, d2 = DiffPoly.u(0), DiffPoly.u(2)
    assert kdv_residue(1) == u * Fraction(-1, 2)
    assert kdv_residue(2) == (u * u * 3 - d2) * Fraction(1, 8)


@pytest.mark.parametrize("m", range(1, 5))
def test_residues_satisfy_recursion(m):
    u, du = DiffPoly.u(0), DiffPoly.u(1)
    a, b = kdv_residue(m - 1), kdv_residue(m)
    rhs = a.derivative().derivative().derivative() * Fraction(1, 4) - u * a.derivative() \
        - du * a * Fraction(1, 2)
    assert b.derivative() == rhs


@pytest.mark.parametrize("m", range(0, 6))
def test_constant_u_gives_binomial_series(m):
    # for constant u the residues are the Taylor coefficients of (1 + u)^(-1/2)
    coeff = sp.binomial(sp.Rational(-1, 2), m)
    p = kdv_residue(m)
    const = DiffPoly({((0, m),): Fraction(int(coeff.p), int(coeff.q))}) if m else DiffPoly.constant(1)
    stripped = DiffPoly({k: v for k, v in p.terms.items() if all(o == 0 for o, _ in k)})
    assert stripped == const


@pytest.mark.parametrize("m, ode, scalar", [(2, "painleve1", Fraction(-1, 8)),
                                            (3, "painleve2", Fraction(-1, 32))])
def test_kdv_differences_match_odes(m, ode, scalar):
    assert kdv_difference(m) == CONTINUUM_ODES[ode] * scalar
    assert scalar == -2 * Fraction(1, 4) ** m


def test_kdv_against_sympy_gelfand_dickey():
    x = sp.symbols("x")
    u = sp.Function("u")(x)
    R = [sp.Integer(1)]
    R.append(-u / 2)
    R.append((3 * u ** 2 - u.diff(x, 2)) / 8)
    rhs = R[2].diff(x, 3) / 4 - u * R[2].diff(x) - u.diff(x) * R[2] / 2
    mine = kdv_residue(3)
    derivs = [u.diff(x, k) if k else u for k in range(7)]
    assert sp.simplify(sp.diff(mine.evaluate(derivs), x) - rhs) == 0


def test_integration_rejects_non_total_derivative():
    with pytest.raises(StructuralError):
        integrate_total_derivative(DiffPoly.u(0) * DiffPoly.u(0))


# -- critical data ------------------------------------------------------------

def test_multicritical_data():
    d = tetravalent_data()
    assert d.g_c == pytest.approx(1 / 12) and d.R_c == 2 and d.d_F == pytest.approx(4)
    assert d.rates == pytest.approx([SQ6])
    for m in (2, 3):
        dm = multicritical_data(m)
        assert dm.g_c == pytest.approx(m / (6 * (m + 1)))
        assert dm.R_c == m + 1 and dm.V_c == pytest.approx(m / 6)
        assert dm.d_F == pytest.approx(2 * (m + 1))
        assert all(complex(a).real > 0 for a in dm.rates) and len(dm.rates) == m
    # root of P_1 is u = 6
    assert multicritical_polynomial(1) == [1, Fraction(-1, 6)]
    with pytest.raises(UsageError):
        multicritical_polynomial(0)


def test_ising_quintic_exact_at_tricritical_point():
    c, g, R = Fraction(4), Fraction(10, 9), Fraction(-3, 5)
    assert ising_quintic(c, g, R) == (0, 0, 0)


def test_ising_quintic_derivatives_match_sympy():
    c, g, R = sp.symbols("c g R")
    s = c + 3 * g * R
    W = R * s ** 2 * (1 - s ** 2) - s ** 3 - 3 * g ** 2 * R ** 3
    pt = {c: sp.Rational(7, 2), g: sp.Rational(1, 3), R: sp.Rational(-2, 7)}
    ours = ising_quintic(Fraction(7, 2), Fraction(1, 3), Fraction(-2, 7))
    for k in range(3):
        ref = sp.diff(W, R, k).subs(pt)
        assert Fraction(int(sp.numer(ref)), int(sp.denom(ref))) == ours[k]


def test_ising_critical_data():
    d = ising_critical_data()
    assert d.extra["c"] == pytest.approx(4, abs=1e-12)
    assert d.g_c == pytest.approx(10 / 9, abs=1e-12)
    assert d.R_c == pytest.approx(-0.6, abs=1e-12)
    assert d.V_c == pytest.approx(-0.3, abs=1e-12)
    assert d.d_F == pytest.approx(6)
    assert sorted(d.rates) == pytest.approx([SQ6, 2 * SQ3])
    # two factors reach w = 2 (x = 1), the third stays away
    assert d.extra["factor_constants"] == pytest.approx([-2, 10, -2], abs=1e-9)


def test_ising_weight_map():
    w = ising_weight_map(-0.7, 0.0, 0.05)
    assert w["g4"] == pytest.approx(w["gt4"])
    assert w["w_bb"] / w["w_bw"] == pytest.approx(math.exp(-0.7))
    h = ising_weight_map(-0.7, 0.4, 0.05)
    assert h["g4"] / h["gt4"] == pytest.approx(math.exp(0.8))
    far = ising_weight_map(-30.0, 0.0, 0.05)
    assert far["w_bw"] == pytest.approx(1) and far["w_bb"] < 1e-12
    assert far["g4"] == pytest.approx(0.05)
    assert isinstance(ising_weight_map(0.3, 0, 0.05)["leg"], complex)
    with pytest.raises(DegenerateInputError):
        ising_weight_map(0.0, 0.0, 0.05)


# -- probability and coefficient asymptotics ---------------------------------

def test_distance_probability():
    rs = [0.5, 1.0, 2.0, 4.0, 10.0]
    ps = [distance_probability(r) for r in rs]
    assert all(0 <= p <= 1 for p in ps) and ps == sorted(ps)
    assert ps[-1] == pytest.approx(1, abs=1e-9)
    with pytest.raises(DomainError):
        distance_probability(-1)


def test_coefficient_asymptotics():
    assert coefficient_asymptotics(1) == pytest.approx(0.25)
    assert coefficient_asymptotics(10 ** 5) * math.sqrt(math.pi) == pytest.approx(1, abs=1e-4)


# -- fractal ratio ------------------------------------------------------------

def test_float_table_matches_exact_series():
    fam = solve_sequences(tetravalent(), 30)
    table = tetravalent_coefficient_table(5, 30)
    for n in range(6):
        for d in range(31):
            exact = float(fam[("R", n)].coefficient(d)) / 12 ** d
            assert table[n, d] == pytest.approx(exact, rel=1e-12)


def test_fractal_ratio_properties():
    table = tetravalent_coefficient_table(4, 300)
    assert fractal_ratio(0, 300, table) == 1
    ratios = [fractal_ratio(n, 300, table) for n in range(5)]
    assert ratios == sorted(ratios)
    # finite-N ratios increase towards the N -> infinity limit
    seq = [fractal_ratio(3, N, table) for N in (50, 100, 200, 300)]
    assert seq == sorted(seq) and seq[-1] < 43.2
    assert fractal_target(2) == pytest.approx(3 * 16 / 56)
    with pytest.raises(UsageError):
        fractal_ratio(-1, 10)


@pytest.mark.slow
def test_fractal_limit_against_exact_expansion():
    # near criticality g = (1 - e^4)/12, R = 2/(1 + e^2); the N -> infinity ratio
    # is the ratio of e^6 coefficients, the first singular order
    e = sp.symbols("e", positive=True)
    R = 2 / (1 + e ** 2)
    x = (1 + 2 * e ** 2 - e * sp.sqrt(3 * (2 + e ** 2))) / (1 - e ** 2)

    def c6(n):
        Rn = R * (1 - x ** (n + 1)) * (1 - x ** (n + 4)) / ((1 - x ** (n + 2)) * (1 - x ** (n + 3)))
        return sp.nsimplify(sp.series(Rn, e, 0, 7).removeO().coeff(e, 6))

    limit = float(c6(3) / c6(0))
    assert limit == pytest.approx(43.16, abs=1e-12)
    table = tetravalent_coefficient_table(3, 1000)
    a, b = fractal_ratio(3, 500, table), fractal_ratio(3, 1000, table)
    assert a < b < limit
    assert (limit - a) / (limit - b) > 1.3
    # far from the leading large-n law at this n
    assert fractal_target(3) < limit / 9
