import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planargeo.closedform import (TauSolution, characteristic_equation, chebyshev_determinant,
                                  closed_R_n, closed_S_n, comparison_table,
                                  constellation3_hexavalent, fix_lambdas,
                                  linearized_characteristic, one_x_residual, one_x_solution,
                                  soliton_identity_check, special_value_identities, tau_solution,
                                  tau_u, tri_tetra_boundary_obstruction)
from planargeo.errors import DegenerateInputError, UsageError
from planargeo.models import (arbitrary_valence, bipartite_pvalent, constellation, formal, ising,
                              model_by_name, numeric, tetra_hexa, tetravalent, trivalent)
from planargeo.recursion import numeric_limits, solve_sequences


def tetra_reference(n, g):
    # independent evaluation from the quadratic limit and the explicit root
    R = (1 - math.sqrt(1 - 12 * g)) / (6 * g)
    w = 1 / (g * R) - 4
    x = (w - math.sqrt(w * w - 4)) / 2
    return R * (1 - x ** (n + 1)) * (1 - x ** (n + 4)) / ((1 - x ** (n + 2)) * (1 - x ** (n + 3)))


@pytest.fixture(scope="module")
def tet_family():
    return solve_sequences(tetravalent(), 40)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.001, 0.02), st.integers(0, 12))
def test_tetravalent_closed_form_matches_series(tet_family, g, n):
    sol = tau_solution(tetravalent(), {"g": g})
    assert closed_R_n(n, sol) == pytest.approx(tetra_reference(n, g), rel=1e-12)
    assert closed_R_n(n, sol) == pytest.approx(tet_family.evaluate("R", n, {"g": g}), rel=1e-12)


CHAR_CASES = [
    (tetravalent(), {"g": 0.05}),
    (tetra_hexa(), {"g4": 0.02, "g6": 0.003}),
    (trivalent(), {"g": 0.1}),
    (arbitrary_valence({3: "g3", 4: "g4"}), {"g3": 0.05, "g4": 0.02}),
    (bipartite_pvalent(3, {"gt1": numeric(1)}), {"g": 0.1}),
    (bipartite_pvalent(4, {"gt1": numeric(1)}), {"g": 0.02}),
    (constellation(3, {2: "gt2"}, {"g": formal("t"), "gt2": formal("t", "1/400")}), {"t": 1.0}),
    (ising(reduced=True), {"g": 0.02}),
]


@pytest.mark.parametrize("model, values", CHAR_CASES, ids=lambda v: getattr(v, "family", ""))
def test_characteristic_matches_linearized_system(model, values):
    lim = numeric_limits(model, values)
    coup = model.numeric_couplings(values)
    char = characteristic_equation(model, lim, coup)
    lin = linearized_characteristic(model, lim, coup)
    # same roots: each unit-disk root of the explicit form annihilates the determinant
    lin_poly = np.polynomial.Polynomial([lin.get(k, 0) for k in range(min(lin), max(lin) + 1)])
    scale = max(abs(v) for v in lin.values())
    for x in char.roots:
        assert abs(lin_poly(x) * x ** min(lin)) < 1e-8 * scale
        assert abs(x) < 1


def test_w_degrees():
    expected = {"tetravalent": 1, "tetra_hexa": 2, "bipartite3": 1, "ising_reduced": 3}
    vals = {"tetravalent": {"g": 0.05}, "tetra_hexa": {"g4": 0.02, "g6": 0.003},
            "bipartite3": {"g": 0.05, "gt1": 1.0}, "ising_reduced": {"g": 0.02}}
    for name, deg in expected.items():
        m = model_by_name(name)
        char = characteristic_equation(m, numeric_limits(m, vals[name]),
                                       m.numeric_couplings(vals[name]))
        assert char.w_degree == deg and len(char.roots) == deg


def test_tau_sum_equals_chebyshev_determinant_ratio():
    m = tetra_hexa({"g4": formal("t"), "g6": formal("t", "1/25")})
    sol = tau_solution(m, {"t": 0.02})
    D = lambda k: chebyshev_determinant(k, sol.roots)
    for n in range(8):
        ref = sol.R * (D(n) * D(n + 3) / (D(n + 1) * D(n + 2))).real
        assert closed_R_n(n, sol) == pytest.approx(ref, rel=1e-12)


def test_boundary_conditions_hold():
    m = tetra_hexa()
    sol = tau_solution(m, {"g4": 0.02, "g6": 0.003})
    np.testing.assert_allclose(closed_R_n(-1, sol), 0, atol=1e-12)
    fam = solve_sequences(m, 20)
    for n in range(6):
        # cutoff-20 truncation leaves about 1e-10
        assert closed_R_n(n, sol) == pytest.approx(
            fam.evaluate("R", n, {"g4": 0.02, "g6": 0.003}), rel=1e-8)


def test_trivalent_closed_forms():
    rows_R = comparison_table(trivalent(), {"g": 0.1}, cutoff=40, ns=range(8))
    rows_S = comparison_table(trivalent(), {"g": 0.1}, cutoff=40, ns=range(8), name="S")
    assert max(r[3] for r in rows_R + rows_S) < 1e-10


@pytest.mark.parametrize("name", ["tetravalent", "tetra_hexa", "trivalent", "bipartite3",
                                  "bipartite4", "constellation3_hexa"])
def test_special_values_are_exact(name):
    m = constellation3_hexavalent() if name == "constellation3_hexa" else model_by_name(name)
    for diff in special_value_identities(m, 8).values():
        assert diff.is_zero()


def test_special_values_unknown_model():
    with pytest.raises(UsageError):
        special_value_identities(ising(), 3)


def test_soliton_identity_is_exact():
    assert soliton_identity_check(20).is_zero()


@settings(max_examples=15, deadline=None)
@given(st.floats(-0.9, 0.9))
def test_one_x_families_solve_recursion(lam):
    assert one_x_residual(tetravalent(), {"g": 0.05}, 1, lam) < 1e-10
    assert one_x_residual(arbitrary_valence({3: "g3", 4: "g4"}), {"g3": 0.05, "g4": 0.02}, 1,
                          lam) < 1e-10


@pytest.mark.parametrize("branch", [1, 2, 3])
def test_ising_one_x_branches(branch):
    assert one_x_residual(ising(reduced=True), {"g": 0.02}, branch, 0.3) < 1e-9


def test_tri_tetra_obstruction():
    m = arbitrary_valence({3: "g3", 4: "g4"})
    out = tri_tetra_boundary_obstruction({"g3": 0.05, "g4": 0.02}, m)
    assert abs(out["R_minus1"]) < 1e-12
    assert abs(out["RS_limit"]) > 1e-3


def test_lambda_fixing_zeroes_negative_indices():
    m = bipartite_pvalent(4, {"gt1": numeric(1)})
    sol = tau_solution(m, {"g": 0.02})
    scale = max(abs(tau_u(0, sol)), 1)
    for k in (1, 2):
        assert abs(tau_u(-k, sol)) < 1e-10 * scale


def test_degenerate_and_usage_errors():
    with pytest.raises(DegenerateInputError):
        fix_lambdas([0.3, 0.3], "even")
    with pytest.raises(UsageError):
        fix_lambdas([0.3], "pq")
    with pytest.raises(UsageError):
        TauSolution("even", [1.2], [1.0], 1, ((0, 3), (1, 2)))
    sol = tau_solution(tetravalent(), {"g": 0.05})
    with pytest.raises(UsageError):
        closed_S_n(0, sol)
    with pytest.raises(UsageError):
        one_x_solution(tetravalent(), {"g": 0.05}, 2, 0.5)
    with pytest.raises(UsageError):
        characteristic_equation(tetravalent(), {"R": 5.0}, {"g": 0.05})
