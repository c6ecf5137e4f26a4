import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planargeo.algebra.series import TruncatedSeries
from planargeo.errors import BoundaryError, NumericalError, UsageError
from planargeo.models import (bipartite_pvalent, constellation, even_valence, formal, ising,
                              model_by_name, numeric, tetra_hexa, tetravalent, trivalent)
from planargeo.recursion import (integral_of_motion, numeric_limits, residual,
                                 solve_distance_free, solve_sequences, stabilized_limit)


def coeffs(s, n=None):
    n = s.cutoff if n is None else n
    return [int(s.coefficient(k)) for k in range(n + 1)]


def rooted_quadrangulation_like(N):
    # 3^N c_N: two-leg tetravalent diagrams without distance constraint
    return 3 ** N * math.comb(2 * N, N) // (N + 1)


@pytest.fixture(scope="module")
def tet10():
    return solve_sequences(tetravalent(), 10)


def test_tetravalent_low_orders(tet10):
    fam = solve_sequences(tetravalent(), 3)
    assert coeffs(fam[("R", 0)]) == [1, 2, 9, 54]
    for n in range(3, fam.n_max + 1):
        assert coeffs(fam[("R", n)]) == [1, 3, 18, 135]


def test_limit_is_catalan(tet10):
    lim = stabilized_limit(tet10)["R"]
    assert coeffs(lim) == [rooted_quadrangulation_like(N) for N in range(11)]
    free = solve_distance_free(tetravalent(), 10)["R"]
    assert free == lim


def test_stabilization(tet10):
    lim = tet10[("R", tet10.n_max)]
    for n in range(tet10.n_max + 1):
        for N in range(min(n, 10) + 1):
            assert tet10[("R", n)].coefficient(N) == lim.coefficient(N)


def test_monotone_in_n(tet10):
    for n in range(tet10.n_max):
        a, b = tet10[("R", n)], tet10[("R", n + 1)]
        assert all(a.coefficient(N) <= b.coefficient(N) for N in range(11))


def test_cutoff_zero_is_one():
    for name in ("tetravalent", "trivalent", "bipartite3"):
        fam = solve_sequences(model_by_name(name), 0)
        for n in range(fam.n_max + 1):
            assert fam[("R", n)].constant_term() == 1
    # Ising at g = 0: V = 1 + cR, R = cV
    fam = solve_sequences(model_by_name("ising_reduced"), 0)
    assert fam[("R", 0)].constant_term() == Fraction(2, 3)
    assert fam[("V", 0)].constant_term() == Fraction(4, 3)


def test_sweep_and_picard_agree():
    for model in (tetravalent(), trivalent(), tetra_hexa()):
        a = solve_sequences(model, 6)
        b = solve_sequences(model, 6, method="picard")
        assert a.entries == b.entries


def test_residual_detects_tampering(tet10):
    assert residual(tet10) == 0
    bumped = tet10[("R", 2)] + TruncatedSeries.univariate([0, 0, 0, 1], "g", 10)
    assert residual(tet10.with_entry(("R", 2), bumped)) > 0


def test_trivalent_limits():
    # S = 2gR + gS^2, R = 1 + 2gRS
    lim = solve_distance_free(trivalent(), 6)
    R, S = lim["R"], lim["S"]
    assert coeffs(S)[:4] == [0, 2, 0, 12]
    assert coeffs(R)[:5] == [1, 0, 4, 0, 40]


def test_bipartite3_limit():
    lim = solve_distance_free(bipartite_pvalent(3, {"g": "t", "gt1": "t"}), 8)["R"]
    t = TruncatedSeries.var("t", ("t",), 8)
    assert lim == 1 + 2 * t * t * lim * lim


def test_constellation_p2_is_even_valence():
    # p = 2 with g = 1 and gt_k = g_{2k} reproduces the even-valence R_n
    c = solve_sequences(constellation(2, {2: "g4"}, {"g": numeric(1), "g4": "g4"}), 6)
    e = solve_sequences(even_valence({4: "g4"}), 6, n_max=c.n_max)
    for n in range(c.n_max + 1):
        assert c[("R", n)] == e[("R", n)]


def test_ising_duality_identity():
    fam = solve_sequences(ising(), 4)
    for n in range(fam.n_max):
        assert fam[("R", n)] == fam[("V", n)] * fam[("X1", n + 1)]


def test_ising_systems_agree():
    a = solve_sequences(ising(), 6)
    b = solve_sequences(ising(reduced=True), 6)
    for n in range(min(a.n_max, b.n_max) + 1):
        assert a[("R", n)] == b[("R", n)] and a[("V", n)] == b[("V", n)]


def test_integral_of_motion(tet10):
    vals = integral_of_motion(tet10)
    assert all(v == vals[0] for v in vals)
    assert vals[0].constant_term() == -1  # f(1, 1) at g = 0
    broken = tet10.with_entry(("R", 3), tet10[("R", 3)] + TruncatedSeries.univariate(
        [0, 0, 1], "g", 10))
    vals2 = integral_of_motion(broken)
    assert any(v != vals2[0] for v in vals2)
    with pytest.raises(UsageError):
        integral_of_motion(solve_sequences(trivalent(), 3))


def test_boundary_and_usage_errors(tet10):
    with pytest.raises(BoundaryError):
        tet10[("R", tet10.n_max + 1)]
    assert tet10[("R", -1)].is_zero()
    with pytest.raises(UsageError):
        solve_sequences(tetravalent(), -1)
    with pytest.raises(UsageError):
        stabilized_limit(solve_sequences(tetravalent(), 6, n_max=3))


def test_json_round_trip():
    import json
    fam = solve_sequences(tetravalent(), 3)
    data = json.loads(fam.to_json())
    assert data["entries"]["R[0]"]["terms"][3]["num"] == "54"


@settings(max_examples=15, deadline=None)
@given(st.floats(0.001, 0.07))
def test_numeric_limit_matches_closed_form(g):
    lim = numeric_limits(tetravalent(), {"g": g})
    assert lim["R"] == pytest.approx((1 - math.sqrt(1 - 12 * g)) / (6 * g), rel=1e-11)


def test_numeric_limit_rejects_supercritical():
    with pytest.raises(NumericalError):
        numeric_limits(tetravalent(), {"g": 0.2})


def test_multivariate_tetra_hexa_matches_bookkept():
    # two formal couplings versus a single bookkeeping variable
    two = solve_sequences(tetra_hexa(), 4)
    one = solve_sequences(tetra_hexa({"g4": formal("t"), "g6": formal("t", 2)}), 4,
                          n_max=two.n_max)
    for n in range(two.n_max + 1):
        assert abs(two.evaluate("R", n, {"g4": 0.01, "g6": 0.02})
                   - one.evaluate("R", n, {"t": 0.01})) < 1e-15
