import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planargeo.errors import UsageError
from planargeo.models import (arbitrary_valence, constellation, even_valence, ising, tetra_hexa,
                              tetravalent, trivalent)
from planargeo.qoperator import (IndexedPolynomial, ShiftOperator, build_recursion_system,
                                 format_polynomial, format_system, matrix_element, op_mul,
                                 parse_polynomial)
from planargeo.recursion import residual, solve_sequences

SIG, SIGI = ShiftOperator.sigma(1), ShiftOperator.sigma(-1)
R, S = ShiftOperator.diagonal("R"), ShiftOperator.diagonal("S")

letters = st.sampled_from(["up", "down", "R", "S", "g"])


def word(ls):
    table = {"up": SIG, "down": SIGI, "R": R, "S": S, "g": ShiftOperator.coupling("g")}
    out = ShiftOperator.identity()
    for l in ls:
        out = out * table[l]
    return out


def test_sigma_inverse_is_identity():
    assert op_mul(SIG, SIGI) == ShiftOperator.identity()
    assert matrix_element(SIG, 0) == IndexedPolynomial.constant(0)


def test_tetravalent_matrix_element_pattern():
    q = SIG + SIGI * R
    elem = matrix_element(q ** 3, -1)
    assert elem == parse_polynomial("R[n]*(R[n+1]+R[n]+R[n-1])")


def test_trivalent_operator_gives_two_equations():
    q = SIG + SIGI * S * SIG + SIGI * R
    q2 = q * q
    # row 0, relabelled n -> n-1, is the S equation; row -1 is the R equation
    assert matrix_element(q2, 0).shifted(-1) == parse_polynomial("R[n]+R[n-1]+S[n]^2")
    assert matrix_element(q2, -1) == parse_polynomial("R[n]*(S[n+1]+S[n])")


@settings(max_examples=40, deadline=None)
@given(st.lists(letters, max_size=3), st.lists(letters, max_size=3), st.lists(letters, max_size=3))
def test_normal_ordering_is_associative(a, b, c):
    A, B, C = word(a), word(b), word(c)
    assert (A * B) * C == A * (B * C)


@settings(max_examples=40, deadline=None)
@given(st.lists(letters, max_size=3), st.lists(letters, max_size=3), st.integers(-3, 3))
def test_matrix_elements_multiply(a, b, k):
    A, B = word(a), word(b)
    lhs = matrix_element(A * B, k)
    rhs = IndexedPolynomial.constant(0)
    for j in range(-6, 7):
        rhs = rhs + matrix_element(A, k - j).shifted(j) * matrix_element(B, j)
    assert lhs == rhs


def test_tetravalent_equation_text():
    (eq,) = build_recursion_system(tetravalent())
    assert eq.pretty() == "1 = R[n] - g*R[n]*(R[n+1]+R[n]+R[n-1])"
    assert eq.solved() == "R[n] = 1 + g*R[n]*(R[n+1]+R[n]+R[n-1])"


def test_tetra_hexa_equation_has_hexavalent_term():
    (eq,) = build_recursion_system(tetra_hexa())
    rhs = eq.remainder()
    assert rhs == parse_polynomial(
        "1 + g4*R[n]*(R[n+1]+R[n]+R[n-1]) + g6*R[n]*(R[n+1]*R[n+2]+R[n+1]^2+2*R[n+1]*R[n]"
        "+R[n+1]*R[n-1]+R[n]^2+2*R[n]*R[n-1]+R[n-1]^2+R[n-1]*R[n-2])")


def test_constellation3_system():
    eqs = build_recursion_system(constellation(3, {1: "gt1", 2: "gt2"}))
    text = format_system(eqs)
    by = {e.principal: e.remainder() for e in eqs}
    assert by["R"] == parse_polynomial("1 + g*(X[n]+X[n-1])")
    assert by["Y"] == parse_polynomial("g")
    # hexavalent black vertices: five words, each with a white-vertex weight Y
    assert by["X"] == parse_polynomial(
        "gt1*R[n+1]*R[n] + gt2*R[n+1]*R[n]*(R[n+3]*R[n+2]*Y[n+2]+R[n+2]*R[n+1]*Y[n+1]"
        "+R[n+1]*R[n]*Y[n]+R[n]*R[n-1]*Y[n-1]+R[n-1]*R[n-2]*Y[n-2])")
    assert "R[n+3]*R[n+2]" in text


def test_ising_five_equation_system():
    eqs = build_recursion_system(ising())
    by = {e.principal: e.remainder() for e in eqs}
    assert set(by) == {"V", "X1", "X2", "R", "R2"}
    assert by["X2"] == parse_polynomial("g")
    assert by["R2"] == parse_polynomial("g*V[n]*V[n-1]*V[n-2]")


def test_substituting_solutions_reproduces_lhs():
    for model in (tetravalent(), trivalent(), tetra_hexa(), ising()):
        fam = solve_sequences(model, 5)
        assert residual(fam) == 0


def test_odd_free_arbitrary_valence_reduces_to_even():
    # with only even couplings the S sequence vanishes and R_n matches the even system
    arb = solve_sequences(arbitrary_valence({4: "g"}), 6)
    ev = solve_sequences(even_valence({4: "g"}), 6, n_max=arb.n_max)
    for n in range(arb.n_max + 1):
        assert arb[("S", n)].is_zero()
        assert arb[("R", n)] == ev[("R", n)]


@given(st.sampled_from(["R[n]*R[n+1]", "2*g*S[n-1]^2 + 1/3", "g4*R[n]*(R[n+1]+R[n-1])",
                        "S[n+2] - S[n-2]"]))
def test_parse_format_round_trip(text):
    p = parse_polynomial(text)
    assert parse_polynomial(format_polynomial(p)) == p


def test_bad_model_rejected():
    with pytest.raises(UsageError):
        build_recursion_system(constellation(1, {1: "gt1"}))
