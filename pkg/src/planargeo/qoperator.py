"""Shift-operator calculus generating the distance-indexed recursions.

Operators act on a formal basis ``|n>`` with ``sigma|n> = |n+1>`` and
diagonal symbols ``X|n> = X_n |n>``. Every operator word has the normal form

    coeff * sigma^k * X1(.+o1) X2(.+o2) ...

meaning: acting on ``|n>`` it produces ``coeff * X1_{n+o1} X2_{n+o2} ... |n+k>``.
Coefficients are polynomials in coupling names, kept symbolic; numbers are
substituted later by the solver.

A matrix element ``<n+k|A|n>`` is the polynomial in indexed sequence values
carried by the terms of shift ``k``.
"""

from __future__ import annotations

import ast
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from .algebra.series import Rational, to_rational
from .errors import StructuralError, UsageError
from .models import ModelSpec

Factors = tuple  # sorted tuple of (symbol, offset), repeats allowed
Monomial = tuple  # sorted tuple of (coupling, exponent)


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    c = Counter(dict(a))
    for k, e in b:
        c[k] += e
    return tuple(sorted(c.items()))


def mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


# -- indexed polynomials ----------------------------------------------------

class IndexedPolynomial:
    """Polynomial in indexed sequence values ``Name_{n+o}`` and coupling names.

    Keys are ``(factors, monomial)``; values are exact rationals.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping | None = None):
        clean = {}
        for (f, m), c in (terms or {}).items():
            c = to_rational(c)
            if c:
                key = (tuple(sorted(f)), tuple(sorted(m)))
                clean[key] = clean.get(key, 0) + c
        self._terms = {k: v for k, v in clean.items() if v}

    @classmethod
    def constant(cls, c) -> "IndexedPolynomial":
        return cls({((), ()): c})

    @classmethod
    def symbol(cls, name: str, offset: int = 0) -> "IndexedPolynomial":
        return cls({(((name, offset),), ()): 1})

    @classmethod
    def coupling(cls, name: str) -> "IndexedPolynomial":
        return cls({((), ((name, 1),)): 1})

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, (int, Rational)):
            other = IndexedPolynomial.constant(other)
        return isinstance(other, IndexedPolynomial) and self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def _coerce(self, other):
        if isinstance(other, IndexedPolynomial):
            return other
        return IndexedPolynomial.constant(other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        for k, v in other._terms.items():
            out[k] = out.get(k, 0) + v
        return IndexedPolynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return IndexedPolynomial({k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out: dict = defaultdict(lambda: Rational(0))
        for (fa, ma), ca in self._terms.items():
            for (fb, mb), cb in other._terms.items():
                out[(tuple(sorted(fa + fb)), _mono_mul(ma, mb))] += ca * cb
        return IndexedPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise UsageError("only non-negative integer powers")
        out = IndexedPolynomial.constant(1)
        for _ in range(k):
            out = out * self
        return out

    def shifted(self, k: int) -> "IndexedPolynomial":
        """Relabel ``n -> n + k`` in every index."""
        return IndexedPolynomial({(tuple((s, o + k) for s, o in f), m): c
                                  for (f, m), c in self._terms.items()})

    def symbols(self) -> set[str]:
        return {s for (f, _), _c in self._terms.items() for s, _o in f}

    def offsets(self) -> list[int]:
        return [o for (f, _), _c in self._terms.items() for _s, o in f]

    def evaluate(self, n: int, lookup: Callable[[str, int], object],
                 couplings: Mapping[str, object], one=1):
        """Substitute ``Name_{n+o} -> lookup(Name, n+o)`` and couplings by value."""
        acc = None
        for (f, m), c in self._terms.items():
            val = one * c
            for name, e in m:
                val = val * couplings[name] ** e
            for s, o in f:
                val = val * lookup(s, n + o)
            acc = val if acc is None else acc + val
        return one * 0 if acc is None else acc

    def __repr__(self):
        return f"IndexedPolynomial({format_polynomial(self)})"


def parse_polynomial(text: str) -> IndexedPolynomial:
    """Parse ``"1 + g*R[n]*(R[n+1]+R[n-1])"``-style text.

    Bare identifiers are coupling names; subscripted identifiers are sequence
    values indexed by ``n`` plus an integer offset.
    """
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise UsageError(f"cannot parse {text!r}: {exc}") from None

    def offset(node) -> int:
        if isinstance(node, ast.Name) and node.id == "n":
            return 0
        if isinstance(node, ast.BinOp) and isinstance(node.left, ast.Name) and node.left.id == "n" \
                and isinstance(node.right, ast.Constant) and isinstance(node.op, (ast.Add, ast.Sub)):
            return node.right.value if isinstance(node.op, ast.Add) else -node.right.value
        raise UsageError(f"bad index in {text!r}")

    def walk(node):
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant):
            return IndexedPolynomial.constant(to_rational(node.value))
        if isinstance(node, ast.Name):
            return IndexedPolynomial.coupling(node.id)
        if isinstance(node, ast.Subscript) and isinstance(node.value, ast.Name):
            return IndexedPolynomial.symbol(node.value.id, offset(node.slice))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -walk(node.operand)
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                if not isinstance(node.right, ast.Constant):
                    raise UsageError("exponents must be integer literals")
                return walk(node.left) ** int(node.right.value)
            if isinstance(node.op, ast.Div) and isinstance(node.right, ast.Constant):
                return walk(node.left) * IndexedPolynomial.constant(
                    1 / to_rational(node.right.value))
            a, b = walk(node.left), walk(node.right)
            ops = {ast.Add: a.__add__, ast.Sub: a.__sub__, ast.Mult: a.__mul__}
            for t, fn in ops.items():
                if isinstance(node.op, t):
                    return fn(b)
        raise UsageError(f"unsupported syntax in {text!r}")

    return walk(tree)


# -- pretty printing ----------------------------------------------------------

def _fmt_index(offset: int) -> str:
    if offset == 0:
        return "n"
    return f"n{offset:+d}"


def _fmt_factors(factors: Iterable) -> str:
    cnt = Counter(factors)
    # descending offsets, names alphabetical within an offset
    keys = sorted(cnt, key=lambda so: (so[0], -so[1]))
    parts = []
    for s, o in keys:
        base = f"{s}[{_fmt_index(o)}]"
        parts.append(base if cnt[(s, o)] == 1 else f"{base}^{cnt[(s, o)]}")
    return "*".join(parts)


def _fmt_mono(m: Monomial) -> str:
    return "*".join(k if e == 1 else f"{k}^{e}" for k, e in m)


def _fmt_scalar(c) -> str:
    return str(int(c)) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _factor_key(f):
    return tuple((s, -o) for s, o in f)


def format_polynomial(poly: IndexedPolynomial, lead: Iterable = ()) -> str:
    """Human-readable text; couplings factored out and common factors pulled."""
    if not poly:
        return "0"
    groups: dict = defaultdict(list)
    for (f, m), c in poly.items():
        groups[m].append((f, c))
    order = sorted(groups, key=lambda m: (mono_degree(m), m))
    lead = list(lead)
    chunks = []
    for m in order:
        terms = sorted(groups[m], key=lambda fc: (lead and fc[0] != tuple(lead), -len(fc[0]),
                                                  _factor_key(fc[0])))
        if not m:
            # coupling-free terms are printed one by one (principal first)
            for f, c in terms:
                sign = "-" if c < 0 else "+"
                mag = abs(c)
                body = _fmt_factors(f)
                if not body:
                    txt = _fmt_scalar(mag)
                elif mag == 1:
                    txt = body
                else:
                    txt = f"{_fmt_scalar(mag)}*{body}"
                chunks.append((sign, txt))
            continue
        common = Counter(terms[0][0])
        for f, _c in terms[1:]:
            common &= Counter(f)
        neg = all(c < 0 for _, c in terms)
        inner = []
        for f, c in sorted(terms, key=lambda fc: _factor_key(tuple(sorted(
                (Counter(fc[0]) - common).elements(), key=lambda so: (so[0], -so[1]))))):
            rest = list((Counter(f) - common).elements())
            c = -c if neg else c
            body = _fmt_factors(rest)
            mag = abs(c)
            if not body:
                txt = _fmt_scalar(mag)
            elif mag == 1:
                txt = body
            else:
                txt = f"{_fmt_scalar(mag)}*{body}"
            inner.append(("-" if c < 0 else "+", txt))
        pieces = [_fmt_mono(m)]
        cf = _fmt_factors(common.elements())
        if cf:
            pieces.append(cf)
        if len(inner) == 1:
            s, txt = inner[0]
            if txt != "1":
                pieces.append(txt)
            sign = "-" if (neg != (s == "-")) else "+"
        else:
            body = inner[0][1] if inner[0][0] == "+" else "-" + inner[0][1]
            body += "".join(s + t for s, t in inner[1:])
            pieces.append(f"({body})")
            sign = "-" if neg else "+"
        chunks.append((sign, "*".join(pieces)))
    first_sign, first = chunks[0]
    out = ("-" if first_sign == "-" else "") + first
    for s, t in chunks[1:]:
        out += f" {s} {t}"
    return out


# -- operators --------------------------------------------------------------

@dataclass(frozen=True)
class NormalTerm:
    shift: int
    factors: Factors
    coeff: dict  # monomial -> Rational


class ShiftOperator:
    """Finite sum of normal-ordered terms; immutable."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping | None = None):
        # key: (shift, factors, monomial) -> Rational
        self._terms = {}
        for (k, f, m), c in (terms or {}).items():
            c = to_rational(c)
            if c:
                key = (k, tuple(sorted(f)), tuple(sorted(m)))
                self._terms[key] = self._terms.get(key, 0) + c
        self._terms = {k: v for k, v in self._terms.items() if v}

    @classmethod
    def identity(cls) -> "ShiftOperator":
        return cls({(0, (), ()): 1})

    @classmethod
    def sigma(cls, k: int = 1) -> "ShiftOperator":
        return cls({(k, (), ()): 1})

    @classmethod
    def diagonal(cls, name: str) -> "ShiftOperator":
        return cls({(0, ((name, 0),), ()): 1})

    @classmethod
    def coupling(cls, name: str) -> "ShiftOperator":
        return cls({(0, (), ((name, 1),)): 1})

    @classmethod
    def scalar(cls, c) -> "ShiftOperator":
        return cls({(0, (), ()): c})

    @property
    def terms(self) -> list[NormalTerm]:
        grouped: dict = defaultdict(dict)
        for (k, f, m), c in self._terms.items():
            grouped[(k, f)][m] = c
        return [NormalTerm(k, f, cs) for (k, f), cs in sorted(grouped.items())]

    def raw_items(self):
        return self._terms.items()

    def shifts(self) -> set[int]:
        return {k for k, _f, _m in self._terms}

    def __eq__(self, other):
        return isinstance(other, ShiftOperator) and self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def _coerce(self, other):
        if isinstance(other, ShiftOperator):
            return other
        return ShiftOperator.scalar(other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        for k, v in other._terms.items():
            out[k] = out.get(k, 0) + v
        return ShiftOperator(out)

    __radd__ = __add__

    def __neg__(self):
        return ShiftOperator({k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        return op_mul(self, self._coerce(other))

    def __rmul__(self, other):
        return op_mul(self._coerce(other), self)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise UsageError("only non-negative integer powers")
        out = ShiftOperator.identity()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __repr__(self):
        return f"ShiftOperator({len(self._terms)} terms)"


def op_mul(a: ShiftOperator, b: ShiftOperator) -> ShiftOperator:
    """Normal-ordered product ``a * b`` (``b`` acts first).

    Moving ``b``'s shift ``kb`` to the left past ``a``'s symbols raises
    each of their offsets by ``kb``.
    """
    out: dict = defaultdict(lambda: Rational(0))
    for (ka, fa, ma), ca in a.raw_items():
        for (kb, fb, mb), cb in b.raw_items():
            f = tuple(sorted(fb + tuple((s, o + kb) for s, o in fa)))
            out[(ka + kb, f, _mono_mul(ma, mb))] += ca * cb
    return ShiftOperator(out)


def matrix_element(op: ShiftOperator, row_offset: int) -> IndexedPolynomial:
    """``<n + row_offset | op | n>`` as a polynomial in ``Name_{n+o}``."""
    return IndexedPolynomial({(f, m): c for (k, f, m), c in op.raw_items() if k == row_offset})


# -- equations --------------------------------------------------------------

@dataclass(frozen=True)
class SequenceEquation:
    """``lhs = rhs`` with a distinguished principal unknown at offset 0.

    ``rhs`` is the matrix element relabelled by ``n -> n - relabel`` so the
    principal unknown (coefficient 1, no couplings) sits at index ``n``.
    """

    lhs: Rational
    rhs: IndexedPolynomial
    principal: str
    row_offset: int = 0
    relabel: int = 0
    source: str = ""

    def remainder(self) -> IndexedPolynomial:
        """``lhs - (rhs - principal)``: the solved form ``principal = remainder``."""
        return IndexedPolynomial.constant(self.lhs) - (
            self.rhs - IndexedPolynomial.symbol(self.principal, 0))

    def max_offset(self) -> int:
        return max(self.rhs.offsets(), default=0)

    def min_offset(self) -> int:
        return min(self.rhs.offsets(), default=0)

    def residual(self, n: int, lookup, couplings, one=1):
        return one * self.lhs - self.rhs.evaluate(n, lookup, couplings, one)

    def pretty(self) -> str:
        return f"{_fmt_scalar(self.lhs)} = " + format_polynomial(
            self.rhs, lead=((self.principal, 0),))

    def solved(self) -> str:
        """``principal[n] = remainder``, the form the solver iterates."""
        return f"{self.principal}[n] = " + format_polynomial(self.remainder())

    def __str__(self):
        return self.pretty()


def equation_from_polynomial(lhs, rhs: IndexedPolynomial, row_offset: int = 0,
                             source: str = "") -> SequenceEquation:
    """Normalize ``lhs = rhs`` so its principal unknown sits at offset 0.

    The principal is the unique single-factor term with coefficient exactly 1
    and no coupling.
    """
    cands = [f[0] for (f, m), c in rhs.items() if len(f) == 1 and not m and c == 1]
    if len(cands) != 1:
        raise StructuralError(f"equation {source or format_polynomial(rhs)} has "
                              f"{len(cands)} principal candidates")
    name, off = cands[0]
    return SequenceEquation(to_rational(lhs), rhs.shifted(-off), name, row_offset, -off, source)


def _q_even() -> ShiftOperator:
    return ShiftOperator.sigma(1) + ShiftOperator.sigma(-1) * ShiftOperator.diagonal("R")


def _q_arbitrary() -> ShiftOperator:
    s, si = ShiftOperator.sigma(1), ShiftOperator.sigma(-1)
    return s + si * ShiftOperator.diagonal("S") * s + si * ShiftOperator.diagonal("R")


def _q_constellation(p: int) -> tuple[ShiftOperator, ShiftOperator]:
    s, si = ShiftOperator.sigma(1), ShiftOperator.sigma(-1)
    q1 = s + si * ShiftOperator.diagonal("X") * ShiftOperator.sigma(2 - p)
    q2 = si * ShiftOperator.diagonal("R") + ShiftOperator.sigma(p - 2) * ShiftOperator.diagonal("Y") * s
    return q1, q2


def _r_name(k: int) -> str:
    return "R" if k == 1 else f"R{k}"


def _q_bipartite_even(kx: int, kr: int) -> tuple[ShiftOperator, ShiftOperator]:
    s, si = ShiftOperator.sigma(1), ShiftOperator.sigma(-1)
    q1 = s
    for k in range(1, kr + 1):
        q1 = q1 + ShiftOperator.sigma(1 - 2 * k) * ShiftOperator.diagonal(_r_name(k))
    q2 = si * ShiftOperator.diagonal("V")
    for k in range(1, kx + 1):
        q2 = q2 + si * ShiftOperator.diagonal(f"X{k}") * ShiftOperator.sigma(2 * k)
    return q1, q2


def model_operators(model: ModelSpec) -> dict[str, ShiftOperator]:
    """The generating operators for the model (``Q`` or ``Q1``, ``Q2``)."""
    fam = model.family
    if fam == "even_valence":
        return {"Q": _q_even()}
    if fam == "arbitrary_valence":
        return {"Q": _q_arbitrary()}
    if fam == "constellation":
        q1, q2 = _q_constellation(model.p)
        return {"Q1": q1, "Q2": q2}
    if fam in ("bipartite_even", "ising"):
        kx = max(k for k, _ in model.weights) // 2
        kr = max(k for k, _ in model.dual_weights) // 2
        q1, q2 = _q_bipartite_even(kx, kr)
        return {"Q1": q1, "Q2": q2}
    raise UsageError(f"family {fam!r} has no operator form")


def _weighted_sum(weights, base: ShiftOperator, power: Callable[[int], int]) -> ShiftOperator:
    out = ShiftOperator()
    for k, name in weights:
        out = out + ShiftOperator.coupling(name) * base ** power(k)
    return out


ISING_REDUCED = (
    ("1", "V[n] - g^2*V[n]*(V[n+1]*V[n+2] + V[n+1]*V[n-1] + V[n-1]*V[n-2])"
          " - R[n]*(c + g*(R[n+1] + R[n] + R[n-1]))"),
    ("0", "R[n] - V[n]*(c + g*(R[n+1] + R[n] + R[n-1]))"),
)


def build_recursion_system(model: ModelSpec) -> list[SequenceEquation]:
    """Every equation determining the sequences of ``model``."""
    fam = model.family
    eqs: list[SequenceEquation] = []
    if fam == "ising_reduced":
        for lhs, text in ISING_REDUCED:
            eqs.append(equation_from_polynomial(to_rational(lhs), parse_polynomial(text),
                                                source="reduced"))
        return eqs
    ops = model_operators(model)
    if fam == "even_valence":
        q = ops["Q"]
        a = q - _weighted_sum(model.weights, q, lambda k: k - 1)
        eqs.append(equation_from_polynomial(1, matrix_element(a, -1), -1, "<n-1|A|n>"))
    elif fam == "arbitrary_valence":
        q = ops["Q"]
        a = q - _weighted_sum(model.weights, q, lambda k: k - 1)
        eqs.append(equation_from_polynomial(0, matrix_element(a, 0), 0, "<n|A|n>"))
        eqs.append(equation_from_polynomial(1, matrix_element(a, -1), -1, "<n-1|A|n>"))
    elif fam == "constellation":
        p = model.p
        q1, q2 = ops["Q1"], ops["Q2"]
        (_, gname), = model.weights
        a = q2 - ShiftOperator.coupling(gname) * q1 ** (p - 1)
        b = q1 - _weighted_sum(model.dual_weights, q2, lambda i: p * i - 1)
        eqs.append(equation_from_polynomial(1, matrix_element(a, -1), -1, "<n-1|A|n>"))
        eqs.append(equation_from_polynomial(0, matrix_element(a, p - 1), p - 1, f"<n+{p - 1}|A|n>"))
        eqs.append(equation_from_polynomial(0, matrix_element(b, 1 - p), 1 - p,
                                            f"<n-{p - 1}|B|n>"))
    else:  # bipartite_even / ising
        q1, q2 = ops["Q1"], ops["Q2"]
        a = q2 - _weighted_sum(model.weights, q1, lambda k: k - 1)
        b = q1 - _weighted_sum(model.dual_weights, q2, lambda k: k - 1)
        eqs.append(equation_from_polynomial(1, matrix_element(a, -1), -1, "<n-1|A|n>"))
        m = 1
        while matrix_element(q2, 2 * m - 1):
            eqs.append(equation_from_polynomial(0, matrix_element(a, 2 * m - 1), 2 * m - 1,
                                                f"<n+{2 * m - 1}|A|n>"))
            m += 1
        m = 1
        while matrix_element(q1, 1 - 2 * m):
            eqs.append(equation_from_polynomial(0, matrix_element(b, 1 - 2 * m), 1 - 2 * m,
                                                f"<n-{2 * m - 1}|B|n>"))
            m += 1
    principals = [e.principal for e in eqs]
    if len(set(principals)) != len(principals):
        raise StructuralError(f"duplicate principal unknowns {principals}")
    undefined = set().union(*(e.rhs.symbols() for e in eqs)) - set(principals)
    if undefined:
        raise StructuralError(f"sequences {sorted(undefined)} have no defining equation")
    return eqs


def format_system(eqs: Iterable[SequenceEquation]) -> str:
    return "\n".join(e.pretty() for e in eqs)
