"""Exact multivariate power series truncated at a total degree.

Coefficients are arbitrary-precision rationals (``gmpy2.mpq``); every value is
immutable once built, so series can be shared freely.
"""

from __future__ import annotations

import json
from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Callable, Iterable, Mapping, Sequence

import gmpy2

from ..errors import StructuralError, UsageError

Rational = gmpy2.mpq
_MPQ = type(gmpy2.mpq(0))


def to_rational(value) -> "gmpy2.mpq":
    """Convert ints, Fractions, decimal strings, ``"p/q"`` strings or floats exactly."""
    if isinstance(value, _MPQ):
        return value
    if isinstance(value, bool):
        raise UsageError("booleans are not rationals")
    if isinstance(value, (int, type(gmpy2.mpz(0)))):
        return gmpy2.mpq(value)
    if isinstance(value, _RationalABC):
        return gmpy2.mpq(value.numerator, value.denominator)
    if isinstance(value, float):
        f = Fraction(value)
        return gmpy2.mpq(f.numerator, f.denominator)
    if isinstance(value, str):
        try:
            f = Fraction(value.strip())
        except ValueError as exc:
            raise UsageError(f"cannot parse rational {value!r}") from exc
        return gmpy2.mpq(f.numerator, f.denominator)
    raise UsageError(f"cannot convert {type(value).__name__} to a rational")


def _degree(exp: tuple[int, ...]) -> int:
    return sum(exp)


class TruncatedSeries:
    """Power series in ``variables`` with all terms of total degree > ``cutoff`` dropped.

    Parameters
    ----------
    variables : sequence of str
        Ordered coupling names; exponent vectors are indexed in this order.
    cutoff : int
        Maximum total degree kept.
    terms : mapping, optional
        Exponent tuple -> coefficient. Terms above the cutoff and zeros are dropped.
    """

    __slots__ = ("variables", "cutoff", "_terms", "_by_degree")

    def __init__(self, variables: Sequence[str], cutoff: int,
                 terms: Mapping[tuple[int, ...], object] | None = None):
        if cutoff < 0:
            raise UsageError("cutoff must be >= 0")
        self.variables = tuple(variables)
        self.cutoff = int(cutoff)
        nv = len(self.variables)
        clean: dict[tuple[int, ...], gmpy2.mpq] = {}
        if terms:
            for exp, c in terms.items():
                exp = tuple(int(e) for e in exp)
                if len(exp) != nv:
                    raise UsageError(f"exponent {exp} does not match {nv} variables")
                if _degree(exp) > self.cutoff:
                    continue
                c = to_rational(c)
                if c != 0:
                    clean[exp] = c
        self._terms = clean
        self._by_degree = None

    # -- construction -----------------------------------------------------
    @classmethod
    def _raw(cls, variables, cutoff, terms):
        # terms already clean
        obj = cls.__new__(cls)
        obj.variables = variables
        obj.cutoff = cutoff
        obj._terms = terms
        obj._by_degree = None
        return obj

    @classmethod
    def constant(cls, value, variables: Sequence[str], cutoff: int) -> "TruncatedSeries":
        return cls(variables, cutoff, {(0,) * len(variables): value})

    @classmethod
    def zero(cls, variables: Sequence[str], cutoff: int) -> "TruncatedSeries":
        return cls(variables, cutoff)

    @classmethod
    def var(cls, name: str, variables: Sequence[str], cutoff: int) -> "TruncatedSeries":
        variables = tuple(variables)
        if name not in variables:
            raise UsageError(f"unknown variable {name!r}")
        exp = tuple(1 if v == name else 0 for v in variables)
        return cls(variables, cutoff, {exp: 1})

    @classmethod
    def univariate(cls, coeffs: Iterable, name: str = "g",
                   cutoff: int | None = None) -> "TruncatedSeries":
        coeffs = list(coeffs)
        if cutoff is None:
            cutoff = max(len(coeffs) - 1, 0)
        return cls((name,), cutoff, {(k,): c for k, c in enumerate(coeffs)})

    # -- inspection -------------------------------------------------------
    @property
    def terms(self) -> dict[tuple[int, ...], gmpy2.mpq]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, exp) -> gmpy2.mpq:
        if isinstance(exp, Mapping):
            exp = tuple(int(exp.get(v, 0)) for v in self.variables)
        elif isinstance(exp, int):
            if len(self.variables) != 1:
                raise UsageError("integer exponent only valid for univariate series")
            exp = (exp,)
        return self._terms.get(tuple(exp), gmpy2.mpq(0))

    def coefficients(self) -> list[gmpy2.mpq]:
        """Dense coefficient list for a univariate series."""
        if len(self.variables) != 1:
            raise UsageError("coefficients() needs a univariate series")
        return [self._terms.get((k,), gmpy2.mpq(0)) for k in range(self.cutoff + 1)]

    def degree_part(self, d: int) -> dict[tuple[int, ...], gmpy2.mpq]:
        return dict(self._grouped().get(d, {}))

    def _grouped(self):
        if self._by_degree is None:
            g: dict[int, dict] = {}
            for exp, c in self._terms.items():
                g.setdefault(_degree(exp), {})[exp] = c
            self._by_degree = g
        return self._by_degree

    def is_zero(self) -> bool:
        return not self._terms

    def constant_term(self) -> gmpy2.mpq:
        return self._terms.get((0,) * len(self.variables), gmpy2.mpq(0))

    def max_abs_coefficient(self) -> gmpy2.mpq:
        return max((abs(c) for c in self._terms.values()), default=gmpy2.mpq(0))

    def valuation(self) -> int | None:
        """Lowest total degree carrying a nonzero term (None for zero)."""
        return min((_degree(e) for e in self._terms), default=None)

    # -- arithmetic -------------------------------------------------------
    def _check(self, other: "TruncatedSeries"):
        if self.variables != other.variables:
            raise UsageError(f"variable mismatch {self.variables} vs {other.variables}")
        if self.cutoff != other.cutoff:
            raise UsageError(f"cutoff mismatch {self.cutoff} vs {other.cutoff}")

    def _coerce(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            self._check(other)
            return other
        return TruncatedSeries.constant(to_rational(other), self.variables, self.cutoff)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return TruncatedSeries._raw(self.variables, self.cutoff, out)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries._raw(self.variables, self.cutoff,
                                    {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, factor) -> "TruncatedSeries":
        factor = to_rational(factor)
        if factor == 0:
            return TruncatedSeries._raw(self.variables, self.cutoff, {})
        return TruncatedSeries._raw(self.variables, self.cutoff,
                                    {e: c * factor for e, c in self._terms.items()})

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self.scale(other)
        self._check(other)
        cutoff = self.cutoff
        a_groups = self._grouped()
        b_groups = other._grouped()
        out: dict[tuple[int, ...], gmpy2.mpq] = {}
        nv = len(self.variables)
        for da, ta in a_groups.items():
            for db, tb in b_groups.items():
                if da + db > cutoff:
                    continue
                for ea, ca in ta.items():
                    for eb, cb in tb.items():
                        e = ea if nv == 0 else tuple(x + y for x, y in zip(ea, eb))
                        out[e] = out.get(e, 0) + ca * cb
        out = {e: c for e, c in out.items() if c}
        return TruncatedSeries._raw(self.variables, cutoff, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise UsageError("only non-negative integer powers")
        result = TruncatedSeries.constant(1, self.variables, self.cutoff)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def inverse(self) -> "TruncatedSeries":
        """Multiplicative inverse; requires a nonzero constant term."""
        c0 = self.constant_term()
        if c0 == 0:
            raise UsageError("series without constant term is not invertible")
        one = TruncatedSeries.constant(1, self.variables, self.cutoff)
        # 1/s = (1/c0) * sum_k (-u)^k with u = s/c0 - 1 of valuation >= 1
        u = self.scale(1 / c0) - one
        acc = one
        term = one
        for _ in range(self.cutoff):
            term = term * (-u)
            if term.is_zero():
                break
            acc = acc + term
        return acc.scale(1 / c0)

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            return self * other.inverse()
        return self.scale(1 / to_rational(other))

    def __rtruediv__(self, other):
        return self.inverse().scale(other)

    def truncate(self, cutoff: int) -> "TruncatedSeries":
        return TruncatedSeries(self.variables, cutoff,
                               {e: c for e, c in self._terms.items() if _degree(e) <= cutoff})

    def with_cutoff(self, cutoff: int) -> "TruncatedSeries":
        return self.truncate(cutoff)

    # -- comparison -------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, TruncatedSeries):
            return (self.variables == other.variables and self.cutoff == other.cutoff
                    and self._terms == other._terms)
        try:
            return self == self._coerce(other)
        except Exception:
            return NotImplemented

    __hash__ = None

    # -- evaluation -------------------------------------------------------
    def evaluate(self, values: Mapping[str, float] | Sequence[float] | float) -> float:
        """Floating evaluation by nested Horner schemes, one variable at a time."""
        if not isinstance(values, (Mapping, Sequence)):
            values = [values]
        if isinstance(values, Mapping):
            vals = [values[v] for v in self.variables]
        else:
            vals = list(values)
        if len(vals) != len(self.variables):
            raise UsageError("wrong number of evaluation values")
        items = [(e, float(c)) for e, c in self._terms.items()]
        return _horner_nested(items, vals, 0)

    # -- serialization ----------------------------------------------------
    def to_dict(self) -> dict:
        terms = sorted(self._terms.items(), key=lambda kv: (_degree(kv[0]), kv[0]))
        return {
            "variables": list(self.variables),
            "cutoff": self.cutoff,
            "terms": [{"exp": list(e), "num": str(c.numerator), "den": str(c.denominator)}
                      for e, c in terms],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: Mapping) -> "TruncatedSeries":
        terms = {tuple(t["exp"]): gmpy2.mpq(int(t["num"]), int(t["den"])) for t in data["terms"]}
        return cls(data["variables"], data["cutoff"], terms)

    @classmethod
    def from_json(cls, text: str) -> "TruncatedSeries":
        return cls.from_dict(json.loads(text))

    def __repr__(self):
        if not self._terms:
            return f"TruncatedSeries(0, cutoff={self.cutoff})"
        parts = []
        for e, c in sorted(self._terms.items(), key=lambda kv: (_degree(kv[0]), kv[0])):
            mono = "*".join(v if k == 1 else f"{v}^{k}"
                            for v, k in zip(self.variables, e) if k)
            parts.append(f"{c}" if not mono else (mono if c == 1 else f"{c}*{mono}"))
        return f"TruncatedSeries({' + '.join(parts)}, cutoff={self.cutoff})"


def _horner_nested(items, vals, i):
    if i == len(vals):
        return sum(c for _, c in items)
    by_power: dict[int, list] = {}
    for e, c in items:
        by_power.setdefault(e[i], []).append((e, c))
    if not by_power:
        return 0.0
    top = max(by_power)
    acc = 0.0
    for k in range(top, -1, -1):
        acc = acc * vals[i]
        if k in by_power:
            acc += _horner_nested(by_power[k], vals, i + 1)
    return acc


def series_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a * b


def series_solve_fixed_point(fmap: Callable[[TruncatedSeries], TruncatedSeries],
                             seed: TruncatedSeries, cutoff: int | None = None) -> TruncatedSeries:
    """Unique fixed point of a degree-graded contraction ``X -> fmap(X)``.

    After iteration ``k`` every coefficient of degree < ``k`` is frozen; a change
    below that degree means ``fmap`` is not contractive and raises
    :class:`StructuralError`.
    """
    if cutoff is None:
        cutoff = seed.cutoff
    x = seed.truncate(cutoff) if seed.cutoff != cutoff else seed
    for k in range(cutoff + 2):
        nxt = fmap(x)
        if not isinstance(nxt, TruncatedSeries):
            nxt = x._coerce(nxt)
        diff = nxt - x
        low = diff.valuation()
        if low is not None and k >= 1 and low < k:
            raise StructuralError(
                f"map is not contractive: degree {low} changed at iteration {k}")
        x = nxt
        if diff.is_zero() and k >= 1:
            return x
    if not (fmap(x) - x).is_zero():
        raise StructuralError("fixed-point iteration did not stabilize")
    return x
