"""Truncated Taylor arithmetic (jets) for exact high-order derivatives.

A jet of order ``k`` at ``r`` stores the Taylor coefficients ``f^(j)(r)/j!``
for ``j <= k``. Arithmetic and elementary functions propagate them by the
usual recurrences, so derivatives of composites come out without finite
differences. Complex jets are allowed (Wronskians with complex rates).
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from ..errors import DomainError, UsageError

MAX_ORDER = 6
_FACT = np.array([math.factorial(k) for k in range(MAX_ORDER + 1)], dtype=float)


class TaylorJet:
    __slots__ = ("center", "taylor")

    def __init__(self, center: float, taylor):
        taylor = np.asarray(taylor)
        if taylor.ndim != 1 or len(taylor) < 1:
            raise UsageError("jet needs a 1-d coefficient array")
        if len(taylor) - 1 > MAX_ORDER:
            raise UsageError(f"jet order is limited to {MAX_ORDER}")
        if not np.iscomplexobj(taylor):
            taylor = taylor.astype(float)
        self.center = center
        self.taylor = taylor

    @classmethod
    def variable(cls, r: float, order: int) -> "TaylorJet":
        t = np.zeros(order + 1)
        t[0] = r
        if order >= 1:
            t[1] = 1.0
        return cls(r, t)

    @classmethod
    def from_derivatives(cls, r: float, derivs) -> "TaylorJet":
        d = np.asarray(derivs)
        return cls(r, d / _FACT[: len(d)])

    @property
    def order(self) -> int:
        return len(self.taylor) - 1

    @property
    def coefficients(self) -> np.ndarray:
        """Value and derivatives ``(f, f', ..., f^(k))``."""
        return self.taylor * _FACT[: len(self.taylor)]

    def derivative(self, k: int = 1) -> np.ndarray:
        return self.coefficients[k]

    @property
    def value(self):
        return self.taylor[0]

    def differentiate(self) -> "TaylorJet":
        """Jet of ``f'`` (one order lower)."""
        if self.order < 1:
            raise UsageError("cannot differentiate an order-0 jet")
        k = np.arange(1, len(self.taylor))
        return TaylorJet(self.center, self.taylor[1:] * k)

    @property
    def real(self) -> "TaylorJet":
        return TaylorJet(self.center, np.real(self.taylor))

    @property
    def imag(self) -> "TaylorJet":
        return TaylorJet(self.center, np.imag(self.taylor))

    # -- arithmetic -------------------------------------------------------
    def _wrap(self, other) -> "TaylorJet":
        if isinstance(other, TaylorJet):
            if other.order != self.order:
                raise UsageError("jet orders differ")
            return other
        t = np.zeros(len(self.taylor), dtype=np.result_type(self.taylor, complex(other)) if
                     isinstance(other, complex) else self.taylor.dtype)
        t[0] = other
        return TaylorJet(self.center, t)

    def __add__(self, other):
        o = self._wrap(other)
        return TaylorJet(self.center, self.taylor + o.taylor)

    __radd__ = __add__

    def __neg__(self):
        return TaylorJet(self.center, -self.taylor)

    def __sub__(self, other):
        return self + (-self._wrap(other))

    def __rsub__(self, other):
        return self._wrap(other) - self

    def __mul__(self, other):
        if not isinstance(other, TaylorJet):
            return TaylorJet(self.center, self.taylor * other)
        o = self._wrap(other)
        n = len(self.taylor)
        return TaylorJet(self.center, np.convolve(self.taylor, o.taylor)[:n])

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, TaylorJet):
            return TaylorJet(self.center, self.taylor / other)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def reciprocal(self) -> "TaylorJet":
        a = self.taylor
        if a[0] == 0:
            raise DomainError("reciprocal of a jet with zero value")
        n = len(a)
        b = np.zeros(n, dtype=np.result_type(a, float))
        b[0] = 1 / a[0]
        for k in range(1, n):
            b[k] = -np.dot(a[1:k + 1], b[k - 1::-1][:k]) / a[0]
        return TaylorJet(self.center, b)

    def __pow__(self, p):
        if isinstance(p, int) and p >= 0:
            out = self._wrap(1.0)
            for _ in range(p):
                out = out * self
            return out
        if isinstance(p, int):
            return (self ** (-p)).reciprocal()
        return exp(log(self) * p)

    def __repr__(self):
        return f"TaylorJet(r={self.center}, derivs={self.coefficients})"


def _exp_series(a: np.ndarray) -> np.ndarray:
    n = len(a)
    e = np.zeros(n, dtype=np.result_type(a, float))
    e[0] = np.exp(a[0])
    for k in range(1, n):
        j = np.arange(1, k + 1)
        e[k] = np.sum(j * a[j] * e[k - j]) / k
    return e


def exp(x: TaylorJet) -> TaylorJet:
    return TaylorJet(x.center, _exp_series(x.taylor))


def log(x: TaylorJet) -> TaylorJet:
    a = x.taylor
    if a[0] == 0 or (not np.iscomplexobj(a) and a[0] < 0):
        raise DomainError("log of a non-positive jet value")
    n = len(a)
    lg = np.zeros(n, dtype=np.result_type(a, float))
    lg[0] = np.log(a[0])
    for k in range(1, n):
        j = np.arange(1, k)
        lg[k] = (a[k] - np.sum(j * lg[j] * a[k - j]) / k) / a[0]
    return TaylorJet(x.center, lg)


def _sinh_cosh(a: np.ndarray):
    n = len(a)
    dt = np.result_type(a, float)
    s = np.zeros(n, dtype=dt)
    c = np.zeros(n, dtype=dt)
    s[0] = np.sinh(a[0])
    c[0] = np.cosh(a[0])
    for k in range(1, n):
        j = np.arange(1, k + 1)
        s[k] = np.sum(j * a[j] * c[k - j]) / k
        c[k] = np.sum(j * a[j] * s[k - j]) / k
    return s, c


def sinh(x: TaylorJet) -> TaylorJet:
    return TaylorJet(x.center, _sinh_cosh(x.taylor)[0])


def cosh(x: TaylorJet) -> TaylorJet:
    return TaylorJet(x.center, _sinh_cosh(x.taylor)[1])


def sin(x: TaylorJet) -> TaylorJet:
    s, _ = _sinh_cosh(1j * x.taylor)
    out = -1j * s
    return TaylorJet(x.center, out if np.iscomplexobj(x.taylor) else out.real)


def cos(x: TaylorJet) -> TaylorJet:
    _, c = _sinh_cosh(1j * x.taylor)
    return TaylorJet(x.center, c if np.iscomplexobj(x.taylor) else c.real)


def sqrt(x: TaylorJet) -> TaylorJet:
    a = x.taylor
    if a[0] == 0:
        raise DomainError("sqrt jet at zero")
    n = len(a)
    s = np.zeros(n, dtype=np.result_type(a, float))
    s[0] = np.sqrt(a[0])
    for k in range(1, n):
        s[k] = (a[k] - np.dot(s[1:k], s[k - 1:0:-1])) / (2 * s[0])
    return TaylorJet(x.center, s)


_NAMED: dict[str, Callable[[TaylorJet], TaylorJet]] = {
    "exp": exp, "log": log, "sinh": sinh, "cosh": cosh, "sin": sin, "cos": cos,
    "sqrt": sqrt, "identity": lambda t: t,
}


def jet_eval(f, r: float, order: int) -> TaylorJet:
    """Jet of ``f`` at ``r``.

    ``f`` is a callable acting on jets, or the name of an elementary function.
    """
    if order > MAX_ORDER or order < 0:
        raise UsageError(f"order must be in [0, {MAX_ORDER}]")
    if isinstance(f, str):
        try:
            f = _NAMED[f]
        except KeyError:
            raise UsageError(f"unknown function {f!r}") from None
    with np.errstate(all="raise"):
        try:
            out = f(TaylorJet.variable(r, order))
        except (FloatingPointError, ZeroDivisionError) as exc:
            raise DomainError(f"evaluation failed at r={r}: {exc}") from exc
    if not isinstance(out, TaylorJet):
        out = TaylorJet.variable(r, order)._wrap(out)
    if not np.all(np.isfinite(out.taylor)):
        raise DomainError(f"non-finite jet at r={r}")
    return out
