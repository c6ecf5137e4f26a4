"""Chebyshev polynomials U_n by three-term recurrence."""

from __future__ import annotations

import cmath

from ..errors import UsageError


def chebyshev_u(n: int, w):
    """``U_n(w)`` from ``U_{n+1} = w U_n - U_{n-1}``, ``U_{-1} = 0``, ``U_0 = 1``."""
    if n < -1:
        raise UsageError("chebyshev_u needs n >= -1")
    if n == -1:
        return 0 * w
    prev, cur = 0 * w, 1 + 0 * w
    for _ in range(n):
        prev, cur = cur, w * cur - prev
    return cur


def chebyshev_u_of_x(n: int, x):
    """``U_n`` evaluated at ``w = sqrt(x) + 1/sqrt(x)`` via the x-form."""
    s = cmath.sqrt(x)
    if abs(s - 1 / s) < 1e-14:
        return n + 1
    return (s ** (n + 1) - s ** (-(n + 1))) / (s - 1 / s)
