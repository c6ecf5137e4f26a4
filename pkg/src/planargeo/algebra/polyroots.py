"""Polynomials with complex coefficients and their roots.

Roots come from Aberth-Ehrlich simultaneous iteration; ``numpy.roots``
(companion matrix eigenvalues) is the fallback when Aberth stalls.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import DegenerateInputError, NumericalError, UsageError


@dataclass(frozen=True)
class Polynomial:
    """Ascending-degree coefficients ``c[0] + c[1] x + ...``."""

    coefficients: tuple

    def __init__(self, coefficients: Sequence):
        coeffs = [complex(c) if isinstance(c, complex) else c for c in coefficients]
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coefficients", tuple(coeffs) if coeffs else (0,))

    @property
    def degree(self) -> int:
        if len(self.coefficients) == 1 and self.coefficients[0] == 0:
            return -1
        return len(self.coefficients) - 1

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def derivative(self) -> "Polynomial":
        return Polynomial([k * c for k, c in enumerate(self.coefficients)][1:] or [0])

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        out = [0] * (len(self.coefficients) + len(other.coefficients) - 1)
        for i, a in enumerate(self.coefficients):
            for j, b in enumerate(other.coefficients):
                out[i + j] += a * b
        return Polynomial(out)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        n = max(len(self.coefficients), len(other.coefficients))
        a = list(self.coefficients) + [0] * (n - len(self.coefficients))
        b = list(other.coefficients) + [0] * (n - len(other.coefficients))
        return Polynomial([x + y for x, y in zip(a, b)])

    def scale(self, s) -> "Polynomial":
        return Polynomial([s * c for c in self.coefficients])

    def is_reciprocal(self, tol: float = 1e-10) -> bool:
        c = np.asarray(self.coefficients, dtype=complex)
        scale = max(np.abs(c).max(), 1e-300)
        return bool(np.abs(c - c[::-1]).max() <= tol * scale)

    def coefficient_scale(self) -> float:
        return float(max(abs(complex(c)) for c in self.coefficients))


def laurent_to_polynomial(laurent: dict[int, complex]) -> tuple[Polynomial, int]:
    """Turn ``{power: coeff}`` (negative powers allowed) into ``x^s * laurent``.

    Returns the polynomial and the shift ``s`` that was applied.
    """
    lo = min(laurent)
    hi = max(laurent)
    coeffs = [0] * (hi - lo + 1)
    for k, c in laurent.items():
        coeffs[k - lo] += c
    return Polynomial(coeffs), -lo


def reciprocal_to_w(poly: Polynomial, tol: float = 1e-10) -> Polynomial:
    """Express a palindromic polynomial of even degree 2m as ``x^m P(x + 1/x)``.

    Returns ``P`` as a Polynomial in ``w = x + 1/x``.
    """
    if poly.degree % 2:
        raise UsageError("reciprocal reduction needs an even degree")
    if not poly.is_reciprocal(tol):
        raise UsageError("polynomial is not reciprocal")
    m = poly.degree // 2
    # Laurent coefficients a_k for k=-m..m, symmetric; x^k + x^-k = s_k(w)
    a = {k - m: poly.coefficients[k] for k in range(poly.degree + 1)}
    s = [Polynomial([2]), Polynomial([0, 1])]
    for k in range(2, m + 1):
        s.append(s[-1] * Polynomial([0, 1]) + s[-2].scale(-1))
    acc = Polynomial([a[0]])
    for k in range(1, m + 1):
        acc = acc + s[k].scale(a[k])
    return acc


def w_to_x_roots(w: complex) -> tuple[complex, complex]:
    """Both solutions of ``x + 1/x = w``, the smaller modulus first."""
    disc = cmath.sqrt(w * w - 4)
    r1 = (w + disc) / 2
    r2 = (w - disc) / 2
    return (r1, r2) if abs(r1) <= abs(r2) else (r2, r1)


def _aberth(coeffs: np.ndarray, tol: float, max_iter: int):
    # coeffs descending, monic
    n = len(coeffs) - 1
    dcoeffs = np.polyder(coeffs)
    radius = 1 + np.max(np.abs(coeffs[1:]))
    # Cauchy-type upper bound, initial points off the real axis
    r0 = min(radius, 2 * np.max(np.abs(coeffs[1:])) ** (1.0 / n) + 1e-3) if n else 1.0
    z = r0 * np.exp(1j * (2 * np.pi * np.arange(n) / n + 0.4))
    for _ in range(max_iter):
        p = np.polyval(coeffs, z)
        dp = np.polyval(dcoeffs, z)
        with np.errstate(all="ignore"):
            ratio = p / dp
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, np.inf)
            s = np.sum(1.0 / diff, axis=1)
            step = ratio / (1 - ratio * s)
        if not np.all(np.isfinite(step)):
            return None
        z = z - step
        if np.max(np.abs(step)) <= tol * max(1.0, np.max(np.abs(z))):
            return z
    return None


def _polish(coeffs: np.ndarray, z: np.ndarray, steps: int = 3) -> np.ndarray:
    dcoeffs = np.polyder(coeffs)
    for _ in range(steps):
        dp = np.polyval(dcoeffs, z)
        ok = np.abs(dp) > 0
        z = np.where(ok, z - np.polyval(coeffs, z) / np.where(ok, dp, 1), z)
    return z


def _cluster(z: np.ndarray, radius: float) -> np.ndarray:
    z = z.copy()
    used = np.zeros(len(z), bool)
    for i in range(len(z)):
        if used[i]:
            continue
        group = [j for j in range(i, len(z)) if not used[j] and abs(z[j] - z[i]) < radius]
        if len(group) > 1:
            z[group] = np.mean(z[group])
        used[group] = True
    return z


def poly_roots(p: Polynomial, tol: float = 1e-12, max_iter: int = 500) -> list[complex]:
    """All complex roots of ``p`` (with multiplicity).

    Raises
    ------
    NumericalError
        When neither Aberth iteration nor the companion fallback reaches a
        residual below ``tol`` times the coefficient scale.
    """
    if p.degree < 1:
        raise UsageError("poly_roots needs degree >= 1")
    asc = np.asarray(p.coefficients, dtype=complex)
    # strip zero roots
    nzero = 0
    while asc[0] == 0:
        asc = asc[1:]
        nzero += 1
    desc = asc[::-1] / asc[-1]
    roots = np.zeros(0, dtype=complex)
    if len(desc) > 1:
        z = _aberth(desc, tol * 1e-2, max_iter)
        if z is None:
            z = np.roots(desc).astype(complex)
        z = _polish(desc, z)
        z = _cluster(z, max(np.sqrt(tol), 1e-7) * max(1.0, float(np.max(np.abs(z)))))
        roots = z
    scale = max(np.abs(desc).max(), 1.0)
    resid = np.abs(np.polyval(desc, roots)) / (scale * np.maximum(1.0, np.abs(roots)) ** (len(desc) - 1)) \
        if len(roots) else np.zeros(0)
    # multiple roots converge only to ~sqrt(eps); accept clustered roots at that level
    loose = np.sqrt(tol)
    if len(resid) and np.max(resid) > max(tol, 1e-15) * 1e3:
        z = _polish(desc, np.roots(desc).astype(complex), 5)
        resid2 = np.abs(np.polyval(desc, z)) / (scale * np.maximum(1.0, np.abs(z)) ** (len(desc) - 1))
        if np.max(resid2) < np.max(resid):
            roots, resid = z, resid2
        if np.max(resid) > loose:
            raise NumericalError(f"root finding did not converge; residual {np.max(resid):.3e}")
    out = [complex(0)] * nzero + [complex(r) for r in roots]
    return out


def sort_roots(roots: Sequence[complex]) -> list[complex]:
    """Descending modulus, ties by ascending argument."""
    return sorted(roots, key=lambda z: (-round(abs(z), 12), round(cmath.phase(z), 12)))


def roots_in_unit_disk(p: Polynomial, tol: float = 1e-9) -> list[complex]:
    """Roots strictly inside the unit disk, sorted by descending modulus.

    Raises
    ------
    DegenerateInputError
        If a root lies on the unit circle within ``tol`` (a critical point).
    """
    roots = poly_roots(p)
    inside = []
    for z in roots:
        m = abs(z)
        if abs(m - 1) <= tol:
            raise DegenerateInputError(f"root {z} lies on the unit circle")
        if m < 1:
            inside.append(z)
    return sort_roots(inside)
