"""Characteristic equations and closed-form (soliton) solutions.

At large ``n`` every sequence approaches its distance-free limit as a sum of
powers ``x_i^n`` where the ``x_i`` are the unit-disk roots of a reciprocal
characteristic polynomial. The exact solutions are ratios of shifted
soliton sums

    u_n = sum_{S subset roots} prod_{i in S} (-lambda_i x_i^{n+s}) prod_{i<j in S} c_ij

with pairing factors ``c_ij`` that depend on the family, and integration
constants ``lambda_i`` fixed by requiring ``u`` to vanish at a few negative
indices.
"""

from __future__ import annotations

import cmath
import itertools
from dataclasses import dataclass, field
from math import comb
from typing import Mapping, Sequence

import numpy as np

from .algebra.chebyshev import chebyshev_u_of_x
from .algebra.polyroots import (Polynomial, laurent_to_polynomial, poly_roots, reciprocal_to_w,
                                sort_roots, w_to_x_roots)
from .algebra.series import TruncatedSeries
from .errors import DegenerateInputError, DomainError, PoleError, UsageError
from .models import ModelSpec, constellation
from .qoperator import build_recursion_system
from .recursion import coupling_series, numeric_limits, solve_distance_free, solve_sequences

LIMIT_TOL = 1e-8
DISTINCT_TOL = 1e-9


# -- characteristic equations -------------------------------------------------

def _laurent_add(acc: dict, poly: Mapping[int, complex], scale=1.0):
    for k, v in poly.items():
        acc[k] = acc.get(k, 0) + scale * v
    return acc


def _laurent_mul(a: Mapping[int, complex], b: Mapping[int, complex]) -> dict:
    out: dict = {}
    for i, x in a.items():
        for j, y in b.items():
            out[i + j] = out.get(i + j, 0) + x * y
    return out


def _u_even(j: int) -> dict:
    """``U_{2j}(sqrt x + 1/sqrt x) = sum_{i=-j..j} x^i``."""
    return {i: 1.0 for i in range(-j, j + 1)}


def _weights(model: ModelSpec, couplings: Mapping[str, float], dual=False) -> dict[int, float]:
    src = model.dual_weights if dual else model.weights
    return {k: couplings[name] for k, name in src}


def even_characteristic(model: ModelSpec, limits, couplings) -> dict:
    """``1 - sum_k g_{2k+2} R^k sum_l binom(2k+1, l) U_{2k-2l}(w)``."""
    R = limits["R"]
    out = {0: 1.0}
    for v, g in _weights(model, couplings).items():
        k = v // 2 - 1
        inner: dict = {}
        for l in range(k + 1):
            _laurent_add(inner, _u_even(k - l), comb(2 * k + 1, l))
        _laurent_add(out, inner, -g * R ** k)
    return out


def arbitrary_characteristic(model: ModelSpec, limits, couplings) -> dict:
    """Tri/tetravalent form ``(g4 R(w+4) + S(2g3 + 3g4 S) - 1)^2 - R(g3 + 3g4 S)^2 (w+2)``."""
    w = _weights(model, couplings)
    if set(w) - {3, 4}:
        raise UsageError("characteristic equation is available for valences 3 and 4 only")
    g3, g4 = w.get(3, 0.0), w.get(4, 0.0)
    R, S = limits["R"], limits["S"]
    a = {1: g4 * R, 0: 4 * g4 * R + S * (2 * g3 + 3 * g4 * S) - 1, -1: g4 * R}
    b = {1: 1.0, 0: 2.0, -1: 1.0}
    return _laurent_add(_laurent_mul(a, a), b, -R * (g3 + 3 * g4 * S) ** 2)


def constellation_characteristic(model: ModelSpec, limits, couplings) -> dict:
    """``1 - (1 + 1/x + ... + x^{-(p-2)}) sum_i g^i gt_i R^{(p-1)i-1} P_i(x)``."""
    p = model.p
    R = limits["R"]
    (_, gname), = model.weights
    g = couplings[gname]
    pre = {-k: 1.0 for k in range(p - 1)}
    total: dict = {}
    for i, gt in _weights(model, couplings, dual=True).items():
        inner: dict = {}
        for m in range((p - 1) * i):
            for j in range(i):
                c = comb(j + m, m) * comb(p * i - 2 - j - m, i - j - 1)
                if c:
                    inner[m - j * (p - 1)] = inner.get(m - j * (p - 1), 0) + c
        _laurent_add(total, inner, g ** i * gt * R ** ((p - 1) * i - 1))
    out = {0: 1.0}
    return _laurent_add(out, _laurent_mul(pre, total), -1.0)


def ising_factors(limits, couplings) -> list[Polynomial]:
    """The three linear factors in ``w = x + 1/x``; their order fixes the branch labels 1..3."""
    c, g, V = couplings["c"], couplings["g"], limits["V"]
    gv = g * V
    a = c / (gv * (1 - 3 * gv))
    b = (1 - gv) / gv
    return [Polynomial([a - b, 1.0]), Polynomial([-a - b, 1.0]),
            Polynomial([(1 + gv) / gv, 1.0])]


def linearized_characteristic(model: ModelSpec, limits, couplings, samples: int = 64) -> dict:
    """Determinant of the linearized distance-free system, as a Laurent polynomial.

    Built directly from the operator-derived equations: if every sequence
    deviates from its limit as ``a_T x^n``, the amplitudes solve
    ``M(x) a = 0`` with ``M_{TU}(x) = delta_{TU} - sum_o d rem_T / d U_{n+o} x^o``.
    Serves as an independent check of the explicit characteristic equations.
    """
    eqs = build_recursion_system(model)
    names = [e.principal for e in eqs]
    pos = {nm: i for i, nm in enumerate(names)}
    k = len(names)
    mats: dict = {}  # offset -> matrix
    for i, eq in enumerate(eqs):
        for (factors, mono), coef in eq.remainder().items():
            cval = float(coef)
            for cname, e in mono:
                cval *= couplings[cname] ** e
            for idx, (sym, off) in enumerate(factors):
                val = cval
                for jdx, (s2, _o2) in enumerate(factors):
                    if jdx != idx:
                        val *= limits[s2]
                m = mats.setdefault(off, np.zeros((k, k)))
                m[i, pos[sym]] += val
    lo = min(mats) * k
    hi = max(mats) * k
    span = hi - lo + 1
    n_pts = max(samples, span)
    zs = np.exp(2j * np.pi * np.arange(n_pts) / n_pts)
    vals = []
    for z in zs:
        m = np.eye(k, dtype=complex)
        for off, a in mats.items():
            m = m - a * z ** off
        vals.append(np.linalg.det(m) * z ** (-lo))
    coeffs = np.fft.fft(vals) / n_pts
    out = {}
    for j in range(span):
        v = coeffs[j]
        if abs(v) > 1e-13:
            out[j + lo] = v.real if abs(v.imag) < 1e-12 else v
    return out


@dataclass
class CharacteristicEquation:
    """Reciprocal characteristic polynomial with its unit-disk roots.

    ``poly_in_x`` equals ``x^shift`` times the Laurent form; ``poly_in_w``
    is its reduction to ``w = x + 1/x``.
    """

    model: ModelSpec
    laurent: dict
    poly_in_x: Polynomial
    shift: int
    poly_in_w: Polynomial
    roots: list
    factors: list = field(default_factory=list)
    limits: dict = field(default_factory=dict)
    couplings: dict = field(default_factory=dict)

    @property
    def w_degree(self) -> int:
        return self.poly_in_w.degree


def _check_limits(model, limits, couplings):
    eqs = build_recursion_system(model)
    names = {e.principal for e in eqs}
    missing = names - set(limits)
    if missing:
        raise UsageError(f"missing limit values {sorted(missing)}")
    worst = max(abs(eq.residual(0, lambda s, i: limits[s], couplings, 1.0)) for eq in eqs)
    if worst > LIMIT_TOL:
        raise UsageError(f"limits do not solve the distance-free system (residual {worst:.2e})")


def _disk_roots_from_w(wpoly: Polynomial) -> list[complex]:
    out = []
    for w in poly_roots(wpoly):
        x, _ = w_to_x_roots(w)
        if abs(abs(x) - 1) < 1e-9:
            raise DegenerateInputError(f"characteristic root {x} on the unit circle (critical)")
        out.append(x)
    return sort_roots(out)


def characteristic_equation(model: ModelSpec, limits: Mapping[str, float],
                            couplings: Mapping[str, float]) -> CharacteristicEquation:
    """The model's characteristic equation at numeric couplings and limits."""
    limits, couplings = dict(limits), dict(couplings)
    _check_limits(model, limits, couplings)
    fam = model.family
    factors = []
    if fam == "even_valence":
        laurent = even_characteristic(model, limits, couplings)
    elif fam == "arbitrary_valence":
        laurent = arbitrary_characteristic(model, limits, couplings)
    elif fam == "constellation":
        laurent = constellation_characteristic(model, limits, couplings)
    elif fam == "ising_reduced":
        factors = ising_factors(limits, couplings)
        wpoly = factors[0] * factors[1] * factors[2]
        laurent = _w_to_laurent(wpoly)
    else:
        raise UsageError(f"no characteristic equation for family {fam!r}")
    scale = max(abs(v) for v in laurent.values())
    laurent = {k: v for k, v in laurent.items() if abs(v) > 1e-15 * scale}
    poly, shift = laurent_to_polynomial(laurent)
    if not factors:
        wpoly = reciprocal_to_w(poly)
        roots = _disk_roots_from_w(wpoly)
    else:
        roots = [_disk_roots_from_w(f)[0] for f in factors]
    return CharacteristicEquation(model, laurent, poly, shift, wpoly, roots, factors,
                                  limits, couplings)


def _w_to_laurent(wpoly: Polynomial) -> dict:
    out: dict = {0: 0.0}
    wl = {1: 1.0, -1: 1.0}
    power = {0: 1.0}
    for c in wpoly.coefficients:
        _laurent_add(out, power, c)
        power = _laurent_mul(power, wl)
    return out


# -- tau functions ------------------------------------------------------------

def _pq(x: complex, p: int) -> tuple[complex, complex]:
    px = x * sum(x ** k for k in range(p - 1))
    qx = (1 / x) * sum(x ** (-k) for k in range(p - 1))
    return px, qx


@dataclass
class TauSolution:
    """Soliton data for a closed-form solution.

    Attributes
    ----------
    kind : {"even", "pq"}
        Pairing type: ``c = ((x_a - x_b)/(1 - x_a x_b))^2`` or the ``p, q`` form.
    power_shift : int
        ``u_n`` uses ``x_i^{n + power_shift}``.
    ratio_offsets : tuple
        ``((a, b), (c, d))`` meaning ``R_n = R u_{n+a} u_{n+b} / (u_{n+c} u_{n+d})``.
    """

    kind: str
    roots: list
    lambdas: list
    power_shift: int
    ratio_offsets: tuple
    R: float = 1.0
    p: int | None = None
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        for x in self.roots:
            if abs(x) >= 1:
                raise UsageError(f"root {x} is outside the unit disk")

    def pairing(self, i: int, j: int) -> complex:
        xa, xb = self.roots[i], self.roots[j]
        if self.kind == "even":
            return ((xa - xb) / (1 - xa * xb)) ** 2
        pa, qa = _pq(xa, self.p)
        pb, qb = _pq(xb, self.p)
        return (pa - pb) * (qa - qb) / ((pa - qb) * (qa - pb))

    @property
    def pq(self) -> list[tuple[complex, complex]]:
        return [_pq(x, self.p) for x in self.roots] if self.p else []


def tau_u(n: int, sol: TauSolution) -> complex:
    """The ``2^m``-term soliton sum at index ``n``."""
    m = len(sol.roots)
    c = {(i, j): sol.pairing(i, j) for i in range(m) for j in range(i + 1, m)}
    total = 0j
    for l in range(m + 1):
        for subset in itertools.combinations(range(m), l):
            term = (-1) ** l
            for i in subset:
                term *= sol.lambdas[i] * sol.roots[i] ** (n + sol.power_shift)
            for i, j in itertools.combinations(subset, 2):
                term *= c[(i, j)]
            total += term
    return total


def _real(z: complex, what: str, tol: float = 1e-9) -> float:
    if abs(z.imag) > tol * max(1.0, abs(z.real)):
        raise DomainError(f"{what} has imaginary part {z.imag:.3e}")
    return z.real


def closed_R_n(n: int, sol: TauSolution) -> float:
    (a, b), (c, d) = sol.ratio_offsets
    den = tau_u(n + c, sol) * tau_u(n + d, sol)
    if abs(den) < 1e-300:
        raise PoleError(f"closed form has a pole at n={n}")
    return _real(sol.R * tau_u(n + a, sol) * tau_u(n + b, sol) / den, f"R_{n}")


def closed_S_n(n: int, sol: TauSolution) -> float:
    """Trivalent one-leg sequence ``S - t_n / (u_n u_{n+1})``."""
    if "S" not in sol.extras:
        raise UsageError("this solution has no S sequence")
    x, lam = sol.roots[0], sol.lambdas[0]
    t = sol.extras["g"] * sol.R ** 2 * (1 - x) * (1 - x * x) * lam * x ** n
    den = tau_u(n, sol) * tau_u(n + 1, sol)
    if abs(den) < 1e-300:
        raise PoleError(f"closed form has a pole at n={n}")
    return _real(sol.extras["S"] - t / den, f"S_{n}")


def fix_lambdas(roots: Sequence[complex], family: str, p: int | None = None) -> list[complex]:
    """Integration constants making ``u`` vanish at the first negative indices.

    ``family`` is ``"even"`` (``u_{-1} = ... = u_{-m} = 0``) or ``"pq"``
    (bipartite / constellation kinematics, ``p`` required).
    """
    m = len(roots)
    for i, j in itertools.combinations(range(m), 2):
        if abs(roots[i] - roots[j]) < DISTINCT_TOL:
            raise DegenerateInputError("coincident characteristic roots")
    out = []
    for i, xi in enumerate(roots):
        if family == "even":
            lam = 1.0 + 0j
            for j, xj in enumerate(roots):
                if j != i:
                    lam *= (1 - xi * xj) / (xi - xj)
        elif family == "pq":
            if p is None:
                raise UsageError("pq family needs p")
            pi, qi = _pq(xi, p)
            # p(m-1)+1 equals (p-1)m-1 when m = p-2; the general form keeps
            # the vanishing window starting at u_{-1} for larger m
            lam = xi ** (p * (m - 1) + 1)
            for j, xj in enumerate(roots):
                if j != i:
                    pj, _ = _pq(xj, p)
                    lam *= (qi - pj) / (pi - pj)
        else:
            raise UsageError(f"unknown family {family!r}")
        out.append(lam)
    return out


def chebyshev_determinant(n: int, roots: Sequence[complex]) -> complex:
    """``det[U_{n+2j-2}(w_i)]`` with ``w_i = sqrt(x_i) + 1/sqrt(x_i)``."""
    m = len(roots)
    mat = np.array([[chebyshev_u_of_x(n + 2 * j, x) for j in range(m)] for x in roots],
                   dtype=complex)
    return complex(np.linalg.det(mat))


def _max_dual_index(model: ModelSpec) -> int:
    return max(k for k, _ in model.dual_weights)


def tau_solution(model: ModelSpec, values: Mapping[str, float]) -> TauSolution:
    """Closed-form soliton solution with boundary-fixed integration constants."""
    couplings = model.numeric_couplings(values)
    limits = numeric_limits(model, values)
    char = characteristic_equation(model, limits, couplings)
    fam = model.family
    if fam == "even_valence":
        m = max(k for k, _ in model.weights) // 2 - 1
        roots = char.roots
        if len(roots) != m:
            raise DegenerateInputError(f"expected {m} unit-disk roots, found {len(roots)}")
        return TauSolution("even", roots, fix_lambdas(roots, "even"), m, ((0, 3), (1, 2)),
                           limits["R"])
    if fam == "arbitrary_valence":
        if [k for k, _ in model.weights] != [3]:
            raise UsageError("closed boundary solution is known for the trivalent case only")
        roots = char.roots
        return TauSolution("even", roots, [1.0 + 0j], 1, ((0, 2), (1, 1)), limits["R"],
                           extras={"S": limits["S"], "g": couplings[model.weights[0][1]]})
    if fam == "constellation":
        p = model.p
        m = (p - 1) * _max_dual_index(model) - 1
        roots = char.roots
        if len(roots) != m:
            raise DegenerateInputError(f"expected {m} unit-disk roots, found {len(roots)}")
        return TauSolution("pq", roots, fix_lambdas(roots, "pq", p), 0, ((0, p + 1), (1, p)),
                           limits["R"], p)
    raise UsageError(f"no closed boundary solution for family {fam!r}")


# -- special values -----------------------------------------------------------

def _identity_terms(model: ModelSpec, R: TruncatedSeries, S, coup) -> dict:
    label = model.label
    if model.family == "even_valence" and [k for k, _ in model.weights] == [4]:
        g = coup[model.weights[0][1]]
        return {"R": (R - g * R ** 3, None)}
    ws = dict(model.weights)
    if model.family == "even_valence" and sorted(ws) == [4, 6]:
        g4, g6 = coup[ws[4]], coup[ws[6]]
        return {"R": (R * (1 - 4 * g4 * R - 15 * g6 * R ** 2), 1 - 3 * g4 * R - 10 * g6 * R ** 2)}
    if model.family == "arbitrary_valence" and sorted(ws) == [3]:
        g = coup[ws[3]]
        return {"R": (R - g ** 2 * R ** 4, None), "S": (S - g * R ** 2, None)}
    if model.family == "constellation":
        (_, gname), = model.weights
        g = coup[gname]
        dual = dict(model.dual_weights)
        if model.p == 3 and sorted(dual) == [1]:
            y = g * coup[dual[1]]
            return {"R": (R * (1 - 3 * y * R + y ** 2 * R ** 2), 1 - 2 * y * R)}
        if model.p == 4 and sorted(dual) == [1]:
            y = g * coup[dual[1]]
            return {"R": (R * (1 - 5 * y * R ** 2 + 3 * y ** 2 * R ** 4), 1 - 3 * y * R ** 2)}
        if model.p == 3 and sorted(dual) == [2]:
            y = g ** 2 * coup[dual[2]]
            return {"R": (R * (1 - 17 * y * R ** 3 + 25 * y ** 2 * R ** 6), 1 - 10 * y * R ** 3)}
    raise UsageError(f"no special-value identity recorded for model {label or model.family!r}")


def special_value_identities(model: ModelSpec, cutoff: int) -> dict[str, TruncatedSeries]:
    """``value_0 - closed formula`` for each identity, as exact series (zero expected).

    A formula ``num / den`` is checked as ``value_0 * den - num`` to stay polynomial.
    """
    fam = solve_sequences(model, cutoff)
    lim = solve_distance_free(model, cutoff)
    coup = coupling_series(model, model.variables, cutoff)
    terms = _identity_terms(model, lim["R"], lim.get("S"), coup)
    out = {}
    for name, (num, den) in terms.items():
        v0 = fam[(name, 0)]
        out[name] = (v0 * den if den is not None else v0) - num
    return out


def constellation3_hexavalent(bindings=None) -> ModelSpec:
    """3-constellation with white trivalent and black hexavalent vertices only."""
    return constellation(3, {2: "gt2"}, bindings, label="constellation3_hexa")


# -- one-x solutions ----------------------------------------------------------

@dataclass
class OneXSolution:
    """One-root solution family with a free integration constant ``lam``."""

    model: ModelSpec
    branch: int
    x: complex
    lam: float
    limits: dict
    couplings: dict
    z: complex | None = None
    sqrt_x: complex | None = None

    def u(self, n: int) -> complex:
        x, lam = self.x, self.lam
        if self.model.family == "ising_reduced":
            if self.branch == 3:
                return 1 - 2 * lam * x ** n - self.z * lam ** 2 * x ** (2 * n)
            return 1 - lam * x ** n
        return 1 - lam * x ** (n + 1)

    def sequences(self, ns: range) -> dict:
        """Float values ``{(name, n): value}`` on the index range."""
        fam = self.model.family
        out = {}
        L = self.limits
        for n in ns:
            u = self.u
            if fam == "even_valence":
                out[("R", n)] = L["R"] * u(n) * u(n + 3) / (u(n + 1) * u(n + 2))
            elif fam == "arbitrary_valence":
                x, lam = self.x, self.lam
                out[("R", n)] = L["R"] * u(n) * u(n + 2) / u(n + 1) ** 2
                out[("S", n)] = L["S"] - cmath.sqrt(L["R"]) * self.sqrt_x * (1 - x) ** 2 \
                    * lam * x ** n / (u(n) * u(n + 1))
            elif fam == "ising_reduced":
                out[("V", n)] = L["V"] * u(n) * u(n + 3) / (u(n + 1) * u(n + 2))
        if fam == "ising_reduced":
            x, lam = self.x, self.lam
            g = self.couplings["g"]
            for n in ns:
                if self.branch in (1, 2):
                    sign = -1 if self.branch == 1 else 1
                    out[("R", n)] = L["R"] + sign * L["V"] * lam * (1 - x) * (1 - x * x) * x ** n \
                        / (self.u(n + 1) * self.u(n + 2))
                elif n - 2 in ns and n + 2 in ns:
                    V = lambda k: out[("V", k)]
                    quad = V(n) ** 2 * (1 - g ** 2 * (V(n + 1) * V(n + 2) + V(n + 1) * V(n - 1)
                                                      + V(n - 1) * V(n - 2))) - V(n)
                    out[("R", n)] = np.sign(L["R"]) * cmath.sqrt(quad)
        return out


def ising_z(x: complex, c: float) -> complex:
    w = x + 1 / x
    w2 = x * x + 1 / (x * x)
    num = ((c - 2) * w + c - 8) * ((c + 2) * w + c + 8)
    den = (w2 - (c - 4) * w - (c - 2)) * (w2 + (c + 4) * w + (c + 2))
    return num / den


def one_x_solution(model: ModelSpec, values: Mapping[str, float], branch: int,
                   lam: float) -> OneXSolution:
    """Build the one-root family for ``branch`` (1-based root index)."""
    couplings = model.numeric_couplings(values)
    limits = numeric_limits(model, values)
    char = characteristic_equation(model, limits, couplings)
    if not 1 <= branch <= len(char.roots):
        raise UsageError(f"branch {branch} not in 1..{len(char.roots)}")
    x = char.roots[branch - 1]
    sol = OneXSolution(model, branch, x, lam, limits, couplings)
    if model.family == "arbitrary_valence":
        w = dict(model.weights)
        g3, g4 = couplings.get(w.get(3), 0.0), couplings.get(w.get(4), 0.0)
        R, S = limits["R"], limits["S"]
        rhs = 1 - g4 * R * (x + 1 / x + 4) - S * (2 * g3 + 3 * g4 * S)
        s = cmath.sqrt(x)
        lhs = cmath.sqrt(R) * (g3 + 3 * g4 * S) * (s + 1 / s)
        sol.sqrt_x = s if abs(lhs - rhs) <= abs(lhs + rhs) else -s
    elif model.family == "ising_reduced" and branch == 3:
        sol.z = ising_z(x, couplings["c"])
    return sol


def one_x_residual(model: ModelSpec, values: Mapping[str, float], branch: int, lam: float,
                   n_window: range = range(5, 16)) -> float:
    """Largest recursion residual of a one-root solution on interior indices."""
    sol = one_x_solution(model, values, branch, lam)
    span = range(n_window.start - 4, n_window.stop + 4)
    seq = sol.sequences(span)
    eqs = build_recursion_system(model)
    worst = 0.0
    for eq in eqs:
        for n in n_window:
            r = eq.residual(n, lambda s, i: seq[(s, i)], sol.couplings, 1.0)
            worst = max(worst, abs(r))
    return float(worst)


def tri_tetra_boundary_obstruction(values: Mapping[str, float], model: ModelSpec) -> dict:
    """Boundary data of the one-root tri/tetra solution once ``R_{-1} = 0`` is imposed.

    Returns ``lambda`` and ``lim_{n -> -1} R_n S_n``; a nonzero limit shows the
    second boundary condition cannot be met by a single root.
    """
    sol = one_x_solution(model, values, 1, 1.0)
    x = sol.x
    L = sol.limits
    # u_{-1} = 0 cancels the pole of S_n there, leaving
    # R u_{n+2} / u_{n+1}^2 * (-k x^n / u_{n+1}) at n = -1
    k = cmath.sqrt(L["R"]) * sol.sqrt_x * (1 - x) ** 2
    u = sol.u
    limit = L["R"] * (-k * x ** -1) * u(1) / u(0) ** 3
    return {"lambda": 1.0, "R_minus1": complex(L["R"] * u(-1) * u(1) / u(0) ** 2),
            "RS_limit": complex(limit)}


def soliton_identity_check(cutoff: int = 40) -> TruncatedSeries:
    """Tetravalent quartic identity in ``Lambda = lambda x^n`` with symbolic ``x``.

    Uses ``gR = x/(x^2+4x+1)`` and ``1/R = 1 - 3gR`` to clear denominators;
    returns ``(x^2+4x+1) * (lhs - rhs)`` as an exact polynomial (zero expected).
    """
    vars_ = ("L", "x")
    L = TruncatedSeries.var("L", vars_, cutoff)
    x = TruncatedSeries.var("x", vars_, cutoff)
    one = TruncatedSeries.constant(1, vars_, cutoff)
    d = x * x + 4 * x + one

    def u(k):  # u_{n+k} = 1 - Lambda x^{k+1}
        return one - L * x ** (k + 1)

    lhs = u(0) * u(1) * u(2) * u(3)
    rhs_times_d = (d - 3 * x) * u(1) ** 2 * u(2) ** 2 + x * (
        u(-1) * u(2) ** 2 * u(3) + u(0) ** 2 * u(3) ** 2 + u(0) * u(1) ** 2 * u(4))
    return d * lhs - rhs_times_d


# -- comparison tables --------------------------------------------------------

def comparison_table(model: ModelSpec, values: Mapping[str, float], cutoff: int = 60,
                     ns: Sequence[int] = range(21), name: str = "R",
                     family=None) -> list[tuple[int, float, float, float]]:
    """Rows ``(n, closed, series, |diff|)`` at the given numeric point."""
    sol = tau_solution(model, values)
    fam = family if family is not None else solve_sequences(model, cutoff)
    rows = []
    for n in ns:
        closed = closed_R_n(n, sol) if name == "R" else closed_S_n(n, sol)
        series = fam.evaluate(name, n, values)
        rows.append((n, closed, series, abs(closed - series)))
    return rows
