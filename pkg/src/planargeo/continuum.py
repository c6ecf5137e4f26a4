"""Scaling limits: two-point functions, their ODEs, and finite-size checks.

Scaling functions are evaluated as Taylor jets so that the differential
equations can be checked from exact derivatives. KdV residues are built
symbolically as differential polynomials in ``u``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Iterable, Sequence

import numpy as np

from .algebra.jets import TaylorJet, cosh, log, sinh
from .errors import (DegenerateInputError, DomainError, NumericalError, StructuralError,
                     UsageError)

SQ2, SQ3, SQ6 = math.sqrt(2), math.sqrt(3), math.sqrt(6)
# coefficients of exp(-sqrt6 r) and exp(-2 sqrt3 r) in the Ising F; the
# sinh form fixes which constant multiplies which exponential
ISING_LAMBDA = 12 * (4 + 3 * SQ2)
ISING_MU = -12 * (17 + 12 * SQ2)


# -- critical data ------------------------------------------------------------

@dataclass
class ScalingLimitData:
    """Critical point and scaling exponents of one family.

    ``rates`` are the ``a_i`` in ``x_i = exp(-a_i eps)``; ``nu`` is the
    correlation-length exponent, ``d_F = 1/nu``.
    """

    family: str
    g_c: float
    R_c: float
    V_c: float | None
    rates: list
    nu: float
    extra: dict = field(default_factory=dict)

    @property
    def d_F(self) -> float:
        return 1 / self.nu

    @property
    def correlation_length_rate(self) -> float:
        """Smallest real part among the rates (``xi ~ 1/(a eps)``)."""
        return min(complex(a).real for a in self.rates)


def multicritical_polynomial(m: int) -> list[Fraction]:
    """Coefficients of ``P_m(u) = sum_l (-u)^l l!/(2l+1)! m!/(m-l)!``, ascending."""
    if m < 1:
        raise UsageError("m must be >= 1")
    return [Fraction((-1) ** l * math.factorial(l) * math.factorial(m),
                     math.factorial(2 * l + 1) * math.factorial(m - l)) for l in range(m + 1)]


def multicritical_data(m: int) -> ScalingLimitData:
    """Multicritical even-valence point of order ``m`` (``m = 1`` is tetravalent)."""
    coeffs = multicritical_polynomial(m)
    roots = np.roots([float(c) for c in reversed(coeffs)]) if m > 0 else []
    rates = []
    for u in roots:
        a = cmath.sqrt(complex(u))
        if a.real < 0:
            a = -a
        rates.append(a.real if abs(a.imag) < 1e-14 else a)
    rates.sort(key=lambda a: (complex(a).real, complex(a).imag))
    return ScalingLimitData(f"multicritical{m}", m / (6 * (m + 1)), m + 1, m / 6, rates,
                            1 / (2 * (m + 1)), {"P_m": coeffs})


def tetravalent_data() -> ScalingLimitData:
    d = multicritical_data(1)
    d.family = "tetravalent"
    return d


def ising_quintic(c, g, R):
    """``W(R) = R(c+3gR)^2 (1-(c+3gR)^2) - (c+3gR)^3 - 3 g^2 R^3`` and its first two R-derivatives."""
    # written out in R so exact (Fraction) inputs stay exact
    s = c + 3 * g * R
    ds = 3 * g
    w = R * s ** 2 * (1 - s ** 2) - s ** 3 - 3 * g ** 2 * R ** 3
    # d/dR of each piece
    w1 = (s ** 2 * (1 - s ** 2) + R * (2 * s * ds * (1 - s ** 2) - s ** 2 * 2 * s * ds)
          - 3 * s ** 2 * ds - 9 * g ** 2 * R ** 2)
    # f(s) = s^2 - s^4; W = R f(s) - s^3 - 3g^2 R^3
    f1 = 2 * s - 4 * s ** 3
    f2 = 2 - 12 * s ** 2
    w2 = 2 * f1 * ds + R * f2 * ds ** 2 - 6 * s * ds ** 2 - 18 * g ** 2 * R
    return w, w1, w2


def ising_critical_data(guess=(4.0, 1.1, -0.6)) -> ScalingLimitData:
    """Tricritical Ising point from ``W = W' = W'' = 0``.

    ``extra["factor_constants"]`` holds the constants ``k`` of the three
    characteristic factors ``w + k`` at the critical point; the rates are
    those of the two factors that reach ``w = 2``.

    Raises
    ------
    NumericalError
        If the nonlinear solve fails to converge.
    """
    import mpmath
    from scipy.optimize import root

    # the root is degenerate (singular Jacobian): a double-precision
    # Levenberg-Marquardt start, then Newton in extended precision
    start = root(lambda z: list(ising_quintic(*z)), guess, method="lm", tol=1e-15)
    try:
        with mpmath.workdps(60):
            z = mpmath.findroot(ising_quintic, tuple(mpmath.mpf(v) for v in start.x),
                                tol=1e-40, maxsteps=400)
            res = float(max(abs(v) for v in ising_quintic(*z)))
    except (ValueError, ZeroDivisionError) as exc:
        raise NumericalError(f"tricritical solve did not converge: {exc}") from exc
    c, g, R = map(float, z)
    V = R / (c + 3 * g * R)
    from .closedform import ising_factors

    # constant terms k of the factors w + k; w = 2 means x = 1
    shifts = [float(f.coefficients[0]) for f in ising_factors({"V": V}, {"c": c, "g": g})]
    return ScalingLimitData("ising", g, R, V, [2 * SQ3, SQ6], 1 / 6,
                            {"c": c, "factor_constants": shifts, "residual": res})


def ising_weight_map(K: float, H: float, g: float) -> dict:
    """Bipartite weights reproducing the Ising model on tetravalent maps.

    Returns ``g2, gt2, g4, gt4``, the leg factor ``1/sqrt(1 - e^{2K})`` and
    the effective edge weights ``w_bb, w_ww, w_bw``. For ``K > 0`` the leg
    factor is imaginary.
    """
    e2k = math.exp(2 * K)
    if abs(1 - e2k) < 1e-15:
        raise DegenerateInputError("K = 0 makes the bivalent resummation singular")
    g2 = gt2 = math.exp(K)
    den = 1 - g2 * gt2
    return {
        "g2": g2, "gt2": gt2,
        "g4": (1 - e2k) ** 2 * g * math.exp(H), "gt4": (1 - e2k) ** 2 * g * math.exp(-H),
        "leg": 1 / cmath.sqrt(1 - e2k) if e2k > 1 else 1 / math.sqrt(1 - e2k),
        "w_bb": gt2 / den, "w_ww": g2 / den, "w_bw": 1 / den,
    }


# -- scaling functions --------------------------------------------------------

@dataclass(frozen=True)
class ScalingFunction:
    """``kind`` is ``tetravalent``, ``wronskian`` (``rates``), ``ising`` or ``ising_series``."""

    kind: str
    rates: tuple = ()
    lam: float = ISING_LAMBDA
    mu: float = ISING_MU

    @classmethod
    def tetravalent(cls):
        return cls("tetravalent")

    @classmethod
    def wronskian(cls, m: int):
        return cls("wronskian", tuple(multicritical_data(m).rates))

    @classmethod
    def ising(cls, series: bool = False, lam: float = ISING_LAMBDA, mu: float = ISING_MU):
        return cls("ising_series" if series else "ising", (), lam, mu)


def _var(r, order):
    return TaylorJet.variable(r, order)


def _det(mat):
    n = len(mat)
    total = None
    for perm in permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        term = mat[0][perm[0]]
        for i in range(1, n):
            term = term * mat[i][perm[i]]
        term = term * sign
        total = term if total is None else total + term
    return total


def _log_argument(fam: ScalingFunction, r: float, order: int):
    """Jet of the function whose ``-2 (log)''`` (or ``-(log)''``) gives F, and the prefactor."""
    t = _var(r, order)
    if fam.kind == "tetravalent":
        return sinh(t * math.sqrt(1.5)), 3.0 / 1.5 / 2  # 3/sinh^2(kr) = -(3/k^2)(log sinh)''/1
    if fam.kind == "wronskian":
        rates = fam.rates
        m = len(rates)
        mat = []
        for a in rates:
            z = t * (complex(a) / 2)
            s, c = sinh(z), cosh(z)
            row = [(s if j % 2 == 0 else c) * (complex(a) / 2) ** j for j in range(m)]
            mat.append(row)
        return _det(mat), 2.0
    raise UsageError(f"unknown scaling function {fam.kind!r}")


def _ising_exponentials(fam: ScalingFunction, mp):
    """The Ising log argument as ``[(coefficient, rate)]`` with ``A = sum c e^{k r}``."""
    s2, s3, s6 = mp.sqrt(2), mp.sqrt(3), mp.sqrt(6)
    if fam.kind == "ising":
        out = []
        for c, k in [(1, s6 + s3), (17 + 12 * s2, s6 - s3), (-2 * (4 + 3 * s2), s3)]:
            out += [(c / 2, k), (-c / 2, -k)]
        return out
    lam, mu = mp.mpf(fam.lam), mp.mpf(fam.mu)
    if fam.lam == ISING_LAMBDA and fam.mu == ISING_MU:
        lam, mu = 12 * (4 + 3 * s2), -12 * (17 + 12 * s2)
    return [(1, 0), (-lam / 6, -s6), (-mu / 12, -2 * s3), (-lam ** 2 / 288, -2 * s6),
            (-(17 - 12 * s2) / 72 * lam * mu, -(s6 + 2 * s3)),
            ((577 - 408 * s2) / 3456 * lam ** 2 * mu, -2 * (s6 + s3))]


def _ising_form(fam: ScalingFunction, r: float, order: int, dps: int = 40) -> TaylorJet:
    """Ising F in extended precision.

    The log argument vanishes to high order at ``r = 0``, so double
    precision loses most digits for ``r < 1``.
    """
    import mpmath

    with mpmath.workdps(dps):
        terms = _ising_exponentials(fam, mpmath)
        n = order + 3
        rr = mpmath.mpf(r)
        a = [sum(c * k ** j * mpmath.exp(k * rr) for c, k in terms) / mpmath.factorial(j)
             for j in range(n)]
        if a[0] == 0:
            raise DomainError(f"scaling function singular at r={r}")
        lg = [mpmath.log(abs(a[0]))]
        for k in range(1, n):
            acc = sum(j * lg[j] * a[k - j] for j in range(1, k))
            lg.append((a[k] - acc / k) / a[0])
        # Taylor coefficients of -(log A)''
        f = [-(j + 2) * (j + 1) * lg[j + 2] for j in range(order + 1)]
        return TaylorJet(r, np.array([float(v) for v in f]))


def scaling_two_point(fam: ScalingFunction, r: float, order: int = 4) -> TaylorJet:
    """Jet of ``F`` at ``r`` through ``order`` derivatives; ``G = -F'`` is ``-jet.derivative(1)``.

    Raises
    ------
    DomainError
        If ``r <= 0`` or the evaluation is singular.
    """
    if not r > 0:
        raise DomainError("scaling functions are defined for r > 0")
    if order + 2 > 6:
        raise UsageError("order is limited to 4")
    if fam.kind == "tetravalent":
        k = math.sqrt(1.5)
        s = sinh(_var(r, order) * k)
        return 3 * (s * s).reciprocal()
    if fam.kind in ("ising", "ising_series"):
        return _ising_form(fam, r, order)
    with np.errstate(all="raise"):
        try:
            arg, pref = _log_argument(fam, r, order + 2)
            if not np.iscomplexobj(arg.taylor) and arg.value < 0:
                arg = -arg  # sign does not reach (log)''
            lg = log(arg)
        except (FloatingPointError, ZeroDivisionError) as exc:
            raise DomainError(f"scaling function singular at r={r}") from exc
    jet = lg.differentiate().differentiate() * (-pref)
    if np.iscomplexobj(jet.taylor):
        if np.max(np.abs(jet.taylor.imag)) > 1e-10 * max(1.0, np.max(np.abs(jet.taylor.real))):
            raise NumericalError(f"scaling function not real at r={r}")
        jet = jet.real
    return jet


def scaling_values(fam: ScalingFunction, rs: Iterable[float]) -> list[tuple[float, float, float]]:
    """Rows ``(r, F, G)``."""
    out = []
    for r in rs:
        j = scaling_two_point(fam, r, 1)
        out.append((r, float(j.value), -float(j.derivative(1))))
    return out


def ising_scaling_equivalence(r_grid: Sequence[float]) -> float:
    """Largest difference between the series-form and sinh-form Ising ``F``."""
    a, b = ScalingFunction.ising(), ScalingFunction.ising(series=True)
    return max(abs(scaling_two_point(a, r, 0).value - scaling_two_point(b, r, 0).value)
               for r in r_grid)


# -- differential polynomials ------------------------------------------------

class DiffPoly:
    """Polynomial in ``u, u', u'', ...`` with rational coefficients.

    A monomial is a sorted tuple of ``(derivative order, exponent)`` pairs.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms: dict[tuple, Fraction] = {}
        for k, v in (terms or {}).items():
            v = Fraction(v)
            if v:
                self.terms[tuple(sorted(k))] = self.terms.get(tuple(sorted(k)), 0) + v
        self.terms = {k: v for k, v in self.terms.items() if v}

    @classmethod
    def constant(cls, c) -> "DiffPoly":
        return cls({(): c})

    @classmethod
    def u(cls, order: int = 0) -> "DiffPoly":
        return cls({((order, 1),): 1})

    def __add__(self, other):
        other = other if isinstance(other, DiffPoly) else DiffPoly.constant(other)
        t = dict(self.terms)
        for k, v in other.terms.items():
            t[k] = t.get(k, 0) + v
        return DiffPoly(t)

    __radd__ = __add__

    def __neg__(self):
        return DiffPoly({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, DiffPoly) else -Fraction(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, DiffPoly):
            return DiffPoly({k: v * Fraction(other) for k, v in self.terms.items()})
        t: dict = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                e = dict(k1)
                for o, x in k2:
                    e[o] = e.get(o, 0) + x
                key = tuple(sorted(e.items()))
                t[key] = t.get(key, 0) + v1 * v2
        return DiffPoly(t)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = DiffPoly.constant(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, DiffPoly):
            other = DiffPoly.constant(other)
        return self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def derivative(self) -> "DiffPoly":
        t: dict = {}
        for mono, c in self.terms.items():
            e = dict(mono)
            for o, x in mono:
                new = dict(e)
                new[o] -= 1
                if not new[o]:
                    del new[o]
                new[o + 1] = new.get(o + 1, 0) + 1
                key = tuple(sorted(new.items()))
                t[key] = t.get(key, 0) + c * x
        return DiffPoly(t)

    def weight(self) -> set[int]:
        """Weights of the monomials (``u`` weighs 2, each derivative 1)."""
        return {sum((2 + o) * x for o, x in mono) for mono in self.terms}

    def max_order(self) -> int:
        return max((o for mono in self.terms for o, _ in mono), default=0)

    def shift_u(self, c=1) -> "DiffPoly":
        """Substitute ``u -> c + u`` (derivatives unchanged)."""
        out = DiffPoly()
        base = DiffPoly.u(0) + c
        for mono, coef in self.terms.items():
            term = DiffPoly.constant(coef)
            for o, x in mono:
                term = term * (base ** x if o == 0 else DiffPoly.u(o) ** x)
            out = out + term
        return out

    def evaluate(self, derivs: Sequence[complex]):
        """Value at ``u^{(j)} = derivs[j]``."""
        total = 0
        for mono, c in self.terms.items():
            v = float(c)
            for o, x in mono:
                v = v * derivs[o] ** x
            total = total + v
        return total

    def normalized(self) -> tuple[Fraction, "DiffPoly"]:
        """Scale so the highest-derivative monomial has coefficient 1; returns (scale, poly)."""
        if not self.terms:
            return Fraction(0), self
        lead = max(self.terms, key=lambda m: (max((o for o, _ in m), default=-1), m))
        s = self.terms[lead]
        return s, self * (1 / s)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono, c in sorted(self.terms.items(), key=lambda kv: (-max((o for o, _ in kv[0]), default=-1), kv[0])):
            fac = "*".join(("u" + "'" * o if o < 4 else f"u^({o})") + (f"^{x}" if x > 1 else "")
                           for o, x in mono) or "1"
            parts.append(f"{c}*{fac}")
        return " + ".join(parts)


def _monomials_of_weight(w: int) -> list[tuple]:
    """All monomials in u-derivatives of total weight ``w``."""
    out = []

    def rec(remaining, min_order, acc):
        if remaining == 0:
            out.append(tuple(sorted(acc.items())))
            return
        for o in range(min_order, remaining - 1):
            wt = 2 + o
            if wt > remaining:
                break
            acc[o] = acc.get(o, 0) + 1
            rec(remaining - wt, o, acc)
            acc[o] -= 1
            if not acc[o]:
                del acc[o]

    rec(w, 0, {})
    return out


def _solve_exact(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    n = len(rows[0]) if rows else 0
    a = [r[:] + [b] for r, b in zip(rows, rhs)]
    piv_cols = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        piv_cols.append(c)
        r += 1
    if any(all(x == 0 for x in row[:-1]) and row[-1] != 0 for row in a):
        return None
    sol = [Fraction(0)] * n
    for i, c in enumerate(piv_cols):
        sol[c] = a[i][-1]
    return sol


def integrate_total_derivative(q: DiffPoly) -> DiffPoly:
    """``P`` with ``P' = q`` and no constant term.

    Raises
    ------
    StructuralError
        If ``q`` is not an exact derivative.
    """
    if not q.terms:
        return DiffPoly()
    weights = q.weight()
    if len(weights) != 1:
        raise StructuralError("integration needs a weight-homogeneous polynomial")
    w = weights.pop() - 1
    basis = _monomials_of_weight(w)
    derivs = [DiffPoly({m: 1}).derivative() for m in basis]
    keys = sorted({k for d in derivs for k in d.terms} | set(q.terms))
    rows = [[d.terms.get(k, Fraction(0)) for d in derivs] for k in keys]
    rhs = [q.terms.get(k, Fraction(0)) for k in keys]
    sol = _solve_exact(rows, rhs)
    if sol is None:
        raise StructuralError("remainder is not a total derivative")
    return DiffPoly({m: c for m, c in zip(basis, sol)})


def kdv_residue(m: int) -> DiffPoly:
    """``R_m[u]`` from ``R_{k+1}' = R_k'''/4 - u R_k' - u' R_k / 2`` with ``R_0 = 1``.

    With this normalization ``R_1 = -u/2`` and ``R_2 = (3u^2 - u'')/8``.
    """
    if not 0 <= m <= 5:
        raise UsageError("kdv_residue supports 0 <= m <= 5")
    r = DiffPoly.constant(1)
    u, du = DiffPoly.u(0), DiffPoly.u(1)
    for _ in range(m):
        d1 = r.derivative()
        d3 = d1.derivative().derivative()
        rhs = d3 * Fraction(1, 4) - u * d1 - du * r * Fraction(1, 2)
        r = integrate_total_derivative(rhs)
    return r


def kdv_difference(m: int) -> DiffPoly:
    """``R_m[1 + F] - R_m[1]`` as a polynomial in ``F`` (written with ``u`` for ``F``)."""
    shifted = kdv_residue(m).shift_u(1)
    return shifted - shifted.terms.get((), 0)


CONTINUUM_ODES = {
    "painleve1": DiffPoly({((2, 1),): 1, ((0, 2),): -3, ((0, 1),): -6}),
    "painleve2": DiffPoly({((4, 1),): 1, ((0, 1), (2, 1)): -10, ((2, 1),): -10, ((1, 2),): -5,
                           ((0, 3),): 10, ((0, 2),): 30, ((0, 1),): 30}),
    "ising": DiffPoly({((4, 1),): 1, ((0, 1), (2, 1)): -18, ((2, 1),): -18, ((1, 2),): -9,
                       ((0, 3),): 24, ((0, 2),): 72, ((0, 1),): 72}),
}


def ode_for(fam: ScalingFunction) -> DiffPoly:
    if fam.kind == "tetravalent" or (fam.kind == "wronskian" and len(fam.rates) == 1):
        return CONTINUUM_ODES["painleve1"]
    if fam.kind == "wronskian" and len(fam.rates) == 2:
        return CONTINUUM_ODES["painleve2"]
    if fam.kind in ("ising", "ising_series"):
        return CONTINUUM_ODES["ising"]
    raise UsageError("no recorded ODE for this scaling function")


def ode_residual(fam: ScalingFunction, ode: DiffPoly | str | None, r_grid: Iterable[float]) -> float:
    """Largest ``|ODE(F)(r)|`` over the grid (``ode`` None picks the family's own)."""
    if ode is None:
        ode = ode_for(fam)
    elif isinstance(ode, str):
        try:
            ode = CONTINUUM_ODES[ode]
        except KeyError:
            raise UsageError(f"unknown ODE {ode!r}") from None
    order = max(ode.max_order(), 1)
    worst = 0.0
    for r in r_grid:
        jet = scaling_two_point(fam, r, order)
        worst = max(worst, abs(ode.evaluate(list(jet.coefficients))))
    return worst


# -- finite-size quantities ---------------------------------------------------

def distance_probability(r: float, quad_points: int = 200, fam: ScalingFunction | None = None) -> float:
    """Probability that two marked points are within scaled distance ``r`` (tetravalent F).

    ``P(r) = 2/sqrt(pi) int u^2 e^{-u^2} (1 + Re F(r sqrt(-iu))) du`` over the
    real line. The integrand is even in ``u``, so it is computed on
    ``(0, inf)`` with prefactor ``4/sqrt(pi)``, which makes ``P(inf) = 1``.
    """
    from scipy.integrate import quad

    if not r > 0:
        raise DomainError("distance_probability needs r > 0")
    if fam is not None and fam.kind != "tetravalent":
        raise UsageError("distance_probability is implemented for the tetravalent F")
    k = math.sqrt(1.5)

    def F(z):
        return 3 / cmath.sinh(k * z) ** 2

    def integrand(u):
        if u == 0:
            return 0.0
        z = r * cmath.sqrt(-1j * u)
        return u * u * math.exp(-u * u) * (1 + F(z).real)

    upper = math.sqrt(-math.log(1e-16)) + 1.0  # Gaussian tail below 1e-12 beyond this
    val, err = quad(integrand, 0, upper, limit=quad_points, epsabs=1e-13, epsrel=1e-11)
    if not math.isfinite(val) or err > 1e-8:
        raise NumericalError(f"quadrature did not converge (error estimate {err:.1e})")
    return 4 / math.sqrt(math.pi) * val


def coefficient_asymptotics(N: int) -> float:
    """``N^{3/2} 12^{-N} 3^N c_N`` via log-Gamma (tends to ``1/sqrt(pi)``)."""
    if N < 1:
        raise UsageError("N must be >= 1")
    log_c = math.lgamma(2 * N + 1) - 2 * math.lgamma(N + 1) - math.log(N + 1)
    return math.exp(1.5 * math.log(N) + N * math.log(3 / 12) + log_c)


def tetravalent_coefficient_table(n_max: int, N: int) -> np.ndarray:
    """``T[n, d] = 12^{-d} [g^d] R_n`` for ``n <= n_max``, ``d <= N`` in double precision.

    Uses that ``[g^d] R_m`` equals the distance-free coefficient once ``m >= d``,
    so only the triangle ``m < d`` is iterated.
    """
    if N > 4000:
        raise UsageError("N is limited to 4000")
    M = n_max + N + 2
    # limit coefficients of R = 1 + 3gR^2, rescaled: r_d = 12^{-d} 3^d c_d
    lim = np.empty(N + 1)
    lim[0] = 1.0
    for d in range(1, N + 1):
        lim[d] = lim[d - 1] * (2 * d - 1) * 2 / (d + 1) / 4  # ratio c_d/c_{d-1} * 3/12
    C = np.zeros((M + 1, N + 1))
    C[:, 0] = 1.0
    for d in range(1, N + 1):
        C[:, d] = lim[d]
        # rows m < d differ from the limit; rows past n_max + N - d never feed back
        hi = min(d, M + 1, n_max + N - d + 1)
        if hi == 0:
            continue
        rows = np.arange(hi)
        P = C[rows, :d]
        Q = C[rows + 1, :d] + P
        Q[1:] += C[rows[1:] - 1, :d]
        # [g^d] of g R_m (R_{m-1} + R_m + R_{m+1}) = sum_k P[k] Q[d-1-k]
        C[rows, d] = np.einsum("ij,ij->i", P, Q[:, ::-1]) / 12
    if not np.all(np.isfinite(C)):
        raise NumericalError("coefficient table overflowed")
    return C[: n_max + 1]


def fractal_ratio(n: int, N: int, table: np.ndarray | None = None) -> float:
    """``[g^N] R_n / [g^N] R_0`` for tetravalent graphs."""
    if n < 0 or N < 0:
        raise UsageError("n and N must be non-negative")
    if table is None or table.shape[0] <= n or table.shape[1] <= N:
        table = tetravalent_coefficient_table(n, N)
    return float(table[n, N] / table[0, N])


def fractal_target(n: int) -> float:
    return 3 / 56 * n ** 4
