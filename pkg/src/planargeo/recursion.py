"""Exact series solutions of the distance-indexed recursions.

The unknowns are ``Name_n`` for every principal sequence and ``0 <= n <=
n_max``. Negative indices are zero (the boundary rule); indices beyond the
window are read at ``n_max``, where the sequences have stabilized to their
distance-free limits up to the requested order.

The solver sweeps homogeneous degrees. At degree ``d`` every unknown's
degree-``d`` component is an affine function of itself (through the
coupling-free part of the equations, linearized at degree 0) and of lower
degrees, so each degree costs one sparse exact linear solve. Products of
unknowns are shared across equations through a prefix cache.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from operator import mul
from typing import Mapping

import networkx as nx
import numpy as np

from .algebra.series import Rational, TruncatedSeries
from .errors import BoundaryError, NumericalError, StructuralError, UsageError
from .models import ModelSpec
from .qoperator import SequenceEquation, build_recursion_system

NEWTON_STEPS = 6


# -- the family -------------------------------------------------------------

@dataclass
class SequenceFamily:
    """Solved sequences ``entries[(name, n)]`` for ``0 <= n <= n_max``."""

    model: ModelSpec
    equations: list
    variables: tuple
    cutoff: int
    n_max: int
    entries: dict = field(default_factory=dict)

    @property
    def names(self) -> list[str]:
        return [e.principal for e in self.equations]

    def __getitem__(self, key) -> TruncatedSeries:
        name, n = key
        if n < 0:
            return TruncatedSeries.zero(self.variables, self.cutoff)
        if n > self.n_max:
            raise BoundaryError(f"{name}[{n}] lies beyond the solved window n_max={self.n_max}")
        return self.entries[(name, n)]

    def lookup(self, name: str, n: int) -> TruncatedSeries:
        """Boundary-aware access: zero below 0, clamped at ``n_max``."""
        return self[(name, min(n, self.n_max))]

    def sequence(self, name: str) -> list[TruncatedSeries]:
        return [self.entries[(name, n)] for n in range(self.n_max + 1)]

    def couplings(self) -> dict[str, TruncatedSeries]:
        return coupling_series(self.model, self.variables, self.cutoff)

    def evaluate(self, name: str, n: int, values) -> float:
        return self.lookup(name, n).evaluate(values)

    def with_entry(self, key, value: TruncatedSeries) -> "SequenceFamily":
        entries = dict(self.entries)
        entries[key] = value
        return SequenceFamily(self.model, self.equations, self.variables, self.cutoff,
                              self.n_max, entries)

    def to_dict(self) -> dict:
        return {
            "model": self.model.label or self.model.family,
            "variables": list(self.variables),
            "cutoff": self.cutoff,
            "n_max": self.n_max,
            "entries": {f"{name}[{n}]": self.entries[(name, n)].to_dict()
                        for n in range(self.n_max + 1) for name in self.names},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def coupling_series(model: ModelSpec, variables, cutoff) -> dict[str, TruncatedSeries]:
    out = {}
    for name, b in model.bindings:
        if b.is_formal:
            out[name] = TruncatedSeries.var(b.variable, variables, cutoff).scale(b.scale)
        else:
            out[name] = TruncatedSeries.constant(b.scale, variables, cutoff)
    return out


# -- homogeneous component arithmetic ---------------------------------------

class _Uni:
    """Components of a univariate series: plain rationals."""

    zero = Rational(0)

    @staticmethod
    def one():
        return Rational(1)

    @staticmethod
    def conv(a: list, b: list, lo: int, hi: int, d: int):
        # sum_{i=lo}^{hi} a[i] * b[d-i]
        if hi < lo:
            return Rational(0)
        return sum(map(mul, a[lo:hi + 1], reversed(b[d - hi:d - lo + 1])), Rational(0))

    @staticmethod
    def add(a, b):
        return a + b

    @staticmethod
    def scal(s, a):
        return s * a

    @staticmethod
    def mul(a, b):
        return a * b

    @staticmethod
    def shift(a, exp):
        return a

    @staticmethod
    def is_zero(a):
        return a == 0


class _Multi:
    """Components of a multivariate series: ``{exponent: rational}``."""

    zero: dict = {}

    def __init__(self, nvars):
        self._one = {(0,) * nvars: Rational(1)}

    def one(self):
        return dict(self._one)

    @staticmethod
    def conv(a, b, lo, hi, d):
        out: dict = {}
        for i in range(lo, hi + 1):
            x, y = a[i], b[d - i]
            if not x or not y:
                continue
            for ea, ca in x.items():
                for eb, cb in y.items():
                    e = tuple(p + q for p, q in zip(ea, eb))
                    out[e] = out.get(e, 0) + ca * cb
        return {k: v for k, v in out.items() if v}

    @staticmethod
    def add(a, b):
        if not b:
            return a
        out = dict(a)
        for k, v in b.items():
            out[k] = out.get(k, 0) + v
        return {k: v for k, v in out.items() if v}

    @staticmethod
    def scal(s, a):
        return {k: s * v for k, v in a.items()} if s else {}

    def mul(self, a, b):
        return self.conv([a], [b], 0, 0, 0)

    @staticmethod
    def shift(a, exp):
        return {tuple(p + q for p, q in zip(k, exp)): v for k, v in a.items()}

    @staticmethod
    def is_zero(a):
        return not a


# -- exact linear algebra ---------------------------------------------------

def _exact_inverse(a: list[list]) -> list[list]:
    n = len(a)
    m = [list(row) + [Rational(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise StructuralError("degree-0 linear system is singular; the recursion is "
                                  "not contractive")
        m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col]
        m[col] = [v * inv for v in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [row[n:] for row in m]


# -- the compiled system ----------------------------------------------------

class _System:
    """Equations instantiated on the window, with terms pointing into a product cache."""

    def __init__(self, model: ModelSpec, eqs: list[SequenceEquation], cutoff: int, n_max: int,
                 distance_free: bool = False):
        self.variables = model.variables
        self.nv = len(self.variables)
        self.cutoff = cutoff
        names = [e.principal for e in eqs]
        self.unknowns = [(nm, n) for n in range(n_max + 1) for nm in names]
        self.index = {u: i for i, u in enumerate(self.unknowns)}
        bindings = model.binding_map
        var_pos = {v: i for i, v in enumerate(self.variables)}
        # product cache: node 0 is the empty product
        self.node_parent = [-1]
        self.node_last = [-1]
        self.node_key = {(): 0}
        self.terms = []  # per unknown: list of (scalar, exponent, degree, node)
        remainders = {e.principal: e.remainder() for e in eqs}
        for nm, n in self.unknowns:
            rows = []
            for (factors, mono), c in remainders[nm].items():
                s = c
                exp = [0] * self.nv
                for cname, e in mono:
                    if cname not in bindings:
                        raise UsageError(f"coupling {cname!r} has no binding")
                    b = bindings[cname]
                    s = s * b.scale ** e
                    if b.is_formal:
                        exp[var_pos[b.variable]] += e
                if s == 0:
                    continue
                ids = []
                for sym, off in factors:
                    idx = 0 if distance_free else n + off
                    if idx < 0:
                        break
                    ids.append(self.index[(sym, min(idx, n_max))])
                else:
                    rows.append((Rational(s), tuple(exp), sum(exp), self._node(tuple(sorted(ids)))))
            self.terms.append(rows)
        self.arith = _Uni() if self.nv == 1 else _Multi(self.nv)

    def _node(self, ids: tuple) -> int:
        if ids in self.node_key:
            return self.node_key[ids]
        parent = self._node(ids[:-1])
        k = len(self.node_parent)
        self.node_parent.append(parent)
        self.node_last.append(ids[-1])
        self.node_key[ids] = k
        return k

    def _node_ids(self, node: int) -> list[int]:
        out = []
        while node > 0:
            out.append(self.node_last[node])
            node = self.node_parent[node]
        return out

    # -- degree 0 --------------------------------------------------------
    def _deg0_eval(self, x: list) -> tuple[list, dict]:
        """F(x) restricted to coupling-free terms, and its sparse Jacobian."""
        prod = [Rational(1)] * len(self.node_parent)
        for k in range(1, len(self.node_parent)):
            prod[k] = prod[self.node_parent[k]] * x[self.node_last[k]]
        fx = []
        jac: dict = {}
        for i, rows in enumerate(self.terms):
            acc = Rational(0)
            for s, _exp, deg, node in rows:
                if deg:
                    continue
                acc += s * prod[node]
                ids = self._node_ids(node)
                for j in set(ids):
                    rest = list(ids)
                    rest.remove(j)
                    dv = Rational(ids.count(j))
                    for q in rest:
                        dv *= x[q]
                    if dv:
                        jac[(i, j)] = jac.get((i, j), 0) + s * dv
            fx.append(acc)
        return fx, jac

    def _blocks(self) -> list[list[int]]:
        """Strongly connected blocks of the coupling-free dependency graph, leaves first."""
        g = nx.DiGraph()
        g.add_nodes_from(range(len(self.unknowns)))
        for i, rows in enumerate(self.terms):
            for _s, _e, deg, node in rows:
                if deg == 0:
                    for j in self._node_ids(node):
                        g.add_edge(i, j)
        cond = nx.condensation(g)
        order = reversed(list(nx.topological_sort(cond)))
        return [sorted(cond.nodes[c]["members"]) for c in order]

    @staticmethod
    def _block_solve(blocks, jac: dict, rhs: list, arith, inv_cache=None) -> list:
        """Solve ``(I - J) y = rhs`` block by block, dependencies first."""
        y = [None] * len(rhs)
        deps: dict = {}
        for (i, j), v in jac.items():
            deps.setdefault(i, []).append((j, v))
        for block in blocks:
            inside = set(block)
            b = []
            for i in block:
                acc = rhs[i]
                for j, v in deps.get(i, ()):
                    if j not in inside:
                        acc = arith.add(acc, arith.scal(v, y[j]))
                b.append(acc)
            if len(block) == 1 and (block[0], block[0]) not in jac:
                y[block[0]] = b[0]
                continue
            key = tuple(block)
            inv = inv_cache.get(key) if inv_cache is not None else None
            if inv is None:
                a = [[Rational(int(r == c)) - jac.get((block[r], block[c]), 0)
                      for c in range(len(block))] for r in range(len(block))]
                inv = _exact_inverse(a)
                if inv_cache is not None:
                    inv_cache[key] = inv
            for r, i in enumerate(block):
                acc = arith.zero
                for c in range(len(block)):
                    if inv[r][c]:
                        acc = arith.add(acc, arith.scal(inv[r][c], b[c]))
                y[i] = acc
        return y

    def solve(self) -> list[list]:
        nu = len(self.unknowns)
        blocks = self._blocks()
        # exact Newton at degree 0; one step when the coupling-free part is linear
        x = [Rational(0)] * nu
        for _ in range(NEWTON_STEPS + 1):
            fx, jac = self._deg0_eval(x)
            r = [f - xi for f, xi in zip(fx, x)]
            if not any(r):
                break
            step = self._block_solve(blocks, jac, r, _Uni)
            x = [xi + si for xi, si in zip(x, step)]
        else:
            raise NumericalError("degree-0 system has no exact rational solution reachable by "
                                 "Newton iteration; bind the coupling it depends on formally")
        _, jac0 = self._deg0_eval(x)
        inv_cache: dict = {}
        A = self.arith
        zero = A.zero
        conv = A.conv
        nn = len(self.node_parent)
        parent, last = self.node_parent, self.node_last
        if self.nv == 1:
            U = [[xi] for xi in x]
        else:
            z0 = (0,) * self.nv
            U = [[{z0: xi} if xi else {}] for xi in x]
        P = [None] * nn
        P[0] = [A.one()]
        for k in range(1, nn):
            P[k] = [A.mul(P[parent[k]][0], U[last[k]][0])]
        for d in range(1, self.cutoff + 1):
            # phase A: degree-d products with the unknown degree-d parts set to 0
            pa = [zero] * nn
            for k in range(1, nn):
                p, u = parent[k], last[k]
                acc = conv(P[p], U[u], 1, d - 1, d) if d > 1 else zero
                if not A.is_zero(pa[p]):
                    acc = A.add(acc, A.mul(pa[p], U[u][0]))
                pa[k] = acc
            b = []
            for rows in self.terms:
                acc = zero
                for s, exp, deg, node in rows:
                    if deg > d or (deg == 0 and node == 0):
                        continue  # constants live at degree 0 only
                    comp = pa[node] if deg == 0 else P[node][d - deg]
                    if A.is_zero(comp):
                        continue
                    acc = A.add(acc, A.shift(A.scal(s, comp), exp))
                b.append(acc)
            ud = self._block_solve(blocks, jac0, b, A, inv_cache)
            for i in range(nu):
                U[i].append(ud[i])
            # phase B: add the part linear in the new components
            delta = [zero] * nn
            P[0].append(zero)
            for k in range(1, nn):
                p, u = parent[k], last[k]
                dl = A.mul(P[p][0], ud[u])
                if not A.is_zero(delta[p]):
                    dl = A.add(dl, A.mul(delta[p], U[u][0]))
                delta[k] = dl
                P[k].append(A.add(pa[k], dl))
        return U

    def to_series(self, comps: list) -> TruncatedSeries:
        terms = {}
        if self.nv == 1:
            for d, c in enumerate(comps):
                if c:
                    terms[(d,)] = c
        else:
            for c in comps:
                terms.update(c)
        return TruncatedSeries(self.variables, self.cutoff, terms)


def default_n_max(eqs: list[SequenceEquation], cutoff: int) -> int:
    """Window size: stabilization needs ``n >= degree * (largest forward offset)``."""
    shift = max(1, max(e.max_offset() for e in eqs))
    return cutoff * shift + 4


def solve_sequences(model: ModelSpec, cutoff: int, n_max: int | None = None,
                    method: str = "sweep") -> SequenceFamily:
    """Unique power-series solution on ``0 <= n <= n_max``.

    Parameters
    ----------
    method : {"sweep", "picard"}
        ``sweep`` solves degree by degree; ``picard`` iterates the whole
        vector map with plain series arithmetic and serves as an
        independent cross-check (it needs a nilpotent coupling-free part).
    """
    if cutoff < 0:
        raise UsageError("cutoff must be >= 0")
    eqs = build_recursion_system(model)
    if n_max is None:
        n_max = default_n_max(eqs, cutoff)
    if n_max < 0:
        raise UsageError("n_max must be >= 0")
    if method == "sweep":
        sysm = _System(model, eqs, cutoff, n_max)
        comps = sysm.solve()
        entries = {u: sysm.to_series(c) for u, c in zip(sysm.unknowns, comps)}
    elif method == "picard":
        entries = _picard(model, eqs, cutoff, n_max)
    else:
        raise UsageError(f"unknown method {method!r}")
    return SequenceFamily(model, eqs, model.variables, cutoff, n_max, entries)


def solve_distance_free(model: ModelSpec, cutoff: int) -> dict[str, TruncatedSeries]:
    """Series solution of the system with every index set to ``n`` (the limits)."""
    eqs = build_recursion_system(model)
    sysm = _System(model, eqs, cutoff, 0, distance_free=True)
    comps = sysm.solve()
    return {u[0]: sysm.to_series(c) for u, c in zip(sysm.unknowns, comps)}


def _picard(model, eqs, cutoff, n_max) -> dict:
    variables = model.variables
    coup = coupling_series(model, variables, cutoff)
    one = TruncatedSeries.constant(1, variables, cutoff)
    zero = TruncatedSeries.zero(variables, cutoff)
    keys = [(e.principal, n) for n in range(n_max + 1) for e in eqs]
    rems = {e.principal: e.remainder() for e in eqs}
    cur = {k: zero for k in keys}

    def lookup(name, i):
        return zero if i < 0 else cur[(name, min(i, n_max))]

    for _ in range((cutoff + 2) * (len(eqs) + 1)):
        new = {k: rems[k[0]].evaluate(k[1], lookup, coup, one) for k in keys}
        if new == cur:
            return new
        cur = new
    raise StructuralError("Picard iteration did not settle; the coupling-free part is not "
                          "nilpotent")


# -- checks -------------------------------------------------------------------

def residual(fam: SequenceFamily, eqs: list[SequenceEquation] | None = None) -> Rational:
    """Largest coefficient of ``lhs - rhs`` over the window (boundary rule applied)."""
    eqs = fam.equations if eqs is None else eqs
    coup = fam.couplings()
    one = TruncatedSeries.constant(1, fam.variables, fam.cutoff)
    zero = TruncatedSeries.zero(fam.variables, fam.cutoff)
    worst = Rational(0)

    def lookup(name, i):
        return zero if i < 0 else fam[(name, i)]

    for eq in eqs:
        top = fam.n_max - max(0, eq.max_offset())
        for n in range(0, top + 1):
            r = eq.residual(n, lookup, coup, one)
            worst = max(worst, r.max_abs_coefficient())
    return worst


def stabilized_limit(fam: SequenceFamily) -> dict[str, TruncatedSeries]:
    if fam.n_max < fam.cutoff:
        raise UsageError("n_max must be at least the cutoff for the limit to be stable")
    return {name: fam[(name, fam.n_max)] for name in fam.names}


def _tetravalent_coupling(model: ModelSpec) -> str:
    if model.family != "even_valence" or [k for k, _ in model.weights] != [4]:
        raise UsageError("the integral of motion is defined for the tetravalent model only")
    return model.weights[0][1]


def integral_of_motion(fam: SequenceFamily) -> list[TruncatedSeries]:
    """``f(R_n, R_{n+1})`` for ``n < n_max`` with ``f(x, y) = xy(1 - gx - gy) - x - y``."""
    g = fam.couplings()[_tetravalent_coupling(fam.model)]
    out = []
    for n in range(fam.n_max):
        x, y = fam[("R", n)], fam[("R", n + 1)]
        out.append(x * y * (1 - g * x - g * y) - x - y)
    return out


# -- numerics -----------------------------------------------------------------

def numeric_limits(model: ModelSpec, values: Mapping[str, float], cutoff: int = 24,
                   tol: float = 1e-12) -> dict[str, float]:
    """Float solution of the distance-free system on the ``1 + O(g)`` branch.

    The truncated series gives the starting point and ``fsolve`` polishes it.
    """
    from scipy.optimize import fsolve

    eqs = build_recursion_system(model)
    series = solve_distance_free(model, cutoff)
    names = [e.principal for e in eqs]
    x0 = np.array([series[nm].evaluate(values) for nm in names])
    coup = model.numeric_couplings(values)

    def fun(x):
        vals = dict(zip(names, x))
        return [eq.residual(0, lambda s, i: vals[s], coup, 1.0) for eq in eqs]

    with warnings.catch_warnings():
        # fsolve warns when xtol is below attainable precision; the residual check decides
        warnings.simplefilter("ignore", RuntimeWarning)
        sol = fsolve(fun, x0, xtol=1e-15)
    res = float(max(abs(v) for v in fun(sol)))
    if res > tol:
        raise NumericalError(f"distance-free residual too large: {res:.2e}")
    if np.max(np.abs(sol - x0)) > 1e-3 * max(1.0, float(np.max(np.abs(x0)))):
        raise NumericalError("series start and polished limit disagree; couplings too close "
                             "to criticality for this cutoff")
    return dict(zip(names, map(float, sol)))
