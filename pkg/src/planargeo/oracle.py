"""Brute-force ground truth from blossom trees.

Trees are enumerated exhaustively, closed into planar maps stored as
half-edge rotation systems, and the face-to-face distance of the root is
measured twice: from the contour walk, and by breadth-first search in the
dual graph of the closed map.

Conventions
-----------
* Children of a vertex are listed clockwise, starting after the edge to the
  parent; the clockwise contour from the root visits leaves in depth-first
  order.
* ``sigma`` is the clockwise successor around a vertex, ``alpha`` the
  opposite half-edge, and faces are the orbits of ``sigma . alpha``.
* A black leaf is matched to the first unmatched white leaf met when going
  counterclockwise, i.e. backwards along the contour, wrapping past the root.
* For one-leg trees (charge 0) the external face is the region outside the
  outermost chord that wraps around the root (the root's own face if none do).
"""

from __future__ import annotations

import os
from collections import Counter, deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb

from .errors import ResourceError, StructuralError, UsageError

WHITE, BLACK = "w", "b"
MAX_TREES = 200_000


# -- families -----------------------------------------------------------------

@dataclass(frozen=True)
class OracleFamily:
    """Which blossom trees to enumerate.

    ``kind`` is ``"even"`` (valences in ``valences``), ``"trivalent"`` or
    ``"bipartite"`` (``p``-valent, both colours). ``charge`` selects R-trees
    (1) or, for trivalent, S-trees (0).
    """

    kind: str
    valences: tuple = (4,)
    p: int = 3
    charge: int = 1

    def __post_init__(self):
        if self.kind not in ("even", "trivalent", "bipartite"):
            raise UsageError(f"unknown oracle family {self.kind!r}")
        if self.kind == "even" and (not self.valences or any(v % 2 or v < 4 for v in self.valences)):
            raise UsageError("even family needs even valences >= 4")
        if self.kind == "bipartite" and self.p < 3:
            raise UsageError("bipartite family needs p >= 3")
        if self.charge not in (0, 1) or (self.charge == 0 and self.kind != "trivalent"):
            raise UsageError("charge 0 trees exist only in the trivalent family")

    @property
    def bipartite(self) -> bool:
        return self.kind == "bipartite"


TETRAVALENT = OracleFamily("even", (4,))
TRIVALENT_R = OracleFamily("trivalent")
TRIVALENT_S = OracleFamily("trivalent", charge=0)


def family_by_name(name: str) -> OracleFamily:
    """``tetravalent``, ``tetra_hexa``, ``trivalent``, ``trivalent_s``, ``bipartite<p>``."""
    if name == "tetravalent":
        return TETRAVALENT
    if name == "tetra_hexa":
        return OracleFamily("even", (4, 6))
    if name == "trivalent":
        return TRIVALENT_R
    if name == "trivalent_s":
        return TRIVALENT_S
    if name.startswith("bipartite") and name[9:].isdigit():
        return OracleFamily("bipartite", p=int(name[9:]))
    raise UsageError(f"unknown oracle family {name!r}")


# -- trees --------------------------------------------------------------------
# A node is WHITE, BLACK, or (valence, colour, children) with colour None
# outside bipartite families.

@dataclass(frozen=True)
class BlossomTree:
    root: object
    family: OracleFamily

    def leaves(self) -> list[str]:
        """Leaf colours in clockwise contour order."""
        out: list[str] = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            if isinstance(node, str):
                out.append(node)
            else:
                stack.extend(reversed(node[2]))
        return out

    @property
    def charge(self) -> int:
        lv = self.leaves()
        return lv.count(WHITE) - lv.count(BLACK)

    def vertex_counts(self) -> Counter:
        """Internal vertices by ``(valence, colour)``."""
        c: Counter = Counter()
        stack = [self.root]
        while stack:
            node = stack.pop()
            if not isinstance(node, str):
                c[(node[0], node[1])] += 1
                stack.extend(node[2])
        return c

    def encode(self) -> str:
        def enc(node):
            if isinstance(node, str):
                return node
            tag = f"{node[1] or 'v'}{node[0]}"
            return tag + "(" + ",".join(enc(c) for c in node[2]) + ")"
        return enc(self.root)


def contour_walk(t: BlossomTree) -> list[int]:
    """Steps ``+1`` (black leaf) / ``-1`` (white leaf) clockwise from the root."""
    return [1 if c == BLACK else -1 for c in t.leaves()]


def contour_distance(t: BlossomTree) -> int:
    """Maximum of the contour walk (started at 0)."""
    best = pos = 0
    for s in contour_walk(t):
        pos += s
        if pos > best:
            best = pos
    return best


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def _nodes(family: OracleFamily, kind: str, n: int) -> tuple:
    """All subtrees of type ``kind`` (R, S, X) with ``n`` counted vertices."""
    out = []
    if family.kind == "even":
        if kind != "R":
            raise StructuralError(kind)
        if n == 0:
            return (WHITE,)
        for v in family.valences:
            k = v // 2
            slots = v - 1
            for blacks in combinations(range(slots), k - 1):
                free = [i for i in range(slots) if i not in blacks]
                for sizes in _compositions(n - 1, k):
                    out.extend(_fill(family, slots, blacks, free, sizes, ("R",) * k, v, None))
    elif family.kind == "trivalent":
        if kind == "R":
            if n == 0:
                return (WHITE,)
            for a in range(n):
                b = n - 1 - a
                for s in _nodes(family, "S", a):
                    for r in _nodes(family, "R", b):
                        out.append((3, None, (s, r)))
                        out.append((3, None, (r, s)))
        elif kind == "S":
            if n == 0:
                return ()
            for r in _nodes(family, "R", n - 1):
                out.append((3, None, (BLACK, r)))
                out.append((3, None, (r, BLACK)))
            for a in range(n):
                for s1 in _nodes(family, "S", a):
                    for s2 in _nodes(family, "S", n - 1 - a):
                        out.append((3, None, (s1, s2)))
        else:
            raise StructuralError(kind)
    else:
        p = family.p
        if kind == "R":  # n counts black vertices
            if n == 0:
                return (WHITE,)
            for j in range(p - 1):
                for x in _nodes(family, "X", n - 1):
                    ch = [BLACK] * (p - 1)
                    ch[j] = x
                    out.append((p, BLACK, tuple(ch)))
        elif kind == "X":  # white vertex with p-1 R-subtrees, n black vertices below
            for sizes in _compositions(n, p - 1):
                out.extend(_fill(family, p - 1, (), list(range(p - 1)), sizes,
                                 ("R",) * (p - 1), p, WHITE))
        else:
            raise StructuralError(kind)
    return tuple(out)


def _fill(family, slots, blacks, free, sizes, kinds, valence, colour):
    pools = [_nodes(family, k, s) for k, s in zip(kinds, sizes)]
    if any(not pool for pool in pools):
        return []
    out = []

    def rec(i, chosen):
        if i == len(pools):
            ch = [BLACK] * slots
            for pos, node in zip(free, chosen):
                ch[pos] = node
            out.append((valence, colour, tuple(ch)))
            return
        for node in pools[i]:
            rec(i + 1, chosen + [node])

    rec(0, [])
    return out


def tree_count(family: OracleFamily, n: int) -> int:
    """Number of trees with ``n`` vertices (black vertices for bipartite), by recursion."""
    @lru_cache(maxsize=None)
    def cnt(kind, m):
        if family.kind == "even":
            if m == 0:
                return 1
            total = 0
            for v in family.valences:
                k = v // 2
                for sizes in _compositions(m - 1, k):
                    prod = comb(v - 1, k - 1)
                    for s in sizes:
                        prod *= cnt("R", s)
                    total += prod
            return total
        if family.kind == "trivalent":
            if kind == "R":
                return 1 if m == 0 else sum(2 * cnt("S", a) * cnt("R", m - 1 - a) for a in range(m))
            if m == 0:
                return 0
            return 2 * cnt("R", m - 1) + sum(cnt("S", a) * cnt("S", m - 1 - a) for a in range(m))
        p = family.p
        if kind == "R":
            return 1 if m == 0 else (p - 1) * cnt("X", m - 1)
        total = 0
        for sizes in _compositions(m, p - 1):
            prod = 1
            for s in sizes:
                prod *= cnt("R", s)
            total += prod
        return total

    return cnt("S" if family.charge == 0 else "R", n)


def enumerate_trees(family: OracleFamily, n: int, allow_large: bool = False) -> list[BlossomTree]:
    """Every blossom tree of the family with ``n`` vertices (``n`` black vertices if bipartite).

    Raises
    ------
    ResourceError
        If the count exceeds ``MAX_TREES`` and ``allow_large`` is false.
    """
    if n < 0:
        raise UsageError("vertex count must be non-negative")
    total = tree_count(family, n)
    if total > MAX_TREES and not allow_large:
        raise ResourceError(f"{total} trees exceed the enumeration budget of {MAX_TREES}; "
                            "pass allow_large to proceed")
    kind = "S" if family.charge == 0 else "R"
    return [BlossomTree(node, family) for node in _nodes(family, kind, n)]


# -- closure into half-edge maps ---------------------------------------------

@dataclass
class HalfEdgeMap:
    """Rotation system of a closed planar map with two marked faces.

    Dead half-edges (removed leaves) have ``alpha[h] == -1``.
    """

    sigma: list
    alpha: list
    vertex: list
    colour: list
    root_half_edge: int
    leg_half_edge: int | None
    outer_half_edge: int
    face_of: list = field(default_factory=list)
    n_faces: int = 0

    def __post_init__(self):
        if not self.face_of:
            self._faces()

    def live(self):
        return (h for h in range(len(self.alpha)) if self.alpha[h] >= 0)

    def phi(self, h: int) -> int:
        return self.sigma[self.alpha[h]]

    def _faces(self):
        face = [-1] * len(self.alpha)
        f = 0
        for h in self.live():
            if face[h] >= 0:
                continue
            x = h
            while face[x] < 0:
                face[x] = f
                x = self.sigma[self.alpha[x]]
            f += 1
        self.face_of = face
        self.n_faces = f

    @property
    def F0(self) -> int:
        return self.face_of[self.outer_half_edge]

    @property
    def F1(self) -> int:
        return self.face_of[self.root_half_edge]

    @property
    def n_vertices(self) -> int:
        return len({self.vertex[h] for h in self.live()})

    @property
    def n_edges(self) -> int:
        return sum(1 for _ in self.live()) // 2

    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_faces

    def faces(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.n_faces)]
        for h in self.live():
            out[self.face_of[h]].append(h)
        return out

    def vertex_degrees(self) -> Counter:
        return Counter(self.vertex[h] for h in self.live())


def close_tree(t: BlossomTree) -> HalfEdgeMap:
    """Match leaves and return the closed map with ``F0``/``F1`` marked.

    Raises
    ------
    StructuralError
        If the tree charge is not 0 or 1.
    """
    sigma: list[int] = []
    alpha: list[int] = []
    vertex: list[int] = []
    colour: list = []
    leaves: list[tuple[str, int, int]] = []  # (colour, parent half-edge, leaf half-edge)

    def new_vertex(c):
        colour.append(c)
        return len(colour) - 1

    def new_edge(u, v):
        h = len(alpha)
        alpha.extend([h + 1, h])
        vertex.extend([u, v])
        sigma.extend([h, h + 1])
        return h, h + 1

    def ring(hs):
        for i, h in enumerate(hs):
            sigma[h] = hs[(i + 1) % len(hs)]

    root_v = new_vertex(None)
    stack = [(t.root, root_v, None)]
    # iterative build; each entry: node, parent vertex, slot to record the half-edge into
    order: list = []
    first = None
    while stack:
        node, pv, rec = stack.pop()
        if isinstance(node, str):
            v = new_vertex(node)
            hp, hc = new_edge(pv, v)
            leaves.append((node, hp, hc))
        else:
            v = new_vertex(node[1])
            hp, hc = new_edge(pv, v)
            ring_slots = [hc]
            order.append((v, ring_slots))
            for child in reversed(node[2]):
                stack.append((child, v, ring_slots))
        if rec is not None:
            rec.append(hp)
        elif first is None:
            first = hp
    for _v, slots in order:
        # children were appended in pop order, which is clockwise order
        ring(slots)
    root_he = first

    charge = sum(1 if c == WHITE else -1 for c, _, _ in leaves)
    if charge not in (0, 1):
        raise StructuralError(f"cannot close a tree of charge {charge}")
    open_whites: list[int] = []
    wrapped_blacks: list[int] = []
    pairs = []
    for i, (c, _, _) in enumerate(leaves):
        if c == WHITE:
            open_whites.append(i)
        elif open_whites:
            pairs.append((i, open_whites.pop()))
        else:
            wrapped_blacks.append(i)
    if len(open_whites) != len(wrapped_blacks) + charge:
        raise StructuralError("leaf matching failed")
    rest = open_whites[::-1]  # blacks taken in contour order meet whites from the end
    for b, w in zip(wrapped_blacks, rest):
        pairs.append((b, w))
    leg = rest[len(wrapped_blacks)] if charge == 1 else None

    for b, w in pairs:
        _, hb, lb = leaves[b]
        _, hw, lw = leaves[w]
        alpha[hb], alpha[hw] = hw, hb
        alpha[lb] = alpha[lw] = -1
    leg_he = leaves[leg][2] if leg is not None else None
    if wrapped_blacks:
        outer = sigma[leaves[wrapped_blacks[-1]][1]]
    elif leg_he is not None:
        outer = leg_he
    else:
        outer = root_he
    return HalfEdgeMap(sigma, alpha, vertex, colour, root_he, leg_he, outer)


def dual_distance(m: HalfEdgeMap, directed: bool | None = None,
                  white_on_right: bool = True) -> int:
    """BFS distance from ``F0`` to ``F1`` in the dual graph.

    In bipartite maps (``directed`` defaults to true there) an edge may only
    be crossed with its white endpoint on the right: crossing from the face
    of ``h`` to the face of ``alpha(h)`` is allowed when the origin of ``h``
    has the required colour. ``white_on_right=False`` flips the handedness.
    """
    if directed is None:
        directed = any(c == BLACK for c in m.colour if c is not None) and \
            any(c == WHITE for c in _internal_colours(m))
    adj: list[set] = [set() for _ in range(m.n_faces)]
    want = WHITE if white_on_right else BLACK
    for h in m.live():
        a, b = m.face_of[h], m.face_of[m.alpha[h]]
        if a == b:
            continue
        if directed and m.colour[m.vertex[h]] != want:
            continue
        adj[a].add(b)
    src, dst = m.F0, m.F1
    dist = {src: 0}
    q = deque([src])
    while q:
        f = q.popleft()
        if f == dst:
            return dist[f]
        for g in adj[f]:
            if g not in dist:
                dist[g] = dist[f] + 1
                q.append(g)
    raise StructuralError("F1 unreachable from F0 in the dual graph")


def _internal_colours(m: HalfEdgeMap):
    deg = m.vertex_degrees()
    return [m.colour[v] for v, d in deg.items() if d > 1]


def is_bipartite_map(m: HalfEdgeMap) -> bool:
    return bool(_internal_colours(m)) and all(c in (WHITE, BLACK) for c in _internal_colours(m))


# -- cutting (inverse of closure) --------------------------------------------

def cut_map(m: HalfEdgeMap, family: OracleFamily) -> BlossomTree:
    """Re-open a closed two-leg map into its blossom tree.

    Edges on the external face are visited counterclockwise from the in-leg,
    each cut iff the map stays connected, round after round until nothing
    more can be cut. The end of a cut edge reached first becomes the white
    leaf, the other end the black leaf.
    """
    if m.leg_half_edge is None:
        raise UsageError("cutting is implemented for two-leg maps")
    if family.bipartite:
        # TODO(bipartite cutting): restrict cuts to edges leaving black vertices
        raise UsageError("cutting is implemented for monochrome families only")
    sigma = list(m.sigma)
    alpha = list(m.alpha)
    n = len(alpha)
    leaf_colour: dict[int, str] = {}  # half-edge at a vertex -> colour of the leaf it now carries

    sigma_inv = [0] * n
    for h in range(n):
        sigma_inv[sigma[h]] = h

    def step(x):  # counterclockwise along the face: inverse of sigma . alpha
        y = sigma_inv[x]
        return alpha[y] if alpha[y] >= 0 else y

    def face_walk(start):
        out = [start]
        x = step(start)
        while x != start:
            out.append(x)
            x = step(x)
        return out

    def connected_without(h):
        a, b = m.vertex[h], m.vertex[alpha[h]]
        seen = {a}
        q = deque([a])
        while q:
            v = q.popleft()
            if v == b:
                return True
            for x in by_vertex[v]:
                if alpha[x] < 0 or x == h or x == alpha[h]:
                    continue
                w = m.vertex[alpha[x]]
                if w not in seen:
                    seen.add(w)
                    q.append(w)
        return False

    by_vertex: dict[int, list[int]] = {}
    for h in range(n):
        if alpha[h] >= 0:
            by_vertex.setdefault(m.vertex[h], []).append(h)

    start = m.leg_half_edge
    while True:
        walk = face_walk(start)
        cut_any = False
        for h in walk:
            if alpha[h] < 0 or h in leaf_colour:
                continue
            if m.vertex[h] == m.vertex[m.leg_half_edge] or m.vertex[h] == m.vertex[m.root_half_edge]:
                continue
            if m.vertex[alpha[h]] in (m.vertex[m.leg_half_edge], m.vertex[m.root_half_edge]):
                continue
            if connected_without(h):
                o = alpha[h]
                alpha[h] = alpha[o] = -1
                leaf_colour[h] = WHITE
                leaf_colour[o] = BLACK
                cut_any = True
        if not cut_any:
            break
    # rebuild the tree from the root
    def node_at(h_parent_side):
        # h_parent_side is the half-edge at the child vertex pointing to its parent
        v = m.vertex[h_parent_side]
        deg = len(by_vertex[v])
        children = []
        x = sigma[h_parent_side]
        while x != h_parent_side:
            if x in leaf_colour:
                children.append(leaf_colour[x])
            else:
                children.append(node_at(alpha[x]))
            x = sigma[x]
        if v == m.vertex[m.leg_half_edge]:
            return WHITE
        return (deg, m.colour[v] if family.bipartite else None, tuple(children))

    root = node_at(alpha[m.root_half_edge])
    return BlossomTree(root, family)


# -- census -------------------------------------------------------------------

def _weight_key(t: BlossomTree) -> tuple:
    return tuple(sorted(t.vertex_counts().items(), key=lambda kv: (kv[0][0], str(kv[0][1]))))


def _shard_stats(args):
    family, n, lo, hi, check = args
    trees = enumerate_trees(family, n, allow_large=True)[lo:hi]
    table: Counter = Counter()
    mismatches = undirected = 0
    for t in trees:
        d = contour_distance(t)
        table[(_weight_key(t), d)] += 1
        if check:
            m = close_tree(t)
            if dual_distance(m) != d:
                mismatches += 1
            # reported only: crossing edges both ways can shorten bipartite distances
            if family.bipartite and dual_distance(m, directed=False) != d:
                undirected += 1
    return table, mismatches, len(trees), undirected


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("PLANARGEO_WORKERS", "1")))
    except ValueError:
        raise UsageError("PLANARGEO_WORKERS must be an integer") from None


def census_with_check(family: OracleFamily, n: int, check_dual: bool = True,
                      allow_large: bool = False, workers: int | None = None) -> dict:
    """Census by ``(vertex weights, distance)`` plus the contour/dual agreement count.

    For bipartite families ``undirected_differs`` counts trees whose
    undirected dual distance differs from the contour distance.

    Work is split into contiguous shards; merged results do not depend on the
    number of workers.
    """
    total = tree_count(family, n)
    if total > MAX_TREES and not allow_large:
        raise ResourceError(f"{total} trees exceed the enumeration budget of {MAX_TREES}")
    workers = worker_count() if workers is None else workers
    shards = max(1, min(workers, total))
    step = -(-total // shards) if total else 1
    jobs = [(family, n, i * step, min(total, (i + 1) * step), check_dual) for i in range(shards)]
    if workers > 1 and shards > 1:
        with ProcessPoolExecutor(workers) as ex:
            results = list(ex.map(_shard_stats, jobs))
    else:
        results = [_shard_stats(j) for j in jobs]
    table: Counter = Counter()
    mism = seen = undirected = 0
    for tab, mm, cnt, ud in results:
        table.update(tab)
        mism += mm
        seen += cnt
        undirected += ud
    return {"table": dict(sorted(table.items(), key=lambda kv: (str(kv[0][0]), kv[0][1]))),
            "mismatches": mism, "trees": seen, "undirected_differs": undirected}


def census(family: OracleFamily, n: int, allow_large: bool = False) -> dict[int, int]:
    """Number of trees by exact contour distance."""
    res = census_with_check(family, n, check_dual=False, allow_large=allow_large)
    out: Counter = Counter()
    for (_, d), c in res["table"].items():
        out[d] += c
    return dict(sorted(out.items()))


def partial_sums(table: dict[int, int], n_max: int) -> list[int]:
    """``[sum_{d <= n} table[d] for n in 0..n_max]``."""
    out, acc = [], 0
    for n in range(n_max + 1):
        acc += table.get(n, 0)
        out.append(acc)
    return out


def catalan(n: int) -> int:
    return comb(2 * n, n) // (n + 1)


def fuss_catalan(n: int, p: int) -> int:
    """Rooted plane trees with ``n`` vertices of valence ``p``: ``binom((p-1)n, n) / ((p-2)n + 1)``."""
    return comb((p - 1) * n, n) // ((p - 2) * n + 1)
