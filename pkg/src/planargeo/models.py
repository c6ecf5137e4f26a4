"""Model catalog: which planar-graph family, which couplings, how they bind.

A coupling is a symbolic name appearing in the operator equations (``g``,
``g4``, ``gt1``, ``c``...). Its *binding* says what it stands for when the
equations are solved as power series: a formal variable times a rational
scale, or a plain rational number (couplings entering at degree 0, such as
the Ising bivalent weight ``c``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .algebra.series import Rational, to_rational
from .errors import UsageError

FAMILIES = ("even_valence", "arbitrary_valence", "constellation", "bipartite_even",
            "ising", "ising_reduced")


@dataclass(frozen=True)
class Binding:
    """``scale * variable`` (formal) or ``scale`` alone when ``variable`` is None."""

    scale: Rational
    variable: str | None = None

    @property
    def is_formal(self) -> bool:
        return self.variable is not None


def formal(variable: str, scale=1) -> Binding:
    return Binding(to_rational(scale), variable)


def numeric(value) -> Binding:
    return Binding(to_rational(value), None)


def _as_binding(b) -> Binding:
    if isinstance(b, Binding):
        return b
    if isinstance(b, str):
        return formal(b)
    return numeric(b)


@dataclass(frozen=True)
class ModelSpec:
    """A model family with its vertex weights.

    Attributes
    ----------
    family : str
        One of ``FAMILIES``.
    weights : tuple of (int, str)
        Valence (or index) to coupling name. For ``even_valence`` and
        ``arbitrary_valence`` the key is the vertex valence; for
        ``constellation`` it is ``p`` (white vertices); for ``bipartite_even``
        the key ``2i`` labels ``g_{2i}``.
    dual_weights : tuple of (int, str)
        The tilde weights: ``i`` for black ``pi``-valent vertices of a
        constellation, ``2i`` for ``bipartite_even``.
    bindings : tuple of (str, Binding)
        Substitution used when solving as series.
    """

    family: str
    weights: tuple = ()
    dual_weights: tuple = ()
    p: int | None = None
    bindings: tuple = field(default=())
    label: str = ""

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise UsageError(f"unknown family {self.family!r}")
        if not self.weights and not self.dual_weights:
            raise UsageError("a model needs at least one coupling")
        if self.family == "constellation" and (self.p is None or self.p < 2):
            raise UsageError("constellations need p >= 2")
        if self.family == "even_valence" and any(k % 2 or k < 4 for k, _ in self.weights):
            raise UsageError("even-valence weights must be indexed by even valences >= 4")
        if self.family == "arbitrary_valence" and any(k < 3 for k, _ in self.weights):
            raise UsageError("arbitrary-valence weights must have valence >= 3")
        if self.family == "bipartite_even" and any(
                k % 2 or k < 2 for k, _ in self.weights + self.dual_weights):
            raise UsageError("bipartite even weights must be indexed by even valences")
        names = {n for _, n in self.weights + self.dual_weights}
        bound = dict(self.bindings)
        missing = names - set(bound)
        if missing:
            # default: every unbound coupling is its own formal variable
            extra = tuple((n, formal(n)) for n in sorted(missing))
            object.__setattr__(self, "bindings", tuple(self.bindings) + extra)

    @property
    def coupling_names(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(n for _, n in self.weights + self.dual_weights))

    @property
    def binding_map(self) -> dict[str, Binding]:
        return dict(self.bindings)

    @property
    def variables(self) -> tuple[str, ...]:
        """Formal variables in first-appearance order."""
        out = []
        for name in self.coupling_names:
            b = self.binding_map.get(name)
            if b is not None and b.is_formal and b.variable not in out:
                out.append(b.variable)
        if not out:
            raise UsageError("model has no formal variable; nothing to expand in")
        return tuple(out)

    def rebind(self, **bindings) -> "ModelSpec":
        bound = self.binding_map
        for k, v in bindings.items():
            if k not in bound:
                raise UsageError(f"model has no coupling {k!r}")
            bound[k] = _as_binding(v)
        return ModelSpec(self.family, self.weights, self.dual_weights, self.p,
                         tuple(bound.items()), self.label)

    def numeric_couplings(self, values: Mapping[str, float]) -> dict[str, float]:
        """Float value of every coupling given float values of the formal variables."""
        out = {}
        for name, b in self.bindings:
            if b.is_formal:
                out[name] = float(b.scale) * float(values[b.variable])
            else:
                out[name] = float(b.scale)
        return out


def _bind(bindings: Mapping | None) -> tuple:
    if not bindings:
        return ()
    return tuple((k, _as_binding(v)) for k, v in bindings.items())


# -- catalog ----------------------------------------------------------------

def even_valence(weights: Mapping[int, str], bindings=None, label="") -> ModelSpec:
    return ModelSpec("even_valence", tuple(sorted(weights.items())), bindings=_bind(bindings),
                     label=label or "even_valence")


def tetravalent(bindings=None) -> ModelSpec:
    return even_valence({4: "g"}, bindings, "tetravalent")


def tetra_hexa(bindings=None) -> ModelSpec:
    return even_valence({4: "g4", 6: "g6"}, bindings, "tetra_hexa")


def arbitrary_valence(weights: Mapping[int, str], bindings=None, label="") -> ModelSpec:
    return ModelSpec("arbitrary_valence", tuple(sorted(weights.items())),
                     bindings=_bind(bindings), label=label or "arbitrary_valence")


def trivalent(bindings=None) -> ModelSpec:
    return arbitrary_valence({3: "g"}, bindings, "trivalent")


def tri_tetra(bindings=None) -> ModelSpec:
    return arbitrary_valence({3: "g3", 4: "g4"}, bindings, "tri_tetra")


def constellation(p: int, dual_weights: Mapping[int, str], bindings=None,
                  white: str = "g", label="") -> ModelSpec:
    return ModelSpec("constellation", ((p, white),), tuple(sorted(dual_weights.items())), p,
                     _bind(bindings), label or f"constellation{p}")


def bipartite_pvalent(p: int, bindings=None) -> ModelSpec:
    """Bipartite graphs with black and white vertices all ``p``-valent."""
    return constellation(p, {1: "gt1"}, bindings, label=f"bipartite{p}")


def bipartite_even(weights: Mapping[int, str], dual_weights: Mapping[int, str],
                   bindings=None, label="") -> ModelSpec:
    return ModelSpec("bipartite_even", tuple(sorted(weights.items())),
                     tuple(sorted(dual_weights.items())), None, _bind(bindings),
                     label or "bipartite_even")


def ising(c="1/2", reduced: bool = False, bindings=None) -> ModelSpec:
    """Symmetric Ising point ``g2 = gt2 = c``, ``g4 = gt4 = g``; ``c`` numeric by default."""
    b = {"c": numeric(c) if not isinstance(c, Binding) else c}
    if bindings:
        b.update(bindings)
    return ModelSpec("ising_reduced" if reduced else "ising", ((2, "c"), (4, "g")),
                     ((2, "c"), (4, "g")), None, _bind(b),
                     "ising_reduced" if reduced else "ising")


CATALOG = {
    "tetravalent": tetravalent,
    "tetra_hexa": tetra_hexa,
    "trivalent": trivalent,
    "tri_tetra": tri_tetra,
    "bipartite3": lambda bindings=None: bipartite_pvalent(3, bindings),
    "bipartite4": lambda bindings=None: bipartite_pvalent(4, bindings),
    "constellation3": lambda bindings=None: constellation(3, {1: "gt1", 2: "gt2"}, bindings),
    "ising": lambda bindings=None: ising(bindings=bindings),
    "ising_reduced": lambda bindings=None: ising(reduced=True, bindings=bindings),
}


def model_by_name(name: str, bindings=None) -> ModelSpec:
    try:
        factory = CATALOG[name]
    except KeyError:
        raise UsageError(f"unknown model {name!r}; choose from {sorted(CATALOG)}") from None
    return factory(bindings)
