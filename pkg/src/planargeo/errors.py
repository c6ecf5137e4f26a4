"""Exception hierarchy shared by all modules."""


class PlanarGeoError(Exception):
    """Base class for all library errors."""


class UsageError(PlanarGeoError, ValueError):
    """Inputs violate an operation's preconditions."""


class StructuralError(PlanarGeoError):
    """An algebraic or combinatorial structure is not what it must be."""


class BoundaryError(StructuralError):
    """A sequence was referenced at an index with no boundary value."""


class NumericalError(PlanarGeoError, ArithmeticError):
    """An iterative numerical method failed to converge."""


class DegenerateInputError(NumericalError):
    """Input sits on a degenerate locus (coincident roots, unit-circle root)."""


class DomainError(PlanarGeoError, ValueError):
    """Function evaluated outside its domain."""


class PoleError(DomainError):
    """A closed form hit a vanishing denominator."""


class ResourceError(PlanarGeoError):
    """A brute-force computation exceeds its enumeration budget."""
