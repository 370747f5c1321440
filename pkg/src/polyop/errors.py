"""Exception hierarchy shared by all modules."""


class PolyopError(Exception):
    """Base class for library errors."""


class ShapeError(PolyopError, ValueError):
    """Domain/codomain or table shape mismatch."""


class NotInjectiveError(ShapeError):
    pass


class NotBijectiveError(ShapeError):
    pass


class GuardExceeded(PolyopError):
    """An enumeration would produce more items than the configured guard."""

    def __init__(self, what, needed, guard):
        super().__init__(f"{what}: {needed} items exceeds guard {guard}")
        self.what = what
        self.needed = needed
        self.guard = guard


class TreeAxiomError(ShapeError):
    """A polynomial endofunctor violates one of the tree axioms (numbered 1-4)."""

    def __init__(self, axiom, message):
        super().__init__(f"tree axiom {axiom}: {message}")
        self.axiom = axiom


class SegalError(PolyopError):
    pass
