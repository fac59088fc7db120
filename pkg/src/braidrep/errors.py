"""Exception types shared across the package."""


class BraidrepError(Exception):
    """Base class for all library errors."""


class ShapeMismatch(BraidrepError, ValueError):
    pass


class NotInvertible(BraidrepError, ZeroDivisionError):
    pass


class IndexOutOfRange(BraidrepError, IndexError):
    pass


class ParseError(BraidrepError, ValueError):
    """Malformed textual input; ``position`` is a 0-based character offset."""

    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class SizeGuard(BraidrepError, ValueError):
    """Operation refused because the tensor power is above the desk-scale limit."""


class ParameterMismatch(BraidrepError, ValueError):
    pass


class ConstructionCheckFailed(BraidrepError, AssertionError):
    pass


class NotApplicable(BraidrepError, ValueError):
    pass


class YBEFails(BraidrepError, ValueError):
    def __init__(self, message, witness=None):
        self.witness = witness
        super().__init__(message if witness is None else f"{message}: {witness}")


class TwistBreaksYBE(YBEFails):
    pass


class AxiomViolation(BraidrepError, ValueError):
    pass


class InvariantError(BraidrepError, ValueError):
    """A loaded object violates one of its type invariants (named in ``invariant``)."""

    def __init__(self, invariant, detail=""):
        self.invariant = invariant
        super().__init__(f"{invariant}: {detail}" if detail else invariant)
