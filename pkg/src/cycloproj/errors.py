"""Exception types shared across the package."""


class CycloprojError(Exception):
    """Base class for all package errors."""


class DegenerateTuple(CycloprojError):
    """Two points of an ordered 4-tuple coincide."""


class DegenerateFamily(CycloprojError):
    """Every specialization of a parametric solution is degenerate."""


class ParseError(CycloprojError):
    """Malformed template text; carries the offending position."""

    def __init__(self, message, pos):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class WeightTooLarge(CycloprojError):
    """Minimality test requested above the subset-enumeration bound."""


class HigherPrimePower(CycloprojError):
    """q-type undefined: some element has order divisible by q^2."""


class UnsupportedTemplate(CycloprojError):
    """Template constituent outside the shipped catalog."""


class NotStable(CycloprojError):
    """Multiset is not stable under complex conjugation."""


class MatchFailure(CycloprojError):
    """A transformed monomial functional matched no original symbol."""


class DataFileError(CycloprojError):
    """Shipped data file missing or malformed."""


class TwoFreeVariables(CycloprojError):
    """Orbit assignment left two free variables (six-pair, O_19 case)."""


class NotInS(CycloprojError):
    """Tuple is not a member of the solution set S."""
