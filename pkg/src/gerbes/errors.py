"""Exception hierarchy shared by all gerbes modules."""

from __future__ import annotations


class GerbesError(Exception):
    """Base class for every error raised by this package."""


class InputError(GerbesError):
    """Malformed input data or an unresolvable reference."""


class NoIdentity(GerbesError):
    """Index 0 is not a two-sided identity of the multiplication table."""


class NonAssociative(GerbesError):
    """The multiplication table fails an associativity check."""


class NoInverse(GerbesError):
    """Some element of the table has no two-sided inverse."""


class ClosureExceedsBound(GerbesError):
    """Permutation-generator closure exceeded the configured maximum order."""


class InvalidSubgroup(GerbesError):
    """The element set is not closed, or misses the identity."""


class InvalidHomomorphism(GerbesError):
    """The image table does not define a group homomorphism."""


class NonCyclicCoefficients(GerbesError):
    """A coefficient module that must be cyclic is not."""


class SizeBound(GerbesError):
    """An input exceeds the configured size limit for this computation."""


class DegreeTooHigh(GerbesError):
    """Cochain degree outside the supported range."""


class NotACocycle(GerbesError):
    """An operation requiring a cocycle received a cochain with d != 0."""


class NonEquivariantPairing(GerbesError):
    """A bilinear pairing is not equivariant for the group action."""


class SearchSpaceExceeded(GerbesError):
    """An enumeration would exceed its configured bound."""


class ModelAxiomFailure(GerbesError):
    """An arithmetic model failed its axioms; carries the report."""

    def __init__(self, report) -> None:
        super().__init__(f"arithmetic model fails axioms: {report.summary()}")
        self.report = report


class NotLocallyNeutral(GerbesError):
    """The extension admits no splitting over the named place."""

    def __init__(self, place_name: str) -> None:
        super().__init__(f"no local section over place {place_name!r}")
        self.place_name = place_name


class GlobalH3Obstruction(GerbesError):
    """The degree-3 cup class admits no global primitive; carries a certificate."""

    def __init__(self, certificate) -> None:
        super().__init__("cup cocycle is not a coboundary; no global trivialization")
        self.certificate = certificate
