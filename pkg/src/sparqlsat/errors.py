"""Exception hierarchy for the toolkit."""

from __future__ import annotations


class SparqlSatError(Exception):
    """Base class for all toolkit errors."""


class QuerySyntaxError(SparqlSatError):
    """Raised when input text is not in the supported grammar."""

    def __init__(self, message: str, position: int, expected: str | None = None):
        self.position = position
        self.expected = expected
        suffix = f" (expected {expected})" if expected else ""
        super().__init__(f"{message} at offset {position}{suffix}")


class UnsupportedFeature(SparqlSatError):
    """A query uses a construct outside the supported subset."""

    def __init__(self, name: str, position: int = -1):
        self.name = name
        self.position = position
        super().__init__(f"unsupported feature: {name}")


class UnsupportedOpaquePredicate(SparqlSatError):
    """An opaque builtin call was found but builtin-as-bound lowering is off."""


class NormalizationBlowup(SparqlSatError):
    """Disjunctive normal form of a filter exceeded the disjunct cap."""


class SchemeSetBlowup(SparqlSatError):
    """Candidate scheme set exceeded the configured size cap."""


class NotUnionFree(SparqlSatError):
    """Operation requires a union-free pattern."""


class NotAFPattern(SparqlSatError):
    """Operation requires a pattern built from AND and FILTER only."""


class NotWellDesigned(SparqlSatError):
    """Operation requires a well-designed pattern."""


class NotNormalized(SparqlSatError):
    """Operation requires atomic filter constraints (run normalize_filters)."""


class PreconditionViolated(SparqlSatError):
    """Caller did not establish an operation's documented precondition."""


class InvalidPosition(SparqlSatError):
    """A tree position does not address a node of the pattern."""


class BoundTooLarge(SparqlSatError):
    """Requested search bound exceeds the combinatorial guard."""


class InvalidConstants(SparqlSatError):
    """Constant parameters for a relation compiler are not admissible."""


class EmptyChoiceSet(SparqlSatError):
    """A choice-cover instance contains an empty choice set."""


class UnknownFormat(SparqlSatError):
    """Unrecognized corpus format flag."""
