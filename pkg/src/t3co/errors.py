"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class T3coError(Exception):
    """Base class for every error raised by the toolkit."""


# core model


class InvalidWalkError(T3coError):
    pass


class AmbiguousWalkError(T3coError):
    """Raised when a non-proper walk has more than one proper completion."""


# grammar


class T3coSyntaxError(T3coError):
    """Parse failure with a location and the set of tokens that would fit."""

    def __init__(self, message: str, span=None, expected: frozenset[str] = frozenset()):
        self.span = span
        self.expected = frozenset(expected)
        where = f" at {span.line}:{span.col}" if span is not None else ""
        hint = f" (expected one of: {', '.join(sorted(self.expected))})" if self.expected else ""
        super().__init__(f"{message}{where}{hint}")


class MixedNotationError(T3coSyntaxError):
    pass


class MissingFieldError(T3coSyntaxError):
    pass


# semantics


class ResolutionError(T3coError):
    def __init__(self, message: str, candidates: tuple[str, ...] = (), span=None):
        self.candidates = tuple(candidates)
        self.span = span
        extra = f" (candidates: {', '.join(self.candidates)})" if self.candidates else ""
        super().__init__(message + extra)


class RegistryError(T3coError):
    pass


class UnsupportedObjectiveError(T3coError):
    pass


# instance


class InstanceFormatError(T3coError):
    pass


class UnsupportedFormatError(InstanceFormatError):
    pass


class BindingError(T3coError):
    pass


class ClosureError(T3coError):
    pass


# validator / solvers


class UnsupportedSemanticsError(T3coError):
    pass


class UnverifiedPropertyError(T3coError):
    pass


# catalog


class CatalogError(T3coError):
    pass


class RangeError(InstanceFormatError):
    """A bound value lies outside the range its cost signature declares."""
