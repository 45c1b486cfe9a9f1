"""Exception types shared across the library."""

from __future__ import annotations


class DworkError(Exception):
    """Base class for everything raised on purpose."""


class GeometryError(DworkError):
    """Bad declaration or lookup in a geometry context."""


class TermError(DworkError):
    """Ill-formed term: wrong variety, unknown name, bad path."""


class RuleError(DworkError):
    """A rewrite step that does not apply where it claims to."""

    def __init__(self, rule: str, path: tuple, reason: str):
        self.rule = rule
        self.path = path
        self.reason = reason
        super().__init__(f"{rule} at /{'/'.join(map(str, path))}: {reason}")


class ParseError(DworkError):
    """Syntax error with a source span, for editor-style reporting."""

    def __init__(self, message: str, span=None):
        self.message = message
        self.span = span
        super().__init__(message)
