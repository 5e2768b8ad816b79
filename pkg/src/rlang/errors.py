"""Error types and diagnostic formatting shared across the toolchain.

Every error that can be traced to a source location carries a Span so the
CLI can render ``file:line:col: severity: message`` diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Span:
    """Source location: 1-based line and column plus covered length."""

    line: int
    column: int
    length: int = 1

    def end_column(self) -> int:
        return self.column + self.length


class RLangError(Exception):
    """Base class for all toolchain errors."""

    severity = "error"

    def __init__(self, message: str, span: Span | None = None, path: str | None = None):
        super().__init__(message)
        self.message = message
        self.span = span
        self.path = path

    def diagnostic(self) -> str:
        path = self.path or "<input>"
        line = self.span.line if self.span else 0
        column = self.span.column if self.span else 0
        return f"{path}:{line}:{column}: {self.severity}: {self.message}"


class LexError(RLangError):
    pass


class ParseError(RLangError):
    def __init__(self, message, span=None, path=None, expected=()):
        super().__init__(message, span, path)
        # Expected-token set, kept for error reporting and tests.
        self.expected = tuple(expected)


class TypeCheckError(RLangError):
    """Kind or value-type mismatch."""


class DomainError(TypeCheckError):
    """An expression mentions a state/action component its context forbids."""


class UnresolvedNameError(RLangError):
    pass


class DuplicateNameError(RLangError):
    pass


class EvalError(RLangError):
    """Runtime grounding failure (division by zero, dimension mismatch, ...)."""


class UnboundGroundingError(EvalError):
    """A vocabulary grounding key was never bound to a host callable."""


class MissingContextError(EvalError):
    """Evaluation reached for a state/action the context does not carry."""


class CompileError(RLangError):
    pass


class IllFormedCompositionError(CompileError):
    """Referenced effects overlap in transition support or overcommit mass."""


class FullRestrictionError(RLangError):
    """Action restrictions ruled out every action at some state."""


class SchemaError(RLangError):
    """Malformed vocabulary document."""


class DuplicateKeyError(RLangError):
    """A grounding key was registered twice."""


class ConfigError(RLangError):
    """Malformed experiment configuration."""
