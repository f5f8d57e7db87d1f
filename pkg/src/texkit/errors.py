"""Exception types shared across the toolkit."""

from __future__ import annotations


class TexkitError(Exception):
    """Base class for all toolkit errors."""


class DataFormatError(TexkitError):
    """A data file could not be parsed; carries path and line number when known."""

    def __init__(self, message: str, *, path=None, line: int | None = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}: "
        if line is not None:
            where += f"line {line}: "
        super().__init__(where + message)


class ValidationError(TexkitError):
    """Structurally valid input that violates a documented invariant."""


class UnknownTypeError(TexkitError, KeyError):
    """Lookup of a type id that is not in the ontology."""

    def __init__(self, type_id: str):
        self.type_id = type_id
        TexkitError.__init__(self, f"unknown type id: {type_id!r}")

    def __str__(self) -> str:
        return self.args[0]


class DimensionError(TexkitError, ValueError):
    """Vector operands of mismatched length."""


class GrammarError(TexkitError):
    """A grammar source file failed to compile."""

    def __init__(self, message: str, *, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class NormalizationError(TexkitError):
    """A parse tree could not be reduced to a semantic value."""
