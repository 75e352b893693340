"""Exception types shared across the package."""
from __future__ import annotations


class IbagSearchError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(IbagSearchError):
    """A line-oriented input file failed to parse."""

    def __init__(self, source: object, line_no: int, message: str) -> None:
        super().__init__(f"{source}:{line_no}: {message}")
        self.source = str(source)
        self.line_no = line_no


class ValidationError(IbagSearchError):
    """Input data violated a structural constraint."""
