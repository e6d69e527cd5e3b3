"""Exception types shared across the package."""

from __future__ import annotations


class HamseqError(Exception):
    """Base class for every error raised by the package."""

    code = "ERROR"


class ParseError(HamseqError):
    code = "PARSE_ERROR"

    def __init__(self, message: str, line: int | None = None, code: str | None = None):
        if code is not None:
            self.code = code
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{self.code}: {prefix}{message}")


class Disconnected(HamseqError):
    code = "DISCONNECTED"


class CapExceeded(HamseqError):
    code = "CAP_EXCEEDED"


class InvalidParams(HamseqError):
    code = "INVALID_PARAMS"


class DomainError(HamseqError, ValueError):
    code = "DOMAIN"
