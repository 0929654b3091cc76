"""Source positions and parse failures shared by the lexer and parser."""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SourceSpan:
    """Byte range of a construct, with the line/column of its start (1-based)."""

    start: int
    end: int
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


class ParseError(Exception):
    def __init__(self, message: str, span: SourceSpan, source_name: str = "<string>"):
        super().__init__(f"{source_name}:{span.line}:{span.column}: {message}")
        self.message = message
        self.span = span
        self.source_name = source_name
