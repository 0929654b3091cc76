from __future__ import annotations

import enum
from dataclasses import dataclass

from .source import SourceSpan


class TokenKind(enum.Enum):
    IDENT = "identifier"
    INT = "integer"
    STRING = "string"
    SEXPR = "s-expression"
    DOUBLE_COLON = "'::'"
    ARROW = "'->'"
    SELF_ARROW = "'-->'"
    LPAREN = "'('"
    RPAREN = "')'"
    LBRACKET = "'['"
    RBRACKET = "']'"
    COMMA = "','"
    SEMICOLON = "';'"
    MINUS = "'-'"
    EOF = "end of input"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    span: SourceSpan
