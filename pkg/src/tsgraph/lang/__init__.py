from .ast import (
    ARROW,
    ConfigKind,
    ConfigValue,
    Endpoint,
    LinkChain,
    NIL,
    NodeDecl,
    PortKind,
    PortRef,
    SELF_ARROW,
    Statement,
    TsgDocument,
    bare,
    integer,
)
from .parser import parse_document
from .printer import serialize_document, serialize_statement
from .source import ParseError, SourceSpan
from .validate import Diagnostic, Severity, validate_document

__all__ = [
    "ARROW",
    "ConfigKind",
    "ConfigValue",
    "Diagnostic",
    "Endpoint",
    "LinkChain",
    "NIL",
    "NodeDecl",
    "ParseError",
    "PortKind",
    "PortRef",
    "SELF_ARROW",
    "Severity",
    "SourceSpan",
    "Statement",
    "TsgDocument",
    "bare",
    "integer",
    "parse_document",
    "serialize_document",
    "serialize_statement",
    "validate_document",
]
