"""Syntax tree for troubleshooting-graph documents.

Spans are carried for diagnostics but excluded from equality, so a
document compares equal to its serialize/reparse image.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Union

from .source import SourceSpan


class PortKind(enum.Enum):
    INPUT = "input"
    OUTPUT = "output"
    CONFIG = "config"


@dataclass(frozen=True)
class PortRef:
    kind: PortKind
    index: int


class ConfigKind(enum.Enum):
    BARE = "bare"
    STRING = "string"
    INTEGER = "integer"
    NIL = "nil"
    SEXPR = "sexpr"


@dataclass(frozen=True)
class ConfigValue:
    kind: ConfigKind
    text: str

    def as_text(self) -> str | None:
        """Value as plain text, None for the empty-slot marker."""
        if self.kind is ConfigKind.NIL:
            return None
        return self.text


NIL = ConfigValue(ConfigKind.NIL, "nil")


def bare(text: str) -> ConfigValue:
    return ConfigValue(ConfigKind.BARE, text)


def integer(value: int) -> ConfigValue:
    return ConfigValue(ConfigKind.INTEGER, str(value))


@dataclass(frozen=True)
class NodeDecl:
    """`name :: Class(args)` or inline `Class(args)` (name None)."""

    name: str | None
    class_name: str
    args: tuple[ConfigValue, ...] = ()
    span: SourceSpan | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Endpoint:
    """One element of a link chain.

    `pre_ports` is the bracket list written before the target and names the
    element's input or config slots when it stands on the right side of an
    operator.  `post_ports` is written after the target and names output
    slots for the operator that follows.  None means the implicit port 0.
    """

    target: Union[str, NodeDecl]
    pre_ports: tuple[PortRef, ...] | None = None
    post_ports: tuple[PortRef, ...] | None = None
    span: SourceSpan | None = field(default=None, compare=False, repr=False)


ARROW = "->"
SELF_ARROW = "-->"


@dataclass(frozen=True)
class LinkChain:
    elements: tuple[Endpoint, ...]
    operators: tuple[str, ...]
    span: SourceSpan | None = field(default=None, compare=False, repr=False)

    def links(self):
        """Pairs of (left element, operator, right element)."""
        for i, op in enumerate(self.operators):
            yield self.elements[i], op, self.elements[i + 1]


Statement = Union[NodeDecl, LinkChain]


@dataclass(frozen=True)
class TsgDocument:
    statements: tuple[Statement, ...]
    source_name: str = field(default="<string>", compare=False)
