"""Static checks of a parsed document against a node registry."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .ast import (
    Endpoint,
    LinkChain,
    NodeDecl,
    PortKind,
    PortRef,
    SELF_ARROW,
    TsgDocument,
)
from .source import SourceSpan

if TYPE_CHECKING:
    from ..registry import NodeRegistry

VIEW_CLASS = "View"

_IMPLICIT = (PortRef(PortKind.INPUT, 0),)
_IMPLICIT_OUT = (PortRef(PortKind.OUTPUT, 0),)


class Severity(enum.Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    message: str
    span: SourceSpan | None = None

    def __str__(self) -> str:
        where = f"{self.span.line}:{self.span.column}: " if self.span else ""
        return f"{where}{self.severity.value}: {self.message}"


def _decls(doc: TsgDocument):
    """Every declaration with its span, in statement order."""
    for stmt in doc.statements:
        if isinstance(stmt, NodeDecl):
            yield stmt
        else:
            for element in stmt.elements:
                if isinstance(element.target, NodeDecl):
                    yield element.target


def declared_names(doc: TsgDocument) -> dict[str, str]:
    """Maps explicitly declared instance names to their class names."""
    names: dict[str, str] = {}
    for decl in _decls(doc):
        if decl.name is not None and decl.name not in names:
            names[decl.name] = decl.class_name
    return names


def validate_document(doc: TsgDocument, registry: "NodeRegistry") -> list[Diagnostic]:
    out: list[Diagnostic] = []
    names = declared_names(doc)

    seen: set[str] = set()
    for decl in _decls(doc):
        if decl.name is not None:
            if decl.name in seen:
                out.append(Diagnostic(
                    Severity.ERROR, f"duplicate instance name {decl.name!r}", decl.span))
            seen.add(decl.name)
        spec = registry.lookup(decl.class_name)
        if spec is None:
            out.append(Diagnostic(
                Severity.ERROR, f"unknown node class {decl.class_name!r}", decl.span))
        elif not spec.variadic_configs and len(decl.args) > len(spec.configs):
            out.append(Diagnostic(
                Severity.WARNING,
                f"{decl.class_name} takes {len(spec.configs)} config values, "
                f"{len(decl.args)} given",
                decl.span))

    def class_of(element: Endpoint) -> str:
        if isinstance(element.target, NodeDecl):
            return element.target.class_name
        return names.get(element.target, VIEW_CLASS)

    for stmt in doc.statements:
        if not isinstance(stmt, LinkChain):
            continue
        for left, op, right in stmt.links():
            right_ports = right.pre_ports if right.pre_ports is not None else _IMPLICIT
            right_cls = class_of(right)
            right_spec = registry.lookup(right_cls)
            if op == SELF_ARROW:
                if right_cls != VIEW_CLASS:
                    out.append(Diagnostic(
                        Severity.ERROR,
                        f"node-self link target must be a View, not {right_cls}",
                        right.span))
                for port in right_ports:
                    if port.kind is PortKind.CONFIG:
                        out.append(Diagnostic(
                            Severity.ERROR,
                            "config slot cannot receive a node-self link",
                            right.span))
            else:
                left_ports = left.post_ports if left.post_ports is not None else _IMPLICIT_OUT
                if len(left_ports) != len(right_ports):
                    out.append(Diagnostic(
                        Severity.ERROR,
                        f"port list arity mismatch {len(left_ports)} vs {len(right_ports)}",
                        right.span))
                left_spec = registry.lookup(class_of(left))
                if left_spec is not None and not left_spec.variadic_outputs:
                    for port in left_ports:
                        if port.index >= len(left_spec.outputs):
                            out.append(Diagnostic(
                                Severity.ERROR,
                                f"output {port.index} out of range for "
                                f"{left_spec.class_name} "
                                f"({len(left_spec.outputs)} outputs)",
                                left.span))
            if right_spec is not None:
                for port in right_ports:
                    if port.kind is PortKind.INPUT and not right_spec.variadic_inputs \
                            and port.index >= len(right_spec.inputs):
                        out.append(Diagnostic(
                            Severity.ERROR,
                            f"input {port.index} out of range for {right_cls} "
                            f"({len(right_spec.inputs)} inputs)",
                            right.span))
                    elif port.kind is PortKind.CONFIG and not right_spec.variadic_configs \
                            and port.index > len(right_spec.configs):
                        out.append(Diagnostic(
                            Severity.ERROR,
                            f"config {port.index} out of range for {right_cls} "
                            f"({len(right_spec.configs)} config slots)",
                            right.span))
    return out
