"""Canonical serializer: one statement per line, normalized spacing."""
from __future__ import annotations

from .ast import (
    ConfigKind,
    ConfigValue,
    Endpoint,
    LinkChain,
    NodeDecl,
    PortKind,
    PortRef,
    TsgDocument,
)


def _port(ref: PortRef) -> str:
    if ref.kind is PortKind.CONFIG:
        return f"-{ref.index}"
    return str(ref.index)


def _ports(ports: tuple[PortRef, ...] | None) -> str:
    if ports is None:
        return ""
    return "[" + ", ".join(_port(p) for p in ports) + "]"


def _arg(value: ConfigValue) -> str:
    if value.kind is ConfigKind.NIL:
        return "nil"
    if value.kind is ConfigKind.STRING:
        escaped = value.text.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    return value.text


def _decl(decl: NodeDecl) -> str:
    args = ", ".join(_arg(a) for a in decl.args)
    head = f"{decl.name} :: " if decl.name is not None else ""
    return f"{head}{decl.class_name}({args})"


def _endpoint(ep: Endpoint) -> str:
    target = _decl(ep.target) if isinstance(ep.target, NodeDecl) else ep.target
    return f"{_ports(ep.pre_ports)}{target}{_ports(ep.post_ports)}"


def serialize_statement(stmt: NodeDecl | LinkChain) -> str:
    if isinstance(stmt, NodeDecl):
        return f"{_decl(stmt)};"
    parts = [_endpoint(stmt.elements[0])]
    for i, op in enumerate(stmt.operators):
        parts.append(f" {op} {_endpoint(stmt.elements[i + 1])}")
    return "".join(parts) + ";"


def serialize_document(doc: TsgDocument) -> str:
    if not doc.statements:
        return ""
    return "\n".join(serialize_statement(s) for s in doc.statements) + "\n"
