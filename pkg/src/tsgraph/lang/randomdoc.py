"""Seeded synthesizer of well-formed documents.

Used by the test suite for round-trip checks and synthetic repositories.
Generated trees respect every structural rule the parser enforces, so
serialize/parse must reproduce them exactly.
"""
from __future__ import annotations

import random
import string

from .ast import (
    ARROW,
    SELF_ARROW,
    ConfigKind,
    ConfigValue,
    Endpoint,
    LinkChain,
    NIL,
    NodeDecl,
    PortKind,
    PortRef,
    Statement,
    TsgDocument,
)

_CLASS_POOL = (
    "Ping", "Clock", "Decision", "Filter", "Format", "Function", "Graph",
    "Host", "Ifconfig", "Arp", "Route", "Command", "Tee", "Table-view",
    "Rest-api", "Json-filter", "Flow-space-filter", "Decision-summary",
)
_BARE_POOL = (
    "localhost", "eth0", "-n", "10.0.0.5", "125.0.1.254", "ttl",
    "string-match", "http://127.0.0.1:8181", "combine=or", "'input-0",
)
_SEXPR_POOL = (
    "(lambda (x) (> (length x) 0))",
    "(string-match \"ttl\" input)",
    "(and (> (length input) 2) (not (= (length input) 9)))",
    "(or (string-match \"up\" input) (string-match \"UP\" input))",
)


def _ident(rng: random.Random) -> str:
    segments = []
    for _ in range(rng.randint(1, 3)):
        first = rng.choice(string.ascii_lowercase + "_")
        rest = "".join(
            rng.choice(string.ascii_lowercase + string.digits + "_")
            for _ in range(rng.randint(0, 5))
        )
        segments.append(first + rest)
    return "-".join(segments)


def _string_value(rng: random.Random) -> ConfigValue:
    alphabet = string.ascii_letters + string.digits + " .:=/{}<>"
    text = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 12)))
    return ConfigValue(ConfigKind.STRING, text)


def _arg(rng: random.Random) -> ConfigValue:
    roll = rng.random()
    if roll < 0.35:
        return ConfigValue(ConfigKind.BARE, rng.choice(_BARE_POOL))
    if roll < 0.55:
        return ConfigValue(ConfigKind.INTEGER, str(rng.randint(0, 9999)))
    if roll < 0.7:
        return NIL
    if roll < 0.85:
        return _string_value(rng)
    return ConfigValue(ConfigKind.SEXPR, rng.choice(_SEXPR_POOL))


def _decl(rng: random.Random, name: str | None) -> NodeDecl:
    args = tuple(_arg(rng) for _ in range(rng.randint(0, 4)))
    return NodeDecl(name, rng.choice(_CLASS_POOL), args)


def _port_list(rng: random.Random, role: PortKind) -> tuple[PortRef, ...]:
    ports = []
    for _ in range(rng.randint(1, 3)):
        if role is PortKind.OUTPUT:
            ports.append(PortRef(PortKind.OUTPUT, rng.randint(0, 4)))
        elif rng.random() < 0.3:
            ports.append(PortRef(PortKind.CONFIG, rng.randint(1, 4)))
        else:
            ports.append(PortRef(PortKind.INPUT, rng.randint(0, 4)))
    return tuple(ports)


def _endpoint(rng: random.Random, names: list[str], first: bool, last: bool,
              after_self_arrow: bool) -> Endpoint:
    roll = rng.random()
    if roll < 0.4 and names:
        target: str | NodeDecl = rng.choice(names)
    elif roll < 0.7:
        target = _decl(rng, None)
    else:
        name = _ident(rng)
        names.append(name)
        target = _decl(rng, name)
    pre = None
    post = None
    if not first and rng.random() < 0.5:
        role = PortKind.INPUT
        pre = _port_list(rng, role)
        if after_self_arrow:
            pre = tuple(PortRef(PortKind.INPUT, p.index) for p in pre)
    if not last and rng.random() < 0.5:
        post = _port_list(rng, PortKind.OUTPUT)
    return Endpoint(target, pre, post)


def gen_document(rng: random.Random, max_statements: int = 8) -> TsgDocument:
    names: list[str] = []
    statements: list[Statement] = []
    for _ in range(rng.randint(1, max_statements)):
        if rng.random() < 0.4:
            name = _ident(rng)
            names.append(name)
            statements.append(_decl(rng, name))
            continue
        count = rng.randint(2, 4)
        operators = []
        for i in range(count - 1):
            # '-->' only as a non-repeated tail keeps generation simple.
            if i == count - 2 and rng.random() < 0.25:
                operators.append(SELF_ARROW)
            else:
                operators.append(ARROW)
        elements = []
        for i in range(count):
            after_self = i > 0 and operators[i - 1] == SELF_ARROW
            ep = _endpoint(rng, names, first=(i == 0), last=(i == count - 1),
                           after_self_arrow=after_self)
            if i < count - 1 and operators[i] == SELF_ARROW:
                ep = Endpoint(ep.target, ep.pre_ports, None)
            elements.append(ep)
        statements.append(LinkChain(tuple(elements), tuple(operators)))
    return TsgDocument(tuple(statements))
