"""Named text functions callable from Decision and Function configs.

Every function takes its extra arguments first and the input text last,
so a config like Decision(label, string-match, ttl) calls
string-match("ttl", input).  Verifier-style functions return False on
failure and a string otherwise; combiners fold a list of such results.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable

from .expr import ExprError, string_match


class FunctionError(Exception):
    """Raised for unknown names or misuse of a registry function."""


@dataclass(frozen=True)
class FunctionSpec:
    """A registered function plus the documentation served for it."""

    name: str
    doc: str
    fn: Callable


_SECTION_HEAD = re.compile(r"^([A-Za-z][A-Za-z0-9@.:_-]*?):?\s")
_INET = re.compile(r"\binet6? \b|\binet6? addr:")
_HOP_STATUS = re.compile(r"^(?:Success|LastHop)\s+(\S+)\s*$")
_RESOLUTION = re.compile(r"has (?:IPv6 )?address|domain name pointer")


def ifconfig_sections(text: str) -> list[tuple[str, str]]:
    """Split interface-config output into (name, block) pairs.

    A section starts at an unindented interface name; both the classic
    "eth0      Link encap:" and the modern "eth0: flags=" layouts parse.
    """
    sections: list[tuple[str, list[str]]] = []
    for line in text.splitlines():
        if line and not line[0].isspace():
            match = _SECTION_HEAD.match(line + " ")
            if match:
                sections.append((match.group(1), [line]))
                continue
        if sections:
            sections[-1][1].append(line)
    return [(name, "\n".join(lines)) for name, lines in sections]


def _identity(text: str) -> str:
    return text


def _length(text: str) -> str:
    return str(len(text))


def _string_match(pattern: str, text: str):
    return string_match(pattern, text)


def _get_interfaces(text: str):
    names = [name for name, _ in ifconfig_sections(text) if name != "lo"]
    if not names:
        return False
    return "\n".join(names)


def _check_interfaces(excluded: str, text: str):
    skip = {part for part in excluded.split(",") if part}
    configured = [
        name
        for name, block in ifconfig_sections(text)
        if name not in skip and _INET.search(block)
    ]
    if not configured:
        return False
    # Newline-joined so the positive Decision output can feed
    # ifconfig-get-interfaces directly in chained graphs.
    return "\n".join(configured)


def _validate(text: str):
    for line in text.splitlines():
        if _RESOLUTION.search(line):
            return line
    return False


def _last_hop_address(text: str):
    address = False
    for line in text.splitlines():
        match = _HOP_STATUS.match(line.strip())
        if match:
            address = match.group(1)
    if address is False or address == "none":
        return False
    return address


FUNCTIONS: dict[str, FunctionSpec] = {}


def _register(name: str, doc: str, fn: Callable) -> None:
    FUNCTIONS[name] = FunctionSpec(name, doc, fn)


_register("identity", "Pass the input through unchanged.", _identity)
_register("length", "Decimal character count of the input.", _length)
_register(
    "string-match",
    "First input line matching the given regular expression, or False.",
    _string_match,
)
_register(
    "ifconfig-get-interfaces",
    "Interface names from interface-config output, one per line, loopback dropped.",
    _get_interfaces,
)
_register(
    "ifconfig-check-interfaces",
    "Comma-joined names of interfaces outside the excluded list that carry "
    "an inet address, or False when none do.",
    _check_interfaces,
)
_register(
    "validate",
    "First name-resolution line of lookup output, or False when nothing resolved.",
    _validate,
)
_register(
    "last-hop-address",
    "Address from the latest Success/LastHop status line, or False for none.",
    _last_hop_address,
)


def lookup_function(name: str) -> FunctionSpec:
    try:
        return FUNCTIONS[name]
    except KeyError:
        raise FunctionError(f"unknown function '{name}'") from None


def call_function(name: str, args: list[str]):
    """Apply a registry function; argument errors surface as FunctionError."""
    spec = lookup_function(name)
    try:
        return spec.fn(*args)
    except ExprError:
        raise
    except TypeError as err:
        raise FunctionError(f"{name}: {err}") from err


def combine_or(results: list):
    """First result that passed verification."""
    for result in results:
        if result is not False:
            return result
    return False


def combine_and(results: list):
    """Last result when every input passed, else False."""
    if not results:
        return False
    value = False
    for result in results:
        if result is False:
            return False
        value = result
    return value


COMBINERS: dict[str, Callable] = {"or": combine_or, "and": combine_and}


def lookup_combiner(name: str) -> Callable:
    try:
        return COMBINERS[name]
    except KeyError:
        raise FunctionError(f"unknown combiner '{name}'") from None
