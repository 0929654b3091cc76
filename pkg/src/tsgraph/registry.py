"""Node class registry: interface specs plus behavior callbacks.

A class spec declares the ports a declaration may legally reference and
carries the three life-cycle callbacks the engine invokes.  Variadic
flags lift the range checks for classes like Decision or View whose
input and config lists grow with the wiring.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, TYPE_CHECKING

if TYPE_CHECKING:
    from .engine import NodeContext

Callback = Callable[["NodeContext"], None]


def noop(ctx: "NodeContext") -> None:
    return None


@dataclass(frozen=True)
class PortSpec:
    name: str
    doc: str


@dataclass(frozen=True)
class ConfigSpec:
    name: str
    doc: str
    required: bool = False


@dataclass(frozen=True)
class NodeClassSpec:
    class_name: str
    doc: str
    inputs: tuple[PortSpec, ...] = ()
    configs: tuple[ConfigSpec, ...] = ()
    outputs: tuple[PortSpec, ...] = ()
    init: Callback = noop
    exec: Callback = noop
    term: Callback = noop
    variadic_inputs: bool = False
    variadic_configs: bool = False
    # Fan-out nodes may be wired on output indices past the declared list.
    variadic_outputs: bool = False
    # Tool wrappers with no connected inputs run once right after start.
    autostart: bool = False


class NodeRegistry:
    def __init__(self) -> None:
        self._classes: dict[str, NodeClassSpec] = {}

    def register(self, spec: NodeClassSpec) -> None:
        if spec.class_name in self._classes:
            raise ValueError(f"node class {spec.class_name!r} already registered")
        if spec.init is None or spec.exec is None or spec.term is None:
            raise ValueError(f"node class {spec.class_name!r} is missing a callback")
        if not spec.doc.strip():
            raise ValueError(f"node class {spec.class_name!r} has an empty doc")
        for port in (*spec.inputs, *spec.outputs):
            if not port.doc.strip():
                raise ValueError(f"{spec.class_name}: port {port.name!r} has an empty doc")
        for cfg in spec.configs:
            if not cfg.doc.strip():
                raise ValueError(f"{spec.class_name}: config {cfg.name!r} has an empty doc")
        self._classes[spec.class_name] = spec

    def lookup(self, class_name: str) -> NodeClassSpec | None:
        return self._classes.get(class_name)

    def __contains__(self, class_name: str) -> bool:
        return class_name in self._classes

    def __iter__(self) -> Iterator[NodeClassSpec]:
        return iter(self._classes.values())

    def names(self) -> list[str]:
        return sorted(self._classes)


def register_node_class(registry: NodeRegistry, spec: NodeClassSpec) -> None:
    registry.register(spec)
