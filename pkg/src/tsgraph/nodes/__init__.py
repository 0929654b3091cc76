"""Built-in node classes and the default registry."""

from __future__ import annotations

from ..registry import NodeRegistry
from .decision import decision_specs
from .sdn import sdn_specs
from .transform import transform_specs
from .wrappers import wrapper_specs


def build_default_registry() -> NodeRegistry:
    registry = NodeRegistry()
    for spec in (*wrapper_specs(), *decision_specs(), *transform_specs(), *sdn_specs()):
        registry.register(spec)
    return registry
