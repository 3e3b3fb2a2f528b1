"""Passthrough plugin - identity refinement backend.

Priority: 20 (after config)
Capability: refinement
"""

from ..base import Plugin, PluginMeta
from ..interfaces import Directive, RefinementBackend


class PassthroughPlugin(Plugin, RefinementBackend):
    """Returns every segment unchanged."""

    meta = PluginMeta(
        id="passthrough",
        version="1.0.0",
        capabilities=["refinement"],
        dependencies=["config"],
        priority=20,
    )

    label = "passthrough"
    deterministic = True

    async def start(self) -> None:
        pass

    async def stop(self) -> None:
        pass

    def refine(self, text: str, directive: Directive, context: dict) -> str:
        return text


def create_plugin() -> PassthroughPlugin:
    return PassthroughPlugin()
