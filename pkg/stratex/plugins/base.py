"""Plugin base class and metadata.

All plugins must inherit from Plugin and define a PluginMeta.
Lifecycle methods (start, stop) and hooks are async.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field


@dataclass
class PluginMeta:
    """Plugin metadata - defines identity and capabilities."""

    id: str  # Unique identifier: "offline", "remote", "logger"
    version: str  # Semver: "1.0.0"
    capabilities: list[str] = field(default_factory=list)  # What it provides: ["refinement"]
    dependencies: list[str] = field(
        default_factory=list
    )  # Required plugins: ["config"]
    priority: int = 50  # Load order (lower = earlier)

    def __post_init__(self):
        if not self.id:
            raise ValueError("Plugin id is required")
        if not self.version:
            raise ValueError("Plugin version is required")


class Plugin(ABC):
    """Base class for all plugins.

    Plugins must:
    1. Define a `meta` class attribute with PluginMeta
    2. Implement configure(), start(), stop()
    3. Optionally implement pipeline hooks (on_parse, on_realize, etc.)
    4. Optionally implement capability interfaces (RefinementBackend)

    Example:
        class MyPlugin(Plugin):
            meta = PluginMeta(
                id="myplugin",
                version="1.0.0",
                capabilities=["refinement"],
                dependencies=["config"],
                priority=20,
            )

            def configure(self, config: dict) -> None:
                self._config = config.get("myplugin", {})

            async def start(self) -> None:
                pass

            async def stop(self) -> None:
                pass
    """

    meta: PluginMeta  # Must be defined by subclass

    def configure(self, config: dict) -> None:
        """Receive configuration.

        Called before start() with the full config dict; plugins read their
        own section. Synchronous - config is just assignment.

        Args:
            config: Full config dict (may be empty)
        """
        pass

    @abstractmethod
    async def start(self) -> None:
        """Initialize the plugin.

        Called after all plugins are configured, in load order.
        """
        pass

    @abstractmethod
    async def stop(self) -> None:
        """Clean up plugin resources, in reverse load order."""
        pass

    # --- Optional Pipeline Hooks ---
    # Each runs after its pipeline stage. The ctx dict holds the stage
    # result; a plugin may replace it. ctx["abort"] = True skips the later
    # plugins' hooks for that stage only; the pipeline carries on.

    async def on_parse(self, ctx: dict) -> dict:
        """After parsing: ctx["template"]."""
        return ctx

    async def on_annotate(self, ctx: dict) -> dict:
        """After annotation: ctx["semrep"]."""
        return ctx

    async def on_realize(self, ctx: dict) -> dict:
        """After rule-based realization: ctx["explanation"]."""
        return ctx

    async def on_enrich(self, ctx: dict) -> dict:
        """After enrichment: ctx["explanation"], ctx["warnings"]."""
        return ctx

    async def on_customize(self, ctx: dict) -> dict:
        """After audience customization: ctx["explanation"], ctx["audience"]."""
        return ctx

    async def on_validate(self, ctx: dict) -> dict:
        """After validation and refinement: ctx["report"], ctx["rounds"]."""
        return ctx

    async def on_error(self, ctx: dict) -> dict:
        """Called when a stage or hook fails: ctx["error"], ctx["stage"]."""
        return ctx


# Pipeline hook names, in pipeline order
HOOK_METHODS = [
    "on_parse",
    "on_annotate",
    "on_realize",
    "on_enrich",
    "on_customize",
    "on_validate",
    "on_error",
]
