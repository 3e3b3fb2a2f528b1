"""Plugin system for stratex.

This module provides:
- Plugin base class and metadata (base.py)
- Capability interfaces (interfaces.py)
- Plugin registry (registry.py)

Plugins are discovered from plugin directories. Each plugin directory
must contain a plugin.py with a create_plugin() factory function.
"""

import importlib
import sys
from pathlib import Path
from typing import Optional

from .base import HOOK_METHODS, Plugin, PluginMeta
from .interfaces import Directive, RefinementBackend, RefinementError
from .registry import PluginError, PluginRegistry

PLUGINS_DIR = Path(__file__).parent
BACKENDS = ("offline", "passthrough", "remote")


def discover_plugins(plugins_dir: Path = PLUGINS_DIR) -> list[type[Plugin]]:
    """Discover plugin classes from a directory.

    Each subdirectory with a plugin.py containing create_plugin() is loaded.

    Args:
        plugins_dir: Directory containing plugin subdirectories

    Returns:
        List of plugin classes
    """
    plugin_classes = []

    if not plugins_dir.exists():
        return plugin_classes

    for path in sorted(plugins_dir.iterdir()):
        if not path.is_dir() or path.name.startswith("_"):
            continue
        if not (path / "plugin.py").exists():
            continue

        try:
            module = importlib.import_module(f"{__name__}.{path.name}.plugin")
            create_plugin = getattr(module, "create_plugin", None)
            if create_plugin is None:
                print(
                    f"[Plugins] Warning: {path.name}/plugin.py has no create_plugin()",
                    file=sys.stderr,
                )
                continue
            plugin_classes.append(type(create_plugin()))
        except Exception as e:
            print(f"[Plugins] Failed to load {path.name}: {e}", file=sys.stderr)

    return plugin_classes


async def init_plugins(
    config: Optional[dict] = None,
    plugins_dir: Path = PLUGINS_DIR,
    registry: Optional[PluginRegistry] = None,
) -> PluginRegistry:
    """Initialize the plugin system.

    1. Discover plugins from directory
    2. Filter: only the configured refinement backend, minus disabled plugins
    3. Register, configure and start

    Args:
        config: Full configuration dict (from stratex.yml)
        plugins_dir: Directory containing plugin subdirectories
        registry: Registry to fill (a new one by default)

    Returns:
        Configured and started PluginRegistry
    """
    config = config or {}
    backend = config.get("backend", "offline")
    disabled = config.get("plugins", {}).get("disabled", [])
    registry = registry if registry is not None else PluginRegistry()

    for plugin_class in discover_plugins(plugins_dir):
        plugin_id = plugin_class.meta.id

        if plugin_id in disabled:
            print(f"[Plugins] Skipping disabled plugin: {plugin_id}", file=sys.stderr)
            continue

        if "refinement" in plugin_class.meta.capabilities and plugin_id != backend:
            continue

        try:
            registry.register(plugin_class)
        except PluginError as e:
            print(f"[Plugins] Failed to register: {e}", file=sys.stderr)

    try:
        registry.refinement_backend()
    except PluginError:
        raise PluginError(f"Unknown refinement backend '{backend}'") from None

    registry.configure_all(config)
    await registry.start_all()
    return registry


def load_backend(name: str, config: Optional[dict] = None) -> RefinementBackend:
    """Build and configure one refinement backend without a registry."""
    if name not in BACKENDS:
        raise PluginError(f"Unknown refinement backend '{name}' (choose from {', '.join(BACKENDS)})")
    module = importlib.import_module(f"{__name__}.{name}.plugin")
    backend = module.create_plugin()
    backend.configure(config or {})
    return backend


__all__ = [
    # Base
    "Plugin",
    "PluginMeta",
    "HOOK_METHODS",
    # Interfaces
    "Directive",
    "RefinementBackend",
    "RefinementError",
    # Registry
    "PluginRegistry",
    "PluginError",
    # Functions
    "discover_plugins",
    "init_plugins",
    "load_backend",
]
