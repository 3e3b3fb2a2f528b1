"""Config plugin exports."""

from .plugin import (
    ConfigPlugin,
    StratexConfig,
    create_plugin,
    find_config_file,
    load_config,
)

__all__ = [
    "ConfigPlugin",
    "StratexConfig",
    "create_plugin",
    "find_config_file",
    "load_config",
]
