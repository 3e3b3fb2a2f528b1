"""Config plugin - loads and provides configuration.

Priority: 01 (very early, provides config to other plugins)
"""

import os
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import yaml

from ...domain import ThresholdSchedule
from ...template import Boulware
from ..base import Plugin, PluginMeta

CONFIG_NAME = "stratex.yml"
BACKENDS = ("offline", "passthrough", "remote")
LOG_LEVELS = ("debug", "info", "warn", "error")


def _expand_env_vars(value: Any) -> Any:
    """Recursively expand ${VAR} and ${VAR:-default} in strings."""
    if isinstance(value, str):
        pattern = r"\$\{([^}:]+)(?::-([^}]*))?\}"

        def replacer(match):
            env_value = os.environ.get(match.group(1))
            if env_value is not None:
                return env_value
            return match.group(2) if match.group(2) is not None else ""

        return re.sub(pattern, replacer, value)
    elif isinstance(value, dict):
        return {k: _expand_env_vars(v) for k, v in value.items()}
    elif isinstance(value, list):
        return [_expand_env_vars(v) for v in value]
    else:
        return value


def _optional_path(value) -> Optional[Path]:
    return Path(value) if value else None


@dataclass
class StratexConfig:
    """Parsed configuration object."""

    backend: str = "offline"

    # Explanation pipeline
    u_fixed: float = 0.6
    max_rounds: int = 2
    rules_path: Optional[Path] = None

    # Negotiation engine
    dynamic_threshold: list = field(default_factory=lambda: [[0.0, 0.9], [1.0, 0.6]])
    boulware_e: float = 0.2
    boulware_u_min: float = 0.4
    boulware_u_max: float = 1.0

    # Backends
    offline_table: Optional[Path] = None
    remote_url: Optional[str] = None
    remote_api_key: Optional[str] = None
    remote_model: Optional[str] = None
    remote_timeout: float = 30.0
    remote_retries: int = 2

    log_level: str = "info"

    # Raw config, as handed to plugins and shown by `config show`
    _raw: dict = field(default_factory=dict)

    @property
    def raw(self) -> dict:
        return self._raw

    @property
    def schedule(self) -> ThresholdSchedule:
        return ThresholdSchedule(tuple((float(t), float(v)) for t, v in self.dynamic_threshold))

    @property
    def boulware(self) -> Boulware:
        return Boulware(self.boulware_e, self.boulware_u_min, self.boulware_u_max)

    @classmethod
    def from_dict(cls, data: dict) -> "StratexConfig":
        """Create config from dictionary.

        Raises:
            ValueError: On unknown backend or log level, or malformed values
        """
        data = _expand_env_vars(data or {})

        backend = data.get("backend", "offline")
        if backend not in BACKENDS:
            raise ValueError(f"backend must be one of {', '.join(BACKENDS)}, got '{backend}'")

        explain = data.get("explain", {}) or {}
        engine = data.get("engine", {}) or {}
        boulware = engine.get("boulware", {}) or {}
        offline = data.get("offline", {}) or {}
        remote = data.get("remote", {}) or {}
        level = (data.get("logger", {}) or {}).get("level", "info")
        if level not in LOG_LEVELS:
            raise ValueError(f"logger.level must be one of {', '.join(LOG_LEVELS)}")

        config = cls(
            backend=backend,
            u_fixed=float(explain.get("u_fixed", 0.6)),
            max_rounds=int(explain.get("max_rounds", 2)),
            rules_path=_optional_path(explain.get("rules")),
            dynamic_threshold=engine.get("dynamic_threshold", [[0.0, 0.9], [1.0, 0.6]]),
            boulware_e=float(boulware.get("e", 0.2)),
            boulware_u_min=float(boulware.get("u_min", 0.4)),
            boulware_u_max=float(boulware.get("u_max", 1.0)),
            offline_table=_optional_path(offline.get("table")),
            remote_url=remote.get("url") or os.environ.get("STRATEX_REMOTE_URL"),
            remote_api_key=remote.get("api_key") or os.environ.get("STRATEX_REMOTE_API_KEY"),
            remote_model=remote.get("model") or os.environ.get("STRATEX_REMOTE_MODEL"),
            remote_timeout=float(remote.get("timeout", 30)),
            remote_retries=int(remote.get("retries", 2)),
            log_level=level,
            _raw=data,
        )
        if not 0.0 <= config.u_fixed <= 1.0:
            raise ValueError(f"explain.u_fixed must lie in [0, 1], got {config.u_fixed}")
        if config.max_rounds < 0:
            raise ValueError("explain.max_rounds must be >= 0")
        config.schedule  # validates breakpoints
        config.boulware  # validates parameters
        return config

    @classmethod
    def load(cls, path: Path) -> "StratexConfig":
        """Load config from YAML file."""
        with open(path) as f:
            data = yaml.safe_load(f) or {}
        return cls.from_dict(data)


def find_config_file(explicit: Optional[Path] = None) -> Optional[Path]:
    """`explicit`, else ./stratex.yml, else ~/.stratex/stratex.yml."""
    if explicit is not None:
        return Path(explicit)
    local_config = Path(CONFIG_NAME)
    if local_config.exists():
        return local_config
    home_config = Path.home() / ".stratex" / CONFIG_NAME
    if home_config.exists():
        return home_config
    return None


def load_config(explicit: Optional[Path] = None) -> StratexConfig:
    """Load the effective configuration (defaults when no file is found)."""
    path = find_config_file(explicit)
    if path is None:
        return StratexConfig.from_dict({})
    return StratexConfig.load(path)


class ConfigPlugin(Plugin):
    """Configuration management plugin."""

    meta = PluginMeta(
        id="config",
        version="1.0.0",
        capabilities=["config"],
        dependencies=[],
        priority=1,  # Load first
    )

    def __init__(self):
        self._config: Optional[StratexConfig] = None

    def configure(self, config: dict) -> None:
        self._config = StratexConfig.from_dict(config)

    async def start(self) -> None:
        if self._config:
            print(f"[Config] Backend: {self._config.backend}", file=sys.stderr)

    async def stop(self) -> None:
        pass


# Factory function for plugin discovery
def create_plugin() -> ConfigPlugin:
    return ConfigPlugin()
