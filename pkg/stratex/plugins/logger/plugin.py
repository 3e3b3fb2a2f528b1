"""Logger plugin - logs explanation pipeline stages.

Priority: 5 (very early, logs everything)
"""

import json
import sys
from datetime import datetime, timezone

from ..base import Plugin, PluginMeta
from ..config.plugin import StratexConfig


class LoggerPlugin(Plugin):
    """Logging plugin for pipeline stages."""

    meta = PluginMeta(
        id="logger",
        version="1.0.0",
        capabilities=["logging"],
        dependencies=[],
        priority=5,
    )

    def __init__(self):
        self._level: str = "info"
        self._levels = {"debug": 0, "info": 1, "warn": 2, "error": 3}

    def configure(self, config: dict) -> None:
        self._level = StratexConfig.from_dict(config).log_level

    async def start(self) -> None:
        pass

    async def stop(self) -> None:
        pass

    def _should_log(self, level: str) -> bool:
        return self._levels.get(level, 1) >= self._levels.get(self._level, 1)

    def _log(self, level: str, stage: str, msg: str, **extra):
        if not self._should_log(level):
            return
        ts = datetime.now(timezone.utc).strftime("%Y-%m-%d %H:%M:%S")
        parts = [f"[{ts}]", f"[{level[0].upper()}]", f"[{stage}]", msg]
        if extra:
            parts.append(json.dumps(extra, default=str))
        print(" ".join(parts), file=sys.stderr, flush=True)

    # --- Hook Methods ---

    async def on_parse(self, ctx: dict) -> dict:
        template = ctx.get("template")
        if template is not None:
            self._log(
                "info",
                "parse",
                f"{template.kind.value} template '{template.name}'",
                phases=len(template.phases),
            )
        return ctx

    async def on_annotate(self, ctx: dict) -> dict:
        semrep = ctx.get("semrep")
        if semrep is not None:
            self._log("debug", "annotate", f"{len(semrep)} nodes annotated")
        return ctx

    async def on_realize(self, ctx: dict) -> dict:
        expl = ctx.get("explanation")
        if expl is not None:
            self._log("debug", "realize", f"{len(expl.segments)} segments")
        return ctx

    async def on_enrich(self, ctx: dict) -> dict:
        expl = ctx.get("explanation")
        backend = getattr(expl, "backend", "")
        fallbacks = sum(1 for s in getattr(expl, "segments", ()) if s.fallback_used)
        self._log("info", "enrich", f"Backend {backend}", fallbacks=fallbacks)
        for warning in ctx.get("warnings", ()):
            self._log("warn", "enrich", warning)
        return ctx

    async def on_customize(self, ctx: dict) -> dict:
        audience = ctx.get("audience")
        self._log("debug", "customize", f"Audience {getattr(audience, 'value', audience)}")
        return ctx

    async def on_validate(self, ctx: dict) -> dict:
        report = ctx.get("report")
        rounds = ctx.get("rounds", 0)
        if report is not None:
            verdict = "valid" if report.valid else "invalid"
            self._log("info", "validate", f"Explanation {verdict}", rounds=rounds)
        return ctx

    async def on_error(self, ctx: dict) -> dict:
        error = ctx.get("error", "")
        stage = ctx.get("stage", "")
        self._log("error", "error", f"In {stage}: {error}")
        return ctx


def create_plugin() -> LoggerPlugin:
    return LoggerPlugin()
