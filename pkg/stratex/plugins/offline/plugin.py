"""Offline plugin - deterministic phrase substitution.

Priority: 20 (after config)
Capability: refinement
"""

import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from ...realizer import (
    SLOT_RE,
    Audience,
    RolePattern,
    RuleFileError,
    format_attribute,
    most_specific,
    parse_pattern,
)
from ..base import Plugin, PluginMeta
from ..config.plugin import StratexConfig
from ..interfaces import Directive, RefinementBackend, RefinementError

DEFAULT_TABLE = Path(__file__).parents[2] / "data" / "offline.table"


@dataclass(frozen=True)
class Substitution:
    pattern: RolePattern
    find: str
    replace: str
    line: int = 0


def parse_table(text: str) -> dict[Directive, tuple[Substitution, ...]]:
    """Parse a substitution table.

    Raises:
        RuleFileError: On entries outside a section, malformed lines or duplicates
    """
    table: dict[Directive, list[Substitution]] = {d: [] for d in Directive}
    seen: set = set()
    section: Optional[Directive] = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            try:
                section = Directive(line[1:-1].strip())
            except ValueError:
                raise RuleFileError(number, f"unknown section {line}") from None
            continue
        if section is None:
            raise RuleFileError(number, "entry before any [elaborate]/[simplify] section")
        fields = [f.strip() for f in line.split("|")]
        if len(fields) != 3 or not fields[1] or not fields[2]:
            raise RuleFileError(number, "expected 'Kind | find | replacement'")
        try:
            pattern = parse_pattern(fields[0])
        except ValueError as e:
            raise RuleFileError(number, str(e)) from e
        key = (section, pattern.kind, frozenset(pattern.predicates), fields[1])
        if key in seen:
            raise RuleFileError(number, "duplicate entry")
        seen.add(key)
        table[section].append(Substitution(pattern, fields[1], fields[2], number))
    return {d: tuple(entries) for d, entries in table.items()}


class OfflinePlugin(Plugin, RefinementBackend):
    """Offline refinement backend driven by a substitution table."""

    meta = PluginMeta(
        id="offline",
        version="1.0.0",
        capabilities=["refinement"],
        dependencies=["config"],
        priority=20,
    )

    label = "offline"
    deterministic = True

    def __init__(self):
        self._table_path: Path = DEFAULT_TABLE
        self._table: Optional[dict] = None

    def configure(self, config: dict) -> None:
        """Read the substitution table path."""
        self._table_path = StratexConfig.from_dict(config).offline_table or DEFAULT_TABLE
        self._table = None

    async def start(self) -> None:
        entries = sum(len(v) for v in self.table.values())
        print(f"[Offline] Loaded {entries} substitutions from {self._table_path.name}", file=sys.stderr)

    async def stop(self) -> None:
        pass

    @property
    def table(self) -> dict:
        if self._table is None:
            self._table = parse_table(self._table_path.read_text(encoding="utf-8"))
        return self._table

    # --- RefinementBackend Interface ---

    def refine(self, text: str, directive: Directive, context: dict) -> str:
        """Apply the most specific matching substitution (or none)."""
        role = context.get("role", "")
        candidates = [
            entry
            for entry in self.table[Directive(directive)]
            if entry.pattern.matches(role, context) and entry.find in text
        ]
        entry = most_specific(candidates)
        if entry is None:
            return text

        def resolve(slot: str) -> str:
            if slot not in context:
                raise RefinementError(f"context has no '{slot}' for line {entry.line}")
            return format_attribute(slot, context[slot], Audience.EXPERT)

        return text.replace(entry.find, SLOT_RE.sub(lambda m: resolve(m.group(1)), entry.replace), 1)


# Factory function for plugin discovery
def create_plugin() -> OfflinePlugin:
    return OfflinePlugin()
