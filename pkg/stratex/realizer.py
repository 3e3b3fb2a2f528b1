"""Realizer - rule-based English generation and audience customization.

Rules live in a line-oriented data file:

    Kind[pred, pred=value] | expert template | layperson template [| interpretive phrase]

`{slot}` placeholders are filled from the node's role attributes or from
its rendered children. Predicates choose between variants of one role;
the most specific matching rule wins, ties go to the earlier line.
"""

import dataclasses
import re
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Callable, Optional

from .annotator import RoleKind, SemanticRep, SemanticRole
from .numerals import number_word, percent_text, two_decimals
from .template import Choice, FunctionApp, TemplateKind, format_number, phase_path

DEFAULT_RULES = Path(__file__).parent / "data" / "default.rules"

HEADER = "Header"
SLOT_RE = re.compile(r"\{(\w+)\}")
PATTERN_RE = re.compile(r"^(\w+)(?:\[(.*)\])?$")

# Slots each kind may use: its role attributes plus child slots.
SLOTS = {
    RoleKind.TIME_PHASE.value: {
        "percentStart", "percentEnd", "tStart", "tEnd", "closing", "ordinal", "body",
    },
    RoleKind.ACCEPT_PREDICATE.value: {"lhs", "rhs", "tacticCount"},
    RoleKind.OFFER_UTILITY.value: set(),
    RoleKind.OWN_PLANNED_BID_UTILITY.value: set(),
    RoleKind.CONCESSION_QUANTILE.value: {"slope", "intercept", "linear"},
    RoleKind.DYNAMIC_THRESHOLD.value: set(),
    RoleKind.FIXED_THRESHOLD.value: {"value"},
    RoleKind.THRESHOLD_COMBINATOR.value: {"operands", "arity"},
    RoleKind.LINEAR_TIME_TERM.value: {"slope", "intercept"},
    RoleKind.BID_DIRECTIVE.value: {"options", "tactic", "e", "u_min", "u_max", "linear"},
    HEADER: {"name", "phaseCount", "kindNoun"},
}


class Audience(str, Enum):
    EXPERT = "expert"
    LAYPERSON = "layperson"


class Provenance(str, Enum):
    RULE_BASED = "RuleBased"
    ENRICHED = "Enriched"


class RuleFileError(Exception):
    """Malformed rule file line."""

    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class MissingRole(Exception):
    """A role kind has no unconditional rule."""

    def __init__(self, kind: str):
        self.kind = kind
        super().__init__(f"No rule for role kind '{kind}'")


class SlotResolutionError(Exception):
    """A template slot cannot be filled for the matched role."""

    def __init__(self, slot: str, role: str):
        self.slot = slot
        self.role = role
        super().__init__(f"Cannot fill slot '{{{slot}}}' for role {role}")


# --- Patterns and rules ---


def _attribute_text(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Enum):
        return str(value.value)
    return str(value)


@dataclass(frozen=True)
class RolePattern:
    """Role kind plus attribute predicates: `TimePhase[isInitial, closing=]]`."""

    kind: str
    predicates: tuple = ()  # ((name, expected text or None), ...)

    @property
    def specificity(self) -> int:
        return len(self.predicates)

    def matches(self, kind: str, attributes: dict) -> bool:
        if kind != self.kind:
            return False
        for name, expected in self.predicates:
            actual = attributes.get(name)
            if expected is None:
                if not actual:
                    return False
            elif actual is None or _attribute_text(actual) != expected:
                return False
        return True


def parse_pattern(text: str) -> RolePattern:
    """Parse `Kind[pred, pred=value]`; raises ValueError when malformed."""
    match = PATTERN_RE.match(text.strip())
    if not match:
        raise ValueError(f"malformed role pattern '{text.strip()}'")
    kind, body = match.group(1), match.group(2)
    predicates = []
    if body is not None:
        for part in body.split(","):
            part = part.strip()
            if not part:
                raise ValueError(f"empty predicate in '{text.strip()}'")
            name, sep, value = part.partition("=")
            predicates.append((name.strip(), value.strip() if sep else None))
    return RolePattern(kind, tuple(predicates))


def most_specific(candidates: list, key: Callable = lambda c: c.pattern):
    """Highest specificity wins; the earliest candidate wins ties."""
    best = None
    for candidate in candidates:
        if best is None or key(candidate).specificity > key(best).specificity:
            best = candidate
    return best


@dataclass(frozen=True)
class Rule:
    pattern: RolePattern
    expert: str
    layperson: str
    interpretive: Optional[str] = None
    line: int = 0

    def text(self, audience: Audience) -> str:
        return self.expert if audience == Audience.EXPERT else self.layperson


@dataclass(frozen=True)
class RuleSet:
    rules: tuple

    def lookup(self, kind: str, attributes: dict) -> Rule:
        candidates = [r for r in self.rules if r.pattern.matches(kind, attributes)]
        if not candidates:
            raise MissingRole(kind)
        return most_specific(candidates)

    def kinds(self) -> set[str]:
        return {r.pattern.kind for r in self.rules}


def load_rules(text: str) -> RuleSet:
    """Parse rule-file text.

    Raises:
        RuleFileError: On malformed lines, unknown kinds or slots, duplicate patterns
        MissingRole: If a role kind lacks an unconditional rule
    """
    rules: list[Rule] = []
    seen: dict[tuple, int] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split("|")]
        if len(fields) not in (3, 4):
            raise RuleFileError(number, f"expected 3 or 4 '|'-separated fields, got {len(fields)}")
        try:
            pattern = parse_pattern(fields[0])
        except ValueError as e:
            raise RuleFileError(number, str(e)) from e
        if pattern.kind not in SLOTS:
            raise RuleFileError(number, f"unknown role kind '{pattern.kind}'")
        key = (pattern.kind, frozenset(pattern.predicates))
        if key in seen:
            raise RuleFileError(number, f"duplicate pattern (first on line {seen[key]})")
        seen[key] = number
        expert, layperson = fields[1], fields[2]
        interpretive = fields[3] if len(fields) == 4 and fields[3] else None
        if not expert or not layperson:
            raise RuleFileError(number, "empty sentence template")
        for template in (expert, layperson):
            for slot in SLOT_RE.findall(template):
                if slot not in SLOTS[pattern.kind]:
                    raise RuleFileError(number, f"unknown slot '{{{slot}}}' for {pattern.kind}")
        rules.append(Rule(pattern, expert, layperson, interpretive, number))

    unconditional = {r.pattern.kind for r in rules if not r.pattern.predicates}
    for kind in [k.value for k in RoleKind] + [HEADER]:
        if kind not in unconditional:
            raise MissingRole(kind)
    return RuleSet(tuple(rules))


def load_rules_file(path) -> RuleSet:
    return load_rules(Path(path).read_text(encoding="utf-8"))


@lru_cache(maxsize=1)
def default_rules() -> RuleSet:
    """The shipped rule file."""
    return load_rules_file(DEFAULT_RULES)


# --- Explanations ---


@dataclass(frozen=True)
class Segment:
    text: str
    audience: Audience
    provenance: Provenance
    trace: frozenset  # node paths this segment covers
    phase: Optional[int] = None  # None for the header
    interpretive: frozenset = frozenset()
    backend: Optional[str] = None
    fallback_used: bool = False

    def to_dict(self) -> dict:
        return {
            "phase": self.phase,
            "audience": self.audience.value,
            "provenance": self.provenance.value,
            "text": self.text,
            "trace": sorted(self.trace),
            "interpretive": sorted(self.interpretive),
            "backend": self.backend,
            "fallback_used": self.fallback_used,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Segment":
        return cls(
            text=data["text"],
            audience=Audience(data["audience"]),
            provenance=Provenance(data["provenance"]),
            trace=frozenset(data.get("trace", [])),
            phase=data.get("phase"),
            interpretive=frozenset(data.get("interpretive", [])),
            backend=data.get("backend"),
            fallback_used=data.get("fallback_used", False),
        )


@dataclass(frozen=True)
class Explanation:
    segments: tuple
    template_name: str
    kind: TemplateKind
    semrep: Optional[SemanticRep] = field(default=None, compare=False, repr=False)
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    @property
    def text(self) -> str:
        return "\n\n".join(s.text for s in self.segments)

    def phase_segment(self, index: int) -> Segment:
        for segment in self.segments:
            if segment.phase == index:
                return segment
        raise KeyError(index)

    def with_segments(self, segments) -> "Explanation":
        return dataclasses.replace(self, segments=tuple(segments))

    def to_dict(self) -> dict:
        return {
            "template": self.template_name,
            "kind": self.kind.value,
            "meta": dict(self.meta),
            "segments": [s.to_dict() for s in self.segments],
        }

    @classmethod
    def from_dict(cls, data: dict, semrep: Optional[SemanticRep] = None) -> "Explanation":
        common = dict(
            segments=tuple(Segment.from_dict(s) for s in data["segments"]),
            template_name=data["template"],
            kind=TemplateKind(data["kind"]),
            semrep=semrep,
            meta=dict(data.get("meta", {})),
        )
        if "backend" in data:
            return EnrichedExplanation(
                **common,
                backend=data["backend"],
                warnings=tuple(data.get("warnings", [])),
            )
        return cls(**common)


@dataclass(frozen=True)
class EnrichedExplanation(Explanation):
    backend: str = ""
    warnings: tuple = ()

    def to_dict(self) -> dict:
        data = super().to_dict()
        data["backend"] = self.backend
        data["warnings"] = list(self.warnings)
        return data


# --- Rendering ---


def _join(parts: list[str], last: str = "and") -> str:
    if len(parts) == 1:
        return parts[0]
    return f"{', '.join(parts[:-1])} {last} {parts[-1]}"


def _phase_count(n: int) -> str:
    return "a single phase" if n == 1 else f"{number_word(n)} phases"


def format_attribute(name: str, value, audience: Audience) -> str:
    """Attribute value as slot text: percentages minimal, counts as words."""
    if isinstance(value, bool) or isinstance(value, str):
        return _attribute_text(value)
    if isinstance(value, int):
        return number_word(value)
    if name.startswith("percent"):
        return percent_text(value)
    if audience == Audience.EXPERT:
        return format_number(value)
    return two_decimals(value)


def fill(template: str, resolve: Callable[[str], str]) -> str:
    return SLOT_RE.sub(lambda m: resolve(m.group(1)), template)


class _Renderer:
    def __init__(self, semrep: SemanticRep, rules: RuleSet, audience: Audience):
        self.semrep = semrep
        self.nodes = semrep.nodes
        self.rules = rules
        self.audience = audience
        self.interpretive: list[str] = []
        self.phrases: list[str] = []

    def render(self, path: str) -> str:
        role: SemanticRole = self.semrep[path]
        rule = self.rules.lookup(role.kind.value, role.attributes)
        text = fill(rule.text(self.audience), lambda slot: self._slot(slot, path, role))
        direction = role.attributes.get("slopeDirection")
        if rule.interpretive and direction not in (None, "flat"):
            self.interpretive.append(path)
            self.phrases.append(rule.interpretive)
        return text

    def _slot(self, slot: str, path: str, role: SemanticRole) -> str:
        node = self.nodes[path]
        if slot in ("body", "lhs", "rhs"):
            return self.render(f"{path}.{slot}")
        if slot == "operands" and isinstance(node, FunctionApp):
            return _join([self.render(f"{path}.args[{i}]") for i in range(len(node.args))])
        if slot == "linear" and isinstance(node, FunctionApp) and node.args:
            return self.render(f"{path}.args[0]")
        if slot == "options" and isinstance(node, Choice):
            parts = [
                self.render(f"{path}.options[{i}]")
                for i, selected in enumerate(node.selected)
                if selected
            ]
            return "; otherwise ".join(parts)
        if slot in role.attributes:
            return format_attribute(slot, role.attributes[slot], self.audience)
        raise SlotResolutionError(slot, role.kind.value)


def _unselected_prefixes(semrep: SemanticRep, index: int) -> list[str]:
    body = semrep.nodes.get(f"{phase_path(index)}.body")
    if not isinstance(body, Choice):
        return []
    return [
        f"{phase_path(index)}.body.options[{i}]"
        for i, selected in enumerate(body.selected)
        if not selected
    ]


def phase_trace(semrep: SemanticRep, index: int) -> frozenset:
    """Paths of phase `index`, minus the subtrees of unselected bid tactics."""
    prefix = phase_path(index)
    skipped = _unselected_prefixes(semrep, index)
    return frozenset(
        path
        for path in semrep.roles
        if (path == prefix or path.startswith(prefix + "."))
        and not any(path == s or path.startswith(s + ".") for s in skipped)
    )


def render_header(semrep: SemanticRep, rules: RuleSet, audience: Audience) -> Segment:
    template = semrep.template
    attributes = {
        "kind": template.kind.value,
        "name": template.name,
        "phaseCount": _phase_count(len(template.phases)),
        "kindNoun": template.kind.value,
    }
    rule = rules.lookup(HEADER, attributes)

    def resolve(slot: str) -> str:
        if slot not in attributes:
            raise SlotResolutionError(slot, HEADER)
        return attributes[slot]

    return Segment(
        fill(rule.text(audience), resolve),
        audience,
        Provenance.RULE_BASED,
        frozenset(),
        phase=None,
    )


def render_segment(
    semrep: SemanticRep, rules: RuleSet, audience: Audience, phase: Optional[int]
) -> Segment:
    """Rule-based segment for one phase, or the header when phase is None."""
    if phase is None:
        return render_header(semrep, rules, audience)
    renderer = _Renderer(semrep, rules, audience)
    text = renderer.render(phase_path(phase))
    for phrase in renderer.phrases:
        text = f"{text} {phrase[0].upper()}{phrase[1:]}."
    return Segment(
        text,
        audience,
        Provenance.RULE_BASED,
        phase_trace(semrep, phase),
        phase=phase,
        interpretive=frozenset(renderer.interpretive),
    )


def realize(
    semrep: SemanticRep, rules: Optional[RuleSet] = None, meta: Optional[dict] = None
) -> Explanation:
    """Expert, rule-based explanation: a header plus one segment per phase.

    Raises:
        SlotResolutionError: If a template slot cannot be filled
    """
    rules = rules or default_rules()
    template = semrep.template
    segments = [render_header(semrep, rules, Audience.EXPERT)]
    for index in range(len(template.phases)):
        segments.append(render_segment(semrep, rules, Audience.EXPERT, index))
    return Explanation(
        tuple(segments),
        template.name,
        template.kind,
        semrep=semrep,
        meta=dict(meta or {}),
    )


def customize(expl: Explanation, audience: Audience, rules: Optional[RuleSet] = None) -> Explanation:
    """Tailor an explanation to an audience.

    Layperson re-renders every segment from the layperson variants. Expert
    keeps expert segments as they are and re-renders layperson ones.
    Traces are preserved.
    """
    if expl.semrep is None:
        raise ValueError("customize needs the explanation's semantic representation")
    rules = rules or default_rules()
    segments = []
    for segment in expl.segments:
        if audience == Audience.EXPERT and segment.audience == Audience.EXPERT:
            segments.append(segment)
            continue
        segments.append(render_segment(expl.semrep, rules, audience, segment.phase))
    return expl.with_segments(segments)
