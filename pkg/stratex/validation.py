"""Validation - deterministic checks of explanation segments, and refinement.

Three checks run per segment:
- entityCoverage: every traced node's role has a lexical cue in the text
- numericRoundTrip: every traced constant can be read back from the text
- noForeignNumbers: every numeral in the text stands for a template constant
"""

import re
from dataclasses import dataclass
from typing import Optional

from .annotator import RoleKind, SemanticRep, annotate
from .numerals import Numeral, extract_numerals, percent_value
from .parser import template_constants
from .realizer import Explanation, RuleSet, Segment, default_rules, render_segment
from .template import Constant, StrategyTemplate, format_number

TOLERANCE = 0.005
PERCENT_TOLERANCE = 1e-9

ROLE_CUES = {
    RoleKind.TIME_PHASE: r"interval|session|phase|time|event|during|period|throughout",
    RoleKind.OFFER_UTILITY: r"offer|U_u\(ω_t\^o\)",
    RoleKind.OWN_PLANNED_BID_UTILITY: r"\bown\b|planned|U_u\(ω_t\)",
    RoleKind.CONCESSION_QUANTILE: r"Q_|quantile|formula|received",
    RoleKind.DYNAMIC_THRESHOLD: r"dynamic|ū_t|changes over time",
    RoleKind.FIXED_THRESHOLD: r"fixed|'u'|threshold",
    RoleKind.THRESHOLD_COMBINATOR: r"\bmax|greater|larger",
    RoleKind.LINEAR_TIME_TERM: r"·t|\btime\b|\bt\b|formula|weight",
    RoleKind.ACCEPT_PREDICATE: r"accept|compar|at least|exceed|as good as|evaluat|check",
    RoleKind.BID_DIRECTIVE: r"\bbid|offer|propos|put forward",
}

INITIAL_CUES = re.compile(
    r"\b(initial|beginning|first|early|start|throughout|whole|entire)\b", re.IGNORECASE
)
FINAL_CUES = re.compile(
    r"\b(end|final|remaining|rest|onwards|throughout|whole|entire)\b", re.IGNORECASE
)


class ValidationExhausted(Exception):
    """Explanation still invalid after the maximum number of refinement rounds."""

    def __init__(self, report: "ValidationReport"):
        self.report = report
        super().__init__(
            f"Explanation still invalid: {', '.join(report.failures()) or 'unknown failure'}"
        )


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    details: tuple = ()

    def to_dict(self) -> dict:
        return {"check": self.name, "passed": self.passed, "details": list(self.details)}


@dataclass(frozen=True)
class SegmentReport:
    index: int
    phase: Optional[int]
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> CheckResult:
        return next(c for c in self.checks if c.name == name)

    def to_dict(self) -> dict:
        return {
            "segment": self.index,
            "phase": self.phase,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }


@dataclass(frozen=True)
class ValidationReport:
    segments: tuple

    @property
    def valid(self) -> bool:
        return all(s.passed for s in self.segments)

    def failing(self) -> list[SegmentReport]:
        return [s for s in self.segments if not s.passed]

    def failures(self) -> list[str]:
        """'segment N: check (details)' for every failed check."""
        found = []
        for segment in self.segments:
            for check in segment.checks:
                if not check.passed:
                    detail = f" ({'; '.join(check.details)})" if check.details else ""
                    found.append(f"segment {segment.index}: {check.name}{detail}")
        return found

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "segments": [s.to_dict() for s in self.segments],
        }


def _strip_name(text: str, name: str) -> str:
    return text.replace(name, " ") if name else text


def _recovers(numeral: Numeral, value: float) -> bool:
    return abs(numeral.recovered - value) <= TOLERANCE


def _stands_for(numeral: Numeral, value: float) -> bool:
    """Raw value, or its percentage written with or without '%'.

    A bare numeral only reads as a percentage when it is exactly the rendered
    percent of a constant of at least one percent.
    """
    if _recovers(numeral, value):
        return True
    if numeral.percent or abs(value) * 100 < 1:
        return False
    return abs(numeral.value - percent_value(value)) <= PERCENT_TOLERANCE


def _implied_boundary(path: str, value: float, text: str) -> bool:
    if path.endswith(".guard.lower") and value == 0.0:
        return bool(INITIAL_CUES.search(text))
    if path.endswith(".guard.upper") and value == 1.0:
        return bool(FINAL_CUES.search(text))
    return False


def _entity_coverage(segment: Segment, semrep: SemanticRep) -> CheckResult:
    missing = set()
    for path in segment.trace:
        role = semrep.roles.get(path)
        if role is None:
            missing.add(f"unknown node {path}")
            continue
        if not re.search(ROLE_CUES[role.kind], segment.text, re.IGNORECASE):
            missing.add(role.kind.value)
    return CheckResult("entityCoverage", not missing, tuple(sorted(missing)))


def _numeric_round_trip(
    segment: Segment, semrep: SemanticRep, numerals: list[Numeral], text: str
) -> CheckResult:
    nodes = semrep.nodes
    missing = []
    for path in sorted(segment.trace):
        node = nodes.get(path)
        if not isinstance(node, Constant):
            continue
        if any(_recovers(n, node.value) for n in numerals):
            continue
        if _implied_boundary(path, node.value, text):
            continue
        missing.append(format_number(node.value))
    return CheckResult("numericRoundTrip", not missing, tuple(dict.fromkeys(missing)))


def _no_foreign_numbers(numerals: list[Numeral], constants: set[float]) -> CheckResult:
    foreign = [
        n.text for n in numerals if not any(_stands_for(n, c) for c in constants)
    ]
    return CheckResult("noForeignNumbers", not foreign, tuple(foreign))


def validate(
    expl: Explanation, template: StrategyTemplate, semrep: Optional[SemanticRep] = None
) -> ValidationReport:
    """Run every check on every segment; deterministic."""
    semrep = semrep or expl.semrep or annotate(template)
    constants = template_constants(template)
    reports = []
    for index, segment in enumerate(expl.segments):
        text = _strip_name(segment.text, template.name)
        numerals = extract_numerals(text)
        checks = (
            _entity_coverage(segment, semrep),
            _numeric_round_trip(segment, semrep, numerals, text),
            _no_foreign_numbers(numerals, constants),
        )
        reports.append(SegmentReport(index, segment.phase, checks))
    return ValidationReport(tuple(reports))


def refine_explanation(
    expl: Explanation, report: ValidationReport, rules: Optional[RuleSet] = None
) -> Explanation:
    """Replace every failing segment by its rule-based rendering.

    Passing segments are kept as they are.
    """
    if report.valid:
        return expl
    if expl.semrep is None:
        raise ValueError("refinement needs the explanation's semantic representation")
    rules = rules or default_rules()
    failing = {s.index for s in report.failing()}
    segments = [
        render_segment(expl.semrep, rules, segment.audience, segment.phase)
        if index in failing
        else segment
        for index, segment in enumerate(expl.segments)
    ]
    return expl.with_segments(segments)


@dataclass(frozen=True)
class ValidatedExplanation:
    explanation: Explanation
    report: ValidationReport
    rounds: int

    @property
    def text(self) -> str:
        return self.explanation.text

    def to_dict(self) -> dict:
        data = self.explanation.to_dict()
        data["validation"] = {**self.report.to_dict(), "rounds": self.rounds}
        return data
