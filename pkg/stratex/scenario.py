"""Scenario files - a negotiation setup for `stratex simulate`.

A scenario is a JSON object:

    {
      "name": "party",
      "domain": {"issues": [{"name": "food", "values": ["a", "b"]}, ...]},
      "profiles": {
        "a": {"weights": {"food": 0.3, ...}, "evaluations": {"food": {"a": 1.0, ...}}},
        "b": {...}
      },
      "dynamic_threshold": [[0.0, 0.9], [1.0, 0.6]],
      "u_fixed": 0.6,
      "boulware": {"e": 0.2, "u_min": 0.4, "u_max": 1.0},
      "deadline": 60,
      "seed": 7,
      "opponent_estimate": "profile",
      "agent_a": {"acceptance": "party.nst", "bidding": "boulware-pareto.nst"}
    }

Template paths are resolved relative to the scenario file.
"""

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Optional

from .domain import (
    DomainMismatch,
    Issue,
    NegotiationDomain,
    ThresholdSchedule,
    UtilityModel,
)
from .parser import DEFAULT_U_FIXED, parse_file
from .template import Boulware, StrategyTemplate, TemplateError, TemplateKind

OPPONENT_ESTIMATES = ("profile", "frequency")


class ScenarioError(Exception):
    """Invalid scenario file; `field` is the dotted path of the offending entry."""

    def __init__(self, field: str, message: str):
        self.field = field
        self.message = message
        super().__init__(f"{field}: {message}")


@dataclass(frozen=True)
class Scenario:
    name: str
    domain: NegotiationDomain
    profile_a: UtilityModel
    profile_b: UtilityModel
    acceptance_a: StrategyTemplate
    bidding_a: Optional[StrategyTemplate] = None
    schedule: ThresholdSchedule = ThresholdSchedule()
    u_fixed: float = DEFAULT_U_FIXED
    boulware: Boulware = Boulware()
    deadline: int = 60
    seed: int = 0
    opponent_estimate: str = "profile"
    path: Optional[Path] = None

    @property
    def opponent_profile(self) -> Optional[UtilityModel]:
        """What agent A may use as the opponent's utility in Pareto computations."""
        return self.profile_b if self.opponent_estimate == "profile" else None


def _object(value: Any, field: str) -> dict:
    if not isinstance(value, dict):
        raise ScenarioError(field, f"expected an object, got {type(value).__name__}")
    return value


def _require(data: Any, key: str, field: str) -> Any:
    _object(data, field.rpartition(".")[0] or "$")
    if key not in data:
        raise ScenarioError(field, "missing")
    return data[key]


def _number(value: Any, field: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(field, f"expected a number, got {value!r}")
    return float(value)


def _domain(data: dict) -> NegotiationDomain:
    issues = _require(_require(data, "domain", "domain"), "issues", "domain.issues")
    if not isinstance(issues, list) or not issues:
        raise ScenarioError("domain.issues", "expected a non-empty list")
    parsed = []
    for i, issue in enumerate(issues):
        field = f"domain.issues[{i}]"
        name = _require(issue, "name", f"{field}.name")
        values = _require(issue, "values", f"{field}.values")
        if not isinstance(values, list) or not values:
            raise ScenarioError(f"{field}.values", "expected a non-empty list")
        if not all(isinstance(v, (str, int, float)) for v in values):
            raise ScenarioError(f"{field}.values", "expected value names")
        if len(set(values)) != len(values):
            raise ScenarioError(f"{field}.values", "duplicate value names")
        parsed.append(Issue(str(name), tuple(str(v) for v in values)))
    if len({i.name for i in parsed}) != len(parsed):
        raise ScenarioError("domain.issues", "duplicate issue names")
    try:
        return NegotiationDomain(tuple(parsed))
    except DomainMismatch as e:
        raise ScenarioError("domain.issues", str(e)) from e


def _profile(data: dict, side: str, domain: NegotiationDomain) -> UtilityModel:
    field = f"profiles.{side}"
    profile = _require(_require(data, "profiles", "profiles"), side, field)
    weights = _object(_require(profile, "weights", f"{field}.weights"), f"{field}.weights")
    evaluations = _require(profile, "evaluations", f"{field}.evaluations")

    names = [issue.name for issue in domain.issues]
    unknown = sorted(set(weights) - set(names))
    if unknown:
        raise ScenarioError(f"{field}.weights", f"unknown issues {', '.join(unknown)}")
    w = tuple(_number(_require(weights, n, f"{field}.weights.{n}"), f"{field}.weights.{n}") for n in names)
    if abs(sum(w) - 1.0) > 1e-9:
        raise ScenarioError(f"{field}.weights", f"weights sum to {sum(w):g}, expected 1")

    evals = []
    for issue in domain.issues:
        issue_field = f"{field}.evaluations.{issue.name}"
        table = _require(evaluations, issue.name, issue_field)
        evals.append(
            tuple(
                _number(_require(table, v, f"{issue_field}.{v}"), f"{issue_field}.{v}")
                for v in issue.values
            )
        )
    try:
        return UtilityModel(w, tuple(evals))
    except DomainMismatch as e:
        raise ScenarioError(field, str(e)) from e


def _template(
    base: Path, spec: dict, key: str, kind: TemplateKind, u_fixed: float
) -> Optional[StrategyTemplate]:
    field = f"agent_a.{key}"
    if key not in spec:
        return None
    if not isinstance(spec[key], str):
        raise ScenarioError(field, f"expected a file path, got {spec[key]!r}")
    path = base / spec[key]
    try:
        template = parse_file(path, u_fixed=u_fixed)
    except OSError as e:
        raise ScenarioError(field, f"cannot read {path}: {e.strerror}") from e
    except UnicodeDecodeError as e:
        raise ScenarioError(field, f"{path.name} is not UTF-8 text") from e
    except TemplateError as e:
        raise ScenarioError(field, f"{path.name}: {e}") from e
    if template.kind != kind:
        raise ScenarioError(field, f"{path.name} is not a {kind.value} template")
    return template


def scenario_from_dict(
    data: dict,
    base: Path = Path("."),
    *,
    default_schedule: ThresholdSchedule = ThresholdSchedule(),
    default_boulware: Boulware = Boulware(),
) -> Scenario:
    """Build a Scenario from parsed JSON.

    The defaults apply to fields the scenario leaves out.

    Raises:
        ScenarioError: With the dotted field path of the first invalid entry
    """
    if not isinstance(data, dict):
        raise ScenarioError("$", "expected a JSON object")
    domain = _domain(data)
    profile_a = _profile(data, "a", domain)
    profile_b = _profile(data, "b", domain)

    schedule = default_schedule
    try:
        if "dynamic_threshold" in data:
            schedule = ThresholdSchedule(
                tuple((float(t), float(v)) for t, v in data["dynamic_threshold"])
            )
    except (TypeError, ValueError) as e:
        raise ScenarioError("dynamic_threshold", str(e)) from e

    u_fixed = _number(data.get("u_fixed", DEFAULT_U_FIXED), "u_fixed")
    if not 0.0 <= u_fixed <= 1.0:
        raise ScenarioError("u_fixed", f"{u_fixed} outside [0, 1]")

    boulware = default_boulware
    try:
        if "boulware" in data:
            params = _object(data["boulware"], "boulware")
            boulware = Boulware(**{k: float(v) for k, v in params.items()})
    except (TypeError, ValueError) as e:
        raise ScenarioError("boulware", str(e)) from e

    deadline = data.get("deadline", 60)
    if isinstance(deadline, bool) or not isinstance(deadline, int) or deadline < 1:
        raise ScenarioError("deadline", f"expected a positive integer, got {deadline!r}")
    seed = data.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ScenarioError("seed", f"expected a non-negative integer, got {seed!r}")

    estimate = data.get("opponent_estimate", "profile")
    if estimate not in OPPONENT_ESTIMATES:
        raise ScenarioError("opponent_estimate", f"expected one of {', '.join(OPPONENT_ESTIMATES)}")

    agent_a = _object(_require(data, "agent_a", "agent_a"), "agent_a")
    acceptance = _template(base, agent_a, "acceptance", TemplateKind.ACCEPTANCE, u_fixed)
    if acceptance is None:
        raise ScenarioError("agent_a.acceptance", "missing")
    bidding = _template(base, agent_a, "bidding", TemplateKind.BIDDING, u_fixed)

    return Scenario(
        name=str(data.get("name", "scenario")),
        domain=domain,
        profile_a=profile_a,
        profile_b=profile_b,
        acceptance_a=acceptance,
        bidding_a=bidding,
        schedule=schedule,
        u_fixed=u_fixed,
        boulware=boulware,
        deadline=deadline,
        seed=seed,
        opponent_estimate=estimate,
    )


def load_scenario(path, **defaults) -> Scenario:
    """Load and validate a scenario JSON file.

    Raises:
        ScenarioError: On unreadable JSON or invalid content
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise ScenarioError("$", f"cannot read {path}: {e.strerror}") from e
    except UnicodeDecodeError as e:
        raise ScenarioError("$", f"{path.name} is not UTF-8 text") from e
    except json.JSONDecodeError as e:
        raise ScenarioError("$", f"invalid JSON at line {e.lineno}: {e.msg}") from e
    scenario = scenario_from_dict(data, base=path.parent, **defaults)
    return replace(scenario, path=path)
