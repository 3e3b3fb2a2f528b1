"""Strategy template AST.

A strategy template is a list of phases tiling the negotiation time [0, 1].
Each phase carries a set of acceptance tactics (combined with max) or a
priority-ordered list of bidding tactics (first selected one wins).

This module holds:
- MathExpr node types (the structure tree shared by every pipeline stage)
- Tactic, Phase and StrategyTemplate types with their invariants
- phase lookup, expression building, node walking
- the canonical DSL printer and JSON serialisation
"""

import math
from bisect import bisect_right
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional, Union


class TemplateError(ValueError):
    """Base error for template construction and parsing."""

    pass


class StructureError(TemplateError):
    """A template violates a structural invariant (tiling, ranges, tactics)."""

    def __init__(self, message: str, span: Optional[tuple[int, int]] = None):
        self.message = message
        self.span = span
        where = f" at line {span[0]}, column {span[1]}" if span else ""
        super().__init__(f"{message}{where}")


# --- MathExpr ---


@dataclass(frozen=True)
class Constant:
    value: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise StructureError(f"Constant must be finite, got {self.value}")


@dataclass(frozen=True)
class TimeSymbol:
    """The normalised negotiation time t."""

    pass


@dataclass(frozen=True)
class Symbol:
    name: str  # offer, next_own, history, u_dyn, u_fixed


@dataclass(frozen=True)
class Sum:
    terms: tuple


@dataclass(frozen=True)
class Product:
    factors: tuple


@dataclass(frozen=True)
class FunctionApp:
    name: str
    args: tuple = ()
    over: Optional["MathExpr"] = None  # distribution operand, Q only


@dataclass(frozen=True)
class Comparison:
    lhs: "MathExpr"
    rhs: "MathExpr"
    kind: str = "≥"


@dataclass(frozen=True)
class Interval:
    lower: Constant
    upper: Constant
    closed: bool


@dataclass(frozen=True)
class Implication:
    guard: Interval
    body: "MathExpr"


@dataclass(frozen=True)
class Choice:
    options: tuple
    selected: tuple


MathExpr = Union[
    Constant,
    TimeSymbol,
    Symbol,
    Sum,
    Product,
    FunctionApp,
    Comparison,
    Interval,
    Implication,
    Choice,
]

ACCEPTANCE_FUNCTIONS = ("max", "Q", "U_own", "U_est")
BIDDING_FUNCTIONS = ("boulware", "pareto", "opponent_greedy", "random_above_threshold")


def children(node: MathExpr) -> list[tuple[str, MathExpr]]:
    """Direct children of a node as (relative path, child) pairs."""
    if isinstance(node, Sum):
        return [(f"terms[{i}]", c) for i, c in enumerate(node.terms)]
    if isinstance(node, Product):
        return [(f"factors[{i}]", c) for i, c in enumerate(node.factors)]
    if isinstance(node, FunctionApp):
        found = [(f"args[{i}]", c) for i, c in enumerate(node.args)]
        if node.over is not None:
            found.append(("over", node.over))
        return found
    if isinstance(node, Comparison):
        return [("lhs", node.lhs), ("rhs", node.rhs)]
    if isinstance(node, Interval):
        return [("lower", node.lower), ("upper", node.upper)]
    if isinstance(node, Implication):
        return [("guard", node.guard), ("body", node.body)]
    if isinstance(node, Choice):
        return [(f"options[{i}]", c) for i, c in enumerate(node.options)]
    return []


def walk_expr(node: MathExpr, path: str = "") -> Iterator[tuple[str, MathExpr]]:
    """Pre-order walk yielding (path, node)."""
    yield path, node
    for rel, child in children(node):
        yield from walk_expr(child, f"{path}.{rel}" if path else rel)


# --- Tactics ---


@dataclass(frozen=True)
class OwnNextBidUtility:
    """U_u(ω_t): utility of the bid we would propose next."""

    selected: bool = True


@dataclass(frozen=True)
class QuantileConcession:
    """Q over received utilities at p = a·t + b."""

    a: float
    b: float
    selected: bool = True


@dataclass(frozen=True)
class DynamicThreshold:
    """ū_t, read from the configured schedule."""

    selected: bool = True


@dataclass(frozen=True)
class FixedThreshold:
    u: float
    symbolic: bool = False  # written as u_fixed, value from configuration
    selected: bool = True

    def __post_init__(self):
        if not 0.0 <= self.u <= 1.0:
            raise StructureError(f"Fixed threshold {self.u} outside [0, 1]")


@dataclass(frozen=True)
class Boulware:
    e: float = 0.2
    u_min: float = 0.4
    u_max: float = 1.0
    selected: bool = True

    def __post_init__(self):
        if not self.e > 0:
            raise StructureError(f"Boulware exponent must be > 0, got {self.e}")
        if not 0.0 <= self.u_min < self.u_max <= 1.0:
            raise StructureError(
                f"Boulware needs 0 <= u_min < u_max <= 1, got {self.u_min}, {self.u_max}"
            )


@dataclass(frozen=True)
class ParetoWeighted:
    """TOPSIS pick from the Pareto front with own weight a·t + b."""

    a: float
    b: float
    selected: bool = True


@dataclass(frozen=True)
class OpponentGreedy:
    selected: bool = True


@dataclass(frozen=True)
class RandomAboveThreshold:
    selected: bool = True


AcceptanceTactic = Union[
    OwnNextBidUtility, QuantileConcession, DynamicThreshold, FixedThreshold
]
BiddingTactic = Union[Boulware, ParetoWeighted, OpponentGreedy, RandomAboveThreshold]

ACCEPTANCE_TACTICS = (
    OwnNextBidUtility,
    QuantileConcession,
    DynamicThreshold,
    FixedThreshold,
)
BIDDING_TACTICS = (Boulware, ParetoWeighted, OpponentGreedy, RandomAboveThreshold)


# --- Phases and templates ---


class TemplateKind(str, Enum):
    ACCEPTANCE = "acceptance"
    BIDDING = "bidding"


@dataclass(frozen=True)
class Phase:
    t_start: float
    t_end: float
    tactics: tuple

    def __post_init__(self):
        if not 0.0 <= self.t_start < self.t_end <= 1.0:
            raise StructureError(
                f"Phase interval [{self.t_start}, {self.t_end}) must satisfy "
                "0 <= t_start < t_end <= 1"
            )
        if not self.tactics:
            raise StructureError("Phase has no tactics")
        if not any(t.selected for t in self.tactics):
            raise StructureError("Phase has no selected tactic")

    @property
    def duration(self) -> float:
        """δ_i."""
        return self.t_end - self.t_start

    @property
    def selected_tactics(self) -> tuple:
        return tuple(t for t in self.tactics if t.selected)


@dataclass(frozen=True)
class StrategyTemplate:
    kind: TemplateKind
    name: str
    phases: tuple

    def __post_init__(self):
        if not self.phases:
            raise StructureError("Template needs at least one phase")
        problem = tiling_problem([(p.t_start, p.t_end) for p in self.phases])
        if problem:
            raise StructureError(problem[1])

        allowed = (
            ACCEPTANCE_TACTICS if self.kind == TemplateKind.ACCEPTANCE else BIDDING_TACTICS
        )
        for phase in self.phases:
            for tactic in phase.tactics:
                if not isinstance(tactic, allowed):
                    raise StructureError(
                        f"{type(tactic).__name__} is not a {self.kind.value} tactic"
                    )
            if self.kind == TemplateKind.ACCEPTANCE:
                if len(set(phase.tactics)) != len(phase.tactics):
                    raise StructureError("duplicate acceptance tactic in phase")
                if not all(t.selected for t in phase.tactics):
                    raise StructureError("acceptance tactics are always selected")

    def is_final(self, index: int) -> bool:
        return index == len(self.phases) - 1


def tiling_problem(bounds: list[tuple[float, float]]) -> Optional[tuple[int, str]]:
    """First (phase index, message) where the intervals fail to tile [0, 1]."""
    if bounds[0][0] != 0.0:
        return 0, f"first phase must start at 0, starts at {format_number(bounds[0][0])}"
    for index, ((_, end), (start, _)) in enumerate(zip(bounds, bounds[1:]), start=1):
        if end < start:
            return index, f"gap at {format_number(end)}"
        if end > start:
            return index, f"overlap at {format_number(start)}"
    if bounds[-1][1] != 1.0:
        return len(bounds) - 1, (
            f"last phase must end at 1, ends at {format_number(bounds[-1][1])}"
        )
    return None


def phase_index_at(template: StrategyTemplate, t: float) -> int:
    """Index of the phase whose interval contains t (t = 1 maps to the last)."""
    starts = [p.t_start for p in template.phases]
    index = bisect_right(starts, t) - 1
    return min(max(index, 0), len(template.phases) - 1)


def phase_at(template: StrategyTemplate, t: float) -> Phase:
    """Phase active at normalised time t."""
    return template.phases[phase_index_at(template, t)]


# --- Expression building ---


def linear_expr(a: float, b: float) -> MathExpr:
    """Canonical tree for a·t + b (zero terms dropped)."""
    if a == 0.0:
        return Constant(b)
    slope = Product((Constant(a), TimeSymbol()))
    if b == 0.0:
        return slope
    return Sum((slope, Constant(b)))


def tactic_expr(tactic) -> MathExpr:
    if isinstance(tactic, OwnNextBidUtility):
        return FunctionApp("U_own", (Symbol("next_own"),))
    if isinstance(tactic, QuantileConcession):
        return FunctionApp("Q", (linear_expr(tactic.a, tactic.b),), over=Symbol("history"))
    if isinstance(tactic, DynamicThreshold):
        return Symbol("u_dyn")
    if isinstance(tactic, FixedThreshold):
        return Symbol("u_fixed") if tactic.symbolic else Constant(tactic.u)
    if isinstance(tactic, Boulware):
        return FunctionApp(
            "boulware", (Constant(tactic.e), Constant(tactic.u_min), Constant(tactic.u_max))
        )
    if isinstance(tactic, ParetoWeighted):
        return FunctionApp("pareto", (linear_expr(tactic.a, tactic.b),))
    if isinstance(tactic, OpponentGreedy):
        return FunctionApp("opponent_greedy")
    if isinstance(tactic, RandomAboveThreshold):
        return FunctionApp("random_above_threshold")
    raise TypeError(f"Unknown tactic: {tactic!r}")


def condition(phase: Phase) -> Comparison:
    """Acceptance condition U(offer) ≥ max(thresholds) of one phase."""
    thresholds = tuple(tactic_expr(t) for t in phase.tactics)
    rhs = thresholds[0] if len(thresholds) == 1 else FunctionApp("max", thresholds)
    return Comparison(FunctionApp("U_own", (Symbol("offer"),)), rhs)


def phase_expr(template: StrategyTemplate, index: int) -> Implication:
    """The rule t ∈ [t_i, t_i+1) → body for phase `index`."""
    phase = template.phases[index]
    guard = Interval(
        Constant(phase.t_start), Constant(phase.t_end), closed=template.is_final(index)
    )
    if template.kind == TemplateKind.ACCEPTANCE:
        return Implication(guard, condition(phase))
    options = tuple(tactic_expr(t) for t in phase.tactics)
    return Implication(guard, Choice(options, tuple(t.selected for t in phase.tactics)))


def phase_path(index: int) -> str:
    return f"phases[{index}]"


def walk(template: StrategyTemplate) -> Iterator[tuple[str, MathExpr]]:
    """Every node of every phase rule, keyed by its stable path."""
    for index in range(len(template.phases)):
        yield from walk_expr(phase_expr(template, index), phase_path(index))


def node_index(template: StrategyTemplate) -> dict[str, MathExpr]:
    return dict(walk(template))


def phase_of_path(path: str) -> int:
    """Phase index encoded at the front of a node path."""
    head = path.split(".", 1)[0]
    return int(head[len("phases[") : -1])


# --- Printing ---


def format_number(value: float) -> str:
    """Shortest decimal that round-trips to the same float."""
    return repr(float(value))


def linear_text(a: float, b: float) -> str:
    if a == 0.0:
        return format_number(b)
    if b == 0.0:
        return f"{format_number(a)}*t"
    return f"{format_number(a)}*t + {format_number(b)}"


def _acceptance_text(tactic) -> str:
    if isinstance(tactic, OwnNextBidUtility):
        return "U(next_own)"
    if isinstance(tactic, QuantileConcession):
        return f"Q({linear_text(tactic.a, tactic.b)})"
    if isinstance(tactic, DynamicThreshold):
        return "u_dyn"
    if tactic.symbolic:
        return "u_fixed"
    return format_number(tactic.u)


def _bidding_text(tactic) -> str:
    if isinstance(tactic, Boulware):
        text = (
            f"boulware(e={format_number(tactic.e)}, u_min={format_number(tactic.u_min)}, "
            f"u_max={format_number(tactic.u_max)})"
        )
    elif isinstance(tactic, ParetoWeighted):
        text = f"pareto({linear_text(tactic.a, tactic.b)})"
    elif isinstance(tactic, OpponentGreedy):
        text = "opponent_greedy"
    else:
        text = "random_above_threshold"
    return text if tactic.selected else f"{text} off"


def _quote(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def pretty_print(template: StrategyTemplate) -> str:
    """Canonical DSL text; parse_template(pretty_print(x)) == x."""
    lines = [f"{template.kind.value} template {_quote(template.name)} {{"]
    for index, phase in enumerate(template.phases):
        closer = "]" if template.is_final(index) else ")"
        lines.append(
            f"  phase [{format_number(phase.t_start)}, {format_number(phase.t_end)}{closer} {{"
        )
        if template.kind == TemplateKind.ACCEPTANCE:
            parts = [_acceptance_text(t) for t in phase.tactics]
            rhs = parts[0] if len(parts) == 1 else f"max({', '.join(parts)})"
            lines.append(f"    accept if U(offer) >= {rhs}")
        else:
            for tactic in phase.tactics:
                lines.append(f"    bid {_bidding_text(tactic)}")
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"


# --- JSON ---


def expr_to_dict(node: MathExpr) -> dict:
    """MathExpr as a JSON-ready dict: node tag first, then fields, then children."""
    data: dict = {"node": type(node).__name__}
    if isinstance(node, Constant):
        data["value"] = node.value
    elif isinstance(node, Symbol):
        data["name"] = node.name
    elif isinstance(node, FunctionApp):
        data["name"] = node.name
    elif isinstance(node, Comparison):
        data["kind"] = node.kind
    elif isinstance(node, Interval):
        data["closed"] = node.closed
    elif isinstance(node, Choice):
        data["selected"] = list(node.selected)
    kids = children(node)
    if kids:
        data["children"] = [expr_to_dict(c) for rel, c in kids if rel != "over"]
    if isinstance(node, FunctionApp) and node.over is not None:
        data["over"] = expr_to_dict(node.over)
    return data


def tactic_to_dict(tactic) -> dict:
    data = {"kind": type(tactic).__name__}
    for key, value in vars(tactic).items():
        data[key] = value
    return data


def template_to_dict(template: StrategyTemplate) -> dict:
    return {
        "kind": template.kind.value,
        "name": template.name,
        "phases": [
            {
                "t_start": phase.t_start,
                "t_end": phase.t_end,
                "closed": template.is_final(index),
                "tactics": [tactic_to_dict(t) for t in phase.tactics],
                "expression": expr_to_dict(phase_expr(template, index)),
            }
            for index, phase in enumerate(template.phases)
        ],
    }


_TACTIC_TYPES = {cls.__name__: cls for cls in ACCEPTANCE_TACTICS + BIDDING_TACTICS}


def tactic_from_dict(data: dict):
    fields = dict(data)
    kind = fields.pop("kind", None)
    cls = _TACTIC_TYPES.get(kind)
    if cls is None:
        raise StructureError(f"Unknown tactic kind: {kind!r}")
    try:
        return cls(**fields)
    except TypeError as e:
        raise StructureError(f"Bad fields for {kind}: {e}") from e


def template_from_dict(data: dict) -> StrategyTemplate:
    """Inverse of template_to_dict; the 'expression' and 'closed' keys are derived, not read."""
    try:
        kind = TemplateKind(data["kind"])
        phases = tuple(
            Phase(
                float(p["t_start"]),
                float(p["t_end"]),
                tuple(tactic_from_dict(t) for t in p["tactics"]),
            )
            for p in data["phases"]
        )
        return StrategyTemplate(kind, str(data["name"]), phases)
    except (KeyError, ValueError) as e:
        if isinstance(e, StructureError):
            raise
        raise StructureError(f"Malformed template JSON: {e}") from e
