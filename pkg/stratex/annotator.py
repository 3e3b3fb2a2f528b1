"""Semantic annotator - assigns a role to every node of a template.

Roles are decided by node kind and position in the phase rule, never by
text. The result maps node paths to roles carrying the attributes the
realizer's sentence templates read from.
"""

from dataclasses import dataclass, field
from enum import Enum

from .numerals import ordinal_word, percent_value
from .template import (
    Boulware,
    Choice,
    Comparison,
    Constant,
    FixedThreshold,
    FunctionApp,
    Implication,
    Interval,
    MathExpr,
    ParetoWeighted,
    Phase,
    Product,
    StrategyTemplate,
    Sum,
    Symbol,
    TimeSymbol,
    children,
    phase_expr,
    phase_path,
    walk_expr,
)

FLAT_SLOPE = 1e-9


class RoleKind(str, Enum):
    TIME_PHASE = "TimePhase"
    OFFER_UTILITY = "OfferUtility"
    OWN_PLANNED_BID_UTILITY = "OwnPlannedBidUtility"
    CONCESSION_QUANTILE = "ConcessionQuantile"
    DYNAMIC_THRESHOLD = "DynamicThreshold"
    FIXED_THRESHOLD = "FixedThreshold"
    THRESHOLD_COMBINATOR = "ThresholdCombinator"
    LINEAR_TIME_TERM = "LinearTimeTerm"
    ACCEPT_PREDICATE = "AcceptPredicate"
    BID_DIRECTIVE = "BidDirective"


class UnknownConstruct(Exception):
    """An AST node has no role rule."""

    def __init__(self, path: str, node: MathExpr):
        self.path = path
        self.node = node
        super().__init__(f"No semantic role for {type(node).__name__} at {path}")


@dataclass(frozen=True)
class SemanticRole:
    kind: RoleKind
    attributes: dict = field(default_factory=dict, hash=False, compare=True)

    def to_dict(self) -> dict:
        return {"role": self.kind.value, "attributes": dict(self.attributes)}


@dataclass(frozen=True)
class SemanticRep:
    """Node path -> role, total over the template's nodes."""

    template: StrategyTemplate
    roles: dict = field(hash=False)

    def __len__(self) -> int:
        return len(self.roles)

    def __getitem__(self, path: str) -> SemanticRole:
        return self.roles[path]

    def node(self, path: str) -> MathExpr:
        return self.nodes[path]

    @property
    def nodes(self) -> dict:
        found = {}
        for index in range(len(self.template.phases)):
            found.update(walk_expr(phase_expr(self.template, index), phase_path(index)))
        return found

    def to_dict(self) -> dict:
        return {path: role.to_dict() for path, role in self.roles.items()}


def slope_direction(slope: float) -> str:
    if abs(slope) < FLAT_SLOPE:
        return "flat"
    return "rising" if slope > 0 else "falling"


def interval_phrase(phase: Phase) -> dict:
    """Percent bounds and boundary flags of a phase interval."""
    return {
        "percentStart": percent_value(phase.t_start),
        "percentEnd": percent_value(phase.t_end),
        "isInitial": phase.t_start == 0.0,
        "isFinal": phase.t_end == 1.0,
    }


def _linear_attributes(a: float, b: float) -> dict:
    if a == 0.0:
        form = "constant"
    elif b == 0.0:
        form = "slope"
    else:
        form = "full"
    return {
        "slope": a,
        "intercept": b,
        "slopeDirection": slope_direction(a),
        "form": form,
    }


class _Annotator:
    def __init__(self, template: StrategyTemplate):
        self.template = template
        self.roles: dict[str, SemanticRole] = {}

    def run(self) -> dict[str, SemanticRole]:
        for index, phase in enumerate(self.template.phases):
            self._phase(index, phase)
        return self.roles

    def _set(self, path: str, kind: RoleKind, **attributes) -> None:
        self.roles[path] = SemanticRole(kind, attributes)

    def _subtree(self, path: str, node: MathExpr, kind: RoleKind, **attributes) -> None:
        for sub_path, _ in walk_expr(node, path):
            self._set(sub_path, kind, **attributes)

    def _phase(self, index: int, phase: Phase) -> None:
        path = phase_path(index)
        expr = phase_expr(self.template, index)
        if not isinstance(expr, Implication) or not isinstance(expr.guard, Interval):
            raise UnknownConstruct(path, expr)

        closed = self.template.is_final(index)
        timing = {
            **interval_phrase(phase),
            "index": index,
            "ordinal": ordinal_word(index + 1),
            "tStart": phase.t_start,
            "tEnd": phase.t_end,
            "closing": "]" if closed else ")",
        }
        self._set(path, RoleKind.TIME_PHASE, **timing)
        self._set(f"{path}.guard", RoleKind.TIME_PHASE, **timing)
        self._set(f"{path}.guard.lower", RoleKind.TIME_PHASE, bound="start", **timing)
        self._set(f"{path}.guard.upper", RoleKind.TIME_PHASE, bound="end", **timing)

        body_path = f"{path}.body"
        if isinstance(expr.body, Comparison):
            self._condition(body_path, expr.body, phase)
        elif isinstance(expr.body, Choice):
            self._choice(body_path, expr.body, phase)
        else:
            raise UnknownConstruct(body_path, expr.body)

    # -- acceptance --

    def _condition(self, path: str, node: Comparison, phase: Phase) -> None:
        count = len(phase.tactics)
        self._set(path, RoleKind.ACCEPT_PREDICATE, tacticCount=count, combined=count > 1)
        lhs = node.lhs
        if not (isinstance(lhs, FunctionApp) and lhs.name == "U_own"):
            raise UnknownConstruct(f"{path}.lhs", lhs)
        self._subtree(f"{path}.lhs", lhs, RoleKind.OFFER_UTILITY)

        rhs_path = f"{path}.rhs"
        if count == 1:
            self._threshold(rhs_path, node.rhs, phase.tactics[0])
            return
        if not (isinstance(node.rhs, FunctionApp) and node.rhs.name == "max"):
            raise UnknownConstruct(rhs_path, node.rhs)
        self._set(rhs_path, RoleKind.THRESHOLD_COMBINATOR, arity=count)
        for i, (arg, tactic) in enumerate(zip(node.rhs.args, phase.tactics)):
            self._threshold(f"{rhs_path}.args[{i}]", arg, tactic)

    def _threshold(self, path: str, node: MathExpr, tactic) -> None:
        if isinstance(node, FunctionApp) and node.name == "U_own":
            self._subtree(path, node, RoleKind.OWN_PLANNED_BID_UTILITY)
        elif isinstance(node, FunctionApp) and node.name == "Q":
            a, b = tactic.a, tactic.b
            self._set(
                path,
                RoleKind.CONCESSION_QUANTILE,
                slope=a,
                intercept=b,
                slopeDirection=slope_direction(a),
            )
            self._subtree(f"{path}.over", node.over, RoleKind.CONCESSION_QUANTILE)
            self._linear(f"{path}.args[0]", node.args[0], a, b)
        elif isinstance(node, Symbol) and node.name == "u_dyn":
            self._set(path, RoleKind.DYNAMIC_THRESHOLD)
        elif isinstance(tactic, FixedThreshold) and isinstance(node, (Symbol, Constant)):
            self._set(path, RoleKind.FIXED_THRESHOLD, symbolic=tactic.symbolic, value=tactic.u)
        else:
            raise UnknownConstruct(path, node)

    def _linear(self, path: str, node: MathExpr, a: float, b: float) -> None:
        attributes = _linear_attributes(a, b)
        for sub_path, sub in walk_expr(node, path):
            if not isinstance(sub, (Sum, Product, TimeSymbol, Constant)):
                raise UnknownConstruct(sub_path, sub)
            self._set(sub_path, RoleKind.LINEAR_TIME_TERM, **attributes)

    # -- bidding --

    def _choice(self, path: str, node: Choice, phase: Phase) -> None:
        selected = sum(node.selected)
        self._set(
            path,
            RoleKind.BID_DIRECTIVE,
            tactic="choice",
            count=len(node.options),
            selectedCount=selected,
            combined=selected > 1,
        )
        for priority, (option, tactic) in enumerate(zip(node.options, phase.tactics)):
            self._bid_tactic(f"{path}.options[{priority}]", option, tactic, priority)

    def _bid_tactic(self, path: str, node: MathExpr, tactic, priority: int) -> None:
        if not isinstance(node, FunctionApp):
            raise UnknownConstruct(path, node)
        common = {"tactic": node.name, "selected": tactic.selected, "priority": priority}
        if isinstance(tactic, Boulware):
            params = {"e": tactic.e, "u_min": tactic.u_min, "u_max": tactic.u_max}
            self._set(path, RoleKind.BID_DIRECTIVE, **common, **params)
            for (rel, _), name in zip(children(node), params):
                self._set(f"{path}.{rel}", RoleKind.BID_DIRECTIVE, **common, param=name)
        elif isinstance(tactic, ParetoWeighted):
            self._set(path, RoleKind.BID_DIRECTIVE, **common)
            self._linear(f"{path}.args[0]", node.args[0], tactic.a, tactic.b)
        elif not node.args:
            self._set(path, RoleKind.BID_DIRECTIVE, **common)
        else:
            raise UnknownConstruct(path, node)


def annotate(template: StrategyTemplate) -> SemanticRep:
    """Assign a SemanticRole to every node of every phase rule.

    Raises:
        UnknownConstruct: If a node kind has no role rule
    """
    return SemanticRep(template, _Annotator(template).run())
