"""Acceptance evaluation and bid selection.

Acceptance: a phase accepts the offer iff U(offer) ≥ every selected
threshold, i.e. U(offer) ≥ max(thresholds).
Bidding: a phase runs its first selected tactic.
"""

import math
from functools import lru_cache
from typing import Optional, Protocol, Sequence

import numpy as np

from ..domain import AgentState, Bid, NegotiationDomain, UtilityModel
from ..template import (
    Boulware,
    DynamicThreshold,
    FixedThreshold,
    OpponentGreedy,
    OwnNextBidUtility,
    ParetoWeighted,
    QuantileConcession,
    RandomAboveThreshold,
    StrategyTemplate,
    TemplateKind,
    phase_at,
)
from .errors import DomainTooLarge, EmptyHistory, EngineError

MAX_OUTCOMES = 10**6
TIE_EPSILON = 1e-12
# Utilities are sums of floats; a bid at the target must not miss it by rounding.
TARGET_EPSILON = 1e-9


class Valuation(Protocol):
    """Anything that scores bids: a UtilityModel or an OpponentModel."""

    def utility(self, bid: Bid) -> float: ...

    def utilities(self, outcomes: np.ndarray) -> np.ndarray: ...


@lru_cache(maxsize=16)
def outcome_space(domain: NegotiationDomain) -> np.ndarray:
    """Read-only outcome matrix of an enumerable domain."""
    if domain.size > MAX_OUTCOMES:
        raise DomainTooLarge(domain.size, MAX_OUTCOMES)
    outcomes = domain.outcome_matrix()
    outcomes.flags.writeable = False
    return outcomes


def _bid(row: np.ndarray) -> Bid:
    return Bid(tuple(int(v) for v in row))


# --- Acceptance ---


def empirical_quantile(utilities: Sequence[float], p: float) -> float:
    """p-th best received utility: nearest rank over the descending sort.

    p is clamped to [0, 1]; p near 0 gives the best, p = 1 the worst.
    """
    values = np.asarray(utilities, dtype=float)
    if values.size == 0:
        raise EmptyHistory("No opponent utilities to take a quantile of")
    p = min(max(p, 0.0), 1.0)
    rank = max(1, math.ceil(p * values.size))
    return float(np.sort(values)[::-1][rank - 1])


def tactic_threshold(tactic, state: AgentState, model: UtilityModel) -> float:
    if isinstance(tactic, OwnNextBidUtility):
        if state.own_next_bid is None:
            return 1.0
        return model.utility(state.own_next_bid)
    if isinstance(tactic, QuantileConcession):
        received = [model.utility(b) for b in state.opponent_history]
        try:
            return empirical_quantile(received, tactic.a * state.t + tactic.b)
        except EmptyHistory:
            return 1.0
    if isinstance(tactic, DynamicThreshold):
        return state.dynamic_threshold
    if isinstance(tactic, FixedThreshold):
        return tactic.u
    raise EngineError(f"{type(tactic).__name__} is not an acceptance tactic")


def acceptance_thresholds(
    template: StrategyTemplate, state: AgentState, model: UtilityModel
) -> list[float]:
    """Threshold of every selected tactic in the phase active at state.t."""
    if template.kind != TemplateKind.ACCEPTANCE:
        raise EngineError(f"'{template.name}' is not an acceptance template")
    phase = phase_at(template, state.t)
    return [tactic_threshold(t, state, model) for t in phase.selected_tactics]


def evaluate_acceptance(
    template: StrategyTemplate, state: AgentState, offer: Bid, model: UtilityModel
) -> bool:
    return model.utility(offer) >= max(acceptance_thresholds(template, state, model))


# --- Bidding ---


def boulware_target(t: float, e: float, u_min: float, u_max: float) -> float:
    """u_min + (u_max − u_min)·(1 − t^(1/e))."""
    t = min(max(t, 0.0), 1.0)
    return u_min + (u_max - u_min) * (1.0 - t ** (1.0 / e))


def boulware_bid(
    domain: NegotiationDomain, own: UtilityModel, t: float, tactic: Boulware
) -> Bid:
    """Bid with the smallest utility at or above the Boulware target, else the best bid."""
    outcomes = outcome_space(domain)
    utils = own.utilities(outcomes)
    target = boulware_target(t, tactic.e, tactic.u_min, tactic.u_max)
    above = np.flatnonzero(utils >= target - TARGET_EPSILON)
    if above.size == 0:
        return _bid(outcomes[int(np.argmax(utils))])
    return _bid(outcomes[above[int(np.argmin(utils[above]))]])


def front_indices(own_utils: np.ndarray, opp_utils: np.ndarray) -> np.ndarray:
    """Row indices of the non-dominated points of (own, opp)."""
    if own_utils.size == 0:
        return np.array([], dtype=np.int64)
    order = np.lexsort((-opp_utils, -own_utils))
    us, vs = own_utils[order], opp_utils[order]
    starts = np.ones(len(us), dtype=bool)
    starts[1:] = us[1:] != us[:-1]
    group = np.cumsum(starts) - 1
    group_best = vs[starts]
    before = np.concatenate(([-np.inf], np.maximum.accumulate(group_best)[:-1]))
    keep = (vs == group_best[group]) & (group_best[group] > before[group])
    return np.sort(order[keep])


def pareto_front(
    domain: NegotiationDomain, own: UtilityModel, opp: Valuation
) -> frozenset[Bid]:
    """Exact Pareto-optimal set of the enumerated outcome space."""
    outcomes = outcome_space(domain)
    keep = front_indices(own.utilities(outcomes), opp.utilities(outcomes))
    return frozenset(_bid(outcomes[i]) for i in keep)


def topsis_select(
    front: frozenset[Bid], w: float, own: Valuation, opp: Valuation
) -> Bid:
    """TOPSIS over (own utility, opponent utility) with weights (w, 1 − w).

    Ties in closeness go to the smaller distance to the ideal point, then
    the higher own utility, then the lexicographically smaller bid.
    """
    if not front:
        raise EngineError("TOPSIS needs a non-empty front")
    bids = sorted(front)
    w = min(max(w, 0.0), 1.0)
    matrix = np.array([[own.utility(b), opp.utility(b)] for b in bids])
    norms = np.sqrt((matrix**2).sum(axis=0))
    norms[norms == 0.0] = 1.0
    weighted = matrix / norms * np.array([w, 1.0 - w])
    d_best = np.sqrt(((weighted - weighted.max(axis=0)) ** 2).sum(axis=1))
    d_worst = np.sqrt(((weighted - weighted.min(axis=0)) ** 2).sum(axis=1))
    denom = d_best + d_worst
    closeness = np.divide(d_worst, denom, out=np.ones_like(denom), where=denom > 0.0)

    tied = np.flatnonzero(closeness >= closeness.max() - TIE_EPSILON)
    best = min(tied, key=lambda i: (d_best[i], -matrix[i, 0], bids[i]))
    return bids[best]


def opponent_greedy(last: Bid, own: UtilityModel, rng: np.random.Generator) -> Bid:
    """Resample the least important issue (lowest own weight) of the opponent's last bid."""
    issue = int(np.argmin(own.weights))
    current = last.values[issue]
    others = [v for v in range(len(own.evaluations[issue])) if v != current]
    values = list(last.values)
    values[issue] = others[int(rng.integers(len(others)))]
    return Bid(tuple(values))


def random_above_threshold(
    domain: NegotiationDomain, own: UtilityModel, threshold: float, rng: np.random.Generator
) -> Bid:
    """Uniform draw from Ω with U ≥ threshold; the best bid when that set is empty."""
    outcomes = outcome_space(domain)
    utils = own.utilities(outcomes)
    above = np.flatnonzero(utils >= threshold - TARGET_EPSILON)
    if above.size == 0:
        return _bid(outcomes[int(np.argmax(utils))])
    return _bid(outcomes[above[int(rng.integers(above.size))]])


def select_bid(
    template: StrategyTemplate,
    state: AgentState,
    own: UtilityModel,
    opp: Valuation,
    rng: np.random.Generator,
    *,
    domain: NegotiationDomain,
    fallback: Optional[Boulware] = None,
) -> Bid:
    """Run the first selected tactic of the phase active at state.t."""
    if template.kind != TemplateKind.BIDDING:
        raise EngineError(f"'{template.name}' is not a bidding template")
    tactic = phase_at(template, state.t).selected_tactics[0]
    if isinstance(tactic, Boulware):
        return boulware_bid(domain, own, state.t, tactic)
    if isinstance(tactic, ParetoWeighted):
        front = pareto_front(domain, own, opp)
        return topsis_select(front, tactic.a * state.t + tactic.b, own, opp)
    if isinstance(tactic, OpponentGreedy):
        last = state.last_opponent_bid
        if last is None:
            return boulware_bid(domain, own, state.t, fallback or Boulware())
        return opponent_greedy(last, own, rng)
    if isinstance(tactic, RandomAboveThreshold):
        return random_above_threshold(domain, own, state.dynamic_threshold, rng)
    raise EngineError(f"{type(tactic).__name__} is not a bidding tactic")
