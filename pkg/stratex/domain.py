"""Negotiation domain types: issues, bids, utility models, agent state.

Issues are discrete; a bid holds one value index per issue. Utility models
are linear-additive: U(ω) = Σ w_i · e_i(v_i).
"""

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np


class DomainMismatch(ValueError):
    """A bid or utility model does not fit the negotiation domain."""

    pass


@dataclass(frozen=True)
class Issue:
    name: str
    values: tuple[str, ...]


@dataclass(frozen=True, order=True)
class Bid:
    values: tuple[int, ...]

    def labels(self, domain: "NegotiationDomain") -> dict[str, str]:
        return {
            issue.name: issue.values[v] for issue, v in zip(domain.issues, self.values)
        }


@dataclass(frozen=True)
class NegotiationDomain:
    issues: tuple[Issue, ...]

    def __post_init__(self):
        if not self.issues:
            raise DomainMismatch("Domain needs at least one issue")
        for issue in self.issues:
            if len(issue.values) < 2:
                raise DomainMismatch(f"Issue '{issue.name}' needs at least 2 values")

    @property
    def value_counts(self) -> tuple[int, ...]:
        return tuple(len(i.values) for i in self.issues)

    @property
    def size(self) -> int:
        """|Ω|, the product of per-issue value counts."""
        return math.prod(self.value_counts)

    def check(self, bid: Bid) -> None:
        if len(bid.values) != len(self.issues):
            raise DomainMismatch(
                f"Bid has {len(bid.values)} values, domain has {len(self.issues)} issues"
            )
        for issue, v in zip(self.issues, bid.values):
            if not 0 <= v < len(issue.values):
                raise DomainMismatch(f"Value index {v} out of range for '{issue.name}'")

    def bids(self) -> Iterator[Bid]:
        """All bids in lexicographic order."""
        for combo in itertools.product(*(range(n) for n in self.value_counts)):
            yield Bid(tuple(combo))

    def outcome_matrix(self) -> np.ndarray:
        """(|Ω|, n_issues) value indices, rows in lexicographic bid order."""
        grids = np.meshgrid(*(np.arange(n) for n in self.value_counts), indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)


@dataclass(frozen=True)
class UtilityModel:
    weights: tuple[float, ...]
    evaluations: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        if len(self.weights) != len(self.evaluations):
            raise DomainMismatch("weights and evaluations differ in issue count")
        if any(w < 0 for w in self.weights):
            raise DomainMismatch("weights must be non-negative")
        if abs(sum(self.weights) - 1.0) > 1e-9:
            raise DomainMismatch(f"weights sum to {sum(self.weights)}, expected 1")
        for i, evals in enumerate(self.evaluations):
            if any(not 0.0 <= e <= 1.0 for e in evals):
                raise DomainMismatch(f"evaluations of issue {i} must lie in [0, 1]")
            if abs(max(evals) - 1.0) > 1e-9:
                raise DomainMismatch(f"best evaluation of issue {i} must be 1")

    def fits(self, domain: NegotiationDomain) -> bool:
        return tuple(len(e) for e in self.evaluations) == domain.value_counts

    def utility(self, bid: Bid) -> float:
        if len(bid.values) != len(self.weights):
            raise DomainMismatch("bid does not match utility model")
        total = 0.0
        for w, evals, v in zip(self.weights, self.evaluations, bid.values):
            if not 0 <= v < len(evals):
                raise DomainMismatch(f"value index {v} out of range")
            total += w * evals[v]
        return total

    def utilities(self, outcomes: np.ndarray) -> np.ndarray:
        """Vectorised utility over an outcome matrix."""
        total = np.zeros(len(outcomes))
        for i, (w, evals) in enumerate(zip(self.weights, self.evaluations)):
            total += w * np.asarray(evals)[outcomes[:, i]]
        return total

    def best_bid(self) -> Bid:
        return Bid(tuple(int(np.argmax(evals)) for evals in self.evaluations))


@dataclass(frozen=True)
class ThresholdSchedule:
    """ū_t as piecewise-linear breakpoints (t, value), clamped outside."""

    breakpoints: tuple[tuple[float, float], ...] = ((0.0, 0.9), (1.0, 0.6))

    def __post_init__(self):
        if not self.breakpoints:
            raise ValueError("schedule needs at least one breakpoint")
        ts = [t for t, _ in self.breakpoints]
        if ts != sorted(ts):
            raise ValueError("schedule breakpoints must be sorted by t")
        if any(not 0.0 <= v <= 1.0 for _, v in self.breakpoints):
            raise ValueError("schedule values must lie in [0, 1]")

    def at(self, t: float) -> float:
        ts, vs = zip(*self.breakpoints)
        return float(np.interp(t, ts, vs))


@dataclass(frozen=True)
class AgentState:
    """s_t as seen by an acceptance or bidding tactic."""

    t: float
    own_next_bid: Optional[Bid] = None
    opponent_history: tuple[Bid, ...] = ()
    dynamic_threshold: float = 0.0

    @property
    def last_opponent_bid(self) -> Optional[Bid]:
        return self.opponent_history[-1] if self.opponent_history else None
