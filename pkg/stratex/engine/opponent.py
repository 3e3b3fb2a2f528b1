"""Frequency opponent model.

Û_o(ω) = Σ ŵ_i · count_i(v_i) / max_v count_i(v), where ŵ_i is the standard
deviation of issue i's observed value frequencies, normalised to sum to 1.
Issues the opponent keeps fixed show a peaked frequency profile and so get
a large weight.
"""

import numpy as np

from ..domain import Bid, NegotiationDomain


class OpponentModel:
    """Per-issue, per-value counts over the opponent's bids."""

    def __init__(self, domain: NegotiationDomain):
        self.domain = domain
        self.counts = [np.zeros(n, dtype=np.int64) for n in domain.value_counts]
        self.observed = 0

    def observe(self, bid: Bid) -> None:
        self.domain.check(bid)
        for counts, v in zip(self.counts, bid.values):
            counts[v] += 1
        self.observed += 1

    @property
    def weights(self) -> np.ndarray:
        dispersion = np.array(
            [np.std(c / c.sum()) if c.sum() else 0.0 for c in self.counts]
        )
        total = dispersion.sum()
        if total <= 0.0:
            return np.full(len(self.counts), 1.0 / len(self.counts))
        return dispersion / total

    @property
    def evaluations(self) -> list[np.ndarray]:
        return [c / c.max() if c.max() else np.zeros(len(c)) for c in self.counts]

    def utilities(self, outcomes: np.ndarray) -> np.ndarray:
        total = np.zeros(len(outcomes))
        for i, (w, evals) in enumerate(zip(self.weights, self.evaluations)):
            total += w * evals[outcomes[:, i]]
        return total

    def utility(self, bid: Bid) -> float:
        self.domain.check(bid)
        return float(
            sum(w * evals[v] for w, evals, v in zip(self.weights, self.evaluations, bid.values))
        )
