"""Negotiation engine.

Executes acceptance and bidding templates under the alternating-offers
protocol:
- tactic evaluation, Pareto front and TOPSIS (tactics.py)
- frequency opponent model (opponent.py)
- template-driven and Boulware agents (agents.py)
- seeded sessions and transcripts (session.py)
"""

from ..domain import DomainMismatch
from .agents import Action, ActionKind, Agent, BoulwareAgent, TemplateAgent
from .errors import ConfigError, DomainTooLarge, EmptyHistory, EngineError
from .opponent import OpponentModel
from .session import SessionOutcome, TranscriptEntry, run_session
from .tactics import (
    MAX_OUTCOMES,
    acceptance_thresholds,
    boulware_bid,
    boulware_target,
    empirical_quantile,
    evaluate_acceptance,
    front_indices,
    opponent_greedy,
    outcome_space,
    pareto_front,
    random_above_threshold,
    select_bid,
    topsis_select,
)

__all__ = [
    "Action",
    "ActionKind",
    "Agent",
    "BoulwareAgent",
    "ConfigError",
    "DomainMismatch",
    "DomainTooLarge",
    "EmptyHistory",
    "EngineError",
    "MAX_OUTCOMES",
    "OpponentModel",
    "SessionOutcome",
    "TemplateAgent",
    "TranscriptEntry",
    "acceptance_thresholds",
    "boulware_bid",
    "boulware_target",
    "empirical_quantile",
    "evaluate_acceptance",
    "front_indices",
    "opponent_greedy",
    "outcome_space",
    "pareto_front",
    "random_above_threshold",
    "run_session",
    "select_bid",
    "topsis_select",
]
