"""Negotiating agents.

An agent opens with propose() and answers every incoming offer with
respond(), which records the offer, plans its own next bid and either
accepts or counters. At the final turn a non-accepting agent rejects.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from ..domain import AgentState, Bid, NegotiationDomain, ThresholdSchedule, UtilityModel
from ..template import Boulware, StrategyTemplate, TemplateKind
from .errors import ConfigError
from .opponent import OpponentModel
from .tactics import Valuation, boulware_bid, boulware_target, evaluate_acceptance, select_bid


class ActionKind(str, Enum):
    OFFER = "offer"
    ACCEPT = "accept"
    REJECT = "reject"


@dataclass(frozen=True)
class Action:
    kind: ActionKind
    bid: Optional[Bid] = None  # the offer made, or the offer accepted

    def __post_init__(self):
        if self.kind == ActionKind.OFFER and self.bid is None:
            raise ValueError("An offer must carry a bid")

    @classmethod
    def offer(cls, bid: Bid) -> "Action":
        return cls(ActionKind.OFFER, bid)

    @classmethod
    def accept(cls, bid: Bid) -> "Action":
        return cls(ActionKind.ACCEPT, bid)

    @classmethod
    def reject(cls) -> "Action":
        return cls(ActionKind.REJECT)


class Agent(ABC):
    """One side of a bilateral negotiation."""

    def __init__(
        self,
        name: str,
        domain: NegotiationDomain,
        utility: UtilityModel,
        schedule: Optional[ThresholdSchedule] = None,
    ):
        if not utility.fits(domain):
            raise ConfigError(f"Utility model of agent '{name}' does not fit the domain")
        self.name = name
        self.domain = domain
        self.utility = utility
        self.schedule = schedule or ThresholdSchedule()
        self.reset()

    def reset(self) -> None:
        self.history: list[Bid] = []
        self.opponent_model = OpponentModel(self.domain)
        self.last_state: Optional[AgentState] = None

    def state(self, t: float, own_next_bid: Optional[Bid] = None) -> AgentState:
        return AgentState(
            t=t,
            own_next_bid=own_next_bid,
            opponent_history=tuple(self.history),
            dynamic_threshold=self.schedule.at(t),
        )

    @abstractmethod
    def propose(self, t: float, rng: np.random.Generator) -> Bid:
        """The bid this agent would offer at time t."""

    @abstractmethod
    def accepts(self, state: AgentState, offer: Bid) -> bool:
        """Acceptance decision for an offer in a given state (used for replay too)."""

    def respond(
        self, t: float, offer: Bid, rng: np.random.Generator, final: bool = False
    ) -> Action:
        self.domain.check(offer)
        self.history.append(offer)
        self.opponent_model.observe(offer)
        planned = self.propose(t, rng)
        state = self.state(t, planned)
        self.last_state = state
        if self.accepts(state, offer):
            return Action.accept(offer)
        if final:
            return Action.reject()
        return Action.offer(planned)


class TemplateAgent(Agent):
    """Agent driven by an acceptance template and a bidding template."""

    def __init__(
        self,
        name: str,
        domain: NegotiationDomain,
        utility: UtilityModel,
        acceptance: StrategyTemplate,
        bidding: Optional[StrategyTemplate] = None,
        *,
        schedule: Optional[ThresholdSchedule] = None,
        boulware: Optional[Boulware] = None,
        opponent_profile: Optional[UtilityModel] = None,
    ):
        if acceptance.kind != TemplateKind.ACCEPTANCE:
            raise ConfigError(f"'{acceptance.name}' is not an acceptance template")
        if bidding is not None and bidding.kind != TemplateKind.BIDDING:
            raise ConfigError(f"'{bidding.name}' is not a bidding template")
        if opponent_profile is not None and not opponent_profile.fits(domain):
            raise ConfigError("Opponent profile does not fit the domain")
        self.acceptance = acceptance
        self.bidding = bidding
        self.boulware = boulware or Boulware()
        self.opponent_profile = opponent_profile
        super().__init__(name, domain, utility, schedule)

    @property
    def opponent_valuation(self) -> Valuation:
        """Ground-truth profile when known, else the frequency model."""
        return self.opponent_profile or self.opponent_model

    def propose(self, t: float, rng: np.random.Generator) -> Bid:
        if self.bidding is None:
            return boulware_bid(self.domain, self.utility, t, self.boulware)
        return select_bid(
            self.bidding,
            self.state(t),
            self.utility,
            self.opponent_valuation,
            rng,
            domain=self.domain,
            fallback=self.boulware,
        )

    def accepts(self, state: AgentState, offer: Bid) -> bool:
        return evaluate_acceptance(self.acceptance, state, offer, self.utility)


class BoulwareAgent(Agent):
    """Built-in opponent: bids and accepts along its own Boulware curve."""

    def __init__(
        self,
        name: str,
        domain: NegotiationDomain,
        utility: UtilityModel,
        boulware: Optional[Boulware] = None,
        schedule: Optional[ThresholdSchedule] = None,
    ):
        self.boulware = boulware or Boulware()
        super().__init__(name, domain, utility, schedule)

    def target(self, t: float) -> float:
        b = self.boulware
        return boulware_target(t, b.e, b.u_min, b.u_max)

    def propose(self, t: float, rng: np.random.Generator) -> Bid:
        return boulware_bid(self.domain, self.utility, t, self.boulware)

    def accepts(self, state: AgentState, offer: Bid) -> bool:
        return self.utility.utility(offer) >= self.target(state.t)
