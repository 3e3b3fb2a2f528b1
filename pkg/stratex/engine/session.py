"""Alternating-offers session.

Round r runs at t = r / deadline. A opens round 1 with an offer and B
answers; in every later round A answers B's last offer, then B answers
A's. B rejects at the deadline round if it does not accept.
"""

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..domain import AgentState, Bid, NegotiationDomain
from .agents import Action, ActionKind, Agent
from .errors import ConfigError


@dataclass(frozen=True)
class TranscriptEntry:
    round: int
    t: float
    actor: str
    action: Action

    def to_dict(self, domain: NegotiationDomain) -> dict:
        bid = self.action.bid
        return {
            "round": self.round,
            "t": self.t,
            "actor": self.actor,
            "action": self.action.kind.value,
            "bid": bid.labels(domain) if bid is not None else None,
        }


@dataclass(frozen=True)
class SessionOutcome:
    domain: NegotiationDomain
    transcript: tuple[TranscriptEntry, ...]
    bid: Optional[Bid] = None
    t: Optional[float] = None
    round: Optional[int] = None
    utility_a: float = 0.0
    utility_b: float = 0.0
    accepted_by: Optional[str] = None
    agreement_state: Optional[AgentState] = field(default=None, compare=False)

    @property
    def agreed(self) -> bool:
        return self.bid is not None

    def transcript_lines(self) -> str:
        """One JSON object per action, newline-terminated."""
        return "".join(
            json.dumps(entry.to_dict(self.domain), ensure_ascii=False) + "\n"
            for entry in self.transcript
        )

    def to_dict(self) -> dict:
        return {
            "agreed": self.agreed,
            "bid": self.bid.labels(self.domain) if self.bid is not None else None,
            "t": self.t,
            "round": self.round,
            "utility_a": self.utility_a,
            "utility_b": self.utility_b,
            "accepted_by": self.accepted_by,
            "actions": len(self.transcript),
        }


def run_session(
    domain: NegotiationDomain,
    agent_a: Agent,
    agent_b: Agent,
    deadline: int,
    seed: int = 0,
) -> SessionOutcome:
    """Run one negotiation to agreement or deadline; deterministic per seed.

    Raises:
        ConfigError: If deadline < 1 or an agent negotiates over another domain
    """
    if deadline < 1:
        raise ConfigError(f"deadline must be at least 1 round, got {deadline}")
    for agent in (agent_a, agent_b):
        if agent.domain != domain:
            raise ConfigError(f"Agent '{agent.name}' negotiates over a different domain")

    agent_a.reset()
    agent_b.reset()
    rng_a, rng_b = (np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(2))
    transcript: list[TranscriptEntry] = []

    def agreement(agent: Agent, r: int, t: float, bid: Bid) -> SessionOutcome:
        return SessionOutcome(
            domain=domain,
            transcript=tuple(transcript),
            bid=bid,
            t=t,
            round=r,
            utility_a=agent_a.utility.utility(bid),
            utility_b=agent_b.utility.utility(bid),
            accepted_by=agent.name,
            agreement_state=agent.last_state,
        )

    offer: Optional[Bid] = None
    for r in range(1, deadline + 1):
        t = r / deadline
        if offer is None:
            offer = agent_a.propose(t, rng_a)
            transcript.append(TranscriptEntry(r, t, agent_a.name, Action.offer(offer)))
        else:
            action = agent_a.respond(t, offer, rng_a)
            transcript.append(TranscriptEntry(r, t, agent_a.name, action))
            if action.kind == ActionKind.ACCEPT:
                return agreement(agent_a, r, t, offer)
            offer = action.bid

        action = agent_b.respond(t, offer, rng_b, final=r == deadline)
        transcript.append(TranscriptEntry(r, t, agent_b.name, action))
        if action.kind == ActionKind.ACCEPT:
            return agreement(agent_b, r, t, offer)
        if action.kind == ActionKind.REJECT:
            break
        offer = action.bid

    return SessionOutcome(domain=domain, transcript=tuple(transcript))
