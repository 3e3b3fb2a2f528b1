"""Engine errors."""


class EngineError(Exception):
    """Base error for the negotiation engine."""

    pass


class EmptyHistory(EngineError):
    """A quantile was requested over an empty list of received utilities."""

    pass


class DomainTooLarge(EngineError):
    """The outcome space exceeds the enumeration cap."""

    def __init__(self, size: int, cap: int):
        self.size = size
        self.cap = cap
        super().__init__(f"Outcome space has {size} outcomes, cap is {cap}")


class ConfigError(EngineError):
    """A session or agent is configured inconsistently."""

    pass
