"""Capability interfaces for plugins.

Plugins that provide specific capabilities must implement these interfaces.
This ensures interchangeability (offline, passthrough and remote all
implement RefinementBackend).
"""

from abc import ABC, abstractmethod
from enum import Enum


# --- Refinement Backend Interface ---


class Directive(str, Enum):
    """What a refinement backend is asked to do with a sentence."""

    ELABORATE = "elaborate"
    SIMPLIFY = "simplify"


class RefinementError(Exception):
    """Error from a refinement backend."""

    pass


class RefinementBackend(ABC):
    """Interface for text-refinement plugins (offline, passthrough, remote).

    Any plugin with capability ["refinement"] must implement this interface.
    Implementations must be safe for concurrent refine() calls.
    """

    label: str = ""
    deterministic: bool = True

    @abstractmethod
    def refine(self, text: str, directive: Directive, context: dict) -> str:
        """Rewrite one explanation segment.

        Args:
            text: Segment text
            directive: Elaborate or Simplify
            context: Role attributes of the segment's phase ("role" key names the kind)

        Returns:
            Non-empty rewritten text

        Raises:
            RefinementError: On any failure; never return empty text instead
        """
        pass
