"""Remote plugin - refinement via an OpenAI-style chat completion endpoint.

Priority: 20 (after config)
Capability: refinement
"""

import json
import sys
import time
from typing import Optional

import httpx

from ..base import Plugin, PluginMeta
from ..config.plugin import StratexConfig
from ..interfaces import Directive, RefinementBackend, RefinementError

SYSTEM_PROMPT = (
    "You rewrite one sentence of a negotiation strategy explanation for clarity. "
    "Preserve all numbers verbatim. Reply with the rewritten text only."
)

DEFAULT_MODEL = "gpt-4o-mini"

DIRECTIVE_PROMPTS = {
    Directive.ELABORATE: "Elaborate this explanation so it reads naturally",
    Directive.SIMPLIFY: "Simplify this explanation for a reader without a maths background",
}


class RemotePlugin(Plugin, RefinementBackend):
    """Chat-completion refinement backend."""

    meta = PluginMeta(
        id="remote",
        version="1.0.0",
        capabilities=["refinement"],
        dependencies=["config"],
        priority=20,
    )

    deterministic = False

    def __init__(self):
        self._url: Optional[str] = None
        self._api_key: Optional[str] = None
        self._model: str = DEFAULT_MODEL
        self._timeout: float = 30.0
        self._retries: int = 2
        self._backoff: float = 1.0

    @property
    def label(self) -> str:
        return f"remote:{self._model}"

    def configure(self, config: dict) -> None:
        """Read the remote settings (env vars as fallback)."""
        settings = StratexConfig.from_dict(config)
        self._url = settings.remote_url.rstrip("/") if settings.remote_url else None
        self._api_key = settings.remote_api_key
        self._model = settings.remote_model or DEFAULT_MODEL
        self._timeout = settings.remote_timeout
        self._retries = settings.remote_retries

    async def start(self) -> None:
        if not self._url:
            print("[Remote] Warning: No endpoint URL configured", file=sys.stderr)
        else:
            print(f"[Remote] Initialized with model {self._model}", file=sys.stderr)

    async def stop(self) -> None:
        pass

    # --- RefinementBackend Interface ---

    def refine(self, text: str, directive: Directive, context: dict) -> str:
        """Refine via POST {url}/chat/completions, retrying with backoff."""
        if not self._url:
            raise RefinementError("Remote endpoint URL not configured")

        payload = {
            "model": self._model,
            "temperature": 0,
            "messages": [
                {"role": "system", "content": SYSTEM_PROMPT},
                {
                    "role": "user",
                    "content": (
                        f"{DIRECTIVE_PROMPTS[Directive(directive)]}.\n"
                        f"Context: {json.dumps(context, default=str, sort_keys=True)}\n"
                        f"Text: {text}"
                    ),
                },
            ],
        }
        headers = {"Content-Type": "application/json"}
        if self._api_key:
            headers["Authorization"] = f"Bearer {self._api_key}"

        last_error: Optional[Exception] = None
        for attempt in range(self._retries + 1):
            if attempt:
                time.sleep(self._backoff * 2 ** (attempt - 1))
            try:
                response = httpx.post(
                    f"{self._url}/chat/completions",
                    headers=headers,
                    json=payload,
                    timeout=self._timeout,
                )
                response.raise_for_status()
                data = response.json()
            except httpx.HTTPStatusError as e:
                last_error = RefinementError(
                    f"API error: {e.response.status_code} - {e.response.text}"
                )
                continue
            except (httpx.RequestError, ValueError) as e:
                last_error = RefinementError(f"Request failed: {e}")
                continue

            content = _content(data)
            if not content.strip():
                raise RefinementError("Remote backend returned empty content")
            return content.strip()

        print(f"[Remote] Giving up after {self._retries + 1} attempts", file=sys.stderr)
        raise last_error or RefinementError("Remote refinement failed")


def _content(data) -> str:
    """First choice's message content of a chat-completions response."""
    try:
        content = data["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError) as e:
        raise RefinementError(f"Unexpected response shape: {e!r}") from e
    if content is None:
        return ""
    if not isinstance(content, str):
        raise RefinementError(f"Unexpected content type: {type(content).__name__}")
    return content


# Factory function for plugin discovery
def create_plugin() -> RemotePlugin:
    return RemotePlugin()
