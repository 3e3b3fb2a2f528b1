"""Strategy explainer - the end-to-end explanation pipeline.

    validate(customize(enrich(realize(annotate(parse(source)))), audience))

Each stage is followed by its pipeline hook when a plugin registry is
given, so plugins observe (and may replace) every intermediate result.
"""

import asyncio
from typing import Optional

from .annotator import annotate
from .enrichment import customize_enriched, enrich
from .parser import DEFAULT_U_FIXED, parse_template
from .plugins.interfaces import RefinementBackend
from .plugins.registry import PluginRegistry
from .realizer import Audience, RuleSet, default_rules, realize
from .validation import (
    ValidatedExplanation,
    ValidationExhausted,
    refine_explanation,
    validate,
)

MAX_ROUNDS = 2


class StrategyExplainer:
    """Runs parse → annotate → realize → enrich → customize → validate."""

    def __init__(
        self,
        backend: RefinementBackend,
        rules: Optional[RuleSet] = None,
        registry: Optional[PluginRegistry] = None,
        u_fixed: float = DEFAULT_U_FIXED,
        max_rounds: int = MAX_ROUNDS,
    ):
        self.backend = backend
        self.rules = rules or default_rules()
        self.registry = registry
        self.u_fixed = u_fixed
        self.max_rounds = max_rounds

    async def _hook(self, name: str, ctx: dict) -> dict:
        if self.registry is None:
            return ctx
        return await self.registry.run_hook(name, ctx)

    async def explain(self, source: str, audience: Audience) -> ValidatedExplanation:
        """Explain template source text for an audience.

        Raises:
            TemplateError: If the source does not parse
            ValidationExhausted: If still invalid after max_rounds refinements
        """
        audience = Audience(audience)
        stage = "parse"
        try:
            template = parse_template(source, u_fixed=self.u_fixed)
            ctx = await self._hook("on_parse", {"template": template, "source": source})
            template = ctx["template"]

            stage = "annotate"
            semrep = annotate(template)
            ctx = await self._hook("on_annotate", {"template": template, "semrep": semrep})
            semrep = ctx["semrep"]

            stage = "realize"
            meta = {"u_fixed": self.u_fixed, "audience": audience.value}
            expl = realize(semrep, self.rules, meta=meta)
            ctx = await self._hook("on_realize", {"explanation": expl})
            expl = ctx["explanation"]

            stage = "enrich"
            expl = enrich(expl, self.backend)
            ctx = await self._hook(
                "on_enrich", {"explanation": expl, "warnings": list(expl.warnings)}
            )
            expl = ctx["explanation"]

            stage = "customize"
            expl = customize_enriched(expl, audience, self.backend, self.rules)
            ctx = await self._hook("on_customize", {"explanation": expl, "audience": audience})
            expl = ctx["explanation"]

            stage = "validate"
            report = validate(expl, template, semrep)
            rounds = 0
            while not report.valid:
                if rounds >= self.max_rounds:
                    raise ValidationExhausted(report)
                expl = refine_explanation(expl, report, self.rules)
                rounds += 1
                report = validate(expl, template, semrep)
            ctx = await self._hook(
                "on_validate", {"explanation": expl, "report": report, "rounds": rounds}
            )
        except Exception as e:
            await self._hook("on_error", {"error": e, "stage": stage})
            raise

        return ValidatedExplanation(ctx["explanation"], ctx["report"], ctx["rounds"])


def explain_strategy(
    source: str,
    audience: Audience,
    backend: RefinementBackend,
    *,
    rules: Optional[RuleSet] = None,
    registry: Optional[PluginRegistry] = None,
    u_fixed: float = DEFAULT_U_FIXED,
    max_rounds: int = MAX_ROUNDS,
) -> ValidatedExplanation:
    """Synchronous entry point for the explanation pipeline."""
    explainer = StrategyExplainer(
        backend, rules=rules, registry=registry, u_fixed=u_fixed, max_rounds=max_rounds
    )
    return asyncio.run(explainer.explain(source, audience))
