"""Enrichment - pass rule-based segments through a refinement backend.

Segments are refined one at a time, in order. A backend failure, an empty
answer or an answer that drops a number of the input keeps the original
text for that segment and records a warning.
"""

import dataclasses
from collections import Counter
from typing import Optional

from .numerals import extract_numerals
from .plugins.interfaces import Directive, RefinementBackend, RefinementError
from .realizer import (
    Audience,
    EnrichedExplanation,
    Explanation,
    Provenance,
    RuleSet,
    Segment,
    customize,
)
from .template import phase_path


def dropped_numbers(before: str, after: str) -> list[str]:
    """Numerals of `before` missing from `after` (compared by value and kind)."""
    kept = Counter((n.value, n.percent) for n in extract_numerals(after))
    missing = []
    for numeral in extract_numerals(before):
        key = (numeral.value, numeral.percent)
        if kept[key] > 0:
            kept[key] -= 1
        else:
            missing.append(numeral.text)
    return missing


def segment_context(expl: Explanation, segment: Segment) -> dict:
    """Role attributes handed to the backend alongside a segment."""
    if segment.phase is None or expl.semrep is None:
        return {"role": "Header", "audience": segment.audience.value}
    role = expl.semrep[phase_path(segment.phase)]
    return {
        "role": role.kind.value,
        "audience": segment.audience.value,
        **role.attributes,
    }


def refine_checked(
    backend: RefinementBackend, text: str, directive: Directive, context: dict
) -> str:
    """backend.refine plus the non-empty and numbers-preserved checks."""
    refined = backend.refine(text, directive, context)
    if not refined or not refined.strip():
        raise RefinementError("backend returned empty text")
    missing = dropped_numbers(text, refined)
    if missing:
        raise RefinementError(f"backend dropped numbers {', '.join(missing)}")
    return refined


def _refined(
    expl: Explanation,
    index: int,
    segment: Segment,
    backend: RefinementBackend,
    directive: Directive,
    warnings: list[str],
) -> tuple[str, bool]:
    """(text, fallback_used) for one segment; failures keep the input text."""
    try:
        context = segment_context(expl, segment)
        return refine_checked(backend, segment.text, directive, context), False
    except RefinementError as e:
        where = "header" if segment.phase is None else f"phase {segment.phase}"
        warnings.append(f"segment {index} ({where}): {e}; kept rule-based text")
        return segment.text, True


def enrich(
    expl: Explanation,
    backend: RefinementBackend,
    directive: Directive = Directive.ELABORATE,
    label: Optional[str] = None,
) -> EnrichedExplanation:
    """Refine every segment through `backend`, falling back per segment.

    Segment count and traces are unchanged; every segment is marked Enriched.
    """
    if not expl.segments:
        raise ValueError("cannot enrich an empty explanation")
    label = label or backend.label
    segments = []
    warnings: list[str] = []
    for index, segment in enumerate(expl.segments):
        text, fallback = _refined(expl, index, segment, backend, directive, warnings)
        segments.append(
            dataclasses.replace(
                segment,
                text=text,
                provenance=Provenance.ENRICHED,
                backend=label,
                fallback_used=fallback,
            )
        )
    return EnrichedExplanation(
        tuple(segments),
        expl.template_name,
        expl.kind,
        semrep=expl.semrep,
        meta={**expl.meta, "backend": label},
        backend=label,
        warnings=tuple(warnings),
    )


def customize_enriched(
    expl: Explanation,
    audience: Audience,
    backend: RefinementBackend,
    rules: Optional[RuleSet] = None,
) -> Explanation:
    """customize, then refine re-rendered enriched segments through `backend`.

    Layperson segments are refined with the simplify directive, expert ones
    with elaborate. A re-rendered segment keeps the provenance, backend label
    and fallback flag of the segment it replaces; a failed refinement keeps
    the rule text and adds a warning.
    """
    audience = Audience(audience)
    directive = Directive.SIMPLIFY if audience == Audience.LAYPERSON else Directive.ELABORATE
    tailored = customize(expl, audience, rules)
    warnings = list(getattr(expl, "warnings", ()))
    segments = []
    for index, (before, after) in enumerate(zip(expl.segments, tailored.segments)):
        if after is before or before.provenance != Provenance.ENRICHED:
            segments.append(after)
            continue
        text, fallback = _refined(tailored, index, after, backend, directive, warnings)
        segments.append(
            dataclasses.replace(
                after,
                text=text,
                provenance=Provenance.ENRICHED,
                backend=before.backend,
                fallback_used=before.fallback_used or fallback,
            )
        )
    tailored = tailored.with_segments(segments)
    if isinstance(tailored, EnrichedExplanation):
        tailored = dataclasses.replace(tailored, warnings=tuple(warnings))
    return tailored
