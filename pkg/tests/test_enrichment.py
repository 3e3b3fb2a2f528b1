"""Tests for enrichment through refinement backends."""

import re
from pathlib import Path

import pytest

from stratex.annotator import annotate
from stratex.enrichment import (
    customize_enriched,
    dropped_numbers,
    enrich,
    refine_checked,
    segment_context,
)
from stratex.parser import parse_file
from stratex.plugins import Directive, RefinementBackend, RefinementError, load_backend
from stratex.realizer import (
    Audience,
    EnrichedExplanation,
    Explanation,
    Provenance,
    customize,
    realize,
)

DATA = Path(__file__).parent.parent / "stratex" / "data"


class DigitEater(RefinementBackend):
    label = "digits"

    def refine(self, text, directive, context):
        return re.sub(r"\d", "#", text)


class Broken(RefinementBackend):
    label = "broken"

    def refine(self, text, directive, context):
        raise RefinementError("service unavailable")


class Blank(RefinementBackend):
    label = "blank"

    def refine(self, text, directive, context):
        return "   "


class Recorder(RefinementBackend):
    label = "recorder"

    def __init__(self):
        self.calls = []

    def refine(self, text, directive, context):
        self.calls.append((directive, context))
        return text


@pytest.fixture
def party_expl():
    return realize(annotate(parse_file(DATA / "party.nst")), meta={"u_fixed": 0.6})


class TestEnrich:
    def test_passthrough(self, party_expl):
        enriched = enrich(party_expl, load_backend("passthrough"))
        assert isinstance(enriched, EnrichedExplanation)
        assert [s.text for s in enriched.segments] == [s.text for s in party_expl.segments]
        assert {s.provenance for s in enriched.segments} == {Provenance.ENRICHED}
        assert {s.backend for s in enriched.segments} == {"passthrough"}
        assert enriched.warnings == ()
        assert enriched.meta == {"u_fixed": 0.6, "backend": "passthrough"}

    def test_traces_and_count_unchanged(self, party_expl):
        enriched = enrich(party_expl, load_backend("offline"))
        assert len(enriched.segments) == len(party_expl.segments)
        assert [s.trace for s in enriched.segments] == [s.trace for s in party_expl.segments]

    def test_offline_rewrites(self, party_expl):
        enriched = enrich(party_expl, load_backend("offline"))
        header, first, second = enriched.segments
        assert header.text.startswith('Taken as a whole, the acceptance strategy "party"')
        assert first.text.startswith("During the initial 3.61% of the event, we evaluate")
        assert second.text.startswith("From 3.61% of the event onwards, we evaluate")
        assert "Q_{U(Ω^o_t)}(-0.2·t + 0.22)" in first.text

    def test_dropped_numbers_fall_back(self, party_expl):
        enriched = enrich(party_expl, DigitEater())
        header, first, second = enriched.segments
        assert header.fallback_used is False
        assert first.fallback_used is True
        assert first.text == party_expl.segments[1].text
        assert len(enriched.warnings) == 2
        assert enriched.warnings[0].startswith("segment 1 (phase 0): backend dropped numbers")
        assert enriched.warnings[0].endswith("; kept rule-based text")

    def test_backend_error_falls_back(self, party_expl):
        enriched = enrich(party_expl, Broken())
        assert all(s.fallback_used for s in enriched.segments)
        assert enriched.warnings[0] == (
            "segment 0 (header): service unavailable; kept rule-based text"
        )

    def test_empty_answer_falls_back(self, party_expl):
        enriched = enrich(party_expl, Blank())
        assert [s.text for s in enriched.segments] == [s.text for s in party_expl.segments]
        assert "empty text" in enriched.warnings[0]

    def test_directive_and_context_passed(self, party_expl):
        backend = Recorder()
        enrich(party_expl, backend, Directive.SIMPLIFY)
        directives = {d for d, _ in backend.calls}
        assert directives == {Directive.SIMPLIFY}
        assert backend.calls[0][1] == {"role": "Header", "audience": "expert"}
        assert backend.calls[1][1]["role"] == "TimePhase"
        assert backend.calls[1][1]["percentEnd"] == 3.61

    def test_label_override(self, party_expl):
        enriched = enrich(party_expl, load_backend("passthrough"), label="custom")
        assert enriched.backend == "custom"

    def test_empty_explanation_rejected(self, party_expl):
        empty = Explanation((), "x", party_expl.kind)
        with pytest.raises(ValueError):
            enrich(empty, load_backend("passthrough"))

    def test_round_trip_keeps_backend(self, party_expl):
        enriched = enrich(party_expl, Broken())
        restored = Explanation.from_dict(enriched.to_dict())
        assert isinstance(restored, EnrichedExplanation)
        assert restored.backend == "broken"
        assert restored.warnings == enriched.warnings


class TestCustomizeEnriched:
    def test_layperson_keeps_enrichment(self, party_expl):
        offline = load_backend("offline")
        lay = customize_enriched(enrich(party_expl, offline), Audience.LAYPERSON, offline)
        assert {s.provenance for s in lay.segments} == {Provenance.ENRICHED}
        assert {s.backend for s in lay.segments} == {"offline"}
        assert {s.audience for s in lay.segments} == {Audience.LAYPERSON}
        assert "decides when to say yes to an offer" in lay.segments[0].text
        assert "we look at whether the offer on the table" in lay.segments[1].text
        assert lay.backend == "offline"

    def test_layperson_uses_simplify(self, party_expl):
        backend = Recorder()
        enriched = enrich(party_expl, backend)
        backend.calls.clear()
        customize_enriched(enriched, Audience.LAYPERSON, backend)
        assert {directive for directive, _ in backend.calls} == {Directive.SIMPLIFY}
        assert {context["audience"] for _, context in backend.calls} == {"layperson"}

    def test_failure_keeps_layperson_rule_text(self, party_expl):
        enriched = enrich(party_expl, load_backend("passthrough"))
        lay = customize_enriched(enriched, Audience.LAYPERSON, Broken())
        expected = customize(party_expl, Audience.LAYPERSON)
        assert [s.text for s in lay.segments] == [s.text for s in expected.segments]
        assert all(s.fallback_used for s in lay.segments)
        assert {s.provenance for s in lay.segments} == {Provenance.ENRICHED}
        assert len(lay.warnings) == 3

    def test_expert_keeps_enriched_segments(self, party_expl):
        enriched = enrich(party_expl, load_backend("offline"))
        assert customize_enriched(enriched, Audience.EXPERT, Broken()).segments == enriched.segments

    def test_rule_based_segments_not_refined(self, party_expl):
        backend = Recorder()
        lay = customize_enriched(party_expl, Audience.LAYPERSON, backend)
        assert backend.calls == []
        assert {s.provenance for s in lay.segments} == {Provenance.RULE_BASED}


class TestHelpers:
    def test_dropped_numbers_by_kind(self):
        assert dropped_numbers("0.22 and 3.61%", "3.61 and 0.22") == ["3.61%"]

    def test_dropped_numbers_counts_repeats(self):
        assert dropped_numbers("0.5 then 0.5", "only 0.5") == ["0.5"]

    def test_nothing_dropped(self):
        assert dropped_numbers("t ∈ [0.0, 0.25)", "from 0.0 up to 0.25, and 25%") == []

    def test_refine_checked_passes_through(self):
        assert refine_checked(load_backend("passthrough"), "a 0.5", Directive.ELABORATE, {}) == "a 0.5"

    def test_refine_checked_rejects_drops(self):
        with pytest.raises(RefinementError, match="dropped numbers 0.5"):
            refine_checked(DigitEater(), "a 0.5", Directive.ELABORATE, {})

    def test_segment_context_header(self, party_expl):
        context = segment_context(party_expl, party_expl.segments[0])
        assert context == {"role": "Header", "audience": "expert"}

    def test_segment_context_phase(self, party_expl):
        context = segment_context(party_expl, party_expl.segments[2])
        assert context["role"] == "TimePhase"
        assert context["isFinal"] is True
        assert context["percentStart"] == 3.61
