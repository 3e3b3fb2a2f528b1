"""Tests for rule-based realization and audience customization."""

from pathlib import Path

import pytest

from stratex.annotator import annotate
from stratex.parser import parse_file, parse_template
from stratex.realizer import (
    DEFAULT_RULES,
    Audience,
    Explanation,
    MissingRole,
    Provenance,
    RuleFileError,
    SlotResolutionError,
    customize,
    default_rules,
    format_attribute,
    load_rules,
    parse_pattern,
    phase_trace,
    realize,
)

DATA = Path(__file__).parent.parent / "stratex" / "data"

PARTY_EXPERT_FIRST = (
    "Within the time interval of t, we are comparing the offer's utility to another "
    "derived value: the utility function U_u(ω_t^o) should exceed or equal the computed "
    "utility, the greater value between Q_{U(Ω^o_t)}(-0.2·t + 0.22) and the dynamic "
    "threshold ū_t. Here t ∈ [0.0, 0.0361). The bar becomes stricter over time."
)

PARTY_LAYPERSON_FIRST = (
    "In the beginning phase, covering the first 3.61% of the session, we check if our "
    "offer's value is at least as good as another number we determine. Choose the larger "
    "number between the number we get from our special formula (-0.20 × time + 0.22) and "
    "a minimum value that changes over time. The bar becomes stricter over time."
)

PARTY_LAYPERSON_SECOND = (
    "From 3.61% of the session until the end, we check if our offer's value is at least "
    "as good as another number we determine. Choose the larger number between 'u' and "
    "the number we get from our special formula (-0.10 × time + 0.64). The bar becomes "
    "stricter over time."
)


def semrep_of(name: str):
    return annotate(parse_file(DATA / name))


def rules_with(old: str, new: str):
    text = DEFAULT_RULES.read_text(encoding="utf-8")
    assert old in text
    return load_rules(text.replace(old, new))


class TestRuleFile:
    def test_default_rules_load(self):
        rules = default_rules()
        assert "TimePhase" in rules.kinds()
        assert "Header" in rules.kinds()

    def test_most_specific_rule_wins(self):
        rule = default_rules().lookup("TimePhase", {"isInitial": True, "isFinal": True})
        assert rule.pattern.predicates == (("isInitial", None), ("isFinal", None))

    def test_unconditional_fallback(self):
        rule = default_rules().lookup("TimePhase", {"isInitial": False, "isFinal": False})
        assert rule.pattern.predicates == ()

    def test_parse_pattern(self):
        pattern = parse_pattern("BidDirective[tactic=choice, combined]")
        assert pattern.kind == "BidDirective"
        assert pattern.predicates == (("tactic", "choice"), ("combined", None))
        assert pattern.specificity == 2
        assert pattern.matches("BidDirective", {"tactic": "choice", "combined": True})
        assert not pattern.matches("BidDirective", {"tactic": "choice", "combined": False})

    def test_wrong_field_count(self):
        with pytest.raises(RuleFileError) as exc_info:
            load_rules("Header | only expert\n")
        assert exc_info.value.line == 1

    def test_unknown_kind(self):
        with pytest.raises(RuleFileError, match="unknown role kind"):
            load_rules("Mystery | a | b\n")

    def test_unknown_slot(self):
        with pytest.raises(RuleFileError, match="unknown slot"):
            rules_with(
                "OfferUtility | U_u(ω_t^o) | the offer's value",
                "OfferUtility | U_u({nothing}) | the offer's value",
            )

    def test_duplicate_pattern(self):
        text = DEFAULT_RULES.read_text(encoding="utf-8")
        with pytest.raises(RuleFileError, match="duplicate pattern"):
            load_rules(text + "\nOfferUtility | again | again\n")

    def test_missing_unconditional_rule(self):
        with pytest.raises(MissingRole) as exc_info:
            rules_with("DynamicThreshold | the dynamic threshold ū_t | a minimum value that changes over time\n", "")
        assert exc_info.value.kind == "DynamicThreshold"


class TestRealize:
    def test_party_expert(self):
        expl = realize(semrep_of("party.nst"))
        assert len(expl.segments) == 3
        header, first, second = expl.segments
        assert header.phase is None
        assert header.text == (
            'The acceptance strategy "party" has two phases; each pairs a time interval '
            "of t with a condition on the utility of the opponent's offer."
        )
        assert first.text == PARTY_EXPERT_FIRST
        assert "the fixed threshold u and Q_{U(Ω^o_t)}(-0.1·t + 0.64)" in second.text
        assert second.text.endswith("Here t ∈ [0.0361, 1.0]. The bar becomes stricter over time.")

    def test_segments_are_rule_based_expert(self):
        expl = realize(semrep_of("party.nst"))
        assert {s.provenance for s in expl.segments} == {Provenance.RULE_BASED}
        assert {s.audience for s in expl.segments} == {Audience.EXPERT}

    def test_traces_cover_phase(self):
        semrep = semrep_of("party.nst")
        first = realize(semrep).segments[1]
        assert first.trace == phase_trace(semrep, 0)
        assert all(p.startswith("phases[0]") for p in first.trace)
        assert first.interpretive == {"phases[0].body.rhs.args[0]"}

    def test_grocery_three_operands(self):
        expl = realize(semrep_of("grocery.nst"))
        first = expl.phase_segment(0)
        assert (
            "the greater value between U_u(ω_t), the utility of our own next planned bid, "
            "Q_{U(Ω^o_t)}(-0.55·t + 0.05) and the dynamic threshold ū_t"
        ) in first.text

    def test_bidding_expert(self):
        expl = realize(semrep_of("boulware-pareto.nst"))
        assert expl.segments[1].text == (
            "Within the time interval of t, we propose the Boulware bid with concession "
            "exponent e = 0.2, conceding in time from utility 1.0 down to 0.6. "
            "Here t ∈ [0.0, 0.5)."
        )
        assert expl.segments[2].text == (
            "Within the time interval of t, we propose the Pareto-optimal bid picked by "
            "TOPSIS with own-utility weight -0.4·t + 0.9. Here t ∈ [0.5, 1.0]."
        )

    def test_unselected_tactic_not_traced(self):
        expl = realize(semrep_of("boulware-pareto.nst"))
        trace = expl.segments[2].trace
        assert "phases[1].body.options[0]" in trace
        assert not any(p.startswith("phases[1].body.options[1]") for p in trace)

    def test_combined_bid_choice(self):
        template = parse_template(
            'bidding template "b" { phase [0, 1] { bid opponent_greedy bid random_above_threshold } }'
        )
        text = realize(annotate(template)).segments[1].text
        assert "we propose the first of these that applies: the opponent's last bid" in text
        assert "; otherwise a random bid whose utility is at least" in text

    def test_meta_kept(self):
        expl = realize(semrep_of("party.nst"), meta={"u_fixed": 0.6})
        assert expl.meta == {"u_fixed": 0.6}

    def test_slot_resolution_error(self):
        rules = rules_with(
            "the opponent's last bid ω^o_t with its least important issue changed at random |",
            "the opponent's last bid with exponent {e} |",
        )
        template = parse_template('bidding template "b" { phase [0, 1] { bid opponent_greedy } }')
        with pytest.raises(SlotResolutionError) as exc_info:
            realize(annotate(template), rules)
        assert exc_info.value.slot == "e"


class TestCustomize:
    def test_party_layperson(self):
        expl = customize(realize(semrep_of("party.nst")), Audience.LAYPERSON)
        header, first, second = expl.segments
        assert header.text == (
            'The strategy "party" decides whether to accept an offer, working in two phases.'
        )
        assert first.text == PARTY_LAYPERSON_FIRST
        assert second.text == PARTY_LAYPERSON_SECOND
        assert {s.audience for s in expl.segments} == {Audience.LAYPERSON}

    def test_traces_preserved(self):
        expert = realize(semrep_of("grocery.nst"))
        lay = customize(expert, Audience.LAYPERSON)
        assert [s.trace for s in lay.segments] == [s.trace for s in expert.segments]

    def test_expert_keeps_expert_segments(self):
        expert = realize(semrep_of("party.nst"))
        assert customize(expert, Audience.EXPERT).segments == expert.segments

    def test_middle_phase_layperson(self):
        lay = customize(realize(semrep_of("grocery.nst")), Audience.LAYPERSON)
        assert lay.phase_segment(1).text.startswith(
            "Between 21.64% and 33.79% of the session, we check"
        )

    def test_needs_semrep(self):
        expl = Explanation((), "x", realize(semrep_of("party.nst")).kind)
        with pytest.raises(ValueError):
            customize(expl, Audience.LAYPERSON)


class TestSerialisation:
    def test_round_trip(self):
        expl = realize(semrep_of("party.nst"), meta={"u_fixed": 0.6})
        restored = Explanation.from_dict(expl.to_dict())
        assert restored == expl
        assert restored.meta == {"u_fixed": 0.6}

    def test_segment_dict(self):
        data = realize(semrep_of("party.nst")).segments[1].to_dict()
        assert data["phase"] == 0
        assert data["provenance"] == "RuleBased"
        assert data["trace"] == sorted(data["trace"])
        assert data["backend"] is None


class TestFormatAttribute:
    @pytest.mark.parametrize(
        "name,value,audience,text",
        [
            ("percentEnd", 3.61, Audience.LAYPERSON, "3.61"),
            ("percentEnd", 100.0, Audience.EXPERT, "100"),
            ("tacticCount", 3, Audience.EXPERT, "three"),
            ("slope", -0.2, Audience.EXPERT, "-0.2"),
            ("slope", -0.2, Audience.LAYPERSON, "-0.20"),
            ("combined", True, Audience.EXPERT, "true"),
        ],
    )
    def test_format(self, name, value, audience, text):
        assert format_attribute(name, value, audience) == text
