"""Tests for the semantic annotator."""

from pathlib import Path

import pytest

from stratex.annotator import RoleKind, UnknownConstruct, annotate, slope_direction
from stratex.parser import parse_file, parse_template
from stratex.template import walk

DATA = Path(__file__).parent.parent / "stratex" / "data"


@pytest.fixture
def party():
    return parse_file(DATA / "party.nst")


@pytest.fixture
def bidding():
    return parse_file(DATA / "boulware-pareto.nst")


class TestAcceptanceRoles:
    def test_every_node_has_a_role(self, party):
        semrep = annotate(party)
        assert set(semrep.roles) == {path for path, _ in walk(party)}

    def test_time_phase_attributes(self, party):
        role = annotate(party)["phases[0]"]
        assert role.kind == RoleKind.TIME_PHASE
        assert role.attributes["percentStart"] == 0.0
        assert role.attributes["percentEnd"] == 3.61
        assert role.attributes["isInitial"] is True
        assert role.attributes["isFinal"] is False
        assert role.attributes["ordinal"] == "first"
        assert role.attributes["closing"] == ")"

    def test_final_phase_closes(self, party):
        role = annotate(party)["phases[1]"]
        assert role.attributes["isFinal"] is True
        assert role.attributes["closing"] == "]"
        assert role.attributes["percentEnd"] == 100.0

    def test_guard_bounds(self, party):
        semrep = annotate(party)
        assert semrep["phases[1].guard.lower"].attributes["bound"] == "start"
        assert semrep["phases[1].guard.upper"].attributes["bound"] == "end"

    def test_condition_roles(self, party):
        semrep = annotate(party)
        body = "phases[0].body"
        assert semrep[body].kind == RoleKind.ACCEPT_PREDICATE
        assert semrep[body].attributes == {"tacticCount": 2, "combined": True}
        assert semrep[f"{body}.lhs"].kind == RoleKind.OFFER_UTILITY
        assert semrep[f"{body}.lhs.args[0]"].kind == RoleKind.OFFER_UTILITY
        assert semrep[f"{body}.rhs"].kind == RoleKind.THRESHOLD_COMBINATOR
        assert semrep[f"{body}.rhs.args[1]"].kind == RoleKind.DYNAMIC_THRESHOLD

    def test_quantile_and_linear_term(self, party):
        semrep = annotate(party)
        quantile = semrep["phases[0].body.rhs.args[0]"]
        assert quantile.kind == RoleKind.CONCESSION_QUANTILE
        assert quantile.attributes["slopeDirection"] == "falling"
        assert semrep["phases[0].body.rhs.args[0].over"].kind == RoleKind.CONCESSION_QUANTILE
        linear = semrep["phases[0].body.rhs.args[0].args[0]"]
        assert linear.kind == RoleKind.LINEAR_TIME_TERM
        assert linear.attributes["form"] == "full"
        term = semrep["phases[0].body.rhs.args[0].args[0].terms[0].factors[1]"]
        assert term.kind == RoleKind.LINEAR_TIME_TERM

    def test_symbolic_fixed_threshold(self, party):
        role = annotate(party)["phases[1].body.rhs.args[0]"]
        assert role.kind == RoleKind.FIXED_THRESHOLD
        assert role.attributes == {"symbolic": True, "value": 0.6}

    def test_single_tactic_has_no_combinator(self):
        template = parse_template(
            'acceptance template "x" { phase [0, 1] { accept if U(offer) >= U(next_own) } }'
        )
        semrep = annotate(template)
        assert semrep["phases[0].body"].attributes["combined"] is False
        assert semrep["phases[0].body.rhs"].kind == RoleKind.OWN_PLANNED_BID_UTILITY
        assert semrep["phases[0].body.rhs.args[0]"].kind == RoleKind.OWN_PLANNED_BID_UTILITY

    def test_deterministic(self, party):
        assert annotate(party).to_dict() == annotate(party).to_dict()


class TestBiddingRoles:
    def test_every_node_has_a_role(self, bidding):
        semrep = annotate(bidding)
        assert set(semrep.roles) == {path for path, _ in walk(bidding)}

    def test_choice(self, bidding):
        role = annotate(bidding)["phases[1].body"]
        assert role.kind == RoleKind.BID_DIRECTIVE
        assert role.attributes["tactic"] == "choice"
        assert role.attributes["count"] == 2
        assert role.attributes["selectedCount"] == 1
        assert role.attributes["combined"] is False

    def test_boulware_parameters(self, bidding):
        semrep = annotate(bidding)
        option = semrep["phases[0].body.options[0]"]
        assert option.attributes["tactic"] == "boulware"
        assert option.attributes["e"] == 0.2
        assert option.attributes["u_min"] == 0.6
        assert semrep["phases[0].body.options[0].args[2]"].attributes["param"] == "u_max"

    def test_unselected_option(self, bidding):
        option = annotate(bidding)["phases[1].body.options[1]"]
        assert option.attributes["tactic"] == "random_above_threshold"
        assert option.attributes["selected"] is False
        assert option.attributes["priority"] == 1

    def test_pareto_weight_is_linear(self, bidding):
        semrep = annotate(bidding)
        weight = semrep["phases[1].body.options[0].args[0]"]
        assert weight.kind == RoleKind.LINEAR_TIME_TERM
        assert weight.attributes["slope"] == -0.4


class TestHelpers:
    @pytest.mark.parametrize(
        "slope,direction",
        [(0.0, "flat"), (1e-12, "flat"), (0.3, "rising"), (-0.1, "falling")],
    )
    def test_slope_direction(self, slope, direction):
        assert slope_direction(slope) == direction

    def test_unknown_construct_message(self):
        error = UnknownConstruct("phases[0].body", object())
        assert "phases[0].body" in str(error)
