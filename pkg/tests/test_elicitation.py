"""Guided session protocol: phases, answers, atomicity, replay."""

from __future__ import annotations

import pytest

from hymap.elicitation import (
    AnswerShape,
    BudgetExceeded,
    ElicitationSession,
    InvalidDecomposition,
    Phase,
    PhaseError,
    ReplayMismatch,
    SessionDone,
    ShapeMismatch,
    StalePrompt,
    UnknownLabel,
    read_log,
)
from hymap.corpus import case_d, case_d_script
from hymap.model import EdgeKind, MapError, NodeKind


def answer(session, payload):
    prompt = session.next_prompt()
    return prompt, session.answer(prompt.id, payload)


def drive(session, payloads):
    for payload in payloads:
        answer(session, payload)


def hotel_session() -> ElicitationSession:
    """A small complete run: hotel-software matchmaking startup."""
    session = ElicitationSession(title="")
    drive(session, [
        "HotelMatch",
        ["hotel owners"],
        ["difficulty to choose software", "time spent comparing vendors"],
        ["needs questionnaire"],
        [{"aspect": "difficulty to choose software", "sign": "-"},
         {"aspect": "time spent comparing vendors", "sign": "-"}],
    ])
    return session


class TestProtocolOrder:
    def test_start_prompt_is_the_naming_question(self):
        session = ElicitationSession(title="")
        prompt = session.next_prompt()
        assert prompt.text == "What is the product/solution name?"
        assert prompt.shape == AnswerShape.TEXT
        assert session.phase == Phase.NAMING

    def test_naming_answer_creates_product_and_advances(self):
        session = ElicitationSession()
        prompt, deltas = answer(session, "HotelMatch")
        assert deltas[0]["op"] == "add_node"
        assert deltas[0]["node"]["kind"] == "product"
        assert session.phase == Phase.CUSTOMERS
        assert session.next_prompt().text == \
            "What are the customers targeted by the solution?"

    def test_aspects_iterate_customers_in_creation_order(self):
        session = ElicitationSession()
        drive(session, ["P", ["alpha users", "beta users"]])
        first = session.next_prompt()
        assert session.phase == Phase.ASPECTS
        assert '"alpha users"' in first.text
        session.answer(first.id, ["slow tooling"])
        second = session.next_prompt()
        assert '"beta users"' in second.text

    def test_feature_links_elicit_signs_per_link(self):
        session = hotel_session()
        assert session.phase == Phase.DEEPENING
        edges = list(session.map.edges.values())
        kinds = sorted(e.kind.value for e in edges)
        assert kinds == ["influence", "influence", "offering",
                         "perception", "perception"]

    def test_deepening_prompt_has_statement_and_probe(self):
        session = hotel_session()
        prompt = session.next_prompt()
        assert prompt.shape == AnswerShape.EDGE_ANNOTATION
        assert "can you create a simple experiment to evaluate" in prompt.text
        assert prompt.subjects[0] in session.map.edges

    def test_all_edges_saturated_skips_deepening(self):
        session = ElicitationSession()
        drive(session, ["P", [], []])
        # no edges at all: deepening and cross-linking collapse into review
        assert session.phase == Phase.REVIEW

    def test_review_confirm_then_finish(self):
        session = hotel_session()
        while session.phase == Phase.DEEPENING:
            answer(session, {"saturated": True})
        assert session.phase == Phase.REVIEW
        answer(session, {"coherent": True})
        assert session.next_prompt() is None
        result = session.finish()
        assert session.phase == Phase.DONE
        assert len(result.hypotheses) == len(result.map.edges)

    def test_finish_with_unsaturated_edges_warns(self):
        session = hotel_session()
        while session.phase == Phase.DEEPENING:
            answer(session, {"skip": True})
        answer(session, {"coherent": True})
        result = session.finish()
        warning = result.warnings[0]
        assert warning["code"] == "UnsaturatedEdges"
        assert len(warning["edges"]) == 5

    def test_finish_before_review_is_phase_error(self):
        session = hotel_session()
        with pytest.raises(PhaseError):
            session.finish()

    def test_done_session_is_immutable(self):
        session = hotel_session()
        while session.phase == Phase.DEEPENING:
            answer(session, {"saturated": True})
        answer(session, {"coherent": True})
        session.finish()
        with pytest.raises(SessionDone):
            session.next_prompt()
        with pytest.raises(SessionDone):
            session.finish()


class TestDeepening:
    def test_intermediate_concept_replaces_edge(self):
        session = ElicitationSession()
        drive(session, ["mentor", [], ["gamification"]])
        assert session.phase == Phase.DEEPENING
        answer(session, {"saturated": True})  # the offering edge
        assert session.phase == Phase.REVIEW
        # review: add the productivity concept and the direct influence edge,
        # which hands the new relationship back to deepening
        answer(session, {"commands": [
            {"op": "add_concept", "label": "developers productivity"},
            {"op": "add_edge", "src": "gamification",
             "dst": "developers productivity", "sign": "+"},
        ]})
        assert session.phase == Phase.DEEPENING
        direct = self._direct_edge_id(session)
        assert session.next_prompt().subjects == [direct]
        prompt, deltas = answer(
            session, {"concept": "making the development work more fun",
                      "signs": ["+", "+"]})
        assert direct not in session.map.edges
        labels = {session.map.nodes[e.src].label: session.map.nodes[e.dst].label
                  for e in session.map.edges.values()
                  if e.kind == EdgeKind.INFLUENCE}
        assert labels["gamification"] == "making the development work more fun"
        assert labels["making the development work more fun"] == "developers productivity"
        # both replacement edges come back around for deepening
        remaining = []
        while session.phase == Phase.DEEPENING:
            remaining.append(session.next_prompt().subjects[0])
            answer(session, {"saturated": True})
        assert len(remaining) == 2
        # and the new concept is offered for cross-linking
        assert session.phase == Phase.CROSS_LINKING

    @staticmethod
    def _direct_edge_id(session):
        for e in session.map.edges.values():
            if (e.kind == EdgeKind.INFLUENCE
                    and session.map.nodes[e.src].label == "gamification"):
                return e.id
        return None

    def test_offering_cannot_be_decomposed(self):
        session = ElicitationSession()
        drive(session, ["P", [], ["search"]])
        assert session.phase == Phase.DEEPENING
        prompt = session.next_prompt()
        with pytest.raises(InvalidDecomposition):
            session.answer(prompt.id, {"concept": "x", "signs": ["+"]})

    def test_perception_decomposition_keeps_connective(self):
        session = ElicitationSession()
        drive(session, ["P", ["patients"], [{"aspect": "slow care", "connective": "has"}], []])
        assert session.phase == Phase.DEEPENING
        prompt = session.next_prompt()
        session.answer(prompt.id, {"concept": "long waiting lists", "signs": ["+"]})
        kinds = sorted(e.kind.value for e in session.map.edges.values())
        assert kinds == ["influence", "perception"]
        perception = next(e for e in session.map.edges.values()
                          if e.kind == EdgeKind.PERCEPTION)
        assert session.map.nodes[perception.dst].label == "long waiting lists"

    def test_existing_label_rejected_as_intermediate(self):
        session = hotel_session()
        prompt = session.next_prompt()  # first queued edge is a perception
        with pytest.raises(InvalidDecomposition):
            session.answer(prompt.id, {"concept": "time spent comparing vendors",
                                       "signs": ["+"]})

    def test_each_answer_saturates_or_grows(self):
        session = hotel_session()
        while session.phase == Phase.DEEPENING:
            nodes_before = len(session.map.nodes)
            saturated_before = sum(e.saturated for e in session.map.edges.values())
            prompt = session.next_prompt()
            if len(session.map.nodes) < 8:
                session.answer(prompt.id, {"concept": f"why {nodes_before}",
                                           "signs": ["+", "+"]}
                               if session.map.edges[prompt.subjects[0]].kind
                               == EdgeKind.INFLUENCE else {"saturated": True})
            else:
                session.answer(prompt.id, {"saturated": True})
            grew = len(session.map.nodes) > nodes_before
            saturated = sum(e.saturated for e in session.map.edges.values()) \
                > saturated_before
            assert grew or saturated

    def test_budget_enforced(self):
        session = ElicitationSession(node_budget=4)
        drive(session, ["P", [], ["f"]])
        # the map holds 2 nodes; a review batch pushing past 4 fails atomically
        while session.phase == Phase.DEEPENING:
            answer(session, {"saturated": True})
        before = session.map.structural_key()
        with pytest.raises(BudgetExceeded):
            answer(session, {"commands": [
                {"op": "add_concept", "label": "c1"},
                {"op": "add_concept", "label": "c2"},
                {"op": "add_concept", "label": "c3"},
            ]})
        assert session.map.structural_key() == before


class TestCrossLinking:
    def test_new_concept_links_to_existing(self):
        session = hotel_session()
        prompt = session.next_prompt()
        # decompose the first influence edge to mint a new concept
        while session.map.edges[prompt.subjects[0]].kind != EdgeKind.INFLUENCE:
            answer(session, {"saturated": True})
            prompt = session.next_prompt()
        session.answer(prompt.id, {"concept": "vendor overload", "signs": ["+", "-"]})
        while session.phase == Phase.DEEPENING:
            answer(session, {"saturated": True})
        assert session.phase == Phase.CROSS_LINKING
        prompt = session.next_prompt()
        assert prompt.shape == AnswerShape.NODE_CHOICE
        assert "vendor overload" in prompt.text
        edges_before = len(session.map.edges)
        session.answer(prompt.id, [{"concept": "time spent comparing vendors",
                                    "sign": "+"}])
        assert len(session.map.edges) == edges_before + 1
        assert session.phase == Phase.REVIEW

    def test_unknown_target_rejected(self):
        session = hotel_session()
        prompt = session.next_prompt()
        while session.map.edges[prompt.subjects[0]].kind != EdgeKind.INFLUENCE:
            answer(session, {"saturated": True})
            prompt = session.next_prompt()
        session.answer(prompt.id, {"concept": "fatigue", "signs": ["+", "+"]})
        while session.phase == Phase.DEEPENING:
            answer(session, {"saturated": True})
        prompt = session.next_prompt()
        with pytest.raises(UnknownLabel):
            session.answer(prompt.id, [{"concept": "ghost", "sign": "+"}])


class TestAtomicityAndErrors:
    def test_stale_prompt_leaves_session_unchanged(self):
        session = ElicitationSession()
        answer(session, "P")
        key = session.map.structural_key()
        with pytest.raises(StalePrompt):
            session.answer("p1", ["customers"])  # p1 was the naming prompt
        assert session.map.structural_key() == key
        assert session.phase == Phase.CUSTOMERS

    def test_failed_review_command_batch_is_atomic(self):
        session = ElicitationSession()
        drive(session, ["P", [], []])
        key = session.map.structural_key()
        with pytest.raises(MapError):
            answer(session, {"commands": [
                {"op": "add_concept", "label": "a"},
                {"op": "add_concept", "label": "b"},
                {"op": "add_edge", "src": "a", "dst": "b", "sign": "+"},
                {"op": "add_edge", "src": "b", "dst": "a", "sign": "+"},  # cycle
            ]})
        assert session.map.structural_key() == key

    def test_shape_mismatch(self):
        session = ElicitationSession()
        prompt = session.next_prompt()
        with pytest.raises(ShapeMismatch):
            session.answer(prompt.id, ["not", "a", "string"])

    def test_naming_cannot_be_skipped(self):
        session = ElicitationSession()
        prompt = session.next_prompt()
        with pytest.raises(ShapeMismatch):
            session.answer(prompt.id, {"skip": True})

    def test_review_substitute_command(self):
        session = ElicitationSession()
        drive(session, ["P", [], []])
        answer(session, {"commands": [{"op": "add_concept", "label": "fun"}]})
        answer(session, {"commands": [
            {"op": "substitute", "target": "fun",
             "label": "making the development work more fun"}]})
        assert session.map.find_node(
            NodeKind.CONCEPT, "making the development work more fun") is not None


class TestReplay:
    def test_case_d_script_replays_to_fixture(self):
        events = case_d_script()
        session, result = ElicitationSession.replay(events)
        assert result is not None
        assert session.map.structurally_equal(case_d().map)
        assert len(result.hypotheses) == 4

    def test_replay_mismatch_detected(self):
        events = case_d_script()
        events[1]["prompt_id"] = "p999"
        with pytest.raises(ReplayMismatch):
            ElicitationSession.replay(events)

    def test_replay_is_deterministic(self):
        events = case_d_script()
        one, _ = ElicitationSession.replay(events)
        two, _ = ElicitationSession.replay(events)
        assert one.map.structurally_equal(two.map)
        assert [e.get("prompt_id") for e in one.events] == \
               [e.get("prompt_id") for e in two.events]

    def test_log_round_trips_through_jsonl(self):
        events = case_d_script()
        session, _ = ElicitationSession.replay(events)
        parsed = read_log(session.log_jsonl())
        replayed, result = ElicitationSession.replay(parsed)
        assert result is not None
        assert replayed.map.structurally_equal(session.map)

    def test_perception_edges_come_from_aspect_answers(self):
        # the aspect phase is the sole source of perception edges here, so
        # the recorded aspect items and the final perception set must agree
        session = hotel_session()
        aspect_items = [
            item
            for event in session.events
            if event.get("event") == "answer" and isinstance(event["payload"], list)
            and all(isinstance(i, str) for i in event["payload"])
            for item in event["payload"]
            if "difficulty" in item or "time" in item
        ]
        perception = [e for e in session.map.edges.values()
                      if e.kind == EdgeKind.PERCEPTION]
        assert len(perception) == len(aspect_items) == 2
