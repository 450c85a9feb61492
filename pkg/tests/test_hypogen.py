"""Hypothesis templating, regeneration, and experiment ordering."""

from __future__ import annotations

import re

from hymap import hypogen
from hymap.analysis import HypothesisKind
from hymap.model import CognitiveMap, EdgeKind, NodeKind, Sign
from hymap.registry import AssessmentRegistry, Evidence, EvidenceSource, RiskLevel, Status

from conftest import random_maps


def normalize(text: str) -> str:
    """Case/article/punctuation-insensitive comparison form; folds has/have."""
    words = re.sub(r"[^a-z0-9 ]", " ", text.lower()).split()
    return " ".join(
        "has" if w == "have" else w for w in words if w not in {"a", "an", "the"}
    )


def tiny_map(*, product="app") -> CognitiveMap:
    m = CognitiveMap()
    m.add_node(NodeKind.PRODUCT, product)
    return m


class TestTemplates:
    def test_offering_template(self):
        m = tiny_map()
        f = m.add_node(NodeKind.FEATURE, "search of nearby people with similar interests")
        m.add_edge(m.product().id, f)
        (hyp,) = hypogen.generate(m)
        assert hyp.kind == HypothesisKind.PRODUCT
        assert normalize(hyp.generated_text) == normalize(
            "the team developing app is capable of implementing the search of "
            "nearby people with similar interests"
        )

    def test_influence_negative_template(self):
        m = tiny_map()
        f = m.add_node(NodeKind.FEATURE, "search of nearby people with similar interests")
        c = m.add_node(NodeKind.CONCEPT, "difficulty to find people with similar interests")
        m.add_edge(m.product().id, f)
        m.add_edge(f, c, sign=Sign.NEGATIVE)
        value = [h for h in hypogen.generate(m) if h.kind == HypothesisKind.VALUE]
        assert normalize(value[0].generated_text) == normalize(
            "the search of nearby people with similar interests decreases the "
            "difficulty to find people with similar interests"
        )

    def test_perception_plural_subject(self):
        m = tiny_map()
        cu = m.add_node(NodeKind.CUSTOMER, "sports enthusiasts")
        co = m.add_node(NodeKind.CONCEPT, "difficulty to access sports gear")
        m.add_edge(cu, co)
        (hyp,) = hypogen.generate(m)
        assert hyp.kind == HypothesisKind.PROBLEM
        assert hyp.generated_text == "sports enthusiasts have difficulty to access sports gear"

    def test_perception_singular_subject(self):
        m = tiny_map()
        cu = m.add_node(NodeKind.CUSTOMER, "patient")
        co = m.add_node(NodeKind.CONCEPT, "difficulty to find professionals")
        m.add_edge(cu, co)
        (hyp,) = hypogen.generate(m)
        assert hyp.generated_text == "patient has difficulty to find professionals"

    def test_perception_would_like_to(self):
        m = tiny_map()
        cu = m.add_node(NodeKind.CUSTOMER, "patient")
        co = m.add_node(NodeKind.CONCEPT, "earn rewards for referring friends")
        m.add_edge(cu, co, connective="would like to")
        (hyp,) = hypogen.generate(m)
        assert hyp.generated_text == "patient would like to earn rewards for referring friends"

    def test_neutral_verb(self):
        m = tiny_map()
        a = m.add_node(NodeKind.CONCEPT, "transparent network")
        b = m.add_node(NodeKind.CONCEPT, "user satisfaction")
        m.add_edge(a, b, sign=Sign.NEUTRAL)
        (hyp,) = hypogen.generate(m)
        assert hyp.generated_text.endswith("does not affect user satisfaction")

    def test_verb_mapping_exhaustive(self):
        verbs = {
            Sign.POSITIVE: "increases",
            Sign.NEGATIVE: "decreases",
            Sign.NEUTRAL: "does not affect",
        }
        for sign, verb in verbs.items():
            m = tiny_map()
            a = m.add_node(NodeKind.CONCEPT, "a")
            b = m.add_node(NodeKind.CONCEPT, "b")
            m.add_edge(a, b, sign=sign)
            (hyp,) = hypogen.generate(m)
            assert hyp.generated_text == f"a {verb} b"


class TestGenerate:
    def test_bijection_on_corpus(self, corpus_cases):
        for fixture in corpus_cases.values():
            hyps = hypogen.generate(fixture.map)
            assert len(hyps) == len(fixture.map.edges)
            assert sorted(h.edge_id for h in hyps) == sorted(fixture.map.edges)
            assert len({h.id for h in hyps}) == len(hyps)

    def test_kind_counts_match_edge_kinds(self, corpus_cases):
        cmap = corpus_cases["case_g"].map
        hyps = hypogen.generate(cmap)
        by_kind = {k: 0 for k in HypothesisKind}
        for h in hyps:
            by_kind[h.kind] += 1
        edges = list(cmap.edges.values())
        assert by_kind[HypothesisKind.PRODUCT] == sum(
            1 for e in edges if e.kind == EdgeKind.OFFERING)
        assert by_kind[HypothesisKind.VALUE] == sum(
            1 for e in edges if e.kind == EdgeKind.INFLUENCE)
        assert by_kind[HypothesisKind.PROBLEM] == sum(
            1 for e in edges if e.kind == EdgeKind.PERCEPTION)

    def test_deterministic(self, corpus_cases):
        cmap = corpus_cases["case_e"].map
        first = [(h.id, h.generated_text) for h in hypogen.generate(cmap)]
        second = [(h.id, h.generated_text) for h in hypogen.generate(cmap)]
        assert first == second

    def test_random_maps_bijection(self):
        for cmap in random_maps(seed=7, count=60):
            hyps = hypogen.generate(cmap)
            assert sorted(h.edge_id for h in hyps) == sorted(cmap.edges)


class TestRegenerate:
    def build(self):
        m = tiny_map()
        a = m.add_node(NodeKind.CONCEPT, "fun")
        b = m.add_node(NodeKind.CONCEPT, "productivity")
        m.add_edge(a, b, sign=Sign.POSITIVE)
        return m, a

    def test_rename_marks_stale_and_keeps_edit(self):
        m, a = self.build()
        hyps = hypogen.generate(m)
        hyps[0].edited_text = "having fun at work boosts productivity"
        m.substitute_node(a, "making the development work more fun")
        again = hypogen.regenerate(m, hyps)
        assert len(again) == 1
        assert again[0].id == hyps[0].id
        assert again[0].stale is True
        assert again[0].edited_text == "having fun at work boosts productivity"
        assert "making the development work more fun" in again[0].generated_text

    def test_removed_edge_drops_hypothesis(self):
        m, _ = self.build()
        hyps = hypogen.generate(m)
        m.remove_element(hyps[0].edge_id)
        assert hypogen.regenerate(m, hyps) == []

    def test_untouched_map_identity(self, corpus_cases):
        cmap = corpus_cases["case_c"].map
        hyps = hypogen.generate(cmap)
        again = hypogen.regenerate(cmap, hyps)
        assert [h.to_dict() for h in again] == [h.to_dict() for h in hyps]

    def test_new_edge_gets_fresh_hypothesis(self):
        m, a = self.build()
        hyps = hypogen.generate(m)
        c = m.add_node(NodeKind.CONCEPT, "company results")
        m.add_edge(a, c, sign=Sign.POSITIVE)
        again = hypogen.regenerate(m, hyps)
        assert len(again) == 2
        fresh = [h for h in again if h.id != hyps[0].id]
        assert len(fresh) == 1 and fresh[0].stale is False


def assessed_registry(pairs):
    registry = AssessmentRegistry()
    for hyp_id, status, risk in pairs:
        evidence = [Evidence(source=EvidenceSource.OWN_EXPERIENCE)] \
            if status == Status.VALIDATED else []
        registry.assess(hyp_id, status, risk=risk, evidence=evidence)
    return registry


class TestPrioritize:
    def build(self):
        m = tiny_map()
        cu = m.add_node(NodeKind.CUSTOMER, "patient")
        f = m.add_node(NodeKind.FEATURE, "search")
        co = m.add_node(NodeKind.CONCEPT, "difficulty to find professionals")
        m.add_edge(cu, co)                      # problem
        m.add_edge(f, co, sign=Sign.NEGATIVE)   # value
        m.add_edge(m.product().id, f)           # product
        return m, hypogen.generate(m)

    def test_unvalidated_problem_value_product_order(self):
        m, hyps = self.build()
        ordered = hypogen.prioritize(hyps, AssessmentRegistry())
        assert [h.kind for h in ordered] == [
            HypothesisKind.PROBLEM, HypothesisKind.VALUE, HypothesisKind.PRODUCT]

    def test_validated_sinks_below_unvalidated_of_any_kind(self):
        m, hyps = self.build()
        problem = next(h for h in hyps if h.kind == HypothesisKind.PROBLEM)
        registry = assessed_registry([(problem.id, Status.VALIDATED, RiskLevel.HIGH)])
        ordered = hypogen.prioritize(hyps, registry)
        assert ordered[0].kind == HypothesisKind.VALUE      # unvalidated first
        assert ordered[-1].id == problem.id                 # validated sinks

    def test_risk_descending_within_kind(self):
        m = tiny_map()
        cu = m.add_node(NodeKind.CUSTOMER, "c")
        a = m.add_node(NodeKind.CONCEPT, "a")
        b = m.add_node(NodeKind.CONCEPT, "b")
        m.add_edge(cu, a)
        m.add_edge(cu, b)
        hyps = hypogen.generate(m)
        registry = assessed_registry([
            (hyps[0].id, Status.NOT_VALIDATED, RiskLevel.MEDIUM),
            (hyps[1].id, Status.NOT_VALIDATED, RiskLevel.HIGH),
        ])
        ordered = hypogen.prioritize(hyps, registry)
        assert [h.id for h in ordered] == [hyps[1].id, hyps[0].id]

    def test_stability_on_equal_keys(self):
        m = tiny_map()
        cu = m.add_node(NodeKind.CUSTOMER, "c")
        ids = [m.add_node(NodeKind.CONCEPT, f"c{i}") for i in range(4)]
        for cid in ids:
            m.add_edge(cu, cid)
        hyps = hypogen.generate(m)
        ordered = hypogen.prioritize(hyps, AssessmentRegistry())
        assert [h.id for h in ordered] == [h.id for h in hyps]

    def test_unassessed_treated_as_high_risk(self):
        m = tiny_map()
        cu = m.add_node(NodeKind.CUSTOMER, "c")
        a = m.add_node(NodeKind.CONCEPT, "a")
        b = m.add_node(NodeKind.CONCEPT, "b")
        m.add_edge(cu, a)   # will stay unassessed
        m.add_edge(cu, b)   # medium risk
        hyps = hypogen.generate(m)
        registry = assessed_registry([(hyps[1].id, Status.NOT_VALIDATED, RiskLevel.MEDIUM)])
        ordered = hypogen.prioritize(hyps, registry)
        assert ordered[0].id == hyps[0].id


class TestExports:
    def test_markdown_columns(self, corpus_cases):
        text = hypogen.to_markdown(hypogen.generate(corpus_cases["case_d"].map))
        header = text.splitlines()[0]
        assert header == "| id | kind | statement | status | risk |"
        assert text.count("\n") == 2 + 4  # header, divider, one row per edge

    def test_dicts_include_status(self, corpus_cases):
        fixture = corpus_cases["case_g"]
        rows = hypogen.to_dicts(hypogen.generate(fixture.map), fixture.registry)
        assert {r["status"] for r in rows} <= {"validated", "not_validated"}
