"""Diagram output: DOT snapshot, shape mapping, SVG bands, layout JSON."""

from __future__ import annotations

import re

from hymap import dsl, render
from hymap.analysis import assign_layers
from hymap.model import CognitiveMap, NodeKind, Sign
from hymap.render import RenderOptions

from conftest import random_maps

CASE_D_DOT = """\
digraph cognitive_map {
  rankdir=TB;
  "n0" [shape=ellipse, label="NetFix"];
  "n1" [shape=box, label="network efficiency"];
  "n2" [shape=box, label="transparent network"];
  "n3" [shape=box, label="user satisfaction"];
  "n4" [shape=box, label="willingness to react"];
  { rank=same; "n0"; }
  { rank=same; "n1"; "n2"; }
  { rank=same; "n4"; }
  { rank=same; "n3"; }
  "n1" -> "n3" [label="+"];
  "n2" -> "n3" [label="/o/"];
  "n2" -> "n4" [label="+"];
  "n4" -> "n3" [label="+"];
}
"""

NO_LEGEND = RenderOptions(include_legend=False)

DOT_NODE_RE = re.compile(r'^\s*"(n\d+)" \[(shape=[^\]]+), label="((?:[^"\\]|\\.)*)"\];')


def dot_node_statements(dot: str):
    return [m.groups() for line in dot.splitlines()
            if (m := DOT_NODE_RE.match(line))]


def chain_map() -> CognitiveMap:
    m = CognitiveMap()
    m.add_node(NodeKind.PRODUCT, "p")
    f = m.add_node(NodeKind.FEATURE, "f")
    c = m.add_node(NodeKind.CONCEPT, "c")
    m.add_edge(m.product().id, f)
    m.add_edge(f, c, sign=Sign.NEGATIVE)
    return m


class TestDot:
    def test_case_d_snapshot(self, corpus_cases):
        assert render.to_dot(corpus_cases["case_d"].map, NO_LEGEND) == CASE_D_DOT

    def test_one_statement_per_node_with_mandated_shape(self, corpus_cases):
        expected_shape = {
            "product": "shape=ellipse",
            "customer": "shape=circle",
            "feature": "shape=box, style=dashed",
            "concept": "shape=box",
        }
        for fixture in corpus_cases.values():
            dot = render.to_dot(fixture.map, NO_LEGEND)
            statements = dot_node_statements(dot)
            assert len(statements) == len(fixture.map.nodes)
            by_label = {label: shape for _, shape, label in statements}
            for node in fixture.map.nodes.values():
                assert by_label[node.label.replace("\\", "\\\\").replace('"', '\\"')] \
                    == expected_shape[node.kind.value]

    def test_influence_labels_and_unlabeled_other_edges(self, corpus_cases):
        dot = render.to_dot(corpus_cases["case_e"].map, NO_LEGEND)
        edge_lines = [l for l in dot.splitlines() if "->" in l]
        cmap = corpus_cases["case_e"].map
        influence = sum(1 for e in cmap.edges.values() if e.kind.value == "influence")
        labeled = [l for l in edge_lines if "label=" in l]
        assert len(edge_lines) == len(cmap.edges)
        assert len(labeled) == influence
        assert all(re.search(r'\[label="(\+|-|/o/)"\]', l) for l in labeled)

    def test_neutral_sign_rendered_as_slash_o(self, corpus_cases):
        dot = render.to_dot(corpus_cases["case_d"].map, NO_LEGEND)
        assert '[label="/o/"]' in dot

    def test_legend_on_by_default(self, corpus_cases):
        dot = render.to_dot(corpus_cases["case_d"].map)
        assert "cluster_legend" in dot
        assert "cluster_legend" not in render.to_dot(corpus_cases["case_d"].map, NO_LEGEND)

    def test_byte_identical_for_structurally_equal_maps(self, corpus_cases):
        cmap = corpus_cases["case_e"].map
        twin = dsl.parse(dsl.serialize(cmap)).map  # same structure, new ids
        assert render.to_dot(twin, NO_LEGEND) == render.to_dot(cmap, NO_LEGEND)

    def test_quotes_in_labels_escaped(self):
        m = CognitiveMap()
        m.add_node(NodeKind.PRODUCT, 'the "fast" app')
        dot = render.to_dot(m, NO_LEGEND)
        assert 'label="the \\"fast\\" app"' in dot


class TestLayout:
    def test_bands_match_assign_layers(self, corpus_cases):
        for fixture in corpus_cases.values():
            assignment = assign_layers(fixture.map)
            computed = render.layout(fixture.map)
            for node in computed["nodes"]:
                assert node["band"] == assignment.layers[node["id"]]
            assert computed["band_count"] == assignment.band_count

    def test_keeps_real_ids_and_edges(self, corpus_cases):
        cmap = corpus_cases["case_g"].map
        computed = render.layout(cmap)
        assert {n["id"] for n in computed["nodes"]} == set(cmap.nodes)
        assert {e["id"] for e in computed["edges"]} == set(cmap.edges)
        assert computed["version"] == 1

    def test_case_d_coordinates_pinned(self, corpus_cases):
        # frozen from the first computation; guards layout drift
        computed = render.layout(corpus_cases["case_d"].map)
        by_label = {n["label"]: (n["band"], n["order"]) for n in computed["nodes"]}
        assert by_label == {
            "NetFix": (0, 0),
            "network efficiency": (2, 0),
            "transparent network": (2, 1),
            "willingness to react": (3, 0),
            "user satisfaction": (4, 0),
        }
        assert computed["band_count"] == 5

    def test_deterministic_across_runs(self, corpus_cases):
        cmap = corpus_cases["case_f"].map
        assert render.layout(cmap) == render.layout(cmap)

    def test_orders_are_contiguous(self):
        for cmap in random_maps(seed=31, count=30):
            computed = render.layout(cmap)
            per_band = {}
            for node in computed["nodes"]:
                per_band.setdefault(node["band"], []).append(node["order"])
            for orders in per_band.values():
                assert sorted(orders) == list(range(len(orders)))


class TestSvg:
    def test_three_band_chain(self):
        svg = render.to_svg(chain_map(), NO_LEGEND)
        ys = set(re.findall(r'<ellipse[^>]* cy="(\d+)"', svg))
        ys |= set(re.findall(r'<rect x="[^"]*" y="(\d+)"', svg))
        assert len(ys) == 3

    def test_case_d_five_bands(self, corpus_cases):
        computed = render.layout(corpus_cases["case_d"].map)
        assert computed["band_count"] == 5
        svg = render.to_svg(corpus_cases["case_d"].map, NO_LEGEND)
        assert f'height="{5 * render.BAND_HEIGHT}"' in svg  # canvas spans 5 bands
        centers = {int(m) for m in re.findall(r'cy="(\d+)"', svg)}
        rows = {int(m) for m in re.findall(r'<rect[^>]* y="(\d+)"', svg)}
        occupied = centers | {r + 25 for r in rows}
        assert len(occupied) == 4  # the features band stays empty here

    def test_every_node_and_edge_present(self, corpus_cases):
        cmap = corpus_cases["case_e"].map
        svg = render.to_svg(cmap, NO_LEGEND)
        assert svg.count('<g class="node') == len(cmap.nodes)
        assert svg.count('<line class="edge') == len(cmap.edges)

    def test_shape_elements_by_kind(self, corpus_cases):
        cmap = corpus_cases["case_e"].map
        svg = render.to_svg(cmap, NO_LEGEND)
        customers = len(cmap.nodes_of_kind(NodeKind.CUSTOMER))
        features = len(cmap.nodes_of_kind(NodeKind.FEATURE))
        concepts = len(cmap.nodes_of_kind(NodeKind.CONCEPT))
        assert svg.count("<circle") == customers
        assert svg.count("<ellipse") == 1
        assert svg.count("stroke-dasharray") == features
        assert svg.count("<rect") == features + concepts

    def test_deterministic_for_structurally_equal_maps(self, corpus_cases):
        cmap = corpus_cases["case_e"].map
        twin = dsl.parse(dsl.serialize(cmap)).map
        assert render.to_svg(twin, NO_LEGEND) == render.to_svg(cmap, NO_LEGEND)

    def test_self_contained_with_legend(self, corpus_cases):
        svg = render.to_svg(corpus_cases["case_d"].map)
        assert svg.startswith("<svg")
        assert '<g class="legend">' in svg
        assert "does not affect" in svg
