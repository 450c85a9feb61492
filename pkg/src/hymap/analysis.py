"""Layered view of a cognitive map and structural gap reporting.

The map template stacks horizontal bands: the product on top, its
features below, then one or more problem bands, and finally the customer
band. Concepts take the longest-path layer below everything that
influences them, so every offering/influence arrow points strictly
downward; perception arrows climb back up from the customer band.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional

from .model import (
    CognitiveMap,
    EdgeKind,
    MapEdge,
    MapError,
    NodeKind,
    SEVERITY_ERROR,
)

PRODUCT_BAND = 0
FEATURE_BAND = 1
FIRST_PROBLEM_BAND = 2


class InvalidMap(MapError):
    code = "InvalidMap"

    def __init__(self, message: str, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or []


class HypothesisKind(str, Enum):
    PROBLEM = "problem"
    VALUE = "value"
    PRODUCT = "product"


# Edge kind fully determines the hypothesis kind: offerings are claims the
# team can build the feature, influences are value claims about problems,
# perceptions are claims that a customer actually feels the problem.
HYPOTHESIS_KIND_BY_EDGE = {
    EdgeKind.OFFERING: HypothesisKind.PRODUCT,
    EdgeKind.INFLUENCE: HypothesisKind.VALUE,
    EdgeKind.PERCEPTION: HypothesisKind.PROBLEM,
}


@dataclass
class LayerAssignment:
    layers: Dict[str, int]
    band_count: int
    customer_band: Optional[int]

    def band_role(self, index: int) -> str:
        if index == PRODUCT_BAND:
            return "product"
        if index == FEATURE_BAND:
            return "features"
        if self.customer_band is not None and index == self.customer_band:
            return "customers"
        return "problems"

    def bands(self) -> List[dict]:
        counts: Dict[int, int] = {}
        for layer in self.layers.values():
            counts[layer] = counts.get(layer, 0) + 1
        return [
            {"index": i, "role": self.band_role(i), "count": counts.get(i, 0)}
            for i in range(self.band_count)
        ]

    def to_dict(self) -> dict:
        return {
            "layers": dict(self.layers),
            "band_count": self.band_count,
            "customer_band": self.customer_band,
            "bands": self.bands(),
        }


def require_valid(cmap: CognitiveMap) -> None:
    diagnostics = cmap.validate()
    errors = [d for d in diagnostics if d.severity == SEVERITY_ERROR]
    if errors:
        raise InvalidMap(
            "map has validation errors: " + "; ".join(d.message for d in errors),
            diagnostics=errors,
        )


def assign_layers(cmap: CognitiveMap) -> LayerAssignment:
    """Longest-path band per node.

    Product 0, features 1, each concept one below its deepest influence
    predecessor (perceived-only roots sit at band 2), all customers in a
    single terminal band.
    """
    require_valid(cmap)
    layers: Dict[str, int] = {}
    product = cmap.product()
    if product is not None:
        layers[product.id] = PRODUCT_BAND
    for feature in cmap.nodes_of_kind(NodeKind.FEATURE):
        layers[feature.id] = FEATURE_BAND

    influence_preds: Dict[str, List[str]] = {}
    for e in cmap.edges.values():
        if e.kind == EdgeKind.INFLUENCE:
            influence_preds.setdefault(e.dst, []).append(e.src)

    memo: Dict[str, int] = {}

    def concept_layer(node_id: str) -> int:
        if node_id in memo:
            return memo[node_id]
        preds = influence_preds.get(node_id, [])
        depths = []
        for p in preds:
            kind = cmap.nodes[p].kind
            if kind == NodeKind.FEATURE:
                depths.append(FEATURE_BAND)
            elif kind == NodeKind.CONCEPT:
                depths.append(concept_layer(p))
        layer = 1 + max(depths) if depths else FIRST_PROBLEM_BAND
        memo[node_id] = layer
        return layer

    concepts = cmap.nodes_of_kind(NodeKind.CONCEPT)
    for c in concepts:
        layers[c.id] = concept_layer(c.id)

    customers = cmap.nodes_of_kind(NodeKind.CUSTOMER)
    customer_band = None
    if customers:
        deepest = max((layers[c.id] for c in concepts), default=FEATURE_BAND)
        customer_band = deepest + 1
        for cu in customers:
            layers[cu.id] = customer_band

    band_count = max(layers.values(), default=0) + 1 if layers else 0
    return LayerAssignment(layers=layers, band_count=band_count, customer_band=customer_band)


def categorize(cmap: CognitiveMap, edge: MapEdge) -> HypothesisKind:
    if edge.id not in cmap.edges:
        raise MapError(f"edge {edge.id!r} is not part of this map")
    return HYPOTHESIS_KIND_BY_EDGE[edge.kind]


@dataclass
class StructureReport:
    band_counts: Dict[str, int]
    problem_band_sizes: List[int]
    orphan_features: List[dict]
    unreachable_concepts: List[dict]
    customers_without_problems: List[dict]
    deepening_candidates: List[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "band_counts": dict(self.band_counts),
            "problem_band_sizes": list(self.problem_band_sizes),
            "orphan_features": list(self.orphan_features),
            "unreachable_concepts": list(self.unreachable_concepts),
            "customers_without_problems": list(self.customers_without_problems),
            "deepening_candidates": list(self.deepening_candidates),
        }

    def to_text(self) -> str:
        lines = ["Structure report", "----------------"]
        counts = self.band_counts
        lines.append(
            f"elements: {counts.get('product', 0)} product, "
            f"{counts.get('features', 0)} features, "
            f"{counts.get('problems', 0)} problem concepts, "
            f"{counts.get('customers', 0)} customers"
        )
        if self.problem_band_sizes:
            sizes = ", ".join(str(s) for s in self.problem_band_sizes)
            lines.append(f"problem bands (top to bottom): {sizes}")

        def section(title: str, rows: List[dict], render) -> None:
            if not rows:
                return
            lines.append("")
            lines.append(title)
            for row in rows:
                lines.append(f"  - {render(row)}")

        section("orphan features (no offering, influence nothing):",
                self.orphan_features, lambda r: r["label"])
        section("concepts no feature reaches and no customer perceives:",
                self.unreachable_concepts, lambda r: r["label"])
        section("customers with no stated problem:",
                self.customers_without_problems, lambda r: r["label"])
        section("relationships still open to how?/why? deepening:",
                self.deepening_candidates, lambda r: f"{r['id']}: {r['statement']}")
        if len(lines) == 3 + (1 if self.problem_band_sizes else 0):
            lines.append("no structural gaps found")
        return "\n".join(lines) + "\n"


def structure_report(cmap: CognitiveMap) -> StructureReport:
    """Band counts plus everything the next session should revisit."""
    from .hypogen import statement_for_edge  # local import avoids a module cycle

    diagnostics = cmap.validate()
    has_errors = any(d.severity == SEVERITY_ERROR for d in diagnostics)

    band_counts = {"product": 0, "features": 0, "problems": 0, "customers": 0}
    problem_band_sizes: List[int] = []
    if not has_errors:
        assignment = assign_layers(cmap)
        per_band: Dict[int, int] = {}
        for node_id, layer in assignment.layers.items():
            per_band[layer] = per_band.get(layer, 0) + 1
            band_counts[assignment.band_role(layer)] = (
                band_counts.get(assignment.band_role(layer), 0) + 1
            )
        problem_band_sizes = [
            per_band.get(i, 0)
            for i in range(FIRST_PROBLEM_BAND, assignment.band_count)
            if assignment.band_role(i) == "problems"
        ]

    def rows_for(code: str) -> List[dict]:
        rows = []
        for d in diagnostics:
            if d.code != code:
                continue
            for nid in d.subjects:
                node = cmap.nodes.get(nid)
                if node:
                    rows.append({"id": nid, "label": node.label})
        return rows

    candidates = [
        {"id": e.id, "statement": statement_for_edge(cmap, e)}
        for e in cmap.edges.values()
        if not e.saturated
    ]

    return StructureReport(
        band_counts=band_counts,
        problem_band_sizes=problem_band_sizes,
        orphan_features=rows_for("OrphanFeature"),
        unreachable_concepts=rows_for("UnreachableConcept"),
        customers_without_problems=rows_for("CustomerWithoutProblems"),
        deepening_candidates=candidates,
    )
