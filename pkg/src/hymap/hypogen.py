"""Compiles map relationships into testable hypothesis statements.

Every edge yields exactly one hypothesis (and vice versa):

    offering   "the team developing <product> is capable of implementing <feature>"
    influence  "<source> increases|decreases|does not affect <problem>"
    perception "<customer> has|have|would like to <problem>"

Generated text is plain template substitution over the stored labels; it
is regenerated deterministically and never auto-smoothed. Human wording
fixes belong in `edited_text`, which survives regeneration. When the
underlying labels drift, the hypothesis is flagged stale rather than
silently rewritten.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional

from .analysis import HYPOTHESIS_KIND_BY_EDGE, HypothesisKind, require_valid
from .model import (
    CONNECTIVE_HAS,
    CognitiveMap,
    EdgeKind,
    MapEdge,
    Sign,
)
from .registry import AssessmentRegistry, RiskLevel, Status

INFLUENCE_VERBS = {
    Sign.POSITIVE: "increases",
    Sign.NEGATIVE: "decreases",
    Sign.NEUTRAL: "does not affect",
}

KIND_PRIORITY = {
    HypothesisKind.PROBLEM: 0,
    HypothesisKind.VALUE: 1,
    HypothesisKind.PRODUCT: 2,
}

RISK_PRIORITY = {
    RiskLevel.HIGH: 0,
    RiskLevel.MEDIUM: 1,
    RiskLevel.LOW: 2,
}


@dataclass
class Hypothesis:
    id: str
    edge_id: str
    kind: HypothesisKind
    generated_text: str
    edited_text: Optional[str] = None
    stale: bool = False

    @property
    def statement(self) -> str:
        return self.edited_text or self.generated_text

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "edge_id": self.edge_id,
            "kind": self.kind.value,
            "generated_text": self.generated_text,
            "edited_text": self.edited_text,
            "stale": self.stale,
        }


def hypothesis_id_for_edge(edge_id: str) -> str:
    return f"hyp-{edge_id}"


def _has_form(subject: str) -> str:
    # Naive number agreement: a plural-looking customer segment gets "have".
    last = subject.split()[-1].lower() if subject.split() else subject
    if last.endswith("s") and not last.endswith("ss"):
        return "have"
    return "has"


def statement_for_edge(cmap: CognitiveMap, edge: MapEdge) -> str:
    """Template text for one relationship; a pure function of labels and sign."""
    src = cmap.nodes[edge.src].label
    dst = cmap.nodes[edge.dst].label
    if edge.kind == EdgeKind.OFFERING:
        return f"the team developing {src} is capable of implementing {dst}"
    if edge.kind == EdgeKind.INFLUENCE:
        return f"{src} {INFLUENCE_VERBS[edge.sign]} {dst}"
    connective = edge.connective or CONNECTIVE_HAS
    if connective == CONNECTIVE_HAS:
        connective = _has_form(src)
    return f"{src} {connective} {dst}"


def generate(cmap: CognitiveMap) -> List[Hypothesis]:
    """One hypothesis per edge, in edge creation order."""
    require_valid(cmap)
    out = []
    for edge in cmap.edges.values():
        out.append(Hypothesis(
            id=hypothesis_id_for_edge(edge.id),
            edge_id=edge.id,
            kind=HYPOTHESIS_KIND_BY_EDGE[edge.kind],
            generated_text=statement_for_edge(cmap, edge),
        ))
    return out


def regenerate(cmap: CognitiveMap, previous: Iterable[Hypothesis]) -> List[Hypothesis]:
    """Refresh hypotheses after map edits.

    Surviving edges keep their hypothesis id and edited_text; a changed
    generated text marks the hypothesis stale. Hypotheses of removed
    edges drop out; new edges gain fresh hypotheses.
    """
    by_edge: Dict[str, Hypothesis] = {h.edge_id: h for h in previous}
    fresh = generate(cmap)
    for hyp in fresh:
        old = by_edge.get(hyp.edge_id)
        if old is None:
            continue
        hyp.edited_text = old.edited_text
        hyp.stale = old.stale or old.generated_text != hyp.generated_text
    return fresh


def prioritize(hypotheses: Iterable[Hypothesis],
               registry: Optional[AssessmentRegistry] = None) -> List[Hypothesis]:
    """Experimentation order: everything unvalidated first.

    Within each group: problem before value before product, riskier first
    (unassessed counts as high risk), then creation order. Stable sort.
    """
    items = list(hypotheses)

    def key(indexed):
        position, hyp = indexed
        assessment = registry.current(hyp.id) if registry else None
        validated = 1 if assessment and assessment.status == Status.VALIDATED else 0
        risk = RISK_PRIORITY.get(assessment.risk, 0) if assessment and assessment.risk else 0
        return (validated, KIND_PRIORITY[hyp.kind], risk, position)

    return [h for _, h in sorted(enumerate(items), key=key)]


# ---------------------------------------------------------------------------
# Exports
# ---------------------------------------------------------------------------


def to_dicts(hypotheses: Iterable[Hypothesis],
             registry: Optional[AssessmentRegistry] = None) -> List[dict]:
    rows = []
    for hyp in hypotheses:
        row = hyp.to_dict()
        assessment = registry.current(hyp.id) if registry else None
        row["status"] = assessment.status.value if assessment else Status.UNASSESSED.value
        row["risk"] = assessment.risk.value if assessment and assessment.risk else None
        rows.append(row)
    return rows


def to_markdown(hypotheses: Iterable[Hypothesis],
                registry: Optional[AssessmentRegistry] = None) -> str:
    lines = [
        "| id | kind | statement | status | risk |",
        "| --- | --- | --- | --- | --- |",
    ]
    for row in to_dicts(hypotheses, registry):
        statement = row["edited_text"] or row["generated_text"]
        risk = row["risk"] or "-"
        lines.append(
            f"| {row['id']} | {row['kind']} | {statement} | {row['status']} | {risk} |"
        )
    return "\n".join(lines) + "\n"
