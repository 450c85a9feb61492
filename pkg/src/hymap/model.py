"""Typed cognitive-map graph model.

A map holds exactly one product node plus customer, feature, and concept
nodes, wired by directed edges whose kind is derived from the endpoint
kinds:

    Product  -> Feature   offering
    Customer -> Concept   perception
    Feature  -> Concept   influence (signed +/-/o)
    Concept  -> Concept   influence (signed +/-/o)

Every other ordered kind pair is illegal. The edge set must stay acyclic.
Mutating operations are atomic: they either apply fully or raise without
touching the map.
"""

from __future__ import annotations

import re
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from typing import Dict, List, Optional, Tuple


class NodeKind(str, Enum):
    PRODUCT = "product"
    CUSTOMER = "customer"
    FEATURE = "feature"
    CONCEPT = "concept"


class EdgeKind(str, Enum):
    OFFERING = "offering"
    INFLUENCE = "influence"
    PERCEPTION = "perception"


class Sign(str, Enum):
    POSITIVE = "+"
    NEGATIVE = "-"
    NEUTRAL = "o"


# Legal (src kind, dst kind) pairs and the edge kind each one implies.
EDGE_KIND_BY_ENDPOINTS: Dict[Tuple[NodeKind, NodeKind], EdgeKind] = {
    (NodeKind.PRODUCT, NodeKind.FEATURE): EdgeKind.OFFERING,
    (NodeKind.CUSTOMER, NodeKind.CONCEPT): EdgeKind.PERCEPTION,
    (NodeKind.FEATURE, NodeKind.CONCEPT): EdgeKind.INFLUENCE,
    (NodeKind.CONCEPT, NodeKind.CONCEPT): EdgeKind.INFLUENCE,
}

# Canonical ordering used by serializers and renderers.
KIND_ORDER = [NodeKind.PRODUCT, NodeKind.CUSTOMER, NodeKind.FEATURE, NodeKind.CONCEPT]
EDGE_KIND_ORDER = [EdgeKind.OFFERING, EdgeKind.INFLUENCE, EdgeKind.PERCEPTION]

CONNECTIVE_HAS = "has"
CONNECTIVE_WOULD_LIKE = "would like to"


def derive_edge_kind(src_kind: NodeKind, dst_kind: NodeKind) -> Optional[EdgeKind]:
    """Edge kind implied by the endpoint kinds, or None for an illegal pair."""
    return EDGE_KIND_BY_ENDPOINTS.get((src_kind, dst_kind))


def collapse_ws(text: str) -> str:
    """Trim and collapse internal whitespace runs to single spaces."""
    return re.sub(r"\s+", " ", text).strip()


def normalize_label(text: str) -> str:
    """Label form used for uniqueness checks: casefolded, whitespace-collapsed."""
    return collapse_ws(text).casefold()


# ---------------------------------------------------------------------------
# Errors
# ---------------------------------------------------------------------------


class MapError(Exception):
    """Base class for model violations. `code` is a stable identifier."""

    code = "MapError"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class EmptyLabel(MapError):
    code = "EmptyLabel"


class DuplicateLabel(MapError):
    code = "DuplicateLabel"


class SecondProduct(MapError):
    code = "SecondProduct"


class UnknownId(MapError):
    code = "UnknownId"


class ProductRemoval(MapError):
    code = "ProductRemoval"


class IllegalEndpointPair(MapError):
    code = "IllegalEndpointPair"


class MissingSign(MapError):
    code = "MissingSign"


class UnexpectedSign(MapError):
    code = "UnexpectedSign"


class DuplicateEdge(MapError):
    code = "DuplicateEdge"


class SelfLoop(MapError):
    code = "SelfLoop"


class WouldCreateCycle(MapError):
    code = "WouldCreateCycle"

    def __init__(self, message: str, path: List[str]):
        super().__init__(message)
        self.path = path  # node ids, first == last


# ---------------------------------------------------------------------------
# Nodes, edges, diagnostics
# ---------------------------------------------------------------------------


@dataclass
class MapNode:
    id: str
    kind: NodeKind
    label: str
    notes: Optional[str] = None

    def to_dict(self) -> dict:
        return {"id": self.id, "kind": self.kind.value, "label": self.label, "notes": self.notes}


@dataclass
class MapEdge:
    id: str
    src: str
    dst: str
    kind: EdgeKind
    sign: Optional[Sign] = None
    saturated: bool = False
    rationale: Optional[str] = None
    # Perception edges only: verb connecting customer and problem in the
    # generated statement ("has" or "would like to").
    connective: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "src": self.src,
            "dst": self.dst,
            "kind": self.kind.value,
            "sign": self.sign.value if self.sign else None,
            "saturated": self.saturated,
            "rationale": self.rationale,
            "connective": self.connective,
        }


SEVERITY_ERROR = "error"
SEVERITY_WARNING = "warning"


@dataclass
class Diagnostic:
    severity: str
    code: str
    subjects: List[str]
    message: str

    def to_dict(self) -> dict:
        return {
            "severity": self.severity,
            "code": self.code,
            "subjects": list(self.subjects),
            "message": self.message,
        }

    def sort_key(self) -> tuple:
        rank = 0 if self.severity == SEVERITY_ERROR else 1
        return (rank, self.code, tuple(self.subjects))


# ---------------------------------------------------------------------------
# The map
# ---------------------------------------------------------------------------


class CognitiveMap:
    """A founder's cognitive map: one product, typed nodes, acyclic typed edges."""

    def __init__(self, title: str = "", map_id: Optional[str] = None):
        self.id = map_id or f"map-{uuid.uuid4().hex[:12]}"
        self.title = title
        self.nodes: Dict[str, MapNode] = {}
        self.edges: Dict[str, MapEdge] = {}
        self.created = datetime.now(timezone.utc)
        self.modified = self.created
        self._kind_counters: Dict[NodeKind, int] = {k: 0 for k in NodeKind}
        self._edge_counter = 0

    # -- lookups ------------------------------------------------------------

    def node(self, node_id: str) -> MapNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownId(f"no node with id {node_id!r}") from None

    def edge(self, edge_id: str) -> MapEdge:
        try:
            return self.edges[edge_id]
        except KeyError:
            raise UnknownId(f"no edge with id {edge_id!r}") from None

    def nodes_of_kind(self, kind: NodeKind) -> List[MapNode]:
        return [n for n in self.nodes.values() if n.kind == kind]

    def product(self) -> Optional[MapNode]:
        products = self.nodes_of_kind(NodeKind.PRODUCT)
        return products[0] if products else None

    def find_node(self, kind: NodeKind, label: str) -> Optional[MapNode]:
        wanted = normalize_label(label)
        for n in self.nodes.values():
            if n.kind == kind and normalize_label(n.label) == wanted:
                return n
        return None

    def find_nodes_by_label(self, label: str) -> List[MapNode]:
        wanted = normalize_label(label)
        return [n for n in self.nodes.values() if normalize_label(n.label) == wanted]

    def edges_from(self, node_id: str) -> List[MapEdge]:
        return [e for e in self.edges.values() if e.src == node_id]

    def edges_to(self, node_id: str) -> List[MapEdge]:
        return [e for e in self.edges.values() if e.dst == node_id]

    # -- mutations ----------------------------------------------------------

    def add_node(self, kind: NodeKind, label: str, notes: Optional[str] = None,
                 node_id: Optional[str] = None) -> str:
        label = collapse_ws(label)
        if not label:
            raise EmptyLabel("node label must be non-empty")
        if kind == NodeKind.PRODUCT and self.product() is not None:
            raise SecondProduct("map already has a product node")
        if self.find_node(kind, label) is not None:
            raise DuplicateLabel(f"a {kind.value} labelled {label!r} already exists")
        if node_id is None:
            self._kind_counters[kind] += 1
            node_id = f"{kind.value}-{self._kind_counters[kind]}"
        elif node_id in self.nodes:
            raise DuplicateLabel(f"node id {node_id!r} already exists")
        self.nodes[node_id] = MapNode(id=node_id, kind=kind, label=label, notes=notes)
        self._touch()
        return node_id

    def add_edge(self, src: str, dst: str, sign: Optional[Sign] = None,
                 rationale: Optional[str] = None, connective: Optional[str] = None,
                 edge_id: Optional[str] = None) -> str:
        src_node = self.node(src)
        dst_node = self.node(dst)
        if src == dst:
            raise SelfLoop(f"edge endpoints must differ ({src_node.label!r})")
        kind = derive_edge_kind(src_node.kind, dst_node.kind)
        if kind is None:
            raise IllegalEndpointPair(
                f"no relationship may connect a {src_node.kind.value} to a {dst_node.kind.value}"
            )
        if kind == EdgeKind.INFLUENCE and sign is None:
            raise MissingSign(
                f"influence {src_node.label!r} -> {dst_node.label!r} requires a sign"
            )
        if kind != EdgeKind.INFLUENCE and sign is not None:
            raise UnexpectedSign(f"{kind.value} edges carry no sign")
        for e in self.edges.values():
            if e.src == src and e.dst == dst:
                raise DuplicateEdge(
                    f"edge {src_node.label!r} -> {dst_node.label!r} already exists"
                )
        cycle = self._path(dst, src)
        if cycle is not None:
            path = [src] + cycle
            labels = " -> ".join(self.nodes[i].label for i in path)
            raise WouldCreateCycle(f"edge would close the cycle {labels}", path)
        if connective is None and kind == EdgeKind.PERCEPTION:
            connective = CONNECTIVE_HAS
        if connective is not None and kind != EdgeKind.PERCEPTION:
            raise MapError("connective applies to perception edges only")
        if edge_id is None:
            self._edge_counter += 1
            edge_id = f"edge-{self._edge_counter}"
        elif edge_id in self.edges:
            raise DuplicateEdge(f"edge id {edge_id!r} already exists")
        self.edges[edge_id] = MapEdge(
            id=edge_id, src=src, dst=dst, kind=kind, sign=sign,
            rationale=rationale, connective=connective,
        )
        self._touch()
        return edge_id

    def remove_element(self, element_id: str) -> None:
        if element_id in self.edges:
            del self.edges[element_id]
            self._touch()
            return
        node = self.node(element_id)
        if node.kind == NodeKind.PRODUCT:
            raise ProductRemoval("the product node cannot be removed; delete the map instead")
        for e in [e for e in self.edges.values() if element_id in (e.src, e.dst)]:
            del self.edges[e.id]
        del self.nodes[element_id]
        self._touch()

    def substitute_node(self, node_id: str, new_label: str) -> None:
        node = self.node(node_id)
        new_label = collapse_ws(new_label)
        if not new_label:
            raise EmptyLabel("node label must be non-empty")
        existing = self.find_node(node.kind, new_label)
        if existing is not None and existing.id != node_id:
            raise DuplicateLabel(f"a {node.kind.value} labelled {new_label!r} already exists")
        node.label = new_label
        self._touch()

    def _touch(self) -> None:
        self.modified = datetime.now(timezone.utc)

    # -- traversal ----------------------------------------------------------

    def _path(self, start: str, goal: str) -> Optional[List[str]]:
        """Directed path start..goal along existing edges, or None."""
        if start == goal:
            return [start]
        stack = [(start, [start])]
        seen = {start}
        while stack:
            current, path = stack.pop()
            for e in self.edges.values():
                if e.src != current or e.dst in seen:
                    continue
                if e.dst == goal:
                    return path + [goal]
                seen.add(e.dst)
                stack.append((e.dst, path + [e.dst]))
        return None

    def find_cycle(self) -> Optional[List[str]]:
        """Any directed cycle as a node-id path (first == last), or None."""
        adjacency: Dict[str, List[str]] = {nid: [] for nid in self.nodes}
        for e in self.edges.values():
            if e.src in adjacency and e.dst in self.nodes:
                adjacency[e.src].append(e.dst)
        WHITE, GREY, BLACK = 0, 1, 2
        color = {nid: WHITE for nid in self.nodes}
        parent: Dict[str, str] = {}

        def visit(nid: str) -> Optional[List[str]]:
            color[nid] = GREY
            for nxt in adjacency[nid]:
                if color[nxt] == GREY:
                    path = [nxt, nid]
                    cur = nid
                    while cur != nxt:
                        cur = parent[cur]
                        path.append(cur)
                    path.reverse()
                    return path
                if color[nxt] == WHITE:
                    parent[nxt] = nid
                    found = visit(nxt)
                    if found:
                        return found
            color[nid] = BLACK
            return None

        for nid in self.nodes:
            if color[nid] == WHITE:
                found = visit(nid)
                if found:
                    return found
        return None

    # -- validation ---------------------------------------------------------

    def validate(self) -> List[Diagnostic]:
        """Re-derive every structural rule from scratch.

        Errors mark invariant violations; warnings mark structural gaps
        (orphans, unreachable concepts, silent customers) that the
        elicitation process should revisit but that do not block.
        """
        out: List[Diagnostic] = []

        def err(code: str, subjects: List[str], message: str) -> None:
            out.append(Diagnostic(SEVERITY_ERROR, code, subjects, message))

        products = self.nodes_of_kind(NodeKind.PRODUCT)
        if not products:
            err("MissingProduct", [], "map has no product node")
        elif len(products) > 1:
            err("MultipleProducts", [n.id for n in products], "map has more than one product node")

        seen_labels: Dict[Tuple[NodeKind, str], str] = {}
        for n in self.nodes.values():
            if not collapse_ws(n.label):
                err("EmptyLabel", [n.id], f"node {n.id} has an empty label")
                continue
            key = (n.kind, normalize_label(n.label))
            if key in seen_labels:
                err("DuplicateLabel", [seen_labels[key], n.id],
                    f"duplicate {n.kind.value} label {n.label!r}")
            else:
                seen_labels[key] = n.id

        seen_pairs: Dict[Tuple[str, str], str] = {}
        for e in self.edges.values():
            if e.src not in self.nodes or e.dst not in self.nodes:
                err("DanglingEdge", [e.id], f"edge {e.id} references a missing node")
                continue
            if e.src == e.dst:
                err("SelfLoop", [e.id], f"edge {e.id} is a self-loop")
                continue
            expected = derive_edge_kind(self.nodes[e.src].kind, self.nodes[e.dst].kind)
            if expected is None:
                err("IllegalEndpointPair", [e.id],
                    f"edge {e.id} connects {self.nodes[e.src].kind.value} to "
                    f"{self.nodes[e.dst].kind.value}")
                continue
            if e.kind != expected:
                err("WrongEdgeKind", [e.id],
                    f"edge {e.id} is tagged {e.kind.value}, endpoints imply {expected.value}")
            if e.kind == EdgeKind.INFLUENCE and e.sign is None:
                err("MissingSign", [e.id], f"influence edge {e.id} has no sign")
            if e.kind != EdgeKind.INFLUENCE and e.sign is not None:
                err("UnexpectedSign", [e.id], f"{e.kind.value} edge {e.id} carries a sign")
            pair = (e.src, e.dst)
            if pair in seen_pairs:
                err("DuplicateEdge", [seen_pairs[pair], e.id],
                    f"duplicate edge between {self.nodes[e.src].label!r} and "
                    f"{self.nodes[e.dst].label!r}")
            else:
                seen_pairs[pair] = e.id

        cycle = self.find_cycle()
        if cycle is not None:
            labels = " -> ".join(self.nodes[i].label for i in cycle)
            err("CycleDetected", cycle, f"cycle: {labels}")

        out.extend(self._gap_warnings())
        out.sort(key=lambda d: d.sort_key())
        return out

    def _gap_warnings(self) -> List[Diagnostic]:
        # The reachability warnings only make sense once the map uses the
        # full notation; a bare product-plus-concepts sketch stays silent.
        collected: List[Diagnostic] = []

        def collect(code: str, subjects: List[str], message: str) -> None:
            collected.append(Diagnostic(SEVERITY_WARNING, code, subjects, message))

        features = self.nodes_of_kind(NodeKind.FEATURE)
        customers = self.nodes_of_kind(NodeKind.CUSTOMER)

        for f in features:
            has_offering_in = any(e.kind == EdgeKind.OFFERING for e in self.edges_to(f.id))
            has_influence_out = any(e.kind == EdgeKind.INFLUENCE for e in self.edges_from(f.id))
            if not has_offering_in and not has_influence_out:
                collect("OrphanFeature", [f.id],
                        f"feature {f.label!r} has no offering and influences nothing")

        if features or customers:
            reachable = set()
            frontier = [f.id for f in features]
            while frontier:
                current = frontier.pop()
                for e in self.edges_from(current):
                    if e.kind == EdgeKind.INFLUENCE and e.dst not in reachable:
                        reachable.add(e.dst)
                        frontier.append(e.dst)
            for c in self.nodes_of_kind(NodeKind.CONCEPT):
                perceived = any(e.kind == EdgeKind.PERCEPTION for e in self.edges_to(c.id))
                if c.id not in reachable and not perceived:
                    collect("UnreachableConcept", [c.id],
                            f"concept {c.label!r} is not influenced by any feature "
                            f"and no customer perceives it")

        for cu in customers:
            if not any(e.kind == EdgeKind.PERCEPTION for e in self.edges_from(cu.id)):
                collect("CustomerWithoutProblems", [cu.id],
                        f"customer {cu.label!r} perceives no problem")

        return collected

    # -- equality and copies ------------------------------------------------

    def structural_key(self) -> tuple:
        """Id-independent shape: node and edge multisets by kind/label/sign."""
        node_key = sorted((n.kind.value, n.label) for n in self.nodes.values())
        edge_key = sorted(
            (e.kind.value, self.nodes[e.src].label, self.nodes[e.dst].label,
             e.sign.value if e.sign else "")
            for e in self.edges.values()
        )
        return (tuple(node_key), tuple(edge_key))

    def structurally_equal(self, other: "CognitiveMap") -> bool:
        return self.structural_key() == other.structural_key()

    def clone(self) -> "CognitiveMap":
        """Independent deep copy sharing nothing with the original."""
        twin = CognitiveMap(title=self.title, map_id=self.id)
        twin.created = self.created
        twin.modified = self.modified
        for n in self.nodes.values():
            twin.nodes[n.id] = MapNode(id=n.id, kind=n.kind, label=n.label, notes=n.notes)
        for e in self.edges.values():
            twin.edges[e.id] = MapEdge(
                id=e.id, src=e.src, dst=e.dst, kind=e.kind, sign=e.sign,
                saturated=e.saturated, rationale=e.rationale, connective=e.connective,
            )
        twin._kind_counters = dict(self._kind_counters)
        twin._edge_counter = self._edge_counter
        return twin

    def sync_counters(self) -> None:
        """Bump id counters past any externally assigned ids (JSON import)."""
        for n in self.nodes.values():
            m = re.fullmatch(rf"{n.kind.value}-(\d+)", n.id)
            if m:
                self._kind_counters[n.kind] = max(self._kind_counters[n.kind], int(m.group(1)))
        for e in self.edges.values():
            m = re.fullmatch(r"edge-(\d+)", e.id)
            if m:
                self._edge_counter = max(self._edge_counter, int(m.group(1)))
