"""Diagram output in the map notation.

Shapes: customers are circles, the product an ellipse, features dashed
boxes, concepts solid boxes. Influence edges carry their sign as a label
(`+`, `-`, `/o/`); offering and perception edges are unlabeled. Bands come
from analysis.assign_layers — the renderer never recomputes them.

DOT and SVG output is canonical: nodes and edges are emitted in a fixed
sort order keyed on kind and label, so structurally equal maps render
byte-identically regardless of their internal ids. The layout JSON keeps
real node/edge ids because the UI links canvas elements back to them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional

from .analysis import LayerAssignment, assign_layers
from .model import CognitiveMap, EdgeKind, KIND_ORDER, MapEdge, NodeKind, Sign

LAYOUT_SCHEMA_VERSION = 1

BAND_HEIGHT = 120
SLOT_WIDTH = 200
LEGEND_WIDTH = 230

DOT_SHAPES = {
    NodeKind.PRODUCT: 'shape=ellipse',
    NodeKind.CUSTOMER: 'shape=circle',
    NodeKind.FEATURE: 'shape=box, style=dashed',
    NodeKind.CONCEPT: 'shape=box',
}

EDGE_LABELS = {
    Sign.POSITIVE: "+",
    Sign.NEGATIVE: "-",
    Sign.NEUTRAL: "/o/",
}


@dataclass
class RenderOptions:
    orientation: str = "product-top"  # or "product-bottom"
    include_legend: bool = True


def _label_key(label: str) -> tuple:
    return (label.casefold(), label)


def _canonical_nodes(cmap: CognitiveMap) -> List[str]:
    return [
        n.id
        for n in sorted(
            cmap.nodes.values(),
            key=lambda n: (KIND_ORDER.index(n.kind), _label_key(n.label)),
        )
    ]


def _canonical_edges(cmap: CognitiveMap) -> List[MapEdge]:
    order = {EdgeKind.OFFERING: 0, EdgeKind.INFLUENCE: 1, EdgeKind.PERCEPTION: 2}
    return sorted(
        cmap.edges.values(),
        key=lambda e: (order[e.kind],
                       _label_key(cmap.nodes[e.src].label),
                       _label_key(cmap.nodes[e.dst].label)),
    )


def _escape_dot(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


# ---------------------------------------------------------------------------
# DOT
# ---------------------------------------------------------------------------


def to_dot(cmap: CognitiveMap, options: Optional[RenderOptions] = None) -> str:
    options = options or RenderOptions()
    assignment = assign_layers(cmap)
    ordered = _canonical_nodes(cmap)
    names = {node_id: f"n{i}" for i, node_id in enumerate(ordered)}

    rankdir = "TB" if options.orientation == "product-top" else "BT"
    lines = ["digraph cognitive_map {", f"  rankdir={rankdir};"]

    if options.include_legend:
        lines.extend([
            "  subgraph cluster_legend {",
            '    label="legend";',
            '    "legend_customer" [shape=circle, label="customer"];',
            '    "legend_product" [shape=ellipse, label="product"];',
            '    "legend_feature" [shape=box, style=dashed, label="feature"];',
            '    "legend_concept" [shape=box, label="concept"];',
            '    "legend_signs" [shape=plaintext, '
            'label="+ increases   - decreases   /o/ does not affect"];',
            "  }",
        ])

    for node_id in ordered:
        node = cmap.nodes[node_id]
        lines.append(
            f'  "{names[node_id]}" [{DOT_SHAPES[node.kind]}, '
            f'label="{_escape_dot(node.label)}"];'
        )

    bands: Dict[int, List[str]] = {}
    for node_id in ordered:
        bands.setdefault(assignment.layers[node_id], []).append(names[node_id])
    for band in sorted(bands):
        members = "; ".join(f'"{name}"' for name in bands[band])
        lines.append(f"  {{ rank=same; {members}; }}")

    for edge in _canonical_edges(cmap):
        stmt = f'  "{names[edge.src]}" -> "{names[edge.dst]}"'
        if edge.kind == EdgeKind.INFLUENCE:
            stmt += f' [label="{EDGE_LABELS[edge.sign]}"]'
        lines.append(stmt + ";")

    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Layered layout
# ---------------------------------------------------------------------------


def _ordered_bands(cmap: CognitiveMap, assignment: LayerAssignment) -> Dict[int, List[str]]:
    """Within-band orders after barycenter crossing reduction (3 sweeps)."""
    bands: Dict[int, List[str]] = {}
    for node_id in _canonical_nodes(cmap):
        bands.setdefault(assignment.layers[node_id], []).append(node_id)

    neighbors: Dict[str, List[str]] = {nid: [] for nid in cmap.nodes}
    for e in cmap.edges.values():
        neighbors[e.src].append(e.dst)
        neighbors[e.dst].append(e.src)

    band_indexes = sorted(bands)
    position = {nid: i for band in band_indexes for i, nid in enumerate(bands[band])}

    def reorder(band: int, reference_above: bool) -> None:
        members = bands[band]
        centers = {}
        for nid in members:
            anchor_layers = [
                position[nb] for nb in neighbors[nid]
                if (assignment.layers[nb] < band) == reference_above
                and assignment.layers[nb] != band
            ]
            centers[nid] = (sum(anchor_layers) / len(anchor_layers)
                            if anchor_layers else float(position[nid]))
        members.sort(key=lambda nid: (centers[nid], _label_key(cmap.nodes[nid].label)))
        for i, nid in enumerate(members):
            position[nid] = i

    for sweep in range(3):
        if sweep % 2 == 0:
            for band in band_indexes[1:]:
                reorder(band, reference_above=True)
        else:
            for band in reversed(band_indexes[:-1]):
                reorder(band, reference_above=False)

    return bands


def layout(cmap: CognitiveMap, options: Optional[RenderOptions] = None) -> dict:
    """Abstract coordinates for the UI canvas. Keeps real node/edge ids."""
    from .hypogen import statement_for_edge  # local import avoids a module cycle

    options = options or RenderOptions()
    assignment = assign_layers(cmap)
    bands = _ordered_bands(cmap, assignment)

    flip = options.orientation == "product-bottom"
    nodes = []
    for band in sorted(bands):
        for order, node_id in enumerate(bands[band]):
            node = cmap.nodes[node_id]
            row = assignment.band_count - 1 - band if flip else band
            nodes.append({
                "id": node.id,
                "kind": node.kind.value,
                "label": node.label,
                "band": band,
                "order": order,
                "x": order * SLOT_WIDTH + SLOT_WIDTH // 2,
                "y": row * BAND_HEIGHT + BAND_HEIGHT // 2,
            })

    edges = [
        {
            "id": e.id,
            "src": e.src,
            "dst": e.dst,
            "kind": e.kind.value,
            "sign": e.sign.value if e.sign else None,
            "saturated": e.saturated,
            "statement": statement_for_edge(cmap, e),
        }
        for e in _canonical_edges(cmap)
    ]

    widest = max((len(members) for members in bands.values()), default=1)
    return {
        "version": LAYOUT_SCHEMA_VERSION,
        "band_count": assignment.band_count,
        "bands": assignment.bands(),
        "width": widest * SLOT_WIDTH,
        "height": assignment.band_count * BAND_HEIGHT,
        "nodes": nodes,
        "edges": edges,
    }


# ---------------------------------------------------------------------------
# SVG
# ---------------------------------------------------------------------------


def _escape_xml(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
            .replace('"', "&quot;"))


def _node_svg(kind: NodeKind, x: int, y: int, label: str) -> str:
    text = (f'<text x="{x}" y="{y}" text-anchor="middle" dominant-baseline="middle" '
            f'font-family="Helvetica" font-size="11">{_escape_xml(label)}</text>')
    common = 'fill="white" stroke="black"'
    if kind == NodeKind.PRODUCT:
        shape = f'<ellipse cx="{x}" cy="{y}" rx="88" ry="30" {common}/>'
    elif kind == NodeKind.CUSTOMER:
        shape = f'<circle cx="{x}" cy="{y}" r="42" {common}/>'
    elif kind == NodeKind.FEATURE:
        shape = (f'<rect x="{x - 85}" y="{y - 25}" width="170" height="50" '
                 f'{common} stroke-dasharray="6 4"/>')
    else:
        shape = f'<rect x="{x - 85}" y="{y - 25}" width="170" height="50" {common}/>'
    return f'<g class="node {kind.value}">{shape}{text}</g>'


def to_svg(cmap: CognitiveMap, options: Optional[RenderOptions] = None) -> str:
    options = options or RenderOptions()
    computed = layout(cmap, options)
    positions = {n["id"]: (n["x"], n["y"]) for n in computed["nodes"]}
    kind_of = {n["id"]: NodeKind(n["kind"]) for n in computed["nodes"]}

    width = computed["width"] + (LEGEND_WIDTH if options.include_legend else 0)
    height = max(computed["height"], 320 if options.include_legend else 0)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        '<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" '
        'markerWidth="7" markerHeight="7" orient="auto-start-reverse">'
        '<path d="M 0 0 L 10 5 L 0 10 z" fill="black"/></marker></defs>',
    ]

    for edge in computed["edges"]:
        x1, y1 = positions[edge["src"]]
        x2, y2 = positions[edge["dst"]]
        dx, dy = x2 - x1, y2 - y1
        length = math.hypot(dx, dy) or 1.0
        # stop short of the target shape so the arrowhead stays visible
        trim = 34.0
        ex = x2 - dx / length * trim
        ey = y2 - dy / length * trim
        parts.append(
            f'<line class="edge {edge["kind"]}" x1="{x1}" y1="{y1}" '
            f'x2="{ex:.1f}" y2="{ey:.1f}" stroke="black" marker-end="url(#arrow)"/>'
        )
        if edge["sign"]:
            label = EDGE_LABELS[Sign(edge["sign"])]
            mx, my = (x1 + x2) / 2, (y1 + y2) / 2
            parts.append(
                f'<text x="{mx:.1f}" y="{my:.1f}" text-anchor="middle" '
                f'font-family="Helvetica" font-size="12" fill="black" '
                f'class="sign">{_escape_xml(label)}</text>'
            )

    for node in computed["nodes"]:
        parts.append(_node_svg(kind_of[node["id"]], node["x"], node["y"], node["label"]))

    if options.include_legend:
        lx = computed["width"] + LEGEND_WIDTH // 2
        parts.append('<g class="legend">')
        parts.append(f'<text x="{lx}" y="24" text-anchor="middle" font-family="Helvetica" '
                     f'font-size="12" font-weight="bold">legend</text>')
        samples = [
            (NodeKind.CUSTOMER, "customer"),
            (NodeKind.PRODUCT, "product"),
            (NodeKind.FEATURE, "feature"),
            (NodeKind.CONCEPT, "concept"),
        ]
        y = 75
        for kind, label in samples:
            parts.append(_node_svg(kind, lx, y, label))
            y += 62
        parts.append(
            f'<text x="{lx}" y="{y + 6}" text-anchor="middle" font-family="Helvetica" '
            f'font-size="11">+ increases, - decreases, /o/ does not affect</text>'
        )
        parts.append("</g>")

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
