/** Layered SVG map canvas rendered from the server's layout JSON. */

import type { LayoutEdge, LayoutNode, MapLayout } from './api.js';

const SVG_NS = 'http://www.w3.org/2000/svg';

const SIGN_LABELS: Record<string, string> = {
  '+': '+',
  '-': '-',
  o: '/o/',
};

function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | number> = {},
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    el.setAttribute(key, String(value));
  }
  return el;
}

function nodeShape(node: LayoutNode): SVGElement {
  const group = svgEl('g');
  group.setAttribute('class', `node node-${node.kind}`);
  group.dataset.nodeId = node.id;
  group.dataset.kind = node.kind;
  group.dataset.band = String(node.band);
  const { x, y } = node;
  let shape: SVGElement;
  if (node.kind === 'product') {
    shape = svgEl('ellipse', { cx: x, cy: y, rx: 88, ry: 30 });
  } else if (node.kind === 'customer') {
    shape = svgEl('circle', { cx: x, cy: y, r: 42 });
  } else {
    shape = svgEl('rect', { x: x - 85, y: y - 25, width: 170, height: 50 });
    if (node.kind === 'feature') {
      shape.setAttribute('stroke-dasharray', '6 4');
    }
  }
  shape.setAttribute('fill', 'white');
  shape.setAttribute('stroke', 'black');
  group.appendChild(shape);
  const text = svgEl('text', {
    x,
    y,
    'text-anchor': 'middle',
    'dominant-baseline': 'middle',
    'font-size': 11,
  });
  text.textContent =
    node.label.length > 30 ? `${node.label.slice(0, 29)}…` : node.label;
  const title = svgEl('title');
  title.textContent = node.label;
  group.appendChild(title);
  group.appendChild(text);
  return group;
}

function edgeLine(
  edge: LayoutEdge,
  positions: Map<string, LayoutNode>,
  onClick: (edgeId: string) => void,
): SVGElement {
  const from = positions.get(edge.src)!;
  const to = positions.get(edge.dst)!;
  const group = svgEl('g');
  group.setAttribute('class', `edge edge-${edge.kind}`);
  group.dataset.edgeId = edge.id;
  group.dataset.kind = edge.kind;
  if (edge.sign) group.dataset.sign = edge.sign;

  const dx = to.x - from.x;
  const dy = to.y - from.y;
  const len = Math.hypot(dx, dy) || 1;
  const trim = 34;
  const ex = to.x - (dx / len) * trim;
  const ey = to.y - (dy / len) * trim;

  const line = svgEl('line', {
    x1: from.x,
    y1: from.y,
    x2: ex.toFixed(1),
    y2: ey.toFixed(1),
    stroke: 'black',
    'marker-end': 'url(#arrowhead)',
  });
  if (edge.kind === 'perception') line.setAttribute('stroke-dasharray', '3 3');
  // generous invisible hit area so edges are clickable
  const hit = svgEl('line', {
    x1: from.x,
    y1: from.y,
    x2: to.x,
    y2: to.y,
    stroke: 'transparent',
    'stroke-width': 14,
  });
  hit.addEventListener('click', () => onClick(edge.id));
  group.appendChild(line);
  group.appendChild(hit);

  if (edge.sign) {
    const label = svgEl('text', {
      x: ((from.x + to.x) / 2).toFixed(1),
      y: ((from.y + to.y) / 2 - 4).toFixed(1),
      'text-anchor': 'middle',
      'font-size': 12,
    });
    label.setAttribute('class', 'sign-label');
    label.textContent = SIGN_LABELS[edge.sign] ?? edge.sign;
    group.appendChild(label);
  }
  return group;
}

export interface CanvasHandlers {
  onEdgeClick?: (edgeId: string) => void;
}

export function renderCanvas(
  root: HTMLElement,
  layout: MapLayout | null,
  handlers: CanvasHandlers = {},
): void {
  root.innerHTML = '';
  if (!layout || layout.nodes.length === 0) {
    const empty = document.createElement('p');
    empty.className = 'canvas-empty';
    empty.textContent = 'The map appears here as the session progresses.';
    root.appendChild(empty);
    return;
  }

  const width = Math.max(layout.width, 420);
  const height = layout.height;
  const bandHeight = layout.band_count > 0 ? height / layout.band_count : height;

  const svg = svgEl('svg', {
    width,
    height,
    viewBox: `0 0 ${width} ${height}`,
  });
  svg.setAttribute('class', 'map-canvas');
  svg.setAttribute('data-band-count', String(layout.band_count));

  const defs = svgEl('defs');
  const marker = svgEl('marker', {
    id: 'arrowhead',
    viewBox: '0 0 10 10',
    refX: 9,
    refY: 5,
    markerWidth: 7,
    markerHeight: 7,
    orient: 'auto-start-reverse',
  });
  marker.appendChild(svgEl('path', { d: 'M 0 0 L 10 5 L 0 10 z', fill: 'black' }));
  defs.appendChild(marker);
  svg.appendChild(defs);

  for (const band of layout.bands) {
    const stripe = svgEl('rect', {
      x: 0,
      y: band.index * bandHeight,
      width,
      height: bandHeight,
      fill: band.index % 2 === 0 ? '#fafafa' : '#f0f2f5',
    });
    stripe.setAttribute('class', 'band');
    stripe.setAttribute('data-band', String(band.index));
    stripe.setAttribute('data-role', band.role);
    svg.appendChild(stripe);
    const label = svgEl('text', {
      x: 8,
      y: band.index * bandHeight + 16,
      'font-size': 10,
      fill: '#888',
    });
    label.setAttribute('class', 'band-label');
    label.textContent = band.role;
    svg.appendChild(label);
  }

  const positions = new Map(layout.nodes.map((n) => [n.id, n]));
  const onClick = handlers.onEdgeClick ?? (() => undefined);
  for (const edge of layout.edges) {
    svg.appendChild(edgeLine(edge, positions, onClick));
  }
  for (const node of layout.nodes) {
    svg.appendChild(nodeShape(node));
  }
  root.appendChild(svg);
}

/** Detail panel for a clicked edge: its statement and saturation state. */
export function renderEdgeDetail(
  root: HTMLElement,
  layout: MapLayout | null,
  edgeId: string | null,
): void {
  root.innerHTML = '';
  if (!layout || !edgeId) return;
  const edge = layout.edges.find((e) => e.id === edgeId);
  if (!edge) return;
  const panel = document.createElement('div');
  panel.className = 'edge-detail';
  const statement = document.createElement('p');
  statement.className = 'edge-statement';
  statement.textContent = edge.statement;
  const saturation = document.createElement('p');
  saturation.className = 'edge-saturation';
  saturation.textContent = edge.saturated
    ? 'judged directly testable (saturated)'
    : 'still open to how?/why? deepening';
  panel.appendChild(statement);
  panel.appendChild(saturation);
  root.appendChild(panel);
}
