"""Render graphs and hypergraphs as Graphviz DOT or standalone SVG.

Both writers are pure functions of their input: numbers are printed with a
fixed precision and elements are emitted in canonical edge order, so the
same graph always produces the same bytes.
"""

from __future__ import annotations

import math
from collections import defaultdict
from collections.abc import Sequence
from xml.sax.saxutils import escape

from halograph.graph import INPUT, Edge, Graph
from halograph.halo import Hyperedge, Hypergraph

PALETTE = ("blue", "red", "green", "orange")
SVG_SIZE = 400
RADIUS = 150.0
NODE_RADIUS = 14.0


def mode_color(mode: int) -> str:
    return PALETTE[mode % len(PALETTE)]


def _split(obj: Graph | Hypergraph) -> tuple[Graph, tuple[Hyperedge, ...]]:
    if isinstance(obj, Hypergraph):
        return obj.base, obj.hyperedges
    return obj, ()


def _num(x: float) -> str:
    return f"{x:.2f}"


def to_dot(obj: Graph | Hypergraph, name: str = "G") -> str:
    """DOT text with one styled edge per colored edge.

    An edge whose two ends use different modes gets a two-tone color list;
    negative weights are dashed and the weight is printed as the label.
    Hyperedges become a point node joined to each of their vertices.
    """
    g, hyper = _split(obj)
    lines = [f"graph {name} {{", "  node [shape=circle];"]
    for v in range(g.vertex_count):
        shape = ' shape=box' if g.roles[v] == INPUT else ""
        lines.append(f'  {v} [label="{v}"{shape}];')
    for e in g.edges:
        if e.mode_u == e.mode_v:
            color = mode_color(e.mode_u)
        else:
            color = f"{mode_color(e.mode_u)};0.5:{mode_color(e.mode_v)}"
        style = "dashed" if e.weight < 0 else "solid"
        lines.append(f'  {e.u} -- {e.v} [color="{color}" style={style} '
                     f'label="{e.weight:.6g}" penwidth={_num(1 + abs(e.weight))}];')
    for j, h in enumerate(hyper):
        hid = f"h{j}"
        style = "dashed" if h.weight < 0 else "solid"
        lines.append(f'  {hid} [shape=point label="{h.weight:.6g}"];')
        for v, m in zip(h.vertices, h.modes):
            lines.append(f'  {hid} -- {v} [color="{mode_color(m)}" style={style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def circular_layout(n: int) -> list[tuple[float, float]]:
    """Vertex 0 at the top, the rest clockwise on a circle."""
    c = SVG_SIZE / 2
    if n == 1:
        return [(c, c)]
    return [(c + RADIUS * math.sin(2 * math.pi * i / n), c - RADIUS * math.cos(2 * math.pi * i / n))
            for i in range(n)]


def _edge_paths(e: Edge, pos: Sequence[tuple[float, float]], slot: int, total: int) -> list[str]:
    """Two half-curves (one per endpoint color) bent apart for parallel edges."""
    (x1, y1), (x2, y2) = pos[e.u], pos[e.v]
    mx, my = (x1 + x2) / 2, (y1 + y2) / 2
    length = math.hypot(x2 - x1, y2 - y1) or 1.0
    nx, ny = -(y2 - y1) / length, (x2 - x1) / length
    bend = (slot - (total - 1) / 2) * 14.0
    cx, cy = mx + nx * bend, my + ny * bend
    # midpoint of the quadratic curve, where the two colors meet
    hx, hy = (x1 + 2 * cx + x2) / 4, (y1 + 2 * cy + y2) / 4
    dash = ' stroke-dasharray="6,4"' if e.weight < 0 else ""
    width = _num(1 + min(abs(e.weight), 4.0))
    halves = []
    for (sx, sy), (qx, qy), mode in (((x1, y1), ((x1 + cx) / 2, (y1 + cy) / 2), e.mode_u),
                                     ((x2, y2), ((x2 + cx) / 2, (y2 + cy) / 2), e.mode_v)):
        halves.append(f'<path d="M {_num(sx)} {_num(sy)} Q {_num(qx)} {_num(qy)} '
                      f'{_num(hx)} {_num(hy)}" fill="none" stroke="{mode_color(mode)}" '
                      f'stroke-width="{width}"{dash}/>')
    return halves


def _outline(h: Hyperedge, pos: Sequence[tuple[float, float]], pad: float) -> str:
    """Closed shape around the hyperedge's vertices, padded outward from their centroid."""
    pts = [pos[v] for v in h.vertices]
    cx = sum(p[0] for p in pts) / len(pts)
    cy = sum(p[1] for p in pts) / len(pts)
    pts.sort(key=lambda p: math.atan2(p[1] - cy, p[0] - cx))
    out = []
    for x, y in pts:
        d = math.hypot(x - cx, y - cy) or 1.0
        out.append((x + (x - cx) / d * pad, y + (y - cy) / d * pad))
    if len(out) == 2:
        (ax, ay), (bx, by) = out
        d = math.hypot(bx - ax, by - ay) or 1.0
        ox, oy = -(by - ay) / d * pad, (bx - ax) / d * pad
        out = [(ax + ox, ay + oy), (bx + ox, by + oy), (bx - ox, by - oy), (ax - ox, ay - oy)]
    coords = " ".join(f"{_num(x)},{_num(y)}" for x, y in out)
    dash = ' stroke-dasharray="6,4"' if h.weight < 0 else ""
    return (f'<polygon points="{coords}" fill="{mode_color(h.modes[0])}" fill-opacity="0.12" '
            f'stroke="{mode_color(h.modes[0])}" stroke-width="2" stroke-linejoin="round"{dash}/>')


def to_svg(obj: Graph | Hypergraph) -> str:
    """Standalone SVG: circular layout, edges colored per endpoint mode.

    Hyperedges are drawn as translucent outlines enclosing their vertices.
    """
    g, hyper = _split(obj)
    pos = circular_layout(g.vertex_count)
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_SIZE}" height="{SVG_SIZE}" '
             f'viewBox="0 0 {SVG_SIZE} {SVG_SIZE}">',
             f'<rect width="{SVG_SIZE}" height="{SVG_SIZE}" fill="white"/>']
    for j, h in enumerate(hyper):
        parts.append(_outline(h, pos, NODE_RADIUS + 6 + 4 * j))
    bundles: dict[tuple[int, int], list[Edge]] = defaultdict(list)
    for e in g.edges:
        bundles[(e.u, e.v)].append(e)
    for pair in sorted(bundles):
        group = bundles[pair]
        for slot, e in enumerate(group):
            parts.extend(_edge_paths(e, pos, slot, len(group)))
    for v, (x, y) in enumerate(pos):
        if g.roles[v] == INPUT:
            s = NODE_RADIUS
            parts.append(f'<rect x="{_num(x - s)}" y="{_num(y - s)}" width="{_num(2 * s)}" '
                         f'height="{_num(2 * s)}" fill="white" stroke="black"/>')
        else:
            parts.append(f'<circle cx="{_num(x)}" cy="{_num(y)}" r="{_num(NODE_RADIUS)}" '
                         f'fill="white" stroke="black"/>')
        parts.append(f'<text x="{_num(x)}" y="{_num(y + 4)}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="12">{escape(str(v))}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
