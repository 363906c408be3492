"""Hand-made designs built from committed emitter templates.

No optimization happens here: each family pastes recolored copies of a
template (a JSON asset produced once by discovery and extraction) onto a
small base graph.
"""

from __future__ import annotations

import json
from importlib import resources
from collections.abc import Iterable
from typing import Any

from halograph.errors import InvalidGraph, InvalidParam, MissingTemplate
from halograph.graph import DETECTOR, INPUT, Edge, Graph, MatchingTable
from halograph.halo import HaloTemplate, Hyperedge, Hypergraph, expand, validate_template
from halograph.states import TargetSpec, bell, ghz

TEMPLATE_FILES = {
    "ghz": "ghz.json",
    "ghz63": "ghz63.json",
    "swap": "swap.json",
    "cnot": "cnot.json",
}


def load_template(name: str) -> HaloTemplate:
    """Load and validate a bundled template.

    Raises
    ------
    MissingTemplate
        If no asset exists under ``name`` or it does not validate.
    """
    if name not in TEMPLATE_FILES:
        raise MissingTemplate(f"no template named {name!r}")
    path = resources.files("halograph") / "templates" / TEMPLATE_FILES[name]
    try:
        data = json.loads(path.read_text())
    except (FileNotFoundError, json.JSONDecodeError) as exc:
        raise MissingTemplate(f"template asset {name!r} unavailable: {exc}") from exc
    return checked_template(data, name)


def checked_template(data: dict[str, Any] | HaloTemplate, name: str = "") -> HaloTemplate:
    try:
        tpl = data if isinstance(data, HaloTemplate) else HaloTemplate.from_dict(data)
    except InvalidGraph as exc:
        raise MissingTemplate(f"template {name!r} is malformed: {exc}") from exc
    report = validate_template(tpl)
    if not report.passed:
        raise MissingTemplate(f"template {name!r} fails validation: {'; '.join(report.problems)}")
    return tpl


def _resolve(tpl: HaloTemplate | None, name: str) -> HaloTemplate:
    return load_template(name) if tpl is None else checked_template(tpl, name)


def trim_unused(g: Graph) -> Graph:
    """Drop edges that take part in no perfect matching (they never fire)."""
    table = MatchingTable(g)
    used = {i for pm in table.pm_edges for i in pm}
    return g.with_edges(e for i, e in enumerate(g.edges) if i in used)


def ghz43_base(d: int = 3, weight: float = 1.0) -> Graph:
    """The six-edge GHZ_4^3 graph: each vertex pair joined once, in one of three colors."""
    pairs = (((0, 1), 0), ((2, 3), 0), ((0, 2), 1), ((1, 3), 1), ((0, 3), 2), ((1, 2), 2))
    return Graph(4, (d,) * 4, tuple(Edge(u, v, m, m, weight) for (u, v), m in pairs))


def construct_ghz(d: int, tpl: HaloTemplate | None = None) -> Graph:
    """Graph for the four-particle GHZ state in ``d >= 3`` dimensions.

    The GHZ_4^3 base supplies modes 0-2; one template copy per extra mode
    ``j`` emits |jjjj>, using 4 ancillas each.
    """
    if d < 3:
        raise InvalidParam(f"construct_ghz needs d >= 3, got {d}")
    if d == 3:
        return ghz43_base(3)
    tpl = _resolve(tpl, "ghz")
    hyper = tuple(Hyperedge((0, 1, 2, 3), (j,) * 4) for j in range(3, d))
    return trim_unused(expand(Hypergraph(ghz43_base(d), hyper), tpl))


def construct_swapping(k: int, tpl: HaloTemplate | None = None) -> Graph:
    """Entanglement swapping in ``2k`` dimensions with no edge between a and b.

    Vertices 0 (a) and 1 (b) carry the logical state; each of the ``k``
    template copies emits the pairs |2j,2j> and |2j+1,2j+1> and brings two
    ancillas.
    """
    if k < 1:
        raise InvalidParam(f"construct_swapping needs k >= 1, got {k}")
    tpl = _resolve(tpl, "swap")
    if tpl.arity != 2:
        raise MissingTemplate("swap template must join two vertices")
    base = Graph(2, (2 * k, 2 * k), ())
    hyper = tuple(Hyperedge((0, 1), (2 * j, 2 * j)) for j in range(k))
    return trim_unused(expand(Hypergraph(base, hyper), tpl))


def construct_cnot(k: int, tpl: HaloTemplate | None = None) -> Graph:
    """CNOT(2, 2k) gate graph.

    Vertex layout: inputs 0 (control, dim 2) and 1 (target, dim 2k),
    outputs 2 and 3, then 4 ancillas per template copy.  Plain edges carry
    the control-1 branch (control passes through, target shifts by one);
    template copy ``j`` carries the control-0 branch for target modes 2j
    and 2j+1.
    """
    if k < 1:
        raise InvalidParam(f"construct_cnot needs k >= 1, got {k}")
    tpl = _resolve(tpl, "cnot")
    if tpl.arity != 4:
        raise MissingTemplate("cnot template must join four vertices")
    d2 = 2 * k
    edges = [Edge(0, 2, 1, 1, 1.0)]
    edges += [Edge(1, 3, n, (n + 1) % d2, 1.0) for n in range(d2)]
    base = Graph(4, (2, d2, 2, d2), tuple(edges), (INPUT, INPUT, DETECTOR, DETECTOR))
    shift = [0, 1, 0, 1]
    hyper = []
    for j in range(k):
        modes = tuple(m + 2 * j * s for m, s in zip(tpl.main_modes, shift))
        hyper.append(Hyperedge((0, 1, 2, 3), modes))
    return trim_unused(expand(Hypergraph(base, tuple(hyper)), tpl))


# Eight vertices fit a single emitter, which the tiling below would spend two on.
_GHZ63_SMALL = {8: (((1, 3, 5, 7),), ((0, 2), (4, 6)))}
_GHZ63_UNIT = ((0, 2, 4, 7), (3, 5))
_GHZ63_TAILS = {
    0: (0, (), ()),
    2: (8, ((0, 2, 4, 6), (3, 5, 7, 9)), ()),
    4: (10, ((0, 2, 4, 7), (6, 8, 9, 11)), ((3, 5),)),
}


def ghz63_layout(n: int) -> tuple[list[tuple[int, ...]], list[tuple[int, int]]]:
    """Emitter quadruples and mode-2 chords on a ring of ``6 + 2n`` vertices.

    Modes 0 and 1 come from the two perfect matchings of the ring
    ``0-1-...-(N-1)-0``.  The mode-2 term is built from blocks (emitter
    quadruples and same-parity chords) partitioning the ring.  A union of
    blocks whose leftover ring vertices can be paired by ring edges would leak
    a mixed term, which happens exactly when its sorted positions alternate
    in parity; the layouts below have no such proper union.  The ring is
    tiled by 6-vertex units (one emitter, one chord) plus, when 6 does not
    divide its length, a tail of 8 or 10 vertices holding two emitters.
    """
    if n < 0:
        raise InvalidParam(f"the GHZ_(6+2n)^3 family needs n >= 0, got {n}")
    N = 6 + 2 * n
    if N in _GHZ63_SMALL:
        quads, chords = _GHZ63_SMALL[N]
        return list(quads), list(chords)
    length, tail_quads, tail_chords = _GHZ63_TAILS[N % 6]
    units = (N - length) // 6
    quads: list[tuple[int, ...]] = []
    chords: list[tuple[int, int]] = []

    def place(offset: int, qs: Iterable[tuple[int, ...]], cs: Iterable[tuple[int, int]]) -> None:
        quads.extend(tuple(sorted((offset + p) % N for p in q)) for q in qs)
        chords.extend(((offset + a) % N, (offset + b) % N) for a, b in cs)

    for i in range(units):
        place(6 * i, [_GHZ63_UNIT[0]], [_GHZ63_UNIT[1]])
    place(6 * units, tail_quads, tail_chords)
    return quads, chords


def ghz63_ring(N: int) -> Graph:
    """Ring whose two perfect matchings give |0...0> and |1...1>."""
    edges = [Edge(min(i, (i + 1) % N), max(i, (i + 1) % N), i % 2, i % 2, 1.0) for i in range(N)]
    return Graph(N, (3,) * N, tuple(edges))


def construct_ghz_family_63(n: int, tpl: HaloTemplate | None = None) -> Graph:
    """Graph for GHZ_(6+2n)^3: a ring, mode-2 chords and two-ancilla emitters.

    Every emitter copy emits |2222> on its quadruple and brings 2 ancillas;
    see :func:`ghz63_layout` for the placement.
    """
    quads, chords = ghz63_layout(n)
    tpl = _resolve(tpl, "ghz63")
    if tpl.arity != 4:
        raise MissingTemplate("ghz63 template must join four vertices")
    N = 6 + 2 * n
    ring = ghz63_ring(N)
    base = ring.with_edges(list(ring.edges) + [Edge(min(a, b), max(a, b), 2, 2, 1.0)
                                               for a, b in chords])
    hyper = tuple(Hyperedge(q, (2, 2, 2, 2)) for q in quads)
    return expand(Hypergraph(base, hyper), tpl)


def ghz63_copies(n: int) -> int:
    return len(ghz63_layout(n)[0])


def family_herald(family: str, param: int, tpl: HaloTemplate | None = None) -> tuple[int, ...]:
    """Ancilla modes shared by every term of a constructed graph."""
    if family == "ghz63":
        copies = ghz63_copies(param)
    else:
        copies = {"ghz": param - 3, "swap": param, "cnot": param}[family]
    if copies <= 0:
        return ()
    tpl = _resolve(tpl, family)
    return tuple(tpl.herald_modes) * copies


def expected_target(family: str, param: int, g: Graph,
                    tpl: HaloTemplate | None = None) -> TargetSpec:
    """Logical target of a state family with the heralds appended."""
    logical = {"ghz": lambda: ghz(4, param),
               "ghz63": lambda: ghz(6 + 2 * param, 3),
               "swap": lambda: bell(2 * param)}[family]()
    herald = family_herald(family, param, tpl)
    n = logical.particle_count
    dims = logical.dimensions + tuple(g.dimensions[v] for v in range(n, g.vertex_count))
    return TargetSpec(tuple((k + herald, a) for k, a in logical.kets), dims)
