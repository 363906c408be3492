"""Effective multi-photon emitters built from pair sources.

A HALO template is a subgraph over some *main* vertices and a few ancilla
vertices.  Under post-selection it either covers all of its ancillas by
itself (the vacuum term, no photons reach the main vertices) or covers every
main vertex as well, emitting a fixed set of correlated mode patterns; any
process that reaches only part of the main vertices cancels.  Such a
subgraph behaves like a hyperedge, and a hypergraph can be expanded back
into an ordinary graph by pasting a recolored copy of the template for each
hyperedge.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy.optimize import least_squares

from halograph.errors import ArityMismatch, InvalidGraph, NotAHalo
from halograph.graph import (AMPLITUDE_EPSILON, DETECTOR, Edge, Graph, Ket,
                             MatchingTable, StateVector)

CROSS_TOL = 1e-9


@dataclass(frozen=True)
class Hyperedge:
    """A multi-photon source putting one photon in each listed vertex."""

    vertices: tuple[int, ...]
    modes: tuple[int, ...]
    weight: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", tuple(int(v) for v in self.vertices))
        object.__setattr__(self, "modes", tuple(int(m) for m in self.modes))
        if len(self.vertices) < 2:
            raise InvalidGraph("a hyperedge joins at least two vertices")
        if len(set(self.vertices)) != len(self.vertices):
            raise InvalidGraph(f"hyperedge vertices repeat: {self.vertices}")
        if len(self.modes) != len(self.vertices):
            raise InvalidGraph("one mode per hyperedge vertex required")

    @property
    def arity(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class Hypergraph:
    base: Graph
    hyperedges: tuple[Hyperedge, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "hyperedges", tuple(self.hyperedges))
        for h in self.hyperedges:
            for v, m in zip(h.vertices, h.modes):
                if not 0 <= v < self.base.vertex_count:
                    raise InvalidGraph(f"hyperedge vertex {v} not in the base graph")
                if not 0 <= m < self.base.dimensions[v]:
                    raise InvalidGraph(f"hyperedge mode {m} exceeds dimension of vertex {v}")

    def to_dict(self) -> dict[str, Any]:
        return {**self.base.to_dict(),
                "hyperedges": [[list(h.vertices), list(h.modes), h.weight]
                               for h in self.hyperedges]}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> Hypergraph:
        try:
            hyper = tuple(Hyperedge(tuple(v), tuple(m), float(w))
                          for v, m, w in data.get("hyperedges", []))
        except (TypeError, ValueError) as exc:
            raise InvalidGraph(f"malformed hyperedges: {exc}") from exc
        return cls(Graph.from_dict(data), hyper)


@dataclass(frozen=True)
class HaloTemplate:
    """Subgraph that imitates a hyperedge.

    Vertices are numbered locally: ``0..k-1`` are the main vertices (in the
    order of ``main``) and ``k..k+ancilla_count-1`` the ancillas.  ``main``
    keeps the vertex ids of the graph the template was extracted from.
    ``terms`` lists every mode pattern the emitter puts on the main vertices
    (most templates emit a single pattern, ``main_modes``); ``herald_modes``
    are the ancilla modes shared by all surviving terms.  After extraction
    the vacuum amplitude is 1 and the ``main_modes`` term has amplitude 1;
    ``amplitude_degree`` is the power of the per-main-endpoint scale factor
    that reaches the emitted term.
    """

    main: tuple[int, ...]
    main_modes: tuple[int, ...]
    ancilla_count: int
    herald_modes: tuple[int, ...]
    subgraph: tuple[Edge, ...]
    amplitude_degree: int = 0
    terms: tuple[tuple[int, ...], ...] = ()
    name: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "main", tuple(self.main))
        object.__setattr__(self, "main_modes", tuple(self.main_modes))
        object.__setattr__(self, "herald_modes", tuple(self.herald_modes))
        object.__setattr__(self, "subgraph", tuple(sorted(self.subgraph, key=lambda e: e.key)))
        terms = tuple(tuple(t) for t in self.terms) or (self.main_modes,)
        object.__setattr__(self, "terms", terms)
        if not self.amplitude_degree:
            object.__setattr__(self, "amplitude_degree", len(self.main))
        if len(self.herald_modes) != self.ancilla_count:
            raise InvalidGraph("one herald mode per ancilla required")
        if self.main_modes not in terms:
            raise InvalidGraph("main_modes must be one of the emitted terms")
        size = self.arity + self.ancilla_count
        for e in self.subgraph:
            if e.v >= size:
                raise InvalidGraph(f"template edge {e.key} outside {size} local vertices")

    @property
    def arity(self) -> int:
        return len(self.main)

    @property
    def local_dimensions(self) -> tuple[int, ...]:
        dims = [1] * (self.arity + self.ancilla_count)
        for e in self.subgraph:
            dims[e.u] = max(dims[e.u], e.mode_u + 1)
            dims[e.v] = max(dims[e.v], e.mode_v + 1)
        for i, modes in enumerate(zip(*self.terms)):
            dims[i] = max(dims[i], max(modes) + 1)
        return tuple(dims)

    def graph(self) -> Graph:
        """The template on its own, main vertices first, ancillas after."""
        n = self.arity + self.ancilla_count
        return Graph(n, self.local_dimensions, self.subgraph)

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "main": list(self.main),
            "main_modes": list(self.main_modes),
            "terms": [list(t) for t in self.terms],
            "ancilla_count": self.ancilla_count,
            "herald_modes": list(self.herald_modes),
            "subgraph": [e.as_list() for e in self.subgraph],
            "amplitude_degree": self.amplitude_degree,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> HaloTemplate:
        try:
            return cls(
                main=tuple(data["main"]),
                main_modes=tuple(data["main_modes"]),
                ancilla_count=int(data["ancilla_count"]),
                herald_modes=tuple(data["herald_modes"]),
                subgraph=tuple(Edge(int(u), int(v), int(a), int(b), float(w))
                               for u, v, a, b, w in data["subgraph"]),
                amplitude_degree=int(data.get("amplitude_degree", 0)),
                terms=tuple(tuple(t) for t in data.get("terms", ())),
                name=data.get("name", ""),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidGraph(f"malformed template: {exc}") from exc


@dataclass(frozen=True)
class CrossTerm:
    covered: tuple[int, ...]
    ket: Ket
    amplitude: float


@dataclass(frozen=True)
class TemplateReport:
    """Outcome of :func:`validate_template`.

    ``emitted`` maps main-vertex mode patterns to amplitudes for processes
    covering every main vertex; ``cross_terms`` lists surviving processes that
    cover only part of them.
    """

    passed: bool
    vacuum: float
    emitted: dict[Ket, float]
    herald: Ket | None
    cross_terms: tuple[CrossTerm, ...] = ()
    problems: tuple[str, ...] = ()
    residual: float = 0.0

    @property
    def status(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def to_dict(self) -> dict[str, Any]:
        return {
            "status": self.status,
            "vacuum": self.vacuum,
            "emitted": {"".join(map(str, k)): a for k, a in self.emitted.items()},
            "herald": list(self.herald) if self.herald is not None else None,
            "cross_terms": [{"covered": list(c.covered), "ket": list(c.ket),
                             "amplitude": c.amplitude} for c in self.cross_terms],
            "residual": self.residual,
            "problems": list(self.problems),
        }


def _sub_state(g: Graph, vertices: Sequence[int]) -> dict[Ket, float]:
    """State of ``g`` restricted to ``vertices`` (kets list those vertices in order)."""
    vertices = sorted(vertices)
    index = {v: i for i, v in enumerate(vertices)}
    edges = [Edge(index[e.u], index[e.v], e.mode_u, e.mode_v, e.weight)
             for e in g.edges if e.u in index and e.v in index]
    sub = Graph(len(vertices), tuple(g.dimensions[v] for v in vertices), tuple(edges))
    return dict(MatchingTable(sub).state().items()) if vertices else {(): 1.0}


def emission_sectors(tpl_graph: Graph, arity: int) -> dict[tuple[int, ...], dict[Ket, float]]:
    """Map each subset of covered main vertices to the state it produces.

    Every process covers all ancillas; the key is the tuple of main vertices
    also covered.  Kets list the covered main vertices then the ancillas.
    """
    n = tpl_graph.vertex_count
    ancillas = list(range(arity, n))
    out = {}
    for size in range(arity + 1):
        if (size + len(ancillas)) % 2:
            continue
        for covered in itertools.combinations(range(arity), size):
            out[covered] = {k: float(np.real(a))
                            for k, a in _sub_state(tpl_graph, list(covered) + ancillas).items()}
    return out


def validate_template(tpl: HaloTemplate, tol: float = CROSS_TOL,
                      require_vacuum: bool = True) -> TemplateReport:
    """Check that ``tpl`` acts as an emitter of exactly ``tpl.terms``.

    Passes iff processes covering only part of the main vertices cancel to
    within ``tol``, the processes covering all of them leave exactly the
    declared patterns, every surviving ket carries ``herald_modes`` on the
    ancillas, and (by default) the vacuum amplitude is nonzero.
    """
    k = tpl.arity
    sectors = emission_sectors(tpl.graph(), k)
    herald = tuple(tpl.herald_modes)
    problems = []
    cross = []
    residual = 0.0
    full = tuple(range(k))
    vacuum = 0.0
    emitted: dict[Ket, float] = {}
    for covered, state in sectors.items():
        for ket, amp in state.items():
            main_part, anc_part = ket[:len(covered)], ket[len(covered):]
            if covered == ():
                if anc_part != herald:
                    problems.append(f"vacuum term with ancilla modes {anc_part}")
                    residual = max(residual, abs(amp))
                else:
                    vacuum = amp
            elif covered == full:
                if anc_part != herald:
                    problems.append(f"emitted term {main_part} heralded by {anc_part}")
                    residual = max(residual, abs(amp))
                else:
                    emitted[main_part] = amp
            elif abs(amp) > tol:
                cross.append(CrossTerm(covered, ket, amp))
                residual = max(residual, abs(amp))
    if cross:
        problems.append(f"{len(cross)} cross terms survive")
    declared = set(tpl.terms)
    surviving = {t for t, a in emitted.items() if abs(a) > tol}
    if surviving != declared:
        problems.append(f"emitted patterns {sorted(surviving)} differ from declared {sorted(declared)}")
    for t, a in emitted.items():
        if t not in declared:
            residual = max(residual, abs(a))
    if require_vacuum and abs(vacuum) <= tol:
        problems.append("no vacuum term: copies of this template cannot coexist")
    return TemplateReport(passed=not problems, vacuum=vacuum, emitted=emitted,
                          herald=herald, cross_terms=tuple(cross),
                          problems=tuple(problems), residual=residual)


def _localize(edges: Iterable[Edge], main: Sequence[int], ancillas: Sequence[int]) -> list[Edge]:
    local = {v: i for i, v in enumerate(list(main) + list(ancillas))}
    out = []
    for e in edges:
        if e.u not in local or e.v not in local:
            raise NotAHalo(f"edge {e.key} leaves the main and ancilla vertices")
        out.append(Edge(local[e.u], local[e.v], e.mode_at(e.u), e.mode_at(e.v), e.weight))
    return out


def _scale_main(edges: Sequence[Edge], arity: int, factor: float) -> list[Edge]:
    """Scale each edge by ``factor`` per main endpoint; vacuum terms are untouched."""
    out = []
    for e in edges:
        power = (e.u < arity) + (e.v < arity)
        out.append(e.with_weight(e.weight * factor ** power))
    return out


def _flip_first_main(edges: Sequence[Edge]) -> list[Edge]:
    """Negate every edge at local vertex 0: flips the emitted terms only."""
    return [e.with_weight(-e.weight) if e.u == 0 else e for e in edges]


def _scale_ancilla(edges: Sequence[Edge], arity: int, factor: float) -> list[Edge]:
    """Scale edges at the first ancilla, which every process covers once."""
    return [e.with_weight(e.weight * factor) if arity in (e.u, e.v) else e for e in edges]


def normalize_template_edges(edges: Sequence[Edge], arity: int, ancilla_count: int,
                             primary: Ket, dims: Sequence[int]) -> list[Edge]:
    """Rescale so the vacuum amplitude and the ``primary`` emitted amplitude are 1."""
    g = Graph(arity + ancilla_count, tuple(dims), tuple(edges))
    sectors = emission_sectors(g, arity)
    vacuum = sum(sectors.get((), {}).values())
    edges = list(edges)
    if abs(vacuum) > AMPLITUDE_EPSILON and ancilla_count:
        edges = _scale_ancilla(edges, arity, 1.0 / vacuum)
    g = Graph(arity + ancilla_count, tuple(dims), tuple(edges))
    full = emission_sectors(g, arity)[tuple(range(arity))]
    amp = sum(a for k, a in full.items() if k[:arity] == tuple(primary))
    if abs(amp) <= AMPLITUDE_EPSILON:
        raise NotAHalo(f"pattern {primary} is not emitted")
    if amp < 0:
        edges = _flip_first_main(edges)
    return _scale_main(edges, arity, abs(amp) ** (-1.0 / arity))


def _sector_tables(g: Graph, arity: int) -> list[tuple[tuple[int, ...], MatchingTable, list[int]]]:
    """One matching table per emission sector, with the template edge index of each table edge."""
    ancillas = list(range(arity, g.vertex_count))
    out = []
    for size in range(arity + 1):
        if (size + len(ancillas)) % 2:
            continue
        for covered in itertools.combinations(range(arity), size):
            vertices = list(covered) + ancillas
            index = {v: i for i, v in enumerate(vertices)}
            picked = [i for i, e in enumerate(g.edges) if e.u in index and e.v in index]
            edges = [Edge(index[g.edges[i].u], index[g.edges[i].v], g.edges[i].mode_u,
                          g.edges[i].mode_v, g.edges[i].weight) for i in picked]
            sub = Graph(len(vertices), tuple(g.dimensions[v] for v in vertices), tuple(edges))
            # Graph sorts its edges; recover which template edge each one is
            lookup = {e.key: i for e, i in zip(edges, picked)}
            out.append((covered, MatchingTable(sub), [lookup[e.key] for e in sub.edges]))
    return out


def refine_template_edges(edges: Sequence[Edge], arity: int, dims: Sequence[int],
                          terms: Sequence[Ket], herald: Ket) -> list[Edge]:
    """Least-squares solve of the emitter conditions, starting from ``edges``.

    Conditions: vacuum amplitude 1, every declared pattern (with the herald)
    amplitude 1, every other process amplitude 0.
    """
    g = Graph(len(dims), tuple(dims), tuple(edges))
    edges = list(g.edges)
    full = tuple(range(arity))
    wanted = {tuple(t) + tuple(herald) for t in terms}
    rows = []
    for covered, table, idx in _sector_tables(g, arity):
        goal = np.zeros(len(table.kets))
        for j, ket in enumerate(table.kets):
            if (covered == () and ket == tuple(herald)) or (covered == full and ket in wanted):
                goal[j] = 1.0
        rows.append((table, np.array(idx, dtype=int), goal))

    def residual(w: np.ndarray) -> np.ndarray:
        return np.concatenate([table.amplitudes(w[idx]) - goal for table, idx, goal in rows])

    x0 = np.array([e.weight for e in edges])
    method = "lm" if len(residual(x0)) >= len(x0) else "trf"
    res = least_squares(residual, x0, method=method, xtol=1e-15, ftol=1e-15, gtol=1e-15)
    if np.max(np.abs(residual(res.x))) > np.max(np.abs(residual(x0))):
        return edges
    return [e.with_weight(float(x)) for e, x in zip(edges, res.x)]


def extract_halo(g: Graph, main: Sequence[int], ancillas: Sequence[int],
                 base: Graph | None = None, close_vacuum: bool = False,
                 tol: float = CROSS_TOL, name: str = "", refine: bool = False) -> HaloTemplate:
    """Cut the emitter subgraph out of a solution graph.

    The template consists of the edges of ``g`` that are not in ``base``;
    without a base, every edge touching an ancilla.  The emitted patterns and
    herald are read off the processes that cover all main vertices.  With
    ``close_vacuum`` a template whose ancillas cannot pair up among
    themselves gets ancilla-ancilla edges in the herald modes, so that
    several copies can share the same main vertices.  With ``refine`` the
    weights are re-solved so that the vacuum and every emitted pattern have
    amplitude exactly 1 and all other processes cancel to machine precision
    (optimizer output is only accurate to about the square root of its
    infidelity).

    Raises
    ------
    NotAHalo
        If nothing is left after removing the base, or the result fails
        :func:`validate_template`.
    """
    main = list(main)
    ancillas = list(ancillas)
    anc_set = set(ancillas)
    if base is not None:
        base_keys = {e.key for e in base.edges}
        if any(e.u in anc_set or e.v in anc_set for e in base.edges):
            raise NotAHalo("base graph touches the ancillas")
        missing = base_keys - {e.key for e in g.edges}
        if missing:
            raise NotAHalo(f"graph lacks base edges {sorted(missing)}")
    new = _template_edges(g, main, ancillas, base)
    if not new:
        raise NotAHalo("no edges beyond the base: nothing emits")
    arity = len(main)
    local = _localize(new, main, ancillas)
    dims = [g.dimensions[v] for v in main + ancillas]
    tg = Graph(arity + len(ancillas), tuple(dims), tuple(local))
    sectors = emission_sectors(tg, arity)
    full = {k: a for k, a in sectors[tuple(range(arity))].items() if abs(a) > tol}
    if not full:
        raise NotAHalo("no process reaches every main vertex")
    heralds = {k[arity:] for k in full}
    if len(heralds) != 1:
        raise NotAHalo(f"emitted terms carry different ancilla patterns {sorted(heralds)}")
    herald = heralds.pop()
    terms = sorted(k[:arity] for k in full)
    vacuum = sectors.get((), {})
    if close_vacuum and not any(abs(a) > tol for a in vacuum.values()):
        if len(ancillas) % 2:
            raise NotAHalo("cannot pair an odd number of ancillas for a vacuum term")
        local += [Edge(arity + i, arity + i + 1, herald[i], herald[i + 1], 1.0)
                  for i in range(0, len(ancillas), 2)]
    local = normalize_template_edges(local, arity, len(ancillas), terms[0], dims)
    if refine:
        local = refine_template_edges(local, arity, dims, terms, herald)
    tpl = HaloTemplate(main=tuple(main), main_modes=terms[0], ancilla_count=len(ancillas),
                       herald_modes=herald, subgraph=tuple(local), terms=tuple(terms),
                       name=name)
    report = validate_template(tpl, tol=tol)
    if not report.passed:
        raise NotAHalo("; ".join(report.problems))
    return tpl


def _merge(edges: Iterable[Edge]) -> list[Edge]:
    """Combine identical sources by adding their weights."""
    merged: dict = {}
    for e in edges:
        if e.key in merged:
            merged[e.key] = merged[e.key].with_weight(merged[e.key].weight + e.weight)
        else:
            merged[e.key] = e
    return [e for e in merged.values() if e.weight != 0.0]


def recolor(tpl: HaloTemplate, modes: Sequence[int]) -> list[int]:
    """Per-main-vertex mode shift taking ``main_modes`` to ``modes``."""
    return [m - m0 for m, m0 in zip(modes, tpl.main_modes)]


def expand(h: Hypergraph, tpl: HaloTemplate) -> Graph:
    """Replace each hyperedge of ``h`` by a recolored copy of the template.

    Copy ``j`` gets ancilla ids ``n + j*a .. n + (j+1)*a - 1`` where ``n`` is
    the base vertex count and ``a`` the template's ancilla count.  Mode ``m``
    at a main endpoint becomes ``m + (hyperedge mode - main mode)`` for that
    vertex; ancilla modes are copied verbatim.  Edge weights at main vertices
    are rescaled so the copy emits its pattern with the hyperedge weight.
    """
    base = h.base
    a = tpl.ancilla_count
    k = tpl.arity
    n = base.vertex_count
    anc_dims = tpl.local_dimensions[k:]
    edges = list(base.edges)
    for j, he in enumerate(h.hyperedges):
        if he.arity != k:
            raise ArityMismatch(f"hyperedge {j} has arity {he.arity}, template expects {k}")
        shift = recolor(tpl, he.modes)
        ids = list(he.vertices) + [n + j * a + t for t in range(a)]
        copy = list(tpl.subgraph)
        if he.weight < 0:
            copy = _flip_first_main(copy)
        copy = _scale_main(copy, k, abs(he.weight) ** (1.0 / tpl.amplitude_degree))
        for e in copy:
            mu = e.mode_u + (shift[e.u] if e.u < k else 0)
            mv = e.mode_v + (shift[e.v] if e.v < k else 0)
            edges.append(Edge(ids[e.u], ids[e.v], mu, mv, e.weight))
    count = n + a * len(h.hyperedges)
    dims = base.dimensions + anc_dims * len(h.hyperedges)
    roles = base.roles + (DETECTOR,) * (a * len(h.hyperedges))
    return Graph(count, dims, tuple(_merge(edges)), roles)


def hypergraph_state(h: Hypergraph, tpl: HaloTemplate | None = None) -> StateVector:
    """State of a hypergraph computed directly on hyperedges.

    A perfect matching here is a set of edges and hyperedges covering every
    vertex once.  With a template, each hyperedge emits all of the
    template's (recolored) patterns with the template's relative amplitudes;
    otherwise just its own modes.
    """
    base = h.base
    sources: list[tuple[tuple[int, ...], list[tuple[tuple[int, ...], float]]]] = []
    for e in base.edges:
        sources.append(((e.u, e.v), [((e.mode_u, e.mode_v), e.weight)]))
    rel = _relative_emission(tpl) if tpl is not None else None
    for he in h.hyperedges:
        if rel is None:
            sources.append((he.vertices, [(he.modes, he.weight)]))
        else:
            shift = recolor(tpl, he.modes)
            pats = [(tuple(m + s for m, s in zip(t, shift)), he.weight * r) for t, r in rel]
            sources.append((he.vertices, pats))
    n = base.vertex_count
    detectors = base.detectors
    terms: dict[Ket, complex] = {}
    covered = [False] * n
    modes = [0] * n

    def recurse(start: int, amp: float) -> None:
        while start < n and covered[start]:
            start += 1
        if start == n:
            ket = tuple(modes[v] for v in detectors)
            terms[ket] = terms.get(ket, 0.0) + amp
            return
        for verts, pats in sources:
            if start not in verts or any(covered[v] for v in verts):
                continue
            for v in verts:
                covered[v] = True
            for pat, w in pats:
                for v, m in zip(verts, pat):
                    modes[v] = m
                recurse(start + 1, amp * w)
            for v in verts:
                covered[v] = False

    if n:
        recurse(0, 1.0)
    return StateVector(terms, tuple(base.dimensions[v] for v in detectors))


def _relative_emission(tpl: HaloTemplate) -> list[tuple[Ket, float]]:
    report = validate_template(tpl, require_vacuum=False)
    primary = report.emitted[tpl.main_modes]
    return [(t, report.emitted[t] / primary) for t in tpl.terms]


def herald_of(tpl: HaloTemplate, copies: int) -> Ket:
    return tuple(tpl.herald_modes) * copies


def ancilla_vertices(g: Graph, logical: int) -> list[int]:
    return list(range(logical, g.vertex_count))


def is_sound_on(base: Graph, tpl: HaloTemplate, hyperedges: Sequence[Hyperedge],
                tol: float = CROSS_TOL) -> bool:
    """Expanded state equals the hypergraph state with heralds appended."""
    h = Hypergraph(base, tuple(hyperedges))
    g = expand(h, tpl)
    herald = herald_of(tpl, len(hyperedges))
    want = {k + herald: a for k, a in hypergraph_state(h, tpl).items()}
    got = dict(MatchingTable(g).state().items())
    keys = set(want) | set(got)
    return all(abs(got.get(k, 0) - want.get(k, 0)) <= tol for k in keys) and math.isfinite(
        sum(abs(v) for v in got.values()))


def abstract(g: Graph, main: Sequence[int], ancillas: Sequence[int],
             base: Graph | None = None, tol: float = CROSS_TOL) -> tuple[Hypergraph, HaloTemplate]:
    """Replace the emitter inside ``g`` by one hyperedge.

    Returns the hypergraph (the remaining edges plus a hyperedge carrying the
    emitted amplitude divided by the vacuum amplitude) and the extracted
    template.  Expanding the pair again gives ``g``'s edge structure and a
    state proportional to ``g``'s.
    """
    tpl = extract_halo(g, main, ancillas, base=base, tol=tol)
    if len(tpl.terms) != 1:
        raise NotAHalo("only single-pattern emitters can be abstracted to one hyperedge")
    anc = set(ancillas)
    tkeys = {e.key for e in _template_edges(g, main, ancillas, base)}
    keep = [e for e in g.edges if e.key not in tkeys]
    order = [v for v in range(g.vertex_count) if v not in anc]
    index = {v: i for i, v in enumerate(order)}
    rest = Graph(len(order), tuple(g.dimensions[v] for v in order),
                 tuple(Edge(index[e.u], index[e.v], e.mode_u, e.mode_v, e.weight) for e in keep),
                 tuple(g.roles[v] for v in order))
    local = _localize([e for e in g.edges if e.key in tkeys], main, ancillas)
    dims = [g.dimensions[v] for v in list(main) + list(ancillas)]
    sectors = emission_sectors(Graph(len(dims), tuple(dims), tuple(local)), len(main))
    vacuum = sum(sectors[()].values())
    emitted = sectors[tuple(range(len(main)))][tpl.main_modes + tpl.herald_modes]
    he = Hyperedge(tuple(index[v] for v in main), tpl.main_modes, emitted / vacuum)
    return Hypergraph(rest, (he,)), tpl


def _template_edges(g: Graph, main: Sequence[int], ancillas: Sequence[int],
                    base: Graph | None) -> list[Edge]:
    anc = set(ancillas)
    if base is None:
        return [e for e in g.edges if e.u in anc or e.v in anc]
    base_keys = {e.key for e in base.edges}
    return [e for e in g.edges if e.key not in base_keys]
