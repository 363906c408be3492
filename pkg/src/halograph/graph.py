"""Experiment graphs and the post-selected states they create.

A vertex is a path to a detector (or, for gates, an incoming photon).  An
edge ``(u, v, mode_u, mode_v, weight)`` is a photon-pair source that sends
one photon into ``u`` in mode ``mode_u`` and one into ``v`` in mode
``mode_v``.  Conditioning on one photon per detector keeps exactly the
perfect matchings of the graph; each contributes the product of its edge
weights to the ket given by the modes it assigns.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from halograph.errors import InvalidGraph, ZeroState

AMPLITUDE_EPSILON = 1e-12

DETECTOR = "detector"
INPUT = "input"
ROLES = (DETECTOR, INPUT)

Ket = tuple[int, ...]
EdgeKey = tuple[int, int, int, int]


@dataclass(frozen=True)
class Edge:
    """A colored, weighted pair source between two vertices.

    Edges are stored with ``u < v``; the constructor swaps endpoints (and
    their modes) when needed so every edge has a single canonical form.
    """

    u: int
    v: int
    mode_u: int = 0
    mode_v: int = 0
    weight: float = 1.0

    def __post_init__(self) -> None:
        if self.u == self.v:
            raise InvalidGraph(f"self-loop on vertex {self.u}")
        if self.u > self.v:
            u, v, mu, mv = self.v, self.u, self.mode_v, self.mode_u
            object.__setattr__(self, "u", u)
            object.__setattr__(self, "v", v)
            object.__setattr__(self, "mode_u", mu)
            object.__setattr__(self, "mode_v", mv)
        object.__setattr__(self, "weight", float(self.weight))

    @property
    def key(self) -> EdgeKey:
        return (self.u, self.v, self.mode_u, self.mode_v)

    def mode_at(self, vertex: int) -> int:
        if vertex == self.u:
            return self.mode_u
        if vertex == self.v:
            return self.mode_v
        raise KeyError(vertex)

    def other(self, vertex: int) -> int:
        return self.v if vertex == self.u else self.u

    def with_weight(self, weight: float) -> Edge:
        return Edge(self.u, self.v, self.mode_u, self.mode_v, weight)

    def as_list(self) -> list:
        return [self.u, self.v, self.mode_u, self.mode_v, self.weight]


@dataclass(frozen=True)
class Graph:
    """Vertices, per-vertex mode counts, colored edges and vertex roles.

    Edges are kept sorted by canonical key, so two graphs with the same edge
    set compare equal regardless of the order they were given in.
    """

    vertex_count: int
    dimensions: tuple[int, ...]
    edges: tuple[Edge, ...] = ()
    roles: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        n = self.vertex_count
        if n < 0:
            raise InvalidGraph("vertex_count must be non-negative")
        dims = tuple(int(d) for d in self.dimensions)
        if len(dims) != n:
            raise InvalidGraph(f"expected {n} dimensions, got {len(dims)}")
        if any(d < 1 for d in dims):
            raise InvalidGraph("dimensions must be positive")
        roles = tuple(self.roles) if self.roles else (DETECTOR,) * n
        if len(roles) != n or any(r not in ROLES for r in roles):
            raise InvalidGraph(f"roles must be {n} entries from {ROLES}")
        edges = tuple(sorted(self.edges, key=lambda e: e.key))
        seen = set()
        for e in edges:
            if not (0 <= e.u < n and 0 <= e.v < n):
                raise InvalidGraph(f"edge {e.key} has an endpoint outside 0..{n - 1}")
            if not (0 <= e.mode_u < dims[e.u] and 0 <= e.mode_v < dims[e.v]):
                raise InvalidGraph(f"edge {e.key} uses a mode beyond the vertex dimension")
            if roles[e.u] == INPUT and roles[e.v] == INPUT:
                raise InvalidGraph(f"edge {e.key} joins two input vertices")
            if e.key in seen:
                raise InvalidGraph(f"duplicate edge {e.key}")
            seen.add(e.key)
        object.__setattr__(self, "dimensions", dims)
        object.__setattr__(self, "roles", roles)
        object.__setattr__(self, "edges", edges)

    @property
    def weights(self) -> np.ndarray:
        return np.array([e.weight for e in self.edges], dtype=float)

    @property
    def keys(self) -> list[EdgeKey]:
        return [e.key for e in self.edges]

    @property
    def detectors(self) -> list[int]:
        return [v for v in range(self.vertex_count) if self.roles[v] == DETECTOR]

    @property
    def inputs(self) -> list[int]:
        return [v for v in range(self.vertex_count) if self.roles[v] == INPUT]

    def with_weights(self, weights: Iterable[float]) -> Graph:
        weights = list(weights)
        if len(weights) != len(self.edges):
            raise InvalidGraph("one weight per edge required")
        edges = tuple(e.with_weight(w) for e, w in zip(self.edges, weights))
        return Graph(self.vertex_count, self.dimensions, edges, self.roles)

    def with_edges(self, edges: Iterable[Edge]) -> Graph:
        return Graph(self.vertex_count, self.dimensions, tuple(edges), self.roles)

    def with_roles(self, roles: Sequence[str]) -> Graph:
        return Graph(self.vertex_count, self.dimensions, self.edges, tuple(roles))

    def without_edge(self, index: int) -> Graph:
        return self.with_edges(e for i, e in enumerate(self.edges) if i != index)

    def scaled(self, factor: float) -> Graph:
        return self.with_weights(self.weights * factor)

    def edges_at(self, vertex: int) -> list[Edge]:
        return [e for e in self.edges if vertex in (e.u, e.v)]

    def to_dict(self) -> dict[str, Any]:
        return {
            "vertex_count": self.vertex_count,
            "dimensions": list(self.dimensions),
            "roles": list(self.roles),
            "edges": [e.as_list() for e in self.edges],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> Graph:
        try:
            n = int(data["vertex_count"])
            dims = [int(d) for d in data["dimensions"]]
            roles = data.get("roles") or [DETECTOR] * n
            edges = [Edge(int(u), int(v), int(mu), int(mv), float(w))
                     for u, v, mu, mv, w in data["edges"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidGraph(f"malformed graph data: {exc}") from exc
        return cls(n, tuple(dims), tuple(edges), tuple(roles))


@dataclass(frozen=True)
class PerfectMatching:
    """Edges of a graph covering every vertex exactly once."""

    edges: tuple[Edge, ...]
    indices: tuple[int, ...] = field(default=(), compare=False)

    @property
    def weight(self) -> float:
        return math.prod(e.weight for e in self.edges)

    def modes(self, vertex_count: int) -> list[int]:
        out = [-1] * vertex_count
        for e in self.edges:
            out[e.u] = e.mode_u
            out[e.v] = e.mode_v
        return out


@dataclass(frozen=True)
class StateVector:
    """Sparse map from kets to amplitudes.

    Kets list one mode per detector vertex in ascending vertex order.  Terms
    are kept sorted by ket; amplitudes at or below ``AMPLITUDE_EPSILON`` in
    modulus are dropped.
    """

    terms: Mapping[Ket, complex]
    dimensions: tuple[int, ...] = ()
    unnormalized: bool = True

    def __post_init__(self) -> None:
        kept = {tuple(int(m) for m in k): complex(a) for k, a in self.terms.items()
                if abs(a) > AMPLITUDE_EPSILON}
        object.__setattr__(self, "terms", dict(sorted(kept.items())))
        object.__setattr__(self, "dimensions", tuple(self.dimensions))

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[Ket]:
        return iter(self.terms)

    def __getitem__(self, ket: Ket) -> complex:
        return self.terms.get(tuple(ket), 0j)

    def items(self):
        return self.terms.items()

    @property
    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.terms.values()))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def isclose(self, other: StateVector, atol: float = 1e-9) -> bool:
        kets = set(self.terms) | set(other.terms)
        return all(abs(self[k] - other[k]) <= atol for k in kets)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for ket, amp in self.terms.items():
            a = amp.real if abs(amp.imag) < AMPLITUDE_EPSILON else amp
            parts.append(f"{a:+.6g}|{''.join(_digit(m) for m in ket)}>")
        return " ".join(parts)


def _digit(m: int) -> str:
    return str(m) if m < 10 else f"({m})"


def normalize(state: StateVector) -> StateVector:
    """Scale ``state`` to unit 2-norm, keeping relative phases."""
    norm = state.norm
    if norm <= AMPLITUDE_EPSILON:
        raise ZeroState("cannot normalize the zero state")
    return StateVector({k: a / norm for k, a in state.items()},
                       state.dimensions, unnormalized=False)


def _matching_indices(vertex_count: int, edges: Sequence[Edge]) -> list[tuple[int, ...]]:
    if vertex_count % 2 or vertex_count == 0:
        return []
    incident: list[list[int]] = [[] for _ in range(vertex_count)]
    for i, e in enumerate(edges):
        incident[e.u].append(i)
    for i, e in enumerate(edges):
        incident[e.v].append(i)
    # edges at a vertex whose partner is larger come first, in key order;
    # the recursion only ever uses those since smaller vertices are covered
    for lst in incident:
        lst.sort(key=lambda i: edges[i].key)

    covered = [False] * vertex_count
    chosen: list[int] = []
    found: list[tuple[int, ...]] = []

    def recurse(start: int) -> None:
        while start < vertex_count and covered[start]:
            start += 1
        if start == vertex_count:
            found.append(tuple(chosen))
            return
        covered[start] = True
        for i in incident[start]:
            other = edges[i].other(start)
            if covered[other]:
                continue
            covered[other] = True
            chosen.append(i)
            recurse(start + 1)
            chosen.pop()
            covered[other] = False
        covered[start] = False

    recurse(0)
    return found


def enumerate_perfect_matchings(g: Graph) -> list[PerfectMatching]:
    """Return every perfect matching of ``g`` in lexicographic key order.

    Parallel edges of different colors between the same pair of vertices are
    distinct edges, so they give distinct matchings.  Graphs with an odd
    number of vertices have none.
    """
    return [PerfectMatching(tuple(g.edges[i] for i in idx), idx)
            for idx in _matching_indices(g.vertex_count, g.edges)]


class MatchingTable:
    """Perfect matchings of a fixed topology, compiled for fast re-weighting.

    ``pm_edges[p]`` lists the edge indices of matching ``p`` and
    ``pm_ket[p]`` the index of the ket it produces in ``kets``.  Only the
    topology is captured; the amplitudes are evaluated for any weight vector.
    """

    def __init__(self, g: Graph):
        self.graph = g
        self.edge_count = len(g.edges)
        half = g.vertex_count // 2
        idx = _matching_indices(g.vertex_count, g.edges)
        self.pm_edges = np.array(idx, dtype=np.intp).reshape(len(idx), half)
        detectors = g.detectors
        kets: dict[Ket, int] = {}
        pm_ket = []
        for row in idx:
            modes = [0] * g.vertex_count
            for i in row:
                e = g.edges[i]
                modes[e.u] = e.mode_u
                modes[e.v] = e.mode_v
            ket = tuple(modes[v] for v in detectors)
            pm_ket.append(kets.setdefault(ket, len(kets)))
        self.kets: list[Ket] = list(kets)
        self.pm_ket = np.array(pm_ket, dtype=np.intp)

    @property
    def pm_count(self) -> int:
        return len(self.pm_ket)

    def pm_amplitudes(self, weights: np.ndarray) -> np.ndarray:
        if self.pm_count == 0:
            return np.zeros(0)
        return np.prod(np.asarray(weights, dtype=float)[self.pm_edges], axis=1)

    def amplitudes(self, weights: np.ndarray) -> np.ndarray:
        """Summed amplitude per ket (aligned with ``self.kets``)."""
        return np.bincount(self.pm_ket, weights=self.pm_amplitudes(weights),
                           minlength=len(self.kets))

    def leave_one_out(self, weights: np.ndarray) -> np.ndarray:
        """Product of all other edge weights in the matching, per slot.

        Prefix/suffix products avoid dividing by a weight that may be zero.
        """
        w = np.asarray(weights, dtype=float)[self.pm_edges]
        p, k = w.shape
        prefix = np.ones((p, k))
        suffix = np.ones((p, k))
        if k > 1:
            prefix[:, 1:] = np.cumprod(w[:, :-1], axis=1)
            suffix[:, :-1] = np.cumprod(w[:, :0:-1], axis=1)[:, ::-1]
        return prefix * suffix

    def restrict(self, keep: np.ndarray) -> MatchingTable:
        """Table for the subgraph keeping only edges where ``keep`` is true.

        Matchings using a dropped edge disappear; nothing is re-enumerated.
        """
        keep = np.asarray(keep, dtype=bool)
        new_index = np.cumsum(keep) - 1
        alive = keep[self.pm_edges].all(axis=1) if self.pm_count else np.zeros(0, bool)
        out = object.__new__(MatchingTable)
        out.graph = self.graph.with_edges(e for e, k in zip(self.graph.edges, keep) if k)
        out.edge_count = int(keep.sum())
        out.pm_edges = new_index[self.pm_edges[alive]]
        used = np.unique(self.pm_ket[alive])
        remap = np.full(len(self.kets), -1, dtype=np.intp)
        remap[used] = np.arange(len(used))
        out.kets = [self.kets[i] for i in used]
        out.pm_ket = remap[self.pm_ket[alive]]
        return out

    def state(self, weights: np.ndarray | None = None) -> StateVector:
        w = self.graph.weights if weights is None else weights
        amps = self.amplitudes(w)
        dims = tuple(self.graph.dimensions[v] for v in self.graph.detectors)
        return StateVector(dict(zip(self.kets, amps)), dims)


def state_from_graph(g: Graph) -> StateVector:
    """Unnormalized post-selected state of ``g``.

    Every perfect matching adds the product of its edge weights to the ket it
    assigns; matchings landing on the same ket interfere.  Input-role
    vertices must be covered but carry no label in the ket.
    """
    return MatchingTable(g).state()


def complete_graph(vertex_count: int, dimensions: Sequence[int],
                   forbidden: Iterable[tuple[int, int]] = (),
                   weight: float = 1.0) -> Graph:
    """Graph with every vertex pair joined in every mode combination.

    ``forbidden`` lists vertex pairs that receive no edges at all.
    """
    if vertex_count % 2:
        raise InvalidGraph("complete_graph needs an even vertex count")
    banned = {(min(a, b), max(a, b)) for a, b in forbidden}
    edges = [Edge(u, v, mu, mv, weight)
             for u in range(vertex_count) for v in range(u + 1, vertex_count)
             if (u, v) not in banned
             for mu in range(dimensions[u]) for mv in range(dimensions[v])]
    return Graph(vertex_count, tuple(dimensions), tuple(edges))
