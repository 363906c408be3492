import itertools
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ghz43_graph
from halograph.errors import InvalidGraph, ZeroState
from halograph.graph import (Edge, Graph, MatchingTable, StateVector, complete_graph,
                             enumerate_perfect_matchings, normalize, state_from_graph)
from oracles import double_factorial, subset_matchings, subset_state


def random_graph(rng: random.Random, max_vertices=6, max_edges=12, max_dim=3) -> Graph:
    n = rng.choice([v for v in range(2, max_vertices + 1, 2)])
    dims = [rng.randint(1, max_dim) for _ in range(n)]
    pool = [(u, v, mu, mv) for u in range(n) for v in range(u + 1, n)
            for mu in range(dims[u]) for mv in range(dims[v])]
    keys = rng.sample(pool, min(len(pool), rng.randint(1, max_edges)))
    edges = [Edge(*k, rng.uniform(-1.5, 1.5)) for k in keys]
    return Graph(n, tuple(dims), tuple(edges))


def test_edge_is_canonical():
    e = Edge(3, 1, 2, 0, -0.5)
    assert e.key == (1, 3, 0, 2)
    assert e.mode_at(3) == 2


@pytest.mark.parametrize("edges, dims", [
    ([Edge(0, 1, 0, 0), Edge(1, 0, 0, 0)], (1, 1)),   # duplicate key
    ([Edge(0, 1, 1, 0)], (1, 1)),                     # mode beyond dimension
    ([Edge(0, 2, 0, 0)], (1, 1)),                     # endpoint out of range
])
def test_graph_rejects_invalid(edges, dims):
    with pytest.raises(InvalidGraph):
        Graph(2, dims, tuple(edges))


def test_self_loop_rejected():
    with pytest.raises(InvalidGraph):
        Edge(1, 1)


def test_input_input_edge_rejected():
    with pytest.raises(InvalidGraph):
        Graph(2, (1, 1), (Edge(0, 1),), ("input", "input"))


def test_k4_has_three_matchings():
    g = complete_graph(4, [1, 1, 1, 1])
    assert len(enumerate_perfect_matchings(g)) == 3


def test_colored_k4_matches_subset_oracle():
    g = complete_graph(4, [2, 2, 2, 2])
    pms = enumerate_perfect_matchings(g)
    assert len(pms) == len(subset_matchings(g)) == 48


def test_ghz43_graph_has_one_matching_per_color(ghz43):
    pms = enumerate_perfect_matchings(ghz43)
    assert len(pms) == 3
    assert sorted({e.mode_u for e in pm.edges} for pm in pms) == [{0}, {1}, {2}]


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_complete_uncolored_count_is_double_factorial(n):
    g = complete_graph(2 * n, [1] * (2 * n))
    pms = enumerate_perfect_matchings(g)
    assert len(pms) == double_factorial(2 * n - 1)
    for pm in pms:
        covered = sorted(v for e in pm.edges for v in (e.u, e.v))
        assert covered == list(range(2 * n))


def test_matchings_come_in_lexicographic_order():
    g = complete_graph(6, [2, 1, 2, 1, 1, 2])
    keys = [sorted(e.key for e in pm.edges) for pm in enumerate_perfect_matchings(g)]
    assert keys == sorted(keys)
    assert len(set(map(tuple, keys))) == len(keys)


def test_odd_vertex_count_gives_nothing():
    g = Graph(3, (1, 1, 1), (Edge(0, 1), Edge(1, 2)))
    assert enumerate_perfect_matchings(g) == []
    assert state_from_graph(g).is_zero


def test_single_edge_state():
    g = Graph(2, (1, 1), (Edge(0, 1, 0, 0, 0.5),))
    assert dict(state_from_graph(g).items()) == {(0, 0): 0.5}


def test_ghz43_state(ghz43):
    s = state_from_graph(ghz43)
    assert dict(s.items()) == {(0,) * 4: 1, (1,) * 4: 1, (2,) * 4: 1}


def test_naive44_state_has_two_cross_terms(naive44):
    s = state_from_graph(naive44)
    assert len(enumerate_perfect_matchings(naive44)) == 6
    expected = {(i,) * 4: 1 for i in range(4)}
    expected[(0, 0, 3, 3)] = 1
    expected[(3, 3, 0, 0)] = 1
    assert dict(s.items()) == expected


def test_normalize():
    assert dict(normalize(StateVector({(0, 0): 2.0})).items()) == {(0, 0): 1.0}
    s = normalize(StateVector({(0, 0): 1.0, (1, 1): -1.0}))
    assert s[(0, 0)] == pytest.approx(1 / math.sqrt(2))
    assert s[(1, 1)] == pytest.approx(-1 / math.sqrt(2))
    assert not s.unnormalized
    with pytest.raises(ZeroState):
        normalize(StateVector({(0, 0): 1e-14}))


@pytest.mark.parametrize("n, dims, count", [
    (4, [1] * 4, 6),
    (4, [2] * 4, 24),
    (8, [4] * 4 + [1] * 4, 166),
])
def test_complete_graph_edge_count(n, dims, count):
    g = complete_graph(n, dims)
    assert len(g.edges) == count
    assert len(g.edges) == sum(dims[u] * dims[v] for u, v in itertools.combinations(range(n), 2))


def test_state_matches_subset_oracle_on_random_graphs():
    rng = random.Random(7)
    for _ in range(200):
        g = random_graph(rng)
        got = dict(state_from_graph(g).items())
        want = subset_state(g)
        assert got.keys() == want.keys()
        for k in want:
            assert got[k] == pytest.approx(want[k], abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 10 ** 6), scale=st.floats(0.2, 3.0))
def test_single_edge_multilinearity(seed, scale):
    rng = random.Random(seed)
    g = random_graph(rng, max_vertices=6, max_edges=10)
    idx = rng.randrange(len(g.edges))
    w = g.weights
    w2 = w.copy()
    w2[idx] *= scale
    table = MatchingTable(g)
    base = table.amplitudes(w)
    scaled = table.amplitudes(w2)
    uses = np.zeros(len(table.kets), bool)
    for p, row in enumerate(table.pm_edges):
        if idx in row:
            uses[table.pm_ket[p]] = True
    # each ket's amplitude splits into PMs with and without the edge
    with_edge = np.zeros(len(table.kets))
    for p, row in enumerate(table.pm_edges):
        if idx in row:
            with_edge[table.pm_ket[p]] += np.prod(w[row])
    np.testing.assert_allclose(scaled, base + (scale - 1) * with_edge, atol=1e-12)
    np.testing.assert_allclose(scaled[~uses], base[~uses], atol=1e-15)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 10 ** 6), lam=st.floats(-2.0, 2.0).filter(lambda x: abs(x) > 0.1))
def test_global_scaling(seed, lam):
    g = random_graph(random.Random(seed))
    s = state_from_graph(g)
    t = state_from_graph(g.scaled(lam))
    power = lam ** (g.vertex_count // 2)
    for k in set(s) | set(t):
        assert t[k] == pytest.approx(power * s[k], abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10 ** 6))
def test_edge_order_irrelevant(seed):
    rng = random.Random(seed)
    g = random_graph(rng)
    shuffled = list(g.edges)
    rng.shuffle(shuffled)
    h = Graph(g.vertex_count, g.dimensions, tuple(shuffled))
    assert h == g
    assert dict(state_from_graph(h).items()) == dict(state_from_graph(g).items())


def test_json_round_trip():
    g = ghz43_graph(0.123456789012345678)
    assert Graph.from_dict(g.to_dict()) == g


def test_restrict_matches_fresh_enumeration():
    g = complete_graph(6, [2, 1, 2, 1, 1, 2])
    rng = np.random.default_rng(3)
    keep = rng.random(len(g.edges)) < 0.6
    sub = MatchingTable(g).restrict(keep)
    fresh = MatchingTable(g.with_edges(e for e, k in zip(g.edges, keep) if k))
    assert sub.pm_count == fresh.pm_count
    assert sub.state().isclose(fresh.state())
