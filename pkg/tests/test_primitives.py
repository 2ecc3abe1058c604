import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from congest_apsp.engine import RoundEngine
from congest_apsp.errors import Disconnected
from congest_apsp.generators import generate
from congest_apsp.graph import WeightedDigraph
from congest_apsp.oracle import dijkstra
from congest_apsp.primitives import bellman_ford, broadcast, build_bfs_tree

from strategies import bidirected_graphs

C_BC = 4


def test_bellman_ford_g3(g3):
    eng = RoundEngine(g3)
    d = bellman_ford(eng, 0, g3, "from-source")
    assert d == [0, 2, 5]
    d = bellman_ford(eng, 0, g3, "to-sink")
    assert d[2] == 1 and d[1] == 1


def test_bellman_ford_zero_weights():
    g = generate("random", 10, seed=2).map_weights(lambda u, v, w: 0)
    eng = RoundEngine(g)
    assert bellman_ford(eng, 0, g) == [0] * 10
    assert eng.stats.rounds_total <= 10


def test_bellman_ford_bad_direction(g3):
    with pytest.raises(ValueError):
        bellman_ford(RoundEngine(g3), 0, g3, "sideways")


@given(bidirected_graphs(max_n=12), st.data())
def test_bellman_ford_matches_oracle(g, data):
    root = data.draw(st.integers(0, g.n - 1))
    eng = RoundEngine(g)
    assert bellman_ford(eng, root, g) == dijkstra(g, root)
    assert bellman_ford(eng, root, g, "to-sink") == dijkstra(g.reversed(), root)


def test_bfs_tree_path():
    t = build_bfs_tree(RoundEngine(generate("path", 4, 1, 1)))
    assert t.parent == (None, 0, 1, 2)
    assert t.ecc == 3


def test_bfs_tree_g3(g3):
    t = build_bfs_tree(RoundEngine(g3))
    assert t.parent == (None, 0, 0)
    assert t.depth == (0, 1, 1)
    assert t.ecc == 1


def test_bfs_tree_disconnected():
    g = WeightedDigraph.from_edges(4, [(0, 1, 1), (1, 0, 1), (2, 3, 1), (3, 2, 1)])
    with pytest.raises(Disconnected):
        build_bfs_tree(RoundEngine(g))


@given(bidirected_graphs(max_n=14))
def test_bfs_tree_is_bfs(g):
    t = build_bfs_tree(RoundEngine(g))
    hops = dijkstra(g.map_weights(lambda u, v, w: 1), 0)
    assert list(t.depth) == hops
    assert t.ecc == max(hops)
    for u in range(1, g.n):
        assert t.depth[t.parent[u]] == t.depth[u] - 1
        assert u in t.children[t.parent[u]]


def _bcast(g, items):
    eng = RoundEngine(g)
    tree = build_bfs_tree(eng)
    before = eng.round
    held = broadcast(eng, items)
    return held, eng.round - before, tree.ecc


def test_broadcast_star_single_item():
    held, rounds, d = _bcast(generate("star", 5, 1, 1), {0: [(7,)]})
    assert all(h == [(7,)] for h in held)
    assert rounds <= C_BC * (1 + 2)


def test_broadcast_empty():
    held, rounds, _ = _bcast(generate("star", 5, 1, 1), {})
    assert rounds == 0 and all(h == [] for h in held)


def test_broadcast_g3_six_items(g3):
    items = {0: [(1,), (2,)], 1: [(3,), (4,)], 2: [(5,), (6,)]}
    held, rounds, _ = _bcast(g3, items)
    assert all(sorted(h) == [(i,) for i in range(1, 7)] for h in held)
    assert rounds <= C_BC * (6 + 2)


@given(bidirected_graphs(max_n=12), st.lists(st.tuples(st.integers(0, 11), st.integers(0, 99)),
                                             max_size=40))
def test_broadcast_multiset_and_bound(g, raw):
    items = {}
    for holder, val in raw:
        items.setdefault(holder % g.n, []).append((val, holder % g.n))
    sent = sorted(x for lst in items.values() for x in lst)
    held, rounds, d = _bcast(g, items)
    assert all(sorted(h) == sent for h in held)
    assert rounds <= C_BC * (len(sent) + d)
