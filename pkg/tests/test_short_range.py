import math
import random

from hypothesis import given, settings
from hypothesis import strategies as st

from congest_apsp.engine import RoundEngine
from congest_apsp.generators import generate
from congest_apsp.graph import WeightedDigraph, bit_decompose
from congest_apsp.oracle import canonical_paths, center_suffix, dijkstra, reduced_weights
from congest_apsp.scaling import ScalingContext
from congest_apsp.short_range import (Repair, choose_sigma, round_up, short_range,
                                      short_range_extension)

from strategies import bidirected_graphs
from test_scaling import oracle_context

INF = math.inf


def test_round_up():
    assert round_up(0, 2) == 1
    assert round_up(1, 2) == 2
    assert round_up(3, 2) == 6


def test_sigma_choice():
    assert choose_sigma(4, 1, 3) == 2
    assert choose_sigma(8, 64, 64) == 3
    assert choose_sigma(1, 1, 100) == 1


def test_g3_bfs_units_and_floors(g3):
    ctx = oracle_context(g3, 3, [0])
    res = short_range(RoundEngine(g3), ctx, [0], h=4)
    assert res.sigma == 2
    assert res.bfs_units[0] == [0, 1, 3]
    assert res.reduced_est[0] == [0, 0, 1]
    assert res.est[0] == [0, 2, 5]


def test_g3_flip_source_learns_row(g3):
    ctx = oracle_context(g3, 3)
    res = short_range(RoundEngine(g3), ctx, [0], h=2, flip=True)
    assert res.holder == "source"
    assert res.est[0] == [0, 2, 5]


def _zero_path():
    # forward weight 2, backward 3: at level 2 every forward reduced weight from 0 is 0
    edges = []
    for u in range(5):
        edges += [(u, u + 1, 2), (u + 1, u, 3)]
    return WeightedDigraph.from_edges(6, edges)


def test_extension_reaches_past_h():
    g = _zero_path()
    ctx = oracle_context(g, 2, [0])
    assert reduced_weights(ctx.w, ctx.wprime, 0).weight(4, 5) == 0
    plain = short_range(RoundEngine(g), ctx, [0], h=4)
    assert plain.est[0][5] > 10
    ext = short_range_extension(RoundEngine(g), ctx, [0], {0: {1: 2}}, h=4)
    assert ext.est[0] == [0, 2, 4, 6, 8, 10]


def test_extension_with_every_center_is_exact():
    g = generate("random", 14, seed=5)
    ctx = oracle_context(g, bit_decompose(g).beta, [0, 3])
    truth = {s: dijkstra(ctx.wprime, s) for s in (0, 3)}
    cd = {s: {c: truth[s][c] for c in range(14)} for s in (0, 3)}
    ext = short_range_extension(RoundEngine(g), ctx, [0, 3], cd, h=1)
    assert ext.est == truth


def test_extension_without_centers_is_short_range():
    g = generate("random", 14, seed=6)
    ctx = oracle_context(g, 3, [1])
    a = short_range(RoundEngine(g), ctx, [1], h=3)
    b = short_range_extension(RoundEngine(g), ctx, [1], {}, h=3)
    assert all(y <= x for x, y in zip(a.est[1], b.est[1]))
    truth = dijkstra(ctx.wprime, 1)
    assert all(y >= t for y, t in zip(b.est[1], truth))


def check_scope(g, i, h, sources):
    ctx = oracle_context(g, i)
    res = short_range(RoundEngine(g), ctx, sources, h)
    bad = 0
    for s in sources:
        truth = dijkstra(ctx.wprime, s)
        paths = canonical_paths(ctx.wprime, s)
        for t in range(g.n):
            if res.est[s][t] < truth[t]:
                bad += 1
            if len(paths[t]) - 1 <= h and res.est[s][t] != truth[t]:
                bad += 1
    return bad, res


@given(bidirected_graphs(min_n=3, max_n=12), st.data())
def test_scope_property(g, data):
    bd = bit_decompose(g)
    i = data.draw(st.integers(1, bd.beta))
    h = data.draw(st.integers(1, g.n))
    bad, res = check_scope(g, i, h, list(range(g.n)))
    assert bad == 0
    assert res.est[0][0] == 0
    assert res.max_announcements <= h // res.sigma + 1


@settings(max_examples=15)
@given(bidirected_graphs(min_n=3, max_n=10), st.data())
def test_long_hop_bound_covers_everything(g, data):
    i = data.draw(st.integers(1, bit_decompose(g).beta))
    ctx = oracle_context(g, i)
    res = short_range(RoundEngine(g), ctx, range(g.n), g.n - 1)
    assert all(res.est[s] == dijkstra(ctx.wprime, s) for s in range(g.n))


@given(bidirected_graphs(min_n=3, max_n=12), st.data())
def test_bfs_matches_rounded_oracle(g, data):
    bd = bit_decompose(g)
    i = data.draw(st.integers(1, bd.beta))
    h = data.draw(st.integers(1, g.n))
    s = data.draw(st.integers(0, g.n - 1))
    ctx = oracle_context(g, i, [s])
    res = short_range(RoundEngine(g), ctx, [s], h)
    sig = res.sigma
    r = reduced_weights(ctx.w, ctx.wprime, s)
    rounded = r.map_weights(lambda u, v, x: round_up(x, sig))
    d_rounded, d_r = dijkstra(rounded, s), dijkstra(r, s)
    hops = canonical_paths(ctx.wprime, s)
    limit = g.n * sig + h
    for t in range(g.n):
        got = res.bfs_units[s][t]
        if d_rounded[t] <= limit:
            assert got == d_rounded[t]
        else:
            assert got == INF or got >= d_rounded[t]
        # rounding error along the hop-minimal path is at most one unit per edge
        assert d_rounded[t] - sig * d_r[t] <= len(hops[t]) - 1


class RecordingRepair(Repair):
    def __init__(self, *a, **k):
        super().__init__(*a, **k)
        self.values = [[] for _ in self.d]

    def _announce(self, net, node):
        self.values[node].append(self.d[node])
        super()._announce(net, node)


def _gate_instance():
    """Search small graphs for a node whose BFS overshoots its exact value by > h units."""
    h = 2
    for seed in range(500):
        g = generate("random", 5, 1, 25, seed=seed, extra_per_node=0.4)
        bd = bit_decompose(g)
        for i in range(2, bd.beta + 1):
            ctx = oracle_context(g, i, [0])
            res = short_range(RoundEngine(g), ctx, [0], h)
            d_r = dijkstra(reduced_weights(ctx.w, ctx.wprime, 0), 0)
            for t in range(5):
                if res.bfs_units[0][t] - res.sigma * d_r[t] > h:
                    return g, ctx, h, res, t
    raise AssertionError("no instance found")


def test_gate_blocks_announcements():
    g, ctx, h, res, t = _gate_instance()
    from congest_apsp.scaling import exchange_and_reduce
    rw = exchange_and_reduce(RoundEngine(g), ctx, [0])
    rep = RecordingRepair(0, rw.inc[0], res.bfs_units[0], res.sigma, h, h)
    RoundEngine(g).run(rep, "repair")
    units = res.bfs_units[0]
    for node, vals in enumerate(rep.values):
        for v in vals[1:]:
            assert v * res.sigma >= units[node] - h
    exact = dijkstra(reduced_weights(ctx.w, ctx.wprime, 0), 0)[t]
    assert exact * res.sigma < units[t] - h
    assert exact not in rep.values[t]


def test_extension_scope_planted_centers():
    rng = random.Random(11)
    for trial in range(12):
        n = rng.randint(6, 14)
        g = generate("random", n, seed=trial)
        bd = bit_decompose(g)
        i = rng.randint(1, bd.beta)
        h = rng.randint(1, 3)
        S = rng.sample(range(n), 3)
        C = set(rng.sample(range(n), rng.randint(0, n // 2)))
        ctx = oracle_context(g, i, S)
        truth = {s: dijkstra(ctx.wprime, s) for s in S}
        cd = {s: {c: truth[s][c] for c in C} for s in S}
        ext = short_range_extension(RoundEngine(g), ctx, S, cd, h)
        for s in S:
            paths = canonical_paths(ctx.wprime, s)
            for t in range(n):
                assert ext.est[s][t] >= truth[s][t]
                if len(center_suffix(paths[t], C)) - 1 <= h:
                    assert ext.est[s][t] == truth[s][t]
