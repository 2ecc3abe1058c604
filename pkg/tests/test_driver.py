import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from congest_apsp.config import Config
from congest_apsp.driver import (apsp, apsp_center_count, apsp_hops, kssp, kssp_center_count,
                                 kssp_hops, run_iteration, sample_centers, verify_distributed)
from congest_apsp.engine import RoundEngine
from congest_apsp.errors import VerificationFailed
from congest_apsp.generators import generate
from congest_apsp.graph import WeightedDigraph, bit_decompose
from congest_apsp.oracle import canonical_parents, dijkstra, dijkstra_all, hop_matrix
from congest_apsp.primitives import build_bfs_tree

from conftest import G3_DIST
from strategies import bidirected_graphs
from test_scaling import oracle_context


def engine_for(g):
    eng = RoundEngine(g)
    build_bfs_tree(eng)
    return eng


def test_parameters():
    assert apsp_hops(64) == 8
    assert apsp_center_count(64, 1.0) == math.ceil(8 * math.log(64))
    assert apsp_center_count(16, 3.0) == 16
    assert kssp_center_count(64, 2, 1.0) == math.ceil(2 * math.log(64))
    assert kssp_hops(64, 2) == 32


def test_g3_apsp(g3):
    run = apsp(g3, seed=0)
    assert run.dist == G3_DIST
    assert run.reverse_dist == [list(col) for col in zip(*G3_DIST)]
    assert run.beta == 3


def test_g3_iteration_with_one_center(g3):
    ctx = oracle_context(g3, 3)
    res = run_iteration(engine_for(g3), ctx, range(3), [1], h=2)
    assert [res.inc[s] for s in range(3)] == G3_DIST


def test_iteration_without_centers_when_h_covers_all():
    g = generate("random", 9, seed=2)
    ctx = oracle_context(g, 4)
    res = run_iteration(engine_for(g), ctx, range(9), [], h=8)
    assert [res.inc[s] for s in range(9)] == dijkstra_all(ctx.wprime)


def test_single_edge():
    g = WeightedDigraph.from_edges(2, [(0, 1, 3), (1, 0, 1)])
    assert apsp(g).dist == [[0, 3], [1, 0]]


def test_unit_cycle():
    g = generate("cycle", 4, 1, 1)
    assert apsp(g).dist == hop_matrix(g)


def test_uniform_weights_scale_hops():
    g = generate("grid", 9, 5, 5)
    assert apsp(g).dist == [[5 * x for x in row] for row in hop_matrix(g)]


def test_kssp_g3(g3):
    assert kssp(g3, [0]).dist == [[0, 2, 5]]


def test_kssp_all_sources_equals_apsp():
    g = generate("random", 12, seed=8)
    assert kssp(g, range(12), seed=1).dist == apsp(g, seed=1).dist


def test_kssp_requires_sources(g3):
    with pytest.raises(ValueError):
        kssp(g3, [])


@settings(max_examples=12)
@given(bidirected_graphs(min_n=2, max_n=9), st.integers(0, 99))
def test_apsp_exact(g, seed):
    run = apsp(g, seed=seed, config=Config(check_oracle=True))
    assert run.dist == dijkstra_all(g)


@settings(max_examples=12)
@given(bidirected_graphs(min_n=2, max_n=10), st.data())
def test_kssp_exact(g, data):
    k = data.draw(st.integers(1, g.n))
    S = sorted(data.draw(st.permutations(range(g.n)))[:k])
    run = kssp(g, S, seed=data.draw(st.integers(0, 99)))
    assert run.dist == [dijkstra(g, s) for s in S]


def test_sample_centers_extremes():
    g = generate("random", 10, seed=1)
    eng = engine_for(g)
    rng = random.Random(0)
    assert sample_centers(eng, 10, rng) == list(range(10))
    assert sample_centers(eng, 0, rng) == []


def test_las_vegas_never_returns_wrong_answer():
    # tiny center sets and h = 1 make misses likely; results must still be exact or refused
    g = generate("path", 12, seed=3)
    for seed in range(4):
        try:
            run = apsp(g, seed=seed, config=Config(alpha=0.05, h=1, max_attempts=3))
        except VerificationFailed:
            continue
        assert run.dist == dijkstra_all(g)


def _table(g):
    return {s: dijkstra(g, s) for s in range(g.n)}


def test_verify_accepts_truth():
    g = generate("random", 12, seed=4)
    assert verify_distributed(engine_for(g), g, _table(g)).ok


def test_verify_catches_inflation_on_path():
    g = generate("path", 5, 1, 1)
    table = _table(g)
    table[0][3] += 1
    res = verify_distributed(engine_for(g), g, table)
    assert not res.ok and (0, 3) in res.witnesses


def test_verify_catches_deflation_on_path():
    g = generate("path", 5, 1, 1)
    table = _table(g)
    table[0][3] -= 1
    res = verify_distributed(engine_for(g), g, table)
    assert not res.ok and (0, 3) in res.witnesses


def test_verify_catches_bad_diagonal_and_missing():
    g = generate("random", 8, seed=5)
    table = _table(g)
    table[2][2] = 1
    table[4][6] = math.inf
    res = verify_distributed(engine_for(g), g, table)
    assert (2, 2) in res.witnesses and (4, 6) in res.witnesses


@given(bidirected_graphs(min_n=2, max_n=10), st.data())
def test_verify_catches_any_single_corruption(g, data):
    table = _table(g)
    s = data.draw(st.integers(0, g.n - 1))
    t = data.draw(st.integers(0, g.n - 1))
    delta = data.draw(st.sampled_from([-2, -1, 1, 2]))
    table[s][t] += delta
    assert not verify_distributed(engine_for(g), g, table).ok


def test_stats_json_shape():
    run = apsp(generate("random", 8, seed=1))
    doc = run.stats_json()
    assert set(doc) >= {"phases", "totals", "iterations", "beta", "h", "attempts"}
    assert doc["totals"]["rounds"] == sum(p["rounds"] for p in doc["phases"].values())
    assert len(doc["iterations"]) == run.beta


def test_center_sample_hits_long_paths():
    """At alpha = 3, every canonical path with >= h hops contains a sampled center."""
    n = 1024
    g = generate("random", n, seed=0)
    h = apsp_hops(n)
    count = apsp_center_count(n, 3.0)
    parent = np.zeros((n, n), dtype=np.int64)
    hops = np.zeros((n, n), dtype=np.int64)
    for s in range(n):
        p, hp = canonical_parents(g, s)
        p[s] = s
        parent[s], hops[s] = p, hp
    rows = np.arange(n)[:, None].repeat(n, axis=1)
    by_depth = [np.nonzero(hops == d) for d in range(hops.max() + 1)]
    long_paths = hops >= h
    rng = random.Random(0)
    misses = 0
    for _ in range(100):
        is_center = np.zeros(n, dtype=bool)
        is_center[rng.sample(range(n), count)] = True
        hit = np.zeros((n, n), dtype=bool)
        hit[:, :] = is_center[None, :]
        for d, (ss, tt) in enumerate(by_depth):
            if d:
                hit[ss, tt] |= hit[ss, parent[ss, tt]]
            else:
                hit[ss, tt] = is_center[ss]
        misses += int(np.count_nonzero(long_paths & ~hit))
    assert misses == 0
    assert rows.shape == (n, n)
