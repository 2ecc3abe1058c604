"""Scaling driver: one iteration per bit, APSP and k-source variants, verification.

Every node keeps two tables per tracked source s: dist(s, me) and dist(me, s).
The second one is what the flipped orientation needs, so each iteration runs
the pipeline on the graph and on its reverse.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .config import Config
from .engine import NodeProgram, RoundEngine, RoundStats, Tag
from .errors import NoValidParent, VerificationFailed
from .graph import WeightedDigraph, bit_decompose
from .primitives import broadcast, build_bfs_tree
from .rsink import RsinkResult, reversed_rsink
from .scaling import ScalingContext, exchange_and_reduce
from .short_range import short_range, short_range_extension

log = logging.getLogger(__name__)
INF = math.inf


def apsp_center_count(n: int, alpha: float) -> int:
    return min(n, math.ceil(alpha * math.sqrt(n) * math.log(max(n, 2))))


def kssp_center_count(n: int, k: int, alpha: float) -> int:
    return min(n, math.ceil(alpha * min(k, math.sqrt(n)) * math.log(max(n, 2))))


def apsp_hops(n: int) -> int:
    return math.ceil(math.sqrt(n))


def kssp_hops(n: int, k: int) -> int:
    return max(math.ceil(n / k), math.ceil(math.sqrt(n)))


def sample_centers(engine: RoundEngine, count: int, rng, phase: str = "centers") -> list:
    """Node 0 draws `count` distinct IDs and broadcasts them."""
    count = min(count, engine.n)
    chosen = sorted(rng.sample(range(engine.n), count))
    held = broadcast(engine, {0: [(c,) for c in chosen]} if chosen else {}, phase)
    return sorted(c for (c,) in held[0])


def _closure(mat: np.ndarray) -> np.ndarray:
    d = mat.copy()
    for k in range(d.shape[0]):
        np.minimum(d, d[:, k:k + 1] + d[k:k + 1, :], out=d)
    return d


def _to_int(x):
    return int(x) if x != INF else INF


@dataclass
class IterationResult:
    inc: dict  # inc[s][t] = dist_{w'}(s, t), held by t
    out: dict  # out[s][t] = dist_{w'}(t, s), held by t
    centers: list
    stats: RoundStats
    rsink: list = field(default_factory=list)
    to_centers: dict = field(default_factory=dict)


def run_iteration(engine: RoundEngine, ctx: ScalingContext, sources, centers, h: int,
                  check_oracle: bool = False) -> IterationResult:
    n = ctx.n
    S = sorted(sources)
    C = sorted(centers)
    snapshot = engine.stats.copy()
    needed = sorted(set(S) | set(C))
    exchange_and_reduce(engine, ctx, needed)
    exchange_and_reduce(engine, ctx.flipped(), needed)
    rsinks: list[RsinkResult] = []
    center_in, center_out = {s: {} for s in S}, {s: {} for s in S}
    to_c_rows = {}
    if C:
        everyone = range(n)
        # dist(u, c) at u and dist(c, u) at u, exact within h hops
        to_c = short_range(engine, ctx, everyone, h, flip=True, targets=C)
        from_c = short_range(engine, ctx, C, h)
        items = {}
        for c in C:
            row = to_c.est[c]
            items[c] = [(c, x, row[x]) for x in C if x != c and row[x] != INF]
        held = broadcast(engine, items, "broadcast")
        idx = {c: j for j, c in enumerate(C)}
        mat = np.full((len(C), len(C)), np.inf)
        np.fill_diagonal(mat, 0)
        for a, b, d in held[0]:
            mat[idx[a], idx[b]] = min(mat[idx[a], idx[b]], d)
        clo = _closure(mat)
        # local composition at each node over center chains
        to_arr = np.array([[to_c.est[u][c] for c in C] for u in everyone], dtype=float)
        from_arr = np.array([[from_c.est[c][u] for c in C] for u in everyone], dtype=float)
        d_out = (to_arr[:, :, None] + clo[None, :, :]).min(axis=1)
        d_in = (clo[None, :, :] + from_arr[:, None, :]).min(axis=2)
        to_sink = [[_to_int(d_out[u, j]) for u in everyone] for j in range(len(C))]
        from_src = [[_to_int(d_in[u, j]) for u in everyone] for j in range(len(C))]
        to_c_rows = {u: {c: to_sink[j][u] for j, c in enumerate(C)} for u in everyone}
        fwd = reversed_rsink(engine, ctx.wprime, C, S, to_sink)
        bwd = reversed_rsink(engine, ctx.flipped().wprime, C, S, from_src)
        rsinks = [fwd, bwd]
        for c in C:
            for s in S:
                center_in[s][c] = fwd.sink_dist[c][s]
                center_out[s][c] = bwd.sink_dist[c][s]
    ext = short_range_extension(engine, ctx, S, center_in, h)
    ext_r = short_range_extension(engine, ctx.flipped(), S, center_out, h)
    res = IterationResult(ext.est, ext_r.est, C, engine.stats.delta(snapshot), rsinks, to_c_rows)
    if check_oracle:
        _oracle_check(ctx.wprime, res)
    return res


def _oracle_check(wprime: WeightedDigraph, res: IterationResult) -> None:
    from .oracle import dijkstra

    rev = wprime.reversed()
    bad = []
    for s in res.inc:
        if res.inc[s] != dijkstra(wprime, s):
            bad.append(("inc", s))
        if res.out[s] != dijkstra(rev, s):
            bad.append(("out", s))
    if bad:
        raise VerificationFailed(f"iteration disagrees with oracle for {bad[:5]}", bad)


class _Check(NodeProgram):
    lockstep = False

    def __init__(self, w: WeightedDigraph, table: dict):
        self.w = w
        self.table = table
        self.sources = sorted(table)
        n = w.n
        self.improvable = [set() for _ in range(n)]
        self.supported = [set() for _ in range(n)]

    def start(self, net):
        for t in range(net.n):
            for s in self.sources:
                d = self.table[s][t]
                if d != INF:
                    net.send_all(t, (Tag.CHECK, s, d))

    def step(self, net, node, rnd, inbox):
        into = self.w.inc[node]
        for x, (_, s, dx) in inbox:
            mine = self.table[s][node]
            via = dx + into[x]
            if via < mine:
                self.improvable[node].add(s)
            if via <= mine:
                self.supported[node].add(s)

    def violations(self, node):
        bad = []
        for s in self.sources:
            d = self.table[s][node]
            if d == INF:
                bad.append(s)
            elif s == node:
                if d != 0:
                    bad.append(s)
            elif s in self.improvable[node] or s not in self.supported[node]:
                bad.append(s)
        return bad


@dataclass
class VerifyResult:
    ok: bool
    witnesses: list  # (source, target) pairs broadcast by violators

    def __bool__(self):
        return self.ok


def verify_distributed(engine: RoundEngine, w: WeightedDigraph, table: dict,
                       phase: str = "verify") -> VerifyResult:
    """Each node checks its entries against its neighbours' entries.

    `table[s][t]` claims dist_w(s, t) and is held by t. An entry fails when it is
    missing, when a neighbour relaxation improves it, when d(s, s) != 0, or when
    no incident edge accounts for it.
    """
    prog = _Check(w, table)
    engine.run(prog, phase)
    items = {}
    for t in range(engine.n):
        bad = prog.violations(t)
        if bad:
            items[t] = [(s, t) for s in bad]
    held = broadcast(engine, items, phase)
    witnesses = sorted(set(held[0]))
    return VerifyResult(not witnesses, witnesses)


@dataclass
class ScalingRun:
    dist: list  # dist[s][t] for tracked s (all nodes for apsp)
    sources: list
    stats: RoundStats
    iterations: list
    beta: int
    h: int
    attempts: int
    engine: RoundEngine
    reverse_dist: list = field(default_factory=list)  # reverse_dist[s][t] = dist(t, s)

    def stats_json(self) -> dict:
        doc = self.stats.to_json()
        doc["iterations"] = [it.stats.to_json() for it in self.iterations]
        doc["beta"] = self.beta
        doc["h"] = self.h
        doc["attempts"] = self.attempts
        return doc


def _verify_both(engine, wprime, res: IterationResult) -> bool:
    a = verify_distributed(engine, wprime, res.inc)
    b = verify_distributed(engine, wprime.reversed(), res.out)
    return a.ok and b.ok


def _attempt(engine, ctx, sources, centers, h, config: Config):
    """One run_iteration; None when a node detected inconsistent center tables."""
    try:
        return run_iteration(engine, ctx, sources, centers, h, config.check_oracle)
    except NoValidParent:
        if not config.las_vegas:
            raise
        log.info("sink trees could not be built; center sample missed a long path")
        return None


def apsp(g: WeightedDigraph, seed: int = 0, config: Config | None = None) -> ScalingRun:
    config = config or Config()
    n = g.n
    engine = RoundEngine(g, bandwidth_factor=config.bandwidth_factor, seed=seed)
    build_bfs_tree(engine)
    bd = bit_decompose(g)
    h = config.h or apsp_hops(n)
    zeta = apsp_center_count(n, config.alpha)
    rng = engine.node_rng(0)
    S = list(range(n))
    inc = out = None
    iterations = []
    attempts = 0
    for i in range(1, bd.beta + 1):
        w, wp = bd.levels[i - 1], bd.levels[i]
        ctx = (ScalingContext.first(w, wp, S) if i == 1
               else ScalingContext(w, wp, inc, out))
        for _ in range(config.max_attempts):
            attempts += 1
            C = sample_centers(engine, zeta, rng)
            res = _attempt(engine, ctx, S, C, h, config)
            if res is not None and (not config.las_vegas or _verify_both(engine, wp, res)):
                break
            log.info("iteration %d failed verification; resampling centers", i)
        else:
            raise VerificationFailed(f"iteration {i} failed {config.max_attempts} attempts")
        iterations.append(res)
        inc, out = res.inc, res.out
    dist = [list(inc[s]) for s in S]
    rdist = [list(out[s]) for s in S]
    return ScalingRun(dist, S, engine.stats, iterations, bd.beta, h, attempts, engine, rdist)


def kssp(g: WeightedDigraph, sources, seed: int = 0, config: Config | None = None) -> ScalingRun:
    config = config or Config()
    n = g.n
    S = sorted(set(sources))
    if not S:
        raise ValueError("kssp needs at least one source")
    k = len(S)
    engine = RoundEngine(g, bandwidth_factor=config.bandwidth_factor, seed=seed)
    build_bfs_tree(engine)
    bd = bit_decompose(g)
    beta = bd.beta
    h = config.h or kssp_hops(n, k)
    zeta = kssp_center_count(n, k, config.alpha)
    rng = engine.node_rng(0)
    attempts = 0
    for _ in range(config.max_attempts):
        attempts += 1
        # all center sets up front: node 0 samples, one broadcast of (i, c) items
        draws = {i: sorted(rng.sample(range(n), zeta)) for i in range(1, beta + 1)}
        held = broadcast(engine, {0: [(i, c) for i, cs in draws.items() for c in cs]}, "centers")
        centers = {i: [] for i in range(1, beta + 1)}
        for i, c in held[0]:
            centers[i].append(c)
        tracked = {beta: list(S)}
        for i in range(beta - 1, -1, -1):
            tracked[i] = sorted(set(tracked[i + 1]) | set(centers[i + 1]))
        inc = out = None
        iterations = []
        failed = False
        for i in range(1, beta + 1):
            w, wp = bd.levels[i - 1], bd.levels[i]
            ctx = (ScalingContext.first(w, wp, tracked[0]) if i == 1
                   else ScalingContext(w, wp, inc, out))
            res = _attempt(engine, ctx, tracked[i], sorted(centers[i]), h, config)
            if res is None or (config.las_vegas and not _verify_both(engine, wp, res)):
                log.info("k-SSP iteration %d failed verification; restarting", i)
                failed = True
                break
            iterations.append(res)
            inc, out = res.inc, res.out
        if not failed:
            break
    else:
        raise VerificationFailed(f"k-SSP failed {config.max_attempts} attempts")
    dist = [list(inc[s]) for s in S]
    rdist = [list(out[s]) for s in S]
    return ScalingRun(dist, S, engine.stats, iterations, beta, h, attempts, engine, rdist)


def phase_budget_ratios(run: ScalingRun) -> dict:
    """Worst per-iteration ratio of measured rounds to each phase's budget shape.

    short-range: n * sqrt(h) * log^2 n; rsink-*: n * sqrt(|C|) * log^2 n;
    broadcast: |C|^2 + D.
    """
    n = run.engine.n
    lg2 = math.log2(max(n, 2)) ** 2
    diam = run.engine.tree.ecc if run.engine.tree else 0
    out = {"short_range": 0.0, "rsink": 0.0, "broadcast": 0.0}
    for it in run.iterations:
        ph = it.stats.rounds_by_phase
        c = len(it.centers)
        rs = sum(r for p, r in ph.items() if p.startswith("rsink"))
        out["short_range"] = max(out["short_range"],
                                 ph.get("short-range", 0) / (n * math.sqrt(run.h) * lg2))
        if c:
            out["rsink"] = max(out["rsink"], rs / (n * math.sqrt(c) * lg2))
            out["broadcast"] = max(out["broadcast"], ph.get("broadcast", 0) / (c * c + diam))
    return out
