"""Short-range distances: rounded time-indexed BFS, then gated Bellman-Ford repair.

Rounded weights are kept as integer counts of units of size 1/sigma, so a
reduced weight r becomes max(1, r*sigma) units. A BFS value of d units is
announced in round d. The repair phase runs Bellman-Ford on the exact reduced
weights but a node only re-announces while its value has not dropped more than
h units below its BFS value.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .engine import NodeProgram, RoundEngine, Tag
from .scaling import ScalingContext, exchange_and_reduce, lift_distance

INF = math.inf


def round_up(r_val: int, sigma: int) -> int:
    return r_val * sigma if r_val > 0 else 1


def choose_sigma(h: int, q: int, n: int) -> int:
    """1/Delta; sqrt(h) for all-sources runs, sqrt(q*h/n) for q sources."""
    return max(1, math.ceil(math.sqrt(q * h / n)))


class BoundedBFS(NodeProgram):
    """Time-indexed BFS from one origin over rounded weights (values in units)."""

    def __init__(self, n: int, origin: int, r_in: list, sigma: int, limit: int, seeds=None):
        self.origin = origin
        self.r_in = r_in
        self.sigma = sigma
        self.limit = limit
        self.seeds = seeds or {}
        self.d = [INF] * n
        self.sent = [False] * n

    def _maybe_send(self, net, node, rnd):
        d = self.d[node]
        if self.sent[node] or d > self.limit:
            return
        if d == rnd:
            self.sent[node] = True
            net.send_all(node, (Tag.BFS, self.origin, d))
        elif d > rnd:
            net.wake(node, d)

    def start(self, net):
        for t, units in self.seeds.items():
            self.d[t] = units
        self.d[self.origin] = 0
        for t in sorted(set(self.seeds) | {self.origin}):
            self._maybe_send(net, t, 0)

    def step(self, net, node, rnd, inbox):
        r_in = self.r_in[node]
        sigma = self.sigma
        best = self.d[node]
        for x, (_, _, dx) in inbox:
            r = r_in[x]
            cand = dx + (r * sigma if r > 0 else 1)
            if cand < best:
                best = cand
        self.d[node] = best
        self._maybe_send(net, node, rnd)


class Repair(NodeProgram):
    """Bellman-Ford on exact reduced weights, gated by the BFS value, fixed length."""

    def __init__(self, origin: int, r_in: list, bfs_units: list, sigma: int, h: int,
                 rounds: int, pinned=None):
        self.origin = origin
        self.r_in = r_in
        self.units = bfs_units
        self.sigma = sigma
        self.h = h
        self.rounds = rounds
        self.d = [u // sigma if u != INF else INF for u in bfs_units]
        for t, val in (pinned or {}).items():
            self.d[t] = val
        self.d[origin] = 0
        self.announced = [0] * len(bfs_units)

    def _announce(self, net, node):
        self.announced[node] += 1
        net.send_all(node, (Tag.REPAIR, self.origin, self.d[node]))

    def start(self, net):
        if self.rounds <= 0:
            return
        for t, d in enumerate(self.d):
            if d != INF:
                self._announce(net, t)

    def step(self, net, node, rnd, inbox):
        r_in = self.r_in[node]
        best = self.d[node]
        for x, (_, _, dx) in inbox:
            cand = dx + r_in[x]
            if cand < best:
                best = cand
        if best < self.d[node]:
            self.d[node] = best
            if rnd < self.rounds and best * self.sigma >= self.units[node] - self.h:
                self._announce(net, node)


@dataclass
class ShortRangeResult:
    """est[s][t] estimates dist_{w'}(s, t).

    `holder` says which endpoint knows the entry: "target" when t learned it,
    "source" when s learned it (flipped runs).
    """

    est: dict
    holder: str
    sigma: int
    h: int
    rounds: int = 0
    bfs_units: dict = field(default_factory=dict)
    reduced_est: dict = field(default_factory=dict)
    max_announcements: int = 0


def _run(engine: RoundEngine, ctx: ScalingContext, origins, h: int, phase: str,
         seeds=None, pinned=None, extra_round: bool = False) -> ShortRangeResult:
    n = ctx.n
    origins = sorted(origins)
    rw = exchange_and_reduce(engine, ctx, origins)
    sigma = choose_sigma(h, max(len(origins), 1), n)
    limit = n * sigma + h
    seeds = seeds or {}
    pinned = pinned or {}
    before = engine.round
    bfs = [BoundedBFS(n, s, rw.inc[s], sigma, limit,
                      {c: round_up(v, sigma) for c, v in seeds.get(s, {}).items()})
           for s in origins]
    engine.compose(bfs, phase)
    rounds = h + 1 if extra_round else h
    rep = [Repair(s, rw.inc[s], b.d, sigma, h, rounds, pinned.get(s)) for s, b in zip(origins, bfs)]
    engine.compose(rep, phase)
    est, red = {}, {}
    for s, r in zip(origins, rep):
        dw = ctx.dist_w[s]
        red[s] = r.d
        est[s] = [lift_distance(dw[t], r.d[t]) if r.d[t] != INF else INF for t in range(n)]
    return ShortRangeResult(
        est=est, holder="target", sigma=sigma, h=h, rounds=engine.round - before,
        bfs_units={s: b.d for s, b in zip(origins, bfs)}, reduced_est=red,
        max_announcements=max((max(r.announced) for r in rep), default=0))


def short_range(engine: RoundEngine, ctx: ScalingContext, sources, h: int, flip: bool = False,
                targets=None, phase: str = "short-range") -> ShortRangeResult:
    """Distances under w' that are exact whenever the canonical path has <= h edges.

    Without `flip` every node t learns dist(s, t) for s in `sources`. With
    `flip` the run happens on the reversed orientation with `targets` (default:
    all nodes) as BFS origins, so every s in `sources` learns dist(s, t) for
    each target t.
    """
    if not flip:
        return _run(engine, ctx, sources, h, phase)
    targets = range(ctx.n) if targets is None else targets
    res = _run(engine, ctx.flipped(), targets, h, phase)
    est = {s: [INF] * ctx.n for s in sources}
    for t, row in res.est.items():
        for s in est:
            est[s][t] = row[s]
    res.est = est
    res.holder = "source"
    return res


def short_range_extension(engine: RoundEngine, ctx: ScalingContext, sources, center_dist: dict,
                          h: int, phase: str = "short-range-ext") -> ShortRangeResult:
    """Short range on the s-augmented graph.

    `center_dist[s][c]` is dist_{w'}(s, c), known by center c. Each center is
    seeded with its exact reduced distance (the imaginary edge s -> c) and is
    pinned to it during the repair, which runs h + 1 rounds.
    """
    seeds, pinned = {}, {}
    for s in sources:
        row = center_dist.get(s, {})
        red = {c: d - 2 * ctx.dist_w[s][c] for c, d in row.items() if c != s}
        if any(v < 0 for v in red.values()):
            raise ValueError(f"center distances for source {s} undercut dist_w")
        seeds[s] = red
        pinned[s] = red
    return _run(engine, ctx, sources, h, phase, seeds=seeds, pinned=pinned, extra_round=True)
