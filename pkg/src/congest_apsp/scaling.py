"""Reduced weights for one scaling step (w -> w' = 2w + b)."""
from __future__ import annotations

import math

from .engine import NodeProgram, RoundEngine, Tag
from .errors import NegativeReducedWeight
from .graph import WeightedDigraph, iteration_bit

INF = math.inf


class ReducedWeights:
    """r_s(u, v) = 2 dist_w(s, u) + w'(u, v) - 2 dist_w(s, v) per tracked source.

    `inc[s][v][u]` is held by v and `out[s][u][v]` by u; both store r_s(u, v),
    each computed by its holder from its own table and the neighbour's message.
    """

    def __init__(self, n: int):
        self.n = n
        self.inc: dict[int, list[dict]] = {}
        self.out: dict[int, list[dict]] = {}

    def sources(self):
        return self.inc.keys()

    def value(self, s: int, u: int, v: int) -> int:
        return self.out[s][u][v]

    def as_graph(self, s: int) -> WeightedDigraph:
        return WeightedDigraph(self.n, [dict(d) for d in self.out[s]])


class ScalingContext:
    """Inputs of one scaling iteration in one edge orientation.

    dist_w[s][t] is dist_w(s, t), held by t. dist_w_rev[s][t] is dist_w(t, s),
    also held by t; it is what the flipped orientation needs.
    """

    def __init__(self, w: WeightedDigraph, wprime: WeightedDigraph, dist_w: dict,
                 dist_w_rev: dict | None = None, *, trivial: bool = False, _partner=None):
        self.w = w
        self.wprime = wprime
        self.b = iteration_bit(w, wprime)
        self.dist_w = dist_w
        self.dist_w_rev = dist_w_rev if dist_w_rev is not None else {}
        self.trivial = trivial  # dist_w is identically zero
        self.reduced: ReducedWeights | None = None
        self._partner = _partner

    @property
    def n(self) -> int:
        return self.w.n

    def flipped(self) -> "ScalingContext":
        if self._partner is None:
            self._partner = ScalingContext(self.w.reversed(), self.wprime.reversed(),
                                           self.dist_w_rev, self.dist_w,
                                           trivial=self.trivial, _partner=self)
        return self._partner

    @classmethod
    def first(cls, w0: WeightedDigraph, w1: WeightedDigraph, sources) -> "ScalingContext":
        """Level 0 is identically zero, so every table is zero without communication."""
        zeros = {s: [0] * w0.n for s in sources}
        return cls(w0, w1, zeros, dict(zeros), trivial=True)


def lift_distance(dist_w_val: int, dist_rs_val: int) -> int:
    return 2 * dist_w_val + dist_rs_val


class _Exchange(NodeProgram):
    lockstep = False

    def __init__(self, ctx: ScalingContext, sources, rw: ReducedWeights):
        self.ctx = ctx
        self.sources = sorted(sources)
        self.rw = rw

    def start(self, net):
        table = self.ctx.dist_w
        for t in range(net.n):
            for s in self.sources:
                net.send_all(t, (Tag.TABLE, s, table[s][t]))

    def step(self, net, node, rnd, inbox):
        table = self.ctx.dist_w
        wp = self.ctx.wprime
        rw = self.rw
        for t, (_, s, dt) in inbox:
            dx = table[s][node]
            r_in = 2 * dt + wp.out[t][node] - 2 * dx
            r_out = 2 * dx + wp.out[node][t] - 2 * dt
            if r_in < 0 or r_out < 0:
                raise NegativeReducedWeight(
                    f"source {s}: edge {node}-{t} gets reduced weight {min(r_in, r_out)}")
            rw.inc[s][node][t] = r_in
            rw.out[s][node][t] = r_out


def exchange_and_reduce(engine: RoundEngine, ctx: ScalingContext, sources,
                        phase: str = "exchange") -> ReducedWeights:
    """Every node learns r_s on its incident edges for every s in `sources`."""
    n = ctx.n
    rw = ctx.reduced if ctx.reduced is not None else ReducedWeights(n)
    missing = [s for s in sorted(set(sources)) if s not in rw.inc]
    for s in missing:
        rw.inc[s] = [dict() for _ in range(n)]
        rw.out[s] = [dict() for _ in range(n)]
    if ctx.trivial:
        # dist_w is zero everywhere, so r_s = w' and nothing needs to be sent
        for s in missing:
            for u in range(n):
                rw.out[s][u] = dict(ctx.wprime.out[u])
                rw.inc[s][u] = dict(ctx.wprime.inc[u])
    elif missing:
        engine.run(_Exchange(ctx, missing, rw), phase)
    ctx.reduced = rw
    return rw
