"""Reversed r-sink shortest paths.

Every node knows its own distance to each of r sinks; afterwards each sink
knows the distance from every tracked source to itself. Records are relayed
up per-sink shortest-path trees, except through bottleneck nodes whose load
would exceed the threshold g; pairs behind a bottleneck are composed from
Bellman-Ford runs rooted at that bottleneck.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .engine import NodeProgram, RoundEngine, Tag
from .errors import NoValidParent
from .graph import WeightedDigraph
from .primitives import bellman_ford, broadcast

INF = math.inf


def default_threshold(n: int, q: int, r: int) -> int:
    return math.ceil(math.sqrt(n * q * r))


@dataclass
class SinkTrees:
    sinks: list
    parent: list  # parent[i][u]
    children: list  # children[i][u]

    def path(self, i: int, u: int) -> list:
        out = [u]
        while self.parent[i][out[-1]] is not None:
            out.append(self.parent[i][out[-1]])
        return out


class _SinkExchange(NodeProgram):
    lockstep = False

    def __init__(self, n, to_sink):
        self.to_sink = to_sink
        self.heard = [dict() for _ in range(n)]  # heard[u][(i, x)] = dist(x, sink i)

    def start(self, net):
        for u in range(net.n):
            for i, row in enumerate(self.to_sink):
                net.send_all(u, (Tag.SINKDIST, i, row[u]))

    def step(self, net, node, rnd, inbox):
        heard = self.heard[node]
        for x, (_, i, d) in inbox:
            heard[(i, x)] = d


class _JoinWave(NodeProgram):
    """Per sink, a wave over tight edges; a node adopts the first tight sender."""

    lockstep = False

    def __init__(self, n, sinks, to_sink, heard, w: WeightedDigraph):
        self.sinks = sinks
        self.to_sink = to_sink
        self.heard = heard
        self.w = w
        self.parent = [[None] * n for _ in sinks]
        self.joined = [[False] * n for _ in sinks]
        self.children = [[[] for _ in range(n)] for _ in sinks]

    def start(self, net):
        for i, c in enumerate(self.sinks):
            self.joined[i][c] = True
            net.send_all(c, (Tag.TREE, i))

    def step(self, net, node, rnd, inbox):
        offers = {}
        for x, p in inbox:
            if p[0] == Tag.CHILD:
                self.children[p[1]][node].append(x)
                continue
            i = p[1]
            if self.joined[i][node]:
                continue
            if self.to_sink[i][node] == self.w.out[node][x] + self.heard[node][(i, x)]:
                offers[i] = min(offers.get(i, x), x)
        for i, x in sorted(offers.items()):
            self.joined[i][node] = True
            self.parent[i][node] = x
            net.send(node, x, (Tag.CHILD, i))
            net.send_all(node, (Tag.TREE, i), exclude=(x,))


def build_sink_trees(engine: RoundEngine, w: WeightedDigraph, sinks, to_sink,
                     phase: str = "rsink-trees") -> SinkTrees:
    """`to_sink[i][u]` is dist_w(u, sinks[i]), known by u."""
    n = engine.n
    sinks = list(sinks)
    ex = _SinkExchange(n, to_sink)
    engine.run(ex, phase)
    wave = _JoinWave(n, sinks, to_sink, ex.heard, w)
    engine.run(wave, phase)
    orphans = {u: [(u, i)] for i, c in enumerate(sinks) for u in range(n)
               if u != c and wave.parent[i][u] is None}
    if orphans:
        # inconsistent tables: the orphans announce it so every node aborts together
        held = broadcast(engine, orphans, phase)
        u, i = min(held[0])
        raise NoValidParent(f"node {u} found no tight neighbour toward sink {sinks[i]}")
    for i in range(len(sinks)):
        for u in range(n):
            wave.children[i][u].sort()
    return SinkTrees(sinks, wave.parent, wave.children)


class _Count(NodeProgram):
    lockstep = False

    def __init__(self, trees: SinkTrees, blocked, is_source):
        self.t = trees
        self.blocked = blocked  # blocked[i][u]: u is a bottleneck or lies below one in tree i
        self.is_source = is_source
        r, n = len(trees.sinks), len(is_source)
        self.pending = [[len(trees.children[i][u]) for u in range(n)] for i in range(r)]
        self.acc = [[0] * n for _ in range(r)]
        self.count = [[0] * n for _ in range(r)]

    def _fire(self, net, i, u):
        c = 0 if self.blocked[i][u] else int(self.is_source[u]) + self.acc[i][u]
        self.count[i][u] = c
        p = self.t.parent[i][u]
        if p is not None:
            net.send(u, p, (Tag.COUNT, i, c))

    def start(self, net):
        for i in range(len(self.t.sinks)):
            for u in range(net.n):
                if self.pending[i][u] == 0:
                    self._fire(net, i, u)

    def step(self, net, node, rnd, inbox):
        for _, (_, i, c) in inbox:
            self.acc[i][node] += c
            self.pending[i][node] -= 1
            if self.pending[i][node] == 0:
                self._fire(net, i, node)


def count_descendants(engine: RoundEngine, trees: SinkTrees, blocked, is_source,
                      phase: str = "rsink-count") -> list:
    """count[i][u]: unblocked source records that would pass through u in tree i."""
    prog = _Count(trees, blocked, is_source)
    engine.run(prog, phase)
    return prog.count


def elect_bottleneck(engine: RoundEngine, counts, g: int, excluded,
                     phase: str = "rsink-elect"):
    n = engine.n
    intents = {}
    for u in range(n):
        if u in excluded:
            continue
        if sum(counts[i][u] for i in range(len(counts))) > g:
            intents[u] = [(u,)]
    held = broadcast(engine, intents, phase)
    # node 0 now holds every intent and announces the smallest ID (n means none)
    choice = min((item[0] for item in held[0]), default=n)
    decided = broadcast(engine, {0: [(choice,)]}, phase)
    b = decided[0][0][0]
    return None if b == n else b


class _Cover(NodeProgram):
    lockstep = False

    def __init__(self, trees, blocked, b):
        self.t = trees
        self.blocked = blocked
        self.b = b

    def start(self, net):
        for i in range(len(self.t.sinks)):
            self.blocked[i][self.b] = True
            for c in self.t.children[i][self.b]:
                net.send(self.b, c, (Tag.COVER, i))

    def step(self, net, node, rnd, inbox):
        for _, (_, i) in inbox:
            if self.blocked[i][node]:
                continue
            self.blocked[i][node] = True
            for c in self.t.children[i][node]:
                net.send(node, c, (Tag.COVER, i))


@dataclass
class Bottleneck:
    node: int
    to_b: list  # to_b[u] = dist(u, b), held by u
    from_b: list  # from_b[u] = dist(b, u), held by u
    src_to_b: dict  # s -> dist(s, b), broadcast to everyone


def integrate_bottleneck(engine: RoundEngine, w: WeightedDigraph, b: int, sources,
                         phase: str = "rsink-integrate") -> Bottleneck:
    to_b = bellman_ford(engine, b, w, "to-sink", phase)
    from_b = bellman_ford(engine, b, w, "from-source", phase)
    held = broadcast(engine, {s: [(s, to_b[s])] for s in sources}, phase)
    src_to_b = {s: d for s, d in held[0]}
    return Bottleneck(b, to_b, from_b, src_to_b)


class _Relay(NodeProgram):
    lockstep = False

    def __init__(self, trees, to_sink, blocked, bottlenecks, sources):
        n = len(to_sink[0]) if to_sink else 0
        self.t = trees
        self.to_sink = to_sink
        self.blocked = blocked
        self.bset = set(bottlenecks)
        self.sources = sources
        self.received = [dict() for _ in trees.sinks]
        self.forwarded = [0] * n

    def start(self, net):
        for s in self.sources:
            if s in self.bset:
                continue
            for i, c in enumerate(self.t.sinks):
                if s == c or self.blocked[i][s]:
                    continue
                net.send(s, self.t.parent[i][s], (Tag.RECORD, i, s, self.to_sink[i][s]))

    def step(self, net, node, rnd, inbox):
        for _, p in inbox:
            _, i, s, d = p
            if node == self.t.sinks[i]:
                self.received[i][s] = d
            elif node not in self.bset:
                self.forwarded[node] += 1
                net.send(node, self.t.parent[i][node], p)


def relay(engine: RoundEngine, trees, to_sink, blocked, bottlenecks, sources,
          phase: str = "rsink-relay"):
    prog = _Relay(trees, to_sink, blocked, bottlenecks, sources)
    engine.run(prog, phase)
    return prog.received, prog.forwarded


@dataclass
class RsinkResult:
    sink_dist: dict  # sink -> {source: dist(source, sink)}
    bottlenecks: list
    threshold: int
    max_forwarded: int
    trees: SinkTrees | None = None
    rounds: int = 0
    first_counts: list = field(default_factory=list)
    forwarded: list = field(default_factory=list)  # records passed on, per node

    def max_forwarded_non_sink(self) -> int:
        """Sinks cannot become bottlenecks, so only other nodes are held to g."""
        sinks = set(self.sink_dist)
        return max((f for u, f in enumerate(self.forwarded) if u not in sinks), default=0)


def reversed_rsink(engine: RoundEngine, w: WeightedDigraph, sinks, sources, to_sink,
                   g: int | None = None) -> RsinkResult:
    """`to_sink[i][u]` = dist_w(u, sinks[i]) at every node u."""
    n = engine.n
    sinks = list(sinks)
    sources = sorted(sources)
    if not sinks:
        return RsinkResult({}, [], g or 0, 0)
    before = engine.round
    if g is None:
        g = default_threshold(n, len(sources), len(sinks))
    trees = build_sink_trees(engine, w, sinks, to_sink)
    is_source = [False] * n
    for s in sources:
        is_source[s] = True
    blocked = [[False] * n for _ in sinks]
    excluded = set(sinks)
    found: list[Bottleneck] = []
    first_counts = None
    while True:
        counts = count_descendants(engine, trees, blocked, is_source)
        if first_counts is None:
            first_counts = counts
        b = elect_bottleneck(engine, counts, g, excluded)
        if b is None:
            break
        excluded.add(b)
        found.append(integrate_bottleneck(engine, w, b, sources))
        engine.run(_Cover(trees, blocked, b), "rsink-integrate")
    received, forwarded = relay(engine, trees, to_sink, blocked, [x.node for x in found], sources)
    sink_dist = {}
    for i, c in enumerate(sinks):
        row = {}
        for s in sources:
            best = 0 if s == c else received[i].get(s, INF)
            for bn in found:
                cand = bn.src_to_b[s] + bn.from_b[c]
                if cand < best:
                    best = cand
            row[s] = best
        sink_dist[c] = row
    return RsinkResult(sink_dist, [x.node for x in found], g, max(forwarded, default=0), trees,
                       engine.round - before, first_counts, forwarded)
