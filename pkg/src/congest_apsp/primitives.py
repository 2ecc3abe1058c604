"""Model-level building blocks: flooding, Bellman-Ford, BFS tree, broadcast."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .engine import NodeProgram, RoundEngine, Tag
from .errors import Disconnected
from .graph import WeightedDigraph

INF = math.inf


class Flood(NodeProgram):
    """One token from `root`; each node forwards once, never back to its sender."""

    def __init__(self, n: int, root: int):
        self.root = root
        self.reached_at = [None] * n

    def start(self, net):
        self.reached_at[self.root] = 0
        net.send_all(self.root, (Tag.FLOOD,))

    def step(self, net, node, rnd, inbox):
        if self.reached_at[node] is not None:
            return
        self.reached_at[node] = rnd
        net.send_all(node, (Tag.FLOOD,), exclude={x for x, _ in inbox})


class BellmanFord(NodeProgram):
    """Asynchronous relaxation from one root; re-sends only on strict decrease."""

    lockstep = False

    def __init__(self, weights: WeightedDigraph, root: int):
        self.w = weights
        self.root = root
        self.d = [INF] * weights.n

    def start(self, net):
        self.d[self.root] = 0
        net.send_all(self.root, (Tag.DIST, 0))

    def step(self, net, node, rnd, inbox):
        into = self.w.inc[node]
        best = self.d[node]
        for x, (_, dx) in inbox:
            cand = dx + into[x]
            if cand < best:
                best = cand
        if best < self.d[node]:
            self.d[node] = best
            net.send_all(node, (Tag.DIST, best))


def bellman_ford(engine: RoundEngine, root: int, weights: WeightedDigraph,
                 direction: str = "from-source", phase: str = "bellman-ford") -> list:
    """Distances from `root` (or to it, for direction 'to-sink') at every node."""
    if direction == "to-sink":
        weights = weights.reversed()
    elif direction != "from-source":
        raise ValueError(f"unknown direction {direction!r}")
    prog = BellmanFord(weights, root)
    engine.run(prog, phase)
    return prog.d


@dataclass(frozen=True)
class BFSTree:
    parent: tuple
    children: tuple
    depth: tuple
    ecc: int

    @property
    def root(self) -> int:
        return 0


class _TreeBuilder(NodeProgram):
    def __init__(self, n):
        self.depth = [None] * n
        self.parent = [None] * n
        self.children = [[] for _ in range(n)]
        self.waiting = [0] * n
        self.height = [0] * n
        self.ecc = [None] * n

    def start(self, net):
        self.depth[0] = 0
        net.send_all(0, (Tag.JOIN,))
        net.wake(0, 2)

    def _report(self, net, node):
        if node == 0:
            self._announce(net, 0, self.height[0])
        else:
            net.send(node, self.parent[node], (Tag.HEIGHT, self.height[node]))

    def _announce(self, net, node, ecc):
        self.ecc[node] = ecc
        for c in self.children[node]:
            net.send(node, c, (Tag.ECC, ecc))

    def step(self, net, node, rnd, inbox):
        joins = [x for x, p in inbox if p[0] == Tag.JOIN]
        if joins and self.depth[node] is None:
            self.depth[node] = rnd
            self.height[node] = rnd
            self.parent[node] = min(joins)
            net.send(node, self.parent[node], (Tag.CLAIM,))
            net.send_all(node, (Tag.JOIN,), exclude=set(joins))
            net.wake(node, rnd + 2)
        for x, p in inbox:
            tag = p[0]
            if tag == Tag.CLAIM:
                self.children[node].append(x)
            elif tag == Tag.HEIGHT:
                self.height[node] = max(self.height[node], p[1])
                self.waiting[node] -= 1
                if self.waiting[node] == 0:
                    self._report(net, node)
            elif tag == Tag.ECC:
                self._announce(net, node, p[1])
        if self.depth[node] is not None and rnd == self.depth[node] + 2:
            # every child's claim has arrived by now
            self.children[node].sort()
            self.waiting[node] = len(self.children[node])
            if not self.children[node]:
                self._report(net, node)


def build_bfs_tree(engine: RoundEngine) -> BFSTree:
    prog = _TreeBuilder(engine.n)
    engine.run(prog, "bfs-tree")
    missing = [u for u in range(engine.n) if prog.depth[u] is None]
    if missing:
        raise Disconnected(f"nodes {missing[:10]} unreachable from node 0")
    tree = BFSTree(tuple(prog.parent), tuple(tuple(c) for c in prog.children),
                   tuple(prog.depth), prog.ecc[0])
    engine.tree = tree
    return tree


def ensure_tree(engine: RoundEngine) -> BFSTree:
    return engine.tree if engine.tree is not None else build_bfs_tree(engine)


class _Broadcast(NodeProgram):
    lockstep = False

    def __init__(self, tree: BFSTree, items: dict):
        self.tree = tree
        self.items = items
        self.held = [[] for _ in range(len(tree.parent))]

    def _down(self, net, node, item):
        self.held[node].append(item)
        kids = self.tree.children[node]
        if kids:
            net.multicast(node, kids, (Tag.DOWN,) + item)

    def start(self, net):
        for node in sorted(self.items):
            for item in self.items[node]:
                item = tuple(item)
                if node == 0:
                    self._down(net, 0, item)
                else:
                    net.send(node, self.tree.parent[node], (Tag.UP,) + item)

    def step(self, net, node, rnd, inbox):
        for _, p in inbox:
            item = p[1:]
            if p[0] == Tag.UP and node != 0:
                net.send(node, self.tree.parent[node], p)
            else:
                self._down(net, node, item)


def broadcast(engine: RoundEngine, items: dict, phase: str = "broadcast") -> list:
    """Pipelined upcast to node 0 then downcast; returns the items held per node.

    `items` maps a holder node to a list of integer tuples.
    """
    tree = ensure_tree(engine)
    prog = _Broadcast(tree, items)
    engine.run(prog, phase)
    return prog.held
