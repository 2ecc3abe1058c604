"""Seeded generators for bidirected test graphs."""
from __future__ import annotations

import math
import random

from .errors import BadSpec
from .graph import WeightedDigraph

SPECS = ("random", "path", "star", "cycle", "grid")


def _weighted(n, pairs, lo, hi, rng):
    edges = []
    for u, v in sorted(pairs):
        edges.append((u, v, rng.randint(lo, hi)))
        edges.append((v, u, rng.randint(lo, hi)))
    return WeightedDigraph.from_edges(n, edges, max_weight=max(hi, 1))


def random_pairs(n: int, rng: random.Random, extra_per_node: float = 1.0) -> set:
    """A random spanning tree plus about extra_per_node*n random chords."""
    order = list(range(n))
    rng.shuffle(order)
    pairs = set()
    for i in range(1, n):
        u, v = order[i], order[rng.randrange(i)]
        pairs.add((min(u, v), max(u, v)))
    target = len(pairs) + int(extra_per_node * n)
    max_pairs = n * (n - 1) // 2
    while len(pairs) < min(target, max_pairs):
        u, v = rng.sample(range(n), 2)
        pairs.add((min(u, v), max(u, v)))
    return pairs


def generate(spec: str, n: int, lo: int = 1, hi: int | None = None, seed: int = 0,
             extra_per_node: float = 1.0) -> WeightedDigraph:
    if hi is None:
        hi = n * n
    if spec not in SPECS:
        raise BadSpec(f"unknown generator {spec!r}; choose one of {', '.join(SPECS)}")
    if n < 1 or (n < 2 and spec != "path"):
        raise BadSpec(f"generator {spec!r} needs n >= 2, got {n}")
    if not 1 <= lo <= hi:
        raise BadSpec(f"weight range {lo}..{hi} is empty or below 1")
    rng = random.Random(seed)
    if spec == "random":
        pairs = random_pairs(n, rng, extra_per_node)
    elif spec == "path":
        pairs = {(i, i + 1) for i in range(n - 1)}
    elif spec == "star":
        pairs = {(0, i) for i in range(1, n)}
    elif spec == "cycle":
        if n < 3:
            raise BadSpec("cycle needs n >= 3")
        pairs = {(min(i, (i + 1) % n), max(i, (i + 1) % n)) for i in range(n)}
    else:
        width = math.ceil(math.sqrt(n))
        pairs = set()
        for u in range(n):
            if (u + 1) % width and u + 1 < n:
                pairs.add((u, u + 1))
            if u + width < n:
                pairs.add((u, u + width))
    return _weighted(n, pairs, lo, hi, rng)


def parse_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split("..")
        return int(lo), int(hi)
    except ValueError:
        raise BadSpec(f"weight range must look like LO..HI, got {text!r}") from None
