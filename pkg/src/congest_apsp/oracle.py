"""Sequential ground truth, independent of the distributed code paths."""
from __future__ import annotations

import heapq
import math

from .errors import TooLarge
from .graph import WeightedDigraph

INF = math.inf


def dijkstra(g: WeightedDigraph, s: int) -> list:
    dist = [INF] * g.n
    dist[s] = 0
    heap = [(0, s)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for v, w in g.out[u].items():
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def dijkstra_all(g: WeightedDigraph) -> list[list]:
    return [dijkstra(g, s) for s in range(g.n)]


def bellman_ford_all(g: WeightedDigraph) -> list[list]:
    """Plain sequential Bellman-Ford per source; the second opinion for Dijkstra."""
    edges = list(g.edges())
    rows = []
    for s in range(g.n):
        d = [INF] * g.n
        d[s] = 0
        for _ in range(max(g.n - 1, 1)):
            changed = False
            for u, v, w in edges:
                if d[u] + w < d[v]:
                    d[v] = d[u] + w
                    changed = True
            if not changed:
                break
        rows.append(d)
    return rows


def canonical_paths(g: WeightedDigraph, s: int) -> list:
    """Per target: the min-weight, then min-hop, then lexicographically least path.

    Unreachable targets map to None.
    """
    best = [None] * g.n  # (dist, hops)
    best[s] = (0, 0)
    heap = [(0, 0, s)]
    while heap:
        d, h, u = heapq.heappop(heap)
        if (d, h) != best[u]:
            continue
        for v, w in g.out[u].items():
            key = (d + w, h + 1)
            if best[v] is None or key < best[v]:
                best[v] = key
                heapq.heappush(heap, (d + w, h + 1, v))
    order = sorted((b, v) for v, b in enumerate(best) if b is not None)
    path = [None] * g.n
    path[s] = (s,)
    for (d, h), v in order:
        if v == s:
            continue
        cands = [path[x] + (v,) for x, w in g.inc[v].items()
                 if best[x] is not None and best[x] == (d - w, h - 1) and path[x] is not None]
        path[v] = min(cands)
    return path


def canonical_parents(g: WeightedDigraph, s: int) -> tuple[list, list]:
    """Predecessor of each target on its canonical path from s, plus hop counts.

    Same tie-breaking as canonical_paths without materializing the paths: paths
    with equal hop count are ranked layer by layer, so comparing two of them
    lexicographically reduces to comparing (rank of prefix, last node).
    """
    best = [None] * g.n
    best[s] = (0, 0)
    heap = [(0, 0, s)]
    while heap:
        d, h, u = heapq.heappop(heap)
        if (d, h) != best[u]:
            continue
        for v, w in g.out[u].items():
            key = (d + w, h + 1)
            if best[v] is None or key < best[v]:
                best[v] = key
                heapq.heappush(heap, (d + w, h + 1, v))
    layers: dict[int, list] = {}
    for v, b in enumerate(best):
        if b is not None:
            layers.setdefault(b[1], []).append(v)
    parent = [None] * g.n
    hops = [b[1] if b is not None else None for b in best]
    rank = [None] * g.n
    rank[s] = 0
    for k in range(1, max(layers) + 1):
        keyed = []
        for v in layers[k]:
            d = best[v][0]
            x = min((x for x, w in g.inc[v].items() if best[x] == (d - w, k - 1)),
                    key=lambda x: rank[x])
            parent[v] = x
            keyed.append(((rank[x], v), v))
        for r, (_, v) in enumerate(sorted(keyed)):
            rank[v] = r
    return parent, hops


def all_canonical_paths(g: WeightedDigraph) -> list[list]:
    return [canonical_paths(g, s) for s in range(g.n)]


def path_weight(g: WeightedDigraph, path) -> int:
    return sum(g.weight(a, b) for a, b in zip(path, path[1:]))


def center_suffix(path, centers) -> tuple:
    """The part of `path` after its last center (the whole path if none)."""
    for i in range(len(path) - 1, -1, -1):
        if path[i] in centers:
            return tuple(path[i:])
    return tuple(path)


def brute_force_paths(g: WeightedDigraph, max_n: int = 8) -> dict:
    """Every simple path for every ordered pair, with its weight."""
    if g.n > max_n:
        raise TooLarge(f"brute force refused for n={g.n} > {max_n}")
    out = {(s, t): [] for s in range(g.n) for t in range(g.n) if s != t}

    def extend(path, weight):
        u = path[-1]
        if len(path) > 1:
            out[(path[0], u)].append((tuple(path), weight))
        for v, w in g.out[u].items():
            if v not in path:
                path.append(v)
                extend(path, weight + w)
                path.pop()

    for s in range(g.n):
        extend([s], 0)
    return out


def reduced_weights(w: WeightedDigraph, wprime: WeightedDigraph, s: int) -> WeightedDigraph:
    """r_s computed from oracle distances (may contain negatives if inputs are bogus)."""
    d = dijkstra(w, s)
    return wprime.map_weights(lambda u, v, x: 2 * d[u] + x - 2 * d[v])


def hop_matrix(g: WeightedDigraph) -> list[list]:
    return dijkstra_all(g.map_weights(lambda u, v, w: 1))

