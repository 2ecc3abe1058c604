"""Bidirected weighted graphs, the text file format, and bit-scaling levels."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

from .errors import (
    BitRangeViolation,
    DuplicateEdge,
    GraphError,
    MissingReverseEdge,
    SelfLoop,
    WeightOutOfRange,
)

Edge = tuple[int, int]


class WeightedDigraph:
    """Immutable bidirected digraph on nodes 0..n-1.

    Every directed edge (u, v) has a partner (v, u); the two weights may differ.
    `out[u]` maps v -> weight(u, v) and `inc[v]` maps u -> weight(u, v).
    """

    __slots__ = ("n", "out", "inc", "_neighbors", "_m")

    def __init__(self, n: int, out: list[dict[int, int]]):
        self.n = n
        self.out = out
        self.inc = [dict() for _ in range(n)]
        for u in range(n):
            for v, w in out[u].items():
                self.inc[v][u] = w
        self._neighbors = tuple(tuple(sorted(out[u])) for u in range(n))
        self._m = sum(len(d) for d in out)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int, int]], **checks) -> "WeightedDigraph":
        """Build after validation; `checks` go to validate_graph."""
        edges = list(edges)
        validate_graph(n, edges, **checks)
        out = [dict() for _ in range(n)]
        for u, v, w in edges:
            out[u][v] = w
        return cls(n, out)

    @property
    def m(self) -> int:
        """Number of directed edges."""
        return self._m

    def weight(self, u: int, v: int) -> int:
        return self.out[u][v]

    def neighbors(self, u: int) -> tuple[int, ...]:
        return self._neighbors[u]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.out[u]

    def edges(self) -> Iterator[tuple[int, int, int]]:
        for u in range(self.n):
            for v in self._neighbors[u]:
                yield u, v, self.out[u][v]

    def max_weight(self) -> int:
        return max((w for _, _, w in self.edges()), default=0)

    def reversed(self) -> "WeightedDigraph":
        return WeightedDigraph(self.n, [dict(self.inc[u]) for u in range(self.n)])

    def map_weights(self, fn: Callable[[int, int, int], int]) -> "WeightedDigraph":
        """Same edge set, weight(u, v) replaced by fn(u, v, weight)."""
        return WeightedDigraph(self.n, [{v: fn(u, v, w) for v, w in self.out[u].items()}
                                        for u in range(self.n)])

    def __eq__(self, other) -> bool:
        return isinstance(other, WeightedDigraph) and self.n == other.n and self.out == other.out

    def __hash__(self):
        return hash((self.n, tuple(tuple(sorted(d.items())) for d in self.out)))

    def __repr__(self) -> str:
        return f"WeightedDigraph(n={self.n}, m={self.m})"


def default_max_weight(n: int, exponent: int = 2) -> int:
    return max(n, 2) ** exponent


def validate_graph(n: int, edges: list[tuple[int, int, int]], *, max_weight: int | None = None,
                   allow_zero: bool = False, exponent: int = 2) -> None:
    """Raise a GraphError subclass naming the first offending edge."""
    if n < 1:
        raise GraphError(f"node count must be positive, got {n}")
    if max_weight is None:
        max_weight = default_max_weight(n, exponent)
    low = 0 if allow_zero else 1
    seen: dict[Edge, int] = {}
    for u, v, w in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge ({u},{v}) has an endpoint outside 0..{n - 1}", edge=(u, v))
        if u == v:
            raise SelfLoop(f"self-loop at node {u}", edge=(u, v))
        if (u, v) in seen:
            raise DuplicateEdge(f"edge ({u},{v}) listed twice", edge=(u, v))
        if not isinstance(w, int) or w < low or w > max_weight:
            raise WeightOutOfRange(f"weight {w} of edge ({u},{v}) outside [{low},{max_weight}]",
                                   edge=(u, v))
        seen[(u, v)] = w
    for (u, v) in seen:
        if (v, u) not in seen:
            raise MissingReverseEdge(f"edge ({u},{v}) has no reverse ({v},{u})", edge=(u, v))


def parse_graph(text: str, **kwargs) -> WeightedDigraph:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise GraphError("empty graph file")
    try:
        n, m = (int(x) for x in lines[0].split())
        edges = []
        for ln in lines[1:]:
            u, v, w = (int(x) for x in ln.split())
            edges.append((u, v, w))
    except ValueError as exc:
        raise GraphError(f"malformed graph file: {exc}") from None
    if len(edges) != m:
        raise GraphError(f"header announces {m} edges but {len(edges)} were listed")
    return WeightedDigraph.from_edges(n, edges, **kwargs)


def serialize_graph(g: WeightedDigraph) -> str:
    rows = [f"{g.n} {g.m}"] + [f"{u} {v} {w}" for u, v, w in g.edges()]
    return "\n".join(rows) + "\n"


def read_graph(path, **kwargs) -> WeightedDigraph:
    with open(path) as fh:
        return parse_graph(fh.read(), **kwargs)


def write_graph(g: WeightedDigraph, path) -> None:
    with open(path, "w") as fh:
        fh.write(serialize_graph(g))


@dataclass(frozen=True)
class BitDecomposition:
    """Levels w_0..w_beta with w_i = floor(w / 2^(beta-i))."""

    beta: int
    levels: tuple[WeightedDigraph, ...]

    def bits(self, u: int, v: int) -> list[int]:
        """Per-edge bit sequence, most significant first."""
        return [self.levels[i + 1].weight(u, v) - 2 * self.levels[i].weight(u, v)
                for i in range(self.beta)]


def bit_length_of(max_w: int) -> int:
    # 2^(beta-1) <= max_w < 2^beta
    return max(1, int(max_w).bit_length())


def bit_decompose(g: WeightedDigraph) -> BitDecomposition:
    beta = bit_length_of(g.max_weight())
    levels = tuple(g.map_weights(lambda u, v, w, s=beta - i: w >> s) for i in range(beta + 1))
    for i in range(beta):
        iteration_bit(levels[i], levels[i + 1])
    return BitDecomposition(beta, levels)


def iteration_bit(w: WeightedDigraph, wprime: WeightedDigraph) -> WeightedDigraph:
    """Edge function b = w' - 2w, required to lie in {0, 1}."""

    def diff(u, v, wp):
        b = wp - 2 * w.weight(u, v)
        if b not in (0, 1):
            raise BitRangeViolation(f"edge ({u},{v}): w'={wp}, w={w.weight(u, v)} gives bit {b}")
        return b

    return wprime.map_weights(diff)
