from hypothesis import strategies as st

from congest_apsp.graph import WeightedDigraph


@st.composite
def bidirected_graphs(draw, min_n=2, max_n=8, max_w=None, min_w=1):
    """Connected bidirected graphs with independent weights per direction."""
    n = draw(st.integers(min_n, max_n))
    hi = max_w if max_w is not None else n * n
    pairs = set()
    for v in range(1, n):
        u = draw(st.integers(0, v - 1))
        pairs.add((u, v))
    chords = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=n))
    for u, v in chords:
        if u != v:
            pairs.add((min(u, v), max(u, v)))
    edges = []
    for u, v in sorted(pairs):
        edges.append((u, v, draw(st.integers(min_w, hi))))
        edges.append((v, u, draw(st.integers(min_w, hi))))
    return WeightedDigraph.from_edges(n, edges, max_weight=max(hi, 1), allow_zero=min_w == 0)
