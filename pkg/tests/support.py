"""Shared graph builders and samplers for the test suite."""

from itertools import combinations

from hypothesis import strategies as st

from divtrees import Graph, generate


def path_graph(n: int) -> Graph:
    return Graph(n, frozenset((i, i + 1) for i in range(1, n)))


def cycle_graph(n: int) -> Graph:
    return generate("cycle", (n,))


def complete_graph(n: int) -> Graph:
    return Graph(n, frozenset(combinations(range(1, n + 1), 2)))


def with_pendants(g: Graph, hosts: list[int]) -> Graph:
    """Attach one new pendant vertex to each listed host (repeats allowed)."""
    edges = set(g.edges)
    nxt = g.n
    for h in hosts:
        nxt += 1
        edges.add((h, nxt))
    return Graph(nxt, frozenset(edges))


def degree_profile(n: int, edges) -> dict[int, int]:
    deg = {v: 0 for v in range(1, n + 1)}
    for u, v in edges:
        deg[u] += 1
        deg[v] += 1
    return deg


def leaf_balance_ok(n: int, edges) -> bool:
    """Trees on >= 2 vertices have at most (#leaves - 2) branching vertices."""
    deg = degree_profile(n, edges)
    v1 = sum(1 for d in deg.values() if d == 1)
    v3 = sum(1 for d in deg.values() if d >= 3)
    return v3 <= v1 - 2


@st.composite
def connected_graphs(draw, min_n=2, max_n=9, max_extra=5):
    """Random connected graph: a spanning tree plus a few extra edges."""
    n = draw(st.integers(min_n, max_n))
    if n == 1:
        return Graph(1, frozenset())
    edges = set()
    for v in range(2, n + 1):
        u = draw(st.integers(1, v - 1))
        edges.add((u, v))
    pool = [e for e in combinations(range(1, n + 1), 2) if e not in edges]
    extra = draw(st.integers(0, min(max_extra, len(pool))))
    for e in draw(st.permutations(pool))[:extra] if pool else []:
        edges.add(e)
    return Graph(n, frozenset(edges))
