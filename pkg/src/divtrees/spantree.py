"""Spanning trees and the constructive leaf machinery.

Holds the validated spanning-tree value type, edge-set Hamming
distance, the single-step leaf-gaining edge exchange, the growth loop
that either reaches a leaf target or certifies the graph is small, and
bounded exhaustive enumeration of all spanning trees (the engine
behind the exact solvers).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterator

from .graphcore import (
    Degree2Path,
    Graph,
    GraphFormatError,
    InternalInvariantError,
    maximal_degree2_paths,
    write_graph,
)


class TreeEnumerationOverflow(RuntimeError):
    """More spanning trees exist than the enumeration limit allows."""


@dataclass(frozen=True)
class SpanningTree:
    """A spanning tree of ``host``: n-1 of its edges, acyclic, spanning.

    Construction validates everything, including the balance fact that
    a tree on >= 2 vertices has at most (leaf count - 2) vertices of
    degree three or more.
    """

    host: Graph
    edges: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        n = self.host.n
        if not self.edges <= self.host.edges:
            raise ValueError("tree edges must come from the host graph")
        if len(self.edges) != n - 1:
            raise ValueError(f"a spanning tree of {n} vertices needs {n - 1} edges")
        if n > 1:
            adj = self.adjacency
            seen = {1}
            queue = deque([1])
            while queue:
                x = queue.popleft()
                for y in adj[x]:
                    if y not in seen:
                        seen.add(y)
                        queue.append(y)
            if len(seen) != n:
                raise ValueError("edge set does not span the host graph")
            branching = sum(1 for v in adj if len(adj[v]) >= 3)
            if branching > len(self.leaves) - 2:
                raise InternalInvariantError(
                    "tree balance violated: more branching vertices than leaves - 2"
                )

    @cached_property
    def adjacency(self) -> dict[int, frozenset[int]]:
        adj: dict[int, set[int]] = {v: set() for v in self.host.vertices()}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return {v: frozenset(s) for v, s in adj.items()}

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    @cached_property
    def leaves(self) -> frozenset[int]:
        return frozenset(v for v, s in self.adjacency.items() if len(s) == 1)

    @property
    def leaf_count(self) -> int:
        return len(self.leaves)

    @cached_property
    def internal_vertices(self) -> frozenset[int]:
        return frozenset(self.host.vertices()) - self.leaves

    @property
    def internal_count(self) -> int:
        return self.host.n - self.leaf_count

    def as_graph(self) -> Graph:
        return Graph(self.host.n, self.edges)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)


def arbitrary_spanning_tree(g: Graph) -> SpanningTree:
    """A deterministic spanning tree: breadth-first from vertex 1,
    visiting neighbors in id order."""
    if not g.is_connected:
        raise ValueError("disconnected graphs have no spanning tree")
    seen = {1}
    queue = deque([1])
    picked = set()
    while queue:
        x = queue.popleft()
        for y in sorted(g.neighbors(x)):
            if y not in seen:
                seen.add(y)
                picked.add((x, y) if x < y else (y, x))
                queue.append(y)
    return SpanningTree(g, frozenset(picked))


def hamming(t1: SpanningTree, t2: SpanningTree) -> int:
    """Size of the symmetric difference of the two edge sets."""
    if t1.host != t2.host:
        raise ValueError("trees live in different host graphs")
    return len(t1.edges ^ t2.edges)


def _parents_from(t: SpanningTree, root: int) -> dict[int, int]:
    parent = {root: root}
    queue = deque([root])
    adj = t.adjacency
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if y not in parent:
                parent[y] = x
                queue.append(y)
    return parent


def _norm(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


def augment_leaf(
    g: Graph, t: SpanningTree, path: Degree2Path, v: int, w: int
) -> SpanningTree:
    """Exchange one edge to gain at least one leaf.

    ``path`` must be a path of ``t`` whose internal vertices have tree
    degree exactly 2 and whose length is >= 6; ``v`` must sit at
    positions 3..length-3 of the path and ``vw`` must be an edge of the
    host graph absent from the tree.  Rooting the tree at the path
    start, the edge to delete depends on whether ``w`` is unrelated to
    ``v``, an ancestor, or a descendant; in every case the deleted
    edge's endpoints are interior path vertices that turn into leaves,
    so the leaf count rises even when ``w`` itself stops being one.
    """
    if t.host != g:
        raise ValueError("tree does not span the given graph")
    if path.closed:
        raise ValueError("a path of a tree cannot be closed")
    path.validate_against(t.as_graph())
    if path.length < 6:
        raise ValueError("augmentation needs a path of length >= 6")
    vs = path.vertices
    r = path.length
    if v not in vs[3 : r - 2]:
        raise ValueError(f"vertex {v} is not strictly internal to the path")
    if w == v or not g.has_edge(v, w):
        raise ValueError(f"({v},{w}) is not an edge of the host graph")
    if _norm(v, w) in t.edges:
        raise ValueError(f"({v},{w}) is already a tree edge")

    root = vs[0]
    parent = _parents_from(t, root)
    pos = {x: i for i, x in enumerate(vs)}
    j = pos[v]

    # climb from w to the root; v on the way means w is a descendant
    x = w
    w_below_v = False
    while x != root:
        x = parent[x]
        if x == v:
            w_below_v = True
            break

    if w_below_v:
        j0 = pos.get(w)
        if j0 is not None and j0 < r:
            drop = (vs[j0 - 1], vs[j0])
        else:
            # w is the far path end or hangs below it
            drop = (vs[r - 2], vs[r - 1])
    elif w in pos and pos[w] < j:
        j0 = pos[w]
        drop = (vs[j0], vs[j0 + 1]) if j0 >= 1 else (vs[1], vs[2])
    else:
        # neither ancestor nor descendant: the cycle closes through the
        # path start, so cutting near it frees two interior vertices
        drop = (vs[1], vs[2])

    new_edges = (t.edges - {_norm(*drop)}) | {_norm(v, w)}
    out = SpanningTree(g, new_edges)
    if out.leaf_count < t.leaf_count + 1:
        raise InternalInvariantError("edge exchange failed to gain a leaf")
    if not (out.leaves - t.leaves) <= set(path.internal):
        raise InternalInvariantError("edge exchange created a leaf off the path")
    return out


@dataclass(frozen=True)
class SmallnessReport:
    """Certificate that the leaf target is unreachable because the
    graph is small: n < (2*target + nonterminal_count) * (s + 3)."""

    n: int
    target: int
    nonterminal_count: int
    s: int
    leaves_reached: int

    @property
    def bound(self) -> int:
        return (2 * self.target + self.nonterminal_count) * (self.s + 3)

    def __post_init__(self) -> None:
        if self.n >= self.bound:
            raise ValueError(
                f"smallness does not hold: n={self.n} >= bound={self.bound}; "
                "the host graph must contain a long degree-2-path"
            )


def grow_leaves(
    g: Graph,
    start: SpanningTree,
    nt: frozenset[int],
    target: int,
    s: int,
) -> SpanningTree | SmallnessReport:
    """Push the leaf count of ``start`` up to ``target`` by repeated
    edge exchanges, or certify that the graph is small.

    Requires every vertex of ``nt`` internal in ``start`` and, for the
    smallness certificate to be sound, that ``g`` has no degree-2-path
    of length >= s whose internal vertices all avoid ``nt``.  Vertices
    of ``nt`` never become leaves: exchanges only create leaves among
    interior path vertices, and those are kept disjoint from ``nt``.
    """
    if start.host != g:
        raise ValueError("start tree does not span the given graph")
    if s < 2:
        raise ValueError("s must be at least 2")
    if not nt <= start.internal_vertices:
        raise ValueError("start tree must keep every required vertex internal")

    t = start
    while t.leaf_count < target:
        move = None
        for path in maximal_degree2_paths(t.as_graph(), forbidden=nt):
            if path.length < 6:
                continue
            vs = path.vertices
            for v in vs[3 : path.length - 2]:
                for w in sorted(g.neighbors(v)):
                    if _norm(v, w) not in t.edges:
                        move = (path, v, w)
                        break
                if move:
                    break
            if move:
                break
        if move is None:
            return SmallnessReport(
                n=g.n,
                target=target,
                nonterminal_count=len(nt),
                s=s,
                leaves_reached=t.leaf_count,
            )
        t = augment_leaf(g, t, *move)
    if not nt <= t.internal_vertices:
        raise InternalInvariantError("growth turned a required-internal vertex into a leaf")
    return t


# ---------------------------------------------------------------------------
# exhaustive enumeration

def _find(parent: list[int], x: int) -> int:
    while parent[x] != x:
        x = parent[x]
    return x


def enumerate_tree_masks(g: Graph, limit: int = 200000) -> Iterator[int]:
    """Yield every spanning tree as a bitmask over ``g.sorted_edges()``.

    Depth-first over include/exclude decisions in edge order, pruning
    branches that cannot span (picked edges plus undecided edges
    disconnected) or that close a cycle.  Raises
    :class:`TreeEnumerationOverflow` as soon as a (limit+1)-th tree is
    found.
    """
    if not g.is_connected:
        raise ValueError("enumeration expects a connected graph")
    n = g.n
    if n == 1:
        yield 0
        return
    edges = g.sorted_edges()
    m = len(edges)
    emitted = 0
    # frame: next edge index, chosen-edge bitmask, forest as DSU parent, components
    stack: list[tuple[int, int, list[int], int]] = [(0, 0, list(range(n + 1)), n)]
    while stack:
        idx, mask, parent, comps = stack.pop()
        if comps == 1:
            emitted += 1
            if emitted > limit:
                raise TreeEnumerationOverflow(f"more than {limit} spanning trees")
            yield mask
            continue
        if idx == m:
            continue
        # viability: the chosen forest plus all undecided edges must span
        trial = parent[:]
        c = comps
        for j in range(idx, m):
            ru, rv = _find(trial, edges[j][0]), _find(trial, edges[j][1])
            if ru != rv:
                trial[ru] = rv
                c -= 1
                if c == 1:
                    break
        if c > 1:
            continue
        u, v = edges[idx]
        ru, rv = _find(parent, u), _find(parent, v)
        stack.append((idx + 1, mask, parent, comps))
        if ru != rv:
            child = parent[:]
            child[ru] = rv
            stack.append((idx + 1, mask | (1 << idx), child, comps - 1))
    if emitted == 0:
        raise InternalInvariantError("a connected graph must have a spanning tree")


def enumerate_spanning_trees(g: Graph, limit: int = 200000) -> Iterator[SpanningTree]:
    """Stream all spanning trees of ``g`` in a deterministic order."""
    edges = g.sorted_edges()
    for mask in enumerate_tree_masks(g, limit):
        chosen = frozenset(e for i, e in enumerate(edges) if mask >> i & 1)
        yield SpanningTree(g, chosen)


def count_spanning_trees(g: Graph) -> int:
    """Exact spanning-tree count via the determinant of a reduced
    Laplacian, evaluated in exact rational arithmetic."""
    n = g.n
    if n == 1:
        return 1
    lap = [[Fraction(0)] * (n - 1) for _ in range(n - 1)]
    for u, v in g.edges:
        # index by vertices 2..n; vertex 1's row and column are dropped
        ui, vi = u - 2, v - 2
        if ui >= 0:
            lap[ui][ui] += 1
        if vi >= 0:
            lap[vi][vi] += 1
        if ui >= 0 and vi >= 0:
            lap[ui][vi] -= 1
            lap[vi][ui] -= 1
    det = Fraction(1)
    size = n - 1
    for col in range(size):
        pivot = next((r for r in range(col, size) if lap[r][col] != 0), None)
        if pivot is None:
            return 0
        if pivot != col:
            lap[col], lap[pivot] = lap[pivot], lap[col]
            det = -det
        det *= lap[col][col]
        inv = 1 / lap[col][col]
        for r in range(col + 1, size):
            factor = lap[r][col] * inv
            if factor:
                for c in range(col, size):
                    lap[r][c] -= factor * lap[col][c]
    assert det.denominator == 1
    return abs(int(det))


# ---------------------------------------------------------------------------
# serialization: a tree is an edge list with header "n n-1"; a family
# file is a plain concatenation of such blocks

def write_tree(t: SpanningTree) -> str:
    return write_graph(t.as_graph())


def write_family(family: list[SpanningTree]) -> str:
    return "".join(write_tree(t) for t in family)


def read_edge_set_family(text: str, n: int) -> list[frozenset[tuple[int, int]]]:
    """Parse a concatenation of edge-list blocks into raw edge sets.

    Only format problems are errors here; whether each block is an
    actual spanning tree of some host is the verifier's question.
    """
    rows = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        rows.append(line.split())
    out: list[frozenset[tuple[int, int]]] = []
    i = 0
    while i < len(rows):
        header = rows[i]
        i += 1
        if len(header) != 2:
            raise GraphFormatError(f"block header must be 'n m', got {' '.join(header)!r}")
        try:
            block_n, block_m = int(header[0]), int(header[1])
        except ValueError:
            raise GraphFormatError("block header must be two integers") from None
        if block_n != n:
            raise GraphFormatError(f"tree block is on {block_n} vertices, host has {n}")
        if block_m < 0 or i + block_m > len(rows):
            raise GraphFormatError("tree block shorter than its header announces")
        edges = set()
        for row in rows[i : i + block_m]:
            if len(row) != 2:
                raise GraphFormatError(f"edge line must be 'u v', got {' '.join(row)!r}")
            try:
                u, v = int(row[0]), int(row[1])
            except ValueError:
                raise GraphFormatError("edge line must be two integers") from None
            if not (1 <= u <= n and 1 <= v <= n):
                raise GraphFormatError(f"vertex out of range in edge {u} {v}")
            if u == v:
                raise GraphFormatError(f"self-loop at vertex {u}")
            e = _norm(u, v)
            if e in edges:
                raise GraphFormatError(f"duplicate edge {e} in tree block")
            edges.add(e)
        i += block_m
        out.append(frozenset(edges))
    return out
