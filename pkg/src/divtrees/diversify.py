"""Building pairwise-diverse tree families by leaf edge swaps.

Every chosen leaf v of a spanning tree keeps a designated swap: drop
its tree edge (to tree_neighbor[v]) and pick up a host edge to
swap_target[v] instead.  Applying the swaps of disjoint leaf blocks to
the same base tree yields trees at exactly known pairwise Hamming
distance.  Swap targets are chosen to minimize conflicts (a target
that is itself a chosen leaf); remaining conflicts form a forest, so
half the leaves always survive as a conflict-free pool.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from math import ceil
from typing import Iterable, Sequence

from .graphcore import Graph, InternalInvariantError
from .spantree import SpanningTree, hamming


def _norm(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


def _conflict_edges(
    leaves: frozenset[int], target: dict[int, int]
) -> frozenset[tuple[int, int]]:
    out = set()
    for v in leaves:
        u = target[v]
        if u in leaves and u != v:
            out.add(_norm(u, v))
    return frozenset(out)


@dataclass(frozen=True)
class LeafSwapPlan:
    """A validated swap schedule over a chosen leaf set.

    ``independent`` is the conflict-free pool; ``blocks`` are its first
    slices, one per requested tree, all the same size.
    """

    tree: SpanningTree
    leaves: frozenset[int]
    tree_neighbor: dict[int, int]
    swap_target: dict[int, int]
    conflict_edges: frozenset[tuple[int, int]]
    independent: frozenset[int]
    blocks: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        g = self.tree.host
        for v in self.leaves:
            if v not in self.tree.leaves:
                raise ValueError(f"vertex {v} is not a leaf of the tree")
            if g.degree(v) < 2:
                raise ValueError(f"leaf {v} has host degree < 2, nothing to swap to")
            (p,) = self.tree.adjacency[v]
            if self.tree_neighbor[v] != p:
                raise ValueError(f"wrong tree neighbor recorded for leaf {v}")
            t = self.swap_target[v]
            if t == p or t not in g.neighbors(v):
                raise ValueError(f"bad swap target {t} for leaf {v}")
        if self.conflict_edges != _conflict_edges(self.leaves, self.swap_target):
            raise ValueError("recorded conflict edges do not match the swap targets")
        # conflicts must form a forest
        parent = {v: v for v in self.leaves}

        def find(x: int) -> int:
            while parent[x] != x:
                x = parent[x]
            return x

        for u, v in sorted(self.conflict_edges):
            ru, rv = find(u), find(v)
            if ru == rv:
                raise InternalInvariantError("conflict edges contain a cycle")
            parent[ru] = rv
        if not self.independent <= self.leaves:
            raise ValueError("independent pool must consist of chosen leaves")
        for u, v in self.conflict_edges:
            if u in self.independent and v in self.independent:
                raise ValueError("independent pool touches a conflict edge")
        for v in self.independent:
            if self.swap_target[v] in self.independent:
                raise InternalInvariantError("swap target inside the independent pool")
        seen: set[int] = set()
        sizes = {len(b) for b in self.blocks}
        for b in self.blocks:
            if not b <= self.independent:
                raise ValueError("blocks must come from the independent pool")
            if b & seen:
                raise ValueError("blocks must be disjoint")
            seen |= b
        if len(sizes) > 1:
            raise ValueError("blocks must all have the same size")


def _find_cycle(vertices: Iterable[int], edges: frozenset[tuple[int, int]]) -> list[int] | None:
    adj: dict[int, list[int]] = {v: [] for v in vertices}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    for v in adj:
        adj[v].sort()
    parent: dict[int, int | None] = {}
    depth: dict[int, int] = {}
    tree: set[tuple[int, int]] = set()
    for root in sorted(adj):
        if root in parent:
            continue
        parent[root] = None
        depth[root] = 0
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y not in parent:
                    parent[y] = x
                    depth[y] = depth[x] + 1
                    tree.add(_norm(x, y))
                    queue.append(y)
                    continue
                if _norm(x, y) in tree:
                    continue
                # non-tree edge: climb both endpoints to their meeting
                # point; the two forest paths plus the edge close a cycle
                a, b = x, y
                left, right = [a], [b]
                while depth[a] > depth[b]:
                    a = parent[a]
                    left.append(a)
                while depth[b] > depth[a]:
                    b = parent[b]
                    right.append(b)
                while a != b:
                    a = parent[a]
                    left.append(a)
                    b = parent[b]
                    right.append(b)
                return left + right[-2::-1]
    return None


def _rotate_cycle(cyc: list[int], target: dict[int, int]) -> None:
    """Break one conflict cycle by re-aiming a single swap target.

    Around a conflict cycle the targets must chain backwards in one of
    the two directions; re-aiming the second vertex at the third drops
    the cycle's first edge and creates nothing new.
    """
    r = len(cyc)
    for candidate in (cyc, list(reversed(cyc))):
        if all(target[candidate[(i + 1) % r]] == candidate[i] for i in range(r)):
            target[candidate[1]] = candidate[2]
            return
    raise InternalInvariantError("conflict cycle without a consistent orientation")


def plan_swaps(
    g: Graph, t: SpanningTree, L: Iterable[int], k: int, ell: int
) -> LeafSwapPlan:
    """Choose swap targets for the leaves ``L`` and carve out
    conflict-free blocks, one per requested tree.

    Each target is the lowest-id host neighbor other than the leaf's
    tree neighbor, preferring targets outside ``L``.  Conflict cycles
    are repaired by re-aiming, which strictly shrinks the conflict set,
    so it ends in a forest; two-coloring the forest keeps at least half
    of ``L``.  With |L| >= 2*ceil(k/4)*ell the blocks always fill;
    smaller pools fail only if the surviving half is too small.
    """
    if t.host != g:
        raise ValueError("tree does not span the given graph")
    if g.n < 3:
        raise ValueError("swap planning needs at least 3 vertices")
    if k < 1 or ell < 1:
        raise ValueError("k and ell must be at least 1")
    leaves = frozenset(L)
    for v in leaves:
        if v not in t.leaves:
            raise ValueError(f"vertex {v} is not a leaf of the tree")
        if g.degree(v) < 2:
            raise ValueError(f"leaf {v} has host degree < 2")

    neighbor = {v: next(iter(t.adjacency[v])) for v in leaves}
    target: dict[int, int] = {}
    for v in sorted(leaves):
        options = sorted(g.neighbors(v) - {neighbor[v]})
        outside = [u for u in options if u not in leaves]
        target[v] = outside[0] if outside else options[0]

    conflicts = _conflict_edges(leaves, target)
    while True:
        cyc = _find_cycle(leaves, conflicts)
        if cyc is None:
            break
        _rotate_cycle(cyc, target)
        smaller = _conflict_edges(leaves, target)
        if len(smaller) >= len(conflicts):
            raise InternalInvariantError("conflict repair failed to drop an edge")
        conflicts = smaller

    # two-color the conflict forest, component roots at even depth
    adj: dict[int, list[int]] = {v: [] for v in leaves}
    for u, v in conflicts:
        adj[u].append(v)
        adj[v].append(u)
    color: dict[int, int] = {}
    for root in sorted(leaves):
        if root in color:
            continue
        color[root] = 0
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y not in color:
                    color[y] = 1 - color[x]
                    queue.append(y)
    even = frozenset(v for v in leaves if color[v] == 0)
    odd = leaves - even
    pool = odd if len(odd) > len(even) else even

    block_size = ceil(k / 4)
    need = block_size * ell
    if len(pool) < need:
        raise ValueError(
            f"only {len(pool)} conflict-free leaves, need {need}; "
            f"supply at least {2 * need} leaves to guarantee success"
        )
    chosen = sorted(pool)[:need]
    blocks = tuple(
        frozenset(chosen[i * block_size : (i + 1) * block_size]) for i in range(ell)
    )
    return LeafSwapPlan(
        tree=t,
        leaves=leaves,
        tree_neighbor=neighbor,
        swap_target=target,
        conflict_edges=conflicts,
        independent=pool,
        blocks=blocks,
    )


def build_diverse_family(
    g: Graph, t: SpanningTree, plan: LeafSwapPlan, nt: frozenset[int] = frozenset()
) -> list[SpanningTree]:
    """Materialize one tree per plan block by applying its swaps to ``t``.

    Distinct blocks touch disjoint leaves and their added edges never
    collide, so two family members differ in exactly two edges per
    involved leaf.  Vertices of ``nt`` stay internal provided each has
    two tree neighbors outside the swap pool.
    """
    if plan.tree != t or t.host != g:
        raise ValueError("plan was made for a different tree or graph")
    for v in nt:
        if v not in t.internal_vertices:
            raise ValueError(f"required-internal vertex {v} is a leaf of the base tree")
        if len(t.adjacency[v] - plan.leaves) < 2:
            raise ValueError(
                f"required-internal vertex {v} needs two tree neighbors outside the swap pool"
            )
    family = []
    for block in plan.blocks:
        edges = set(t.edges)
        for v in sorted(block):
            edges.discard(_norm(v, plan.tree_neighbor[v]))
            edges.add(_norm(v, plan.swap_target[v]))
        family.append(SpanningTree(g, frozenset(edges)))

    block_size = len(plan.blocks[0]) if plan.blocks else 0
    floor_leaves = t.leaf_count - block_size
    for i, ti in enumerate(family):
        if not nt <= ti.internal_vertices:
            raise InternalInvariantError("swap turned a required-internal vertex into a leaf")
        if ti.leaf_count < floor_leaves:
            raise InternalInvariantError("swaps lost more leaves than targets replaced")
        for tj in family[:i]:
            if hamming(ti, tj) != 2 * (2 * block_size):
                raise InternalInvariantError("family members at an unexpected distance")
    return family


# ---------------------------------------------------------------------------
# verification

@dataclass(frozen=True)
class TreeCheck:
    index: int
    spanning: bool
    leaf_count: int
    internal_count: int
    leaves_ok: bool
    internal_ok: bool
    required_internal_ok: bool

    @property
    def ok(self) -> bool:
        return (
            self.spanning
            and self.leaves_ok
            and self.internal_ok
            and self.required_internal_ok
        )

    def to_json_dict(self) -> dict:
        return {
            "index": self.index,
            "spanning": self.spanning,
            "leaf_count": self.leaf_count,
            "internal_count": self.internal_count,
            "leaves_ok": self.leaves_ok,
            "internal_ok": self.internal_ok,
            "required_internal_ok": self.required_internal_ok,
        }


@dataclass(frozen=True)
class PairCheck:
    first: int
    second: int
    distance: int
    ok: bool

    def to_json_dict(self) -> dict:
        return {
            "first": self.first,
            "second": self.second,
            "distance": self.distance,
            "ok": self.ok,
        }


@dataclass(frozen=True)
class FamilyReport:
    trees: tuple[TreeCheck, ...]
    pairs: tuple[PairCheck, ...]

    @property
    def verdict(self) -> bool:
        return all(t.ok for t in self.trees) and all(p.ok for p in self.pairs)

    def to_json_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "trees": [t.to_json_dict() for t in self.trees],
            "pairs": [p.to_json_dict() for p in self.pairs],
        }


def _spans(g: Graph, edges: frozenset[tuple[int, int]]) -> bool:
    if not edges <= g.edges or len(edges) != g.n - 1:
        return False
    if g.n == 1:
        return True
    adj: dict[int, set[int]] = {v: set() for v in g.vertices()}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    seen = {1}
    queue = deque([1])
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return len(seen) == g.n


def verify_family(
    g: Graph,
    family: Sequence[SpanningTree | frozenset[tuple[int, int]]],
    p: int,
    q: int,
    k: int,
    nt: frozenset[int] = frozenset(),
) -> FamilyReport:
    """Check a claimed family against every instance constraint.

    Failures become report entries, never exceptions; the verdict is
    the conjunction of all per-tree and per-pair checks.
    """
    edge_sets = [f.edges if isinstance(f, SpanningTree) else frozenset(f) for f in family]
    trees = []
    for i, edges in enumerate(edge_sets):
        degree = {v: 0 for v in g.vertices()}
        for u, v in edges:
            if 1 <= u <= g.n:
                degree[u] += 1
            if 1 <= v <= g.n:
                degree[v] += 1
        leaf_count = sum(1 for d in degree.values() if d == 1)
        internal_count = g.n - leaf_count
        internal = {v for v, d in degree.items() if d != 1}
        trees.append(
            TreeCheck(
                index=i,
                spanning=_spans(g, edges),
                leaf_count=leaf_count,
                internal_count=internal_count,
                leaves_ok=leaf_count >= p,
                internal_ok=internal_count >= q,
                required_internal_ok=nt <= internal,
            )
        )
    pairs = []
    for i in range(len(edge_sets)):
        for j in range(i + 1, len(edge_sets)):
            d = len(edge_sets[i] ^ edge_sets[j])
            pairs.append(PairCheck(first=i, second=j, distance=d, ok=d >= k))
    return FamilyReport(trees=tuple(trees), pairs=tuple(pairs))
