"""Simple undirected graphs with 1-based vertex ids.

This module owns the graph value type, the structural queries the
reduction pipelines build on (pendant vertices, maximal chains of
degree-2 vertices), the two mutating operations used by the rules
(chain-edge contraction and vertex deletion, both of which renumber
vertices back to a contiguous range), plain-text instance I/O, and the
graph generators behind the test corpus and the audit tooling.

All types are immutable values: mutations return new graphs together
with an old-id -> new-id renaming map.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator


class GraphFormatError(ValueError):
    """Raised when edge-list text does not parse."""


class InternalInvariantError(RuntimeError):
    """A structural guarantee the library relies on was violated."""


def _norm_edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """An undirected simple graph on vertices 1..n.

    ``edges`` holds normalized pairs (u, v) with u < v.  Construction
    validates simplicity and range; use :meth:`from_edges` when the
    input pairs are not known to be normalized.
    """

    n: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("graph needs at least one vertex")
        for e in self.edges:
            u, v = e
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if u > v:
                raise ValueError(f"edge {e} not normalized")
            if not (1 <= u and v <= self.n):
                raise ValueError(f"edge {e} out of range 1..{self.n}")

    @classmethod
    def from_edges(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "Graph":
        seen: set[tuple[int, int]] = set()
        for u, v in pairs:
            e = _norm_edge(u, v)
            if e in seen:
                raise ValueError(f"duplicate edge {e}")
            seen.add(e)
        return cls(n, frozenset(seen))

    @property
    def m(self) -> int:
        return len(self.edges)

    def vertices(self) -> range:
        return range(1, self.n + 1)

    @cached_property
    def adjacency(self) -> dict[int, frozenset[int]]:
        adj: dict[int, set[int]] = {v: set() for v in self.vertices()}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return {v: frozenset(s) for v, s in adj.items()}

    def neighbors(self, v: int) -> frozenset[int]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def has_edge(self, u: int, v: int) -> bool:
        return _norm_edge(u, v) in self.edges

    @cached_property
    def is_connected(self) -> bool:
        if self.n == 1:
            return True
        seen = {1}
        queue = deque([1])
        adj = self.adjacency
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return len(seen) == self.n

    def is_tree(self) -> bool:
        return self.is_connected and self.m == self.n - 1

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def to_json_dict(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.sorted_edges()]}


@dataclass(frozen=True)
class Degree2Path:
    """A path (v_0, ..., v_r) whose internal vertices all have degree 2.

    Endpoints may have any degree.  The path is closed when v_0 = v_r;
    vertices are otherwise pairwise distinct.  ``length`` counts edges.
    """

    vertices: tuple[int, ...]

    def __post_init__(self) -> None:
        vs = self.vertices
        if len(vs) < 2:
            raise ValueError("a path needs at least two entries")
        body = vs[:-1] if self.closed else vs
        if len(set(body)) != len(body):
            raise ValueError("path vertices must be distinct")
        if self.closed and vs[0] in vs[1:-1]:
            raise ValueError("closed path revisits its anchor")

    @property
    def closed(self) -> bool:
        return self.vertices[0] == self.vertices[-1]

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    @property
    def endpoints(self) -> tuple[int, int]:
        return (self.vertices[0], self.vertices[-1])

    @property
    def internal(self) -> tuple[int, ...]:
        return self.vertices[1:-1]

    def strictly_internal(self) -> tuple[int, ...]:
        """The vertices v_3..v_{r-3}; defined only for length >= 6."""
        if self.length < 6:
            raise ValueError("strict interior needs a path of length >= 6")
        return self.vertices[3 : self.length - 2]

    def validate_against(self, g: Graph, forbidden: frozenset[int] = frozenset()) -> None:
        """Check this is a degree-2-path of ``g`` avoiding ``forbidden`` internally."""
        vs = self.vertices
        for a, b in zip(vs, vs[1:]):
            if not g.has_edge(a, b):
                raise ValueError(f"({a},{b}) is not an edge of the host graph")
        for x in self.internal:
            if g.degree(x) != 2:
                raise ValueError(f"internal vertex {x} has degree {g.degree(x)} != 2")
            if x in forbidden:
                raise ValueError(f"internal vertex {x} is forbidden")


@dataclass(frozen=True)
class Instance:
    """Decision instance: graph plus (p, q, k, ell).

    Asks for ell spanning trees, pairwise differing in at least k
    edges, each with at least p leaves and at least q internal
    vertices.
    """

    graph: Graph
    p: int
    q: int
    k: int
    ell: int

    def __post_init__(self) -> None:
        if self.p < 0 or self.q < 0:
            raise ValueError("p and q must be non-negative")
        if self.k < 1 or self.ell < 1:
            raise ValueError("k and ell must be at least 1")

    def to_json_dict(self) -> dict:
        d = self.graph.to_json_dict()
        d.update({"problem": "li", "p": self.p, "q": self.q, "k": self.k, "ell": self.ell})
        return d


@dataclass(frozen=True)
class InstanceNT:
    """Decision instance: graph, a set of vertices that must stay
    internal in every tree, plus (p, k, ell)."""

    graph: Graph
    nonterminals: frozenset[int]
    p: int
    k: int
    ell: int

    def __post_init__(self) -> None:
        if self.p < 0:
            raise ValueError("p must be non-negative")
        if self.k < 1 or self.ell < 1:
            raise ValueError("k and ell must be at least 1")
        for v in self.nonterminals:
            if not (1 <= v <= self.graph.n):
                raise ValueError(f"non-terminal {v} out of range")

    def to_json_dict(self) -> dict:
        d = self.graph.to_json_dict()
        d.update(
            {
                "problem": "lnt",
                "nonterminals": sorted(self.nonterminals),
                "p": self.p,
                "k": self.k,
                "ell": self.ell,
            }
        )
        return d


def pendant_vertices(g: Graph) -> frozenset[int]:
    """All vertices of degree exactly 1."""
    return frozenset(v for v in g.vertices() if g.degree(v) == 1)


def _canonical_path(vs: list[int]) -> tuple[int, ...]:
    if vs[0] == vs[-1]:
        # closed: anchor stays put, orient towards the smaller neighbor
        if len(vs) > 2 and vs[1] > vs[-2]:
            vs = [vs[0]] + vs[-2:0:-1] + [vs[0]]
        return tuple(vs)
    rev = list(reversed(vs))
    return tuple(rev) if rev < vs else tuple(vs)


def maximal_degree2_paths(g: Graph, forbidden: frozenset[int] = frozenset()) -> list[Degree2Path]:
    """All inclusion-maximal degree-2-paths with at least one internal
    vertex, internal vertices drawn from allowed degree-2 vertices.

    A vertex is allowed interior material iff it has degree exactly 2
    and is not in ``forbidden``; forbidden degree-2 vertices act as
    endpoints.  Every allowed degree-2 vertex ends up internal to
    exactly one returned path.  A connected graph that is one cycle of
    allowed vertices yields a single closed path anchored at the
    smallest vertex id.  Paths come back canonically oriented and
    sorted.
    """
    if not g.is_connected:
        raise ValueError("maximal_degree2_paths expects a connected graph")
    adj = g.adjacency
    interior = {v for v in g.vertices() if len(adj[v]) == 2 and v not in forbidden}
    anchors = [v for v in g.vertices() if v not in interior]

    if not anchors:
        # every vertex is allowed degree-2 material: the graph is a cycle
        start = 1
        vs = [start, min(adj[start])]
        while vs[-1] != start:
            prev, cur = vs[-2], vs[-1]
            (nxt,) = adj[cur] - {prev}
            vs.append(nxt)
        return [Degree2Path(tuple(vs))]

    claimed: set[int] = set()
    found: list[Degree2Path] = []
    for a in anchors:
        for b in sorted(adj[a]):
            if b not in interior or b in claimed:
                continue
            vs = [a, b]
            while vs[-1] in interior:
                prev, cur = vs[-2], vs[-1]
                (nxt,) = adj[cur] - {prev}
                vs.append(nxt)
            claimed.update(x for x in vs[1:-1])
            found.append(Degree2Path(_canonical_path(vs)))
    found.sort(key=lambda p: p.vertices)
    return found


def _compact_renaming(n: int, removed: int) -> dict[int, int]:
    return {v: (v - 1 if v > removed else v) for v in range(1, n + 1) if v != removed}


def _contract_edge(g: Graph, keep: int, drop: int) -> tuple[Graph, dict[int, int]]:
    """Merge ``drop`` into ``keep`` and renumber ids above ``drop`` down by one."""
    if not g.has_edge(keep, drop):
        raise ValueError(f"({keep},{drop}) is not an edge")
    if g.adjacency[keep] & g.adjacency[drop]:
        raise ValueError("contraction would create a parallel edge")
    rename = _compact_renaming(g.n, drop)
    new_edges = set()
    for u, v in g.edges:
        if (u, v) == _norm_edge(keep, drop):
            continue
        u = keep if u == drop else u
        v = keep if v == drop else v
        new_edges.add(_norm_edge(rename[u], rename[v]))
    out = Graph(g.n - 1, frozenset(new_edges))
    if out.m != g.m - 1:
        raise InternalInvariantError("contraction changed the edge count by more than one")
    if g.is_connected and not out.is_connected:
        raise InternalInvariantError("contraction disconnected the graph")
    rename[drop] = rename[keep]
    return out, rename


def contract_path_edge(g: Graph, path: Degree2Path) -> tuple[Graph, dict[int, int]]:
    """Contract the edge between the first two internal vertices of ``path``.

    Requires length >= 3 so the path has two internal vertices; a
    closed path of length 3 is rejected as well, since merging its two
    internal vertices would create a parallel edge.  Returns the new
    graph and the old-id -> new-id map (the dropped vertex maps to the
    id of the merged vertex).
    """
    path.validate_against(g)
    if path.length < 3 or len(path.internal) < 2:
        raise ValueError("contraction needs a path of length >= 3")
    if path.closed and path.length == 3:
        raise ValueError("contracting a closed path of length 3 would create a parallel edge")
    keep, drop = path.vertices[1], path.vertices[2]
    return _contract_edge(g, keep, drop)


def delete_vertex(g: Graph, v: int) -> tuple[Graph, dict[int, int]]:
    """Remove ``v`` and its edges; remaining ids compact down to 1..n-1.

    Connectivity is the caller's concern: deleting a cut vertex leaves
    a disconnected graph and that is reported as such, not an error.
    """
    if not (1 <= v <= g.n):
        raise ValueError(f"vertex {v} out of range")
    if g.n == 1:
        raise ValueError("cannot delete the only vertex")
    rename = _compact_renaming(g.n, v)
    new_edges = frozenset(
        _norm_edge(rename[a], rename[b]) for a, b in g.edges if v not in (a, b)
    )
    return Graph(g.n - 1, new_edges), rename


# ---------------------------------------------------------------------------
# plain-text I/O
#
# First non-comment line is "n m", followed by exactly m lines "u v".
# '#' starts a comment; directive comments "#% key value..." carry the
# instance parameters so a written instance reads back identically.

def write_graph(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines += [f"{u} {v}" for u, v in g.sorted_edges()]
    return "\n".join(lines) + "\n"


def _content_lines(text: str) -> Iterator[list[str]]:
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield line.split()


def _directives(text: str) -> dict[str, list[str]]:
    out: dict[str, list[str]] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith("#%"):
            parts = line[2:].split()
            if parts:
                out[parts[0]] = parts[1:]
    return out


def read_graph(text: str) -> Graph:
    rows = _content_lines(text)
    try:
        header = next(rows)
    except StopIteration:
        raise GraphFormatError("empty input") from None
    if len(header) != 2:
        raise GraphFormatError(f"header must be 'n m', got {' '.join(header)!r}")
    try:
        n, m = int(header[0]), int(header[1])
    except ValueError:
        raise GraphFormatError(f"header must be two integers, got {' '.join(header)!r}") from None
    if n < 1 or m < 0:
        raise GraphFormatError(f"bad sizes n={n} m={m}")
    pairs = []
    for row in rows:
        if len(pairs) == m:
            raise GraphFormatError("more edge lines than the header announces")
        if len(row) != 2:
            raise GraphFormatError(f"edge line must be 'u v', got {' '.join(row)!r}")
        try:
            u, v = int(row[0]), int(row[1])
        except ValueError:
            raise GraphFormatError(f"edge line must be two integers, got {' '.join(row)!r}") from None
        if not (1 <= u <= n and 1 <= v <= n):
            raise GraphFormatError(f"vertex out of range in edge {u} {v}")
        if u == v:
            raise GraphFormatError(f"self-loop at vertex {u}")
        pairs.append((u, v))
    if len(pairs) != m:
        raise GraphFormatError(f"expected {m} edges, found {len(pairs)}")
    try:
        return Graph.from_edges(n, pairs)
    except ValueError as exc:
        raise GraphFormatError(str(exc)) from None


def _parse_int(kind: str, tokens: list[str]) -> int:
    if len(tokens) != 1:
        raise GraphFormatError(f"directive {kind} needs one value")
    try:
        return int(tokens[0])
    except ValueError:
        raise GraphFormatError(f"directive {kind} needs an integer") from None


def read_instance(text: str) -> Instance | InstanceNT:
    """Parse a graph file with parameter directives into an instance.

    Missing directives default to p=0, q=0, k=1, ell=1 and the
    leaf/internal problem; a ``#% nt`` directive or ``#% problem lnt``
    selects the non-terminal variant.
    """
    g = read_graph(text)
    d = _directives(text)
    p = _parse_int("p", d["p"]) if "p" in d else 0
    k = _parse_int("k", d["k"]) if "k" in d else 1
    ell = _parse_int("l", d["l"]) if "l" in d else 1
    problem = d.get("problem", ["lnt" if "nt" in d else "li"])[0]
    try:
        if problem == "li":
            q = _parse_int("q", d["q"]) if "q" in d else 0
            inst = Instance(g, p, q, k, ell)
        elif problem == "lnt":
            try:
                nt = frozenset(int(t) for t in d.get("nt", []))
            except ValueError:
                raise GraphFormatError("directive nt needs integers") from None
            inst = InstanceNT(g, nt, p, k, ell)
        else:
            raise GraphFormatError(f"unknown problem {problem!r}")
    except ValueError as exc:
        raise GraphFormatError(str(exc)) from None
    _check_instance_bounds(inst)
    return inst


def _check_instance_bounds(inst: Instance | InstanceNT) -> None:
    n = inst.graph.n
    if inst.p > n:
        raise GraphFormatError(f"p={inst.p} exceeds the vertex count {n}")
    if isinstance(inst, Instance) and inst.q > n:
        raise GraphFormatError(f"q={inst.q} exceeds the vertex count {n}")


def write_instance(inst: Instance | InstanceNT) -> str:
    if isinstance(inst, Instance):
        head = [f"#% problem li", f"#% p {inst.p}", f"#% q {inst.q}"]
    else:
        head = [f"#% problem lnt", f"#% p {inst.p}"]
        if inst.nonterminals:
            head.append("#% nt " + " ".join(str(v) for v in sorted(inst.nonterminals)))
    head += [f"#% k {inst.k}", f"#% l {inst.ell}"]
    return "\n".join(head) + "\n" + write_graph(inst.graph)


def read_nonterminals(text: str) -> frozenset[int]:
    """Parse a whitespace-separated vertex id list (comments allowed)."""
    ids = []
    for row in _content_lines(text):
        for tok in row:
            try:
                ids.append(int(tok))
            except ValueError:
                raise GraphFormatError(f"non-terminal id {tok!r} is not an integer") from None
    return frozenset(ids)


# ---------------------------------------------------------------------------
# generators

def _gen_cycle(n: int) -> Graph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    return Graph.from_edges(n, [(i, i % n + 1) for i in range(1, n + 1)])


def _gen_theta(a: int, b: int, c: int) -> Graph:
    """Two hub vertices joined by three internally disjoint paths of
    a, b and c edges."""
    lengths = (a, b, c)
    if min(lengths) < 1:
        raise ValueError("path lengths must be positive")
    if sorted(lengths)[1] == 1:
        raise ValueError("at most one connecting path may be a single edge")
    edges = []
    nxt = 3
    for length in lengths:
        prev = 1
        for _ in range(length - 1):
            edges.append((prev, nxt))
            prev = nxt
            nxt += 1
        edges.append((prev, 2))
    return Graph.from_edges(nxt - 1, edges)


def _gen_subdivided(base: Graph, factor: int) -> Graph:
    """Replace every edge of ``base`` by a path of ``factor`` edges."""
    if factor < 1:
        raise ValueError("subdivision factor must be at least 1")
    edges = []
    nxt = base.n + 1
    for u, v in base.sorted_edges():
        prev = u
        for _ in range(factor - 1):
            edges.append((prev, nxt))
            prev = nxt
            nxt += 1
        edges.append((prev, v))
    return Graph.from_edges(nxt - 1, edges)


def _gen_twin_pendants(base: Graph, count: int, rng: random.Random) -> Graph:
    """Attach ``count`` pairs of pendant vertices, each pair sharing a
    host vertex of ``base``."""
    if count < 0:
        raise ValueError("count must be non-negative")
    hosts = list(base.vertices())
    rng.shuffle(hosts)
    edges = list(base.edges)
    nxt = base.n + 1
    for i in range(count):
        h = hosts[i % len(hosts)]
        edges += [(h, nxt), (h, nxt + 1)]
        nxt += 2
    return Graph.from_edges(nxt - 1, edges)


def _gen_min_degree3(n: int) -> Graph:
    """A connected graph with minimum degree >= 3: a rung-twisted
    ladder for even n, a two-step circulant for odd n."""
    if n < 4:
        raise ValueError("minimum degree 3 needs at least 4 vertices")
    edges = {(i, i % n + 1) for i in range(1, n + 1)}
    if n % 2 == 0:
        for i in range(1, n // 2 + 1):
            edges.add((i, i + n // 2))
    else:
        for i in range(1, n + 1):
            j = (i + 1) % n + 1
            edges.add(_norm_edge(i, j))
    return Graph.from_edges(n, sorted({_norm_edge(u, v) for u, v in edges}))


def _prufer_tree(n: int, rng: random.Random) -> list[tuple[int, int]]:
    if n == 1:
        return []
    if n == 2:
        return [(1, 2)]
    seq = [rng.randint(1, n) for _ in range(n - 2)]
    degree = [1] * (n + 1)
    for x in seq:
        degree[x] += 1
    edges = []
    import heapq

    leaves = [v for v in range(1, n + 1) if degree[v] == 1]
    heapq.heapify(leaves)
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, x))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    u, v = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append((u, v))
    return edges


def _gen_random_connected(n: int, m: int, rng: random.Random) -> Graph:
    if n < 1:
        raise ValueError("need at least one vertex")
    if not (n - 1 <= m <= n * (n - 1) // 2):
        raise ValueError(f"edge count {m} infeasible for {n} vertices")
    edges = {_norm_edge(u, v) for u, v in _prufer_tree(n, rng)}
    pool = [
        (u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1) if (u, v) not in edges
    ]
    rng.shuffle(pool)
    for e in pool[: m - len(edges)]:
        edges.add(e)
    return Graph.from_edges(n, edges)


def generate(family: str, params: tuple, seed: int = 0) -> Graph:
    """Build a named graph family member, deterministic under ``seed``.

    Families: cycle(n), theta(a,b,c), random-connected(n,m),
    subdivided(base_graph, factor), twin-pendant-gadget(base_graph, count),
    min-degree-3(n).
    """
    rng = random.Random(seed)
    if family == "cycle":
        return _gen_cycle(*params)
    if family == "theta":
        return _gen_theta(*params)
    if family == "random-connected":
        return _gen_random_connected(*params, rng)
    if family == "subdivided":
        return _gen_subdivided(*params)
    if family == "twin-pendant-gadget":
        return _gen_twin_pendants(*params, rng)
    if family == "min-degree-3":
        return _gen_min_degree3(*params)
    raise ValueError(f"unknown family {family!r}")
