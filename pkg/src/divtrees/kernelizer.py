"""Kernelization pipelines for the two diverse spanning tree problems.

Each pipeline prunes an instance with local reduction rules (contract
long induced paths, drop redundant pendants, reset parameters that
pendant counting already satisfies), then either certifies the answer,
shrinks the instance below an explicit size threshold, or hands the
residual question to a pluggable subroutine kernel.

Every firing is logged as a :class:`RuleApplication`; replaying the
transcript from the input instance reproduces the pipeline's final
instance exactly, which is the backbone of the safety test harness.

Rule ids: R1-R6 belong to the leaf/internal pipeline (contract, twin
pendant, pendant-count reset, pendant delete, and the two size
thresholds), R7-R9 plus R5nt/R6nt to the leaf/non-terminal pipeline.
Pre-checks (disconnected, tree, infeasible parameters, pendant
required-internal vertex) get "PC-*" entries.
"""

from __future__ import annotations

import json
from bisect import bisect_left, insort
from dataclasses import dataclass
from math import ceil
from typing import Callable

from .blackbox import MistInstance, NtstInstance, mist_kernel, ntst_kernel
from .diversify import build_diverse_family, plan_swaps, verify_family
from .graphcore import (
    Graph,
    Instance,
    InstanceNT,
    InternalInvariantError,
    _compact_renaming,
    _contract_edge,
    contract_path_edge,
    delete_vertex,
    maximal_degree2_paths,
    pendant_vertices,
)
from .spantree import SpanningTree, arbitrary_spanning_tree, grow_leaves


@dataclass(frozen=True)
class RuleApplication:
    """One rule firing: what fired, where, and how the parameters moved.

    Mutation entries carry enough to replay exactly: a contraction
    stores its (keep, drop) pair and a deletion its removed vertex, in
    ids current at application time; ids above a removed vertex shift
    down by one afterwards.  Decision entries (pre-checks and size
    thresholds) mutate nothing and only record the verdict taken.
    """

    rule: str
    n_before: int
    touched: tuple[int, ...] = ()
    p_delta: int = 0
    q_delta: int = 0
    nt_removed: tuple[int, ...] = ()
    removed_vertex: int | None = None
    merged_edge: tuple[int, int] | None = None
    decision: str | None = None

    def renaming(self) -> dict[int, int]:
        """Old-id to new-id map for this entry; identity for decisions."""
        if self.merged_edge is not None:
            keep, drop = self.merged_edge
            out = _compact_renaming(self.n_before, drop)
            out[drop] = out[keep]
            return out
        if self.removed_vertex is not None:
            return _compact_renaming(self.n_before, self.removed_vertex)
        return {v: v for v in range(1, self.n_before + 1)}

    def to_json_dict(self) -> dict:
        rename = self.renaming()
        return {
            "rule": self.rule,
            "n_before": self.n_before,
            "touched": list(self.touched),
            "p_delta": self.p_delta,
            "q_delta": self.q_delta,
            "nt_removed": list(self.nt_removed),
            "removed_vertex": self.removed_vertex,
            "merged_edge": list(self.merged_edge) if self.merged_edge else None,
            "decision": self.decision,
            # only the ids that actually move
            "renaming": {str(a): b for a, b in sorted(rename.items()) if a != b},
        }


def transcript_to_ndjson(transcript: tuple[RuleApplication, ...] | list[RuleApplication]) -> str:
    return "".join(json.dumps(e.to_json_dict(), sort_keys=True) + "\n" for e in transcript)


@dataclass(frozen=True)
class KernelResult:
    """Outcome of a kernelization run plus its full audit trail.

    ``instance`` holds the reduced instance for reduced and delegated
    outcomes; for delegated_unavailable it is the pre-delegation
    instance (size bound not guaranteed).  ``final_instance`` is the
    state after the last transcript mutation — transcript replay must
    reproduce it.
    """

    outcome: str  # reduced | trivial_yes | trivial_no | delegated | delegated_unavailable
    transcript: tuple[RuleApplication, ...]
    final_instance: Instance | InstanceNT
    instance: Instance | InstanceNT | None = None
    witness: tuple[SpanningTree, ...] | None = None
    reason: str | None = None

    def to_json_dict(self) -> dict:
        return {
            "outcome": self.outcome,
            "instance": self.instance.to_json_dict() if self.instance else None,
            "witness": None
            if self.witness is None
            else [[list(e) for e in t.sorted_edges()] for t in self.witness],
            "reason": self.reason,
            "final_instance": self.final_instance.to_json_dict(),
            "transcript": [e.to_json_dict() for e in self.transcript],
        }


# size thresholds; an instance strictly below its bound is already a kernel

def case1_bound_li(k: int, ell: int) -> int:
    return 4 * ceil(k / 4) * ell * (ell + 6)


def case2_bound_li(p: int, q: int, k: int, ell: int) -> int:
    return (2 * (max(p, q) + 2 * ceil(k / 4) * ell) + q) * (ell + 6)


def case1_bound_lnt(nt_size: int, k: int, ell: int) -> int:
    return (4 * ceil(k / 4) * ell + 5 * nt_size) * (ell + 6)


def case2_bound_lnt(nt_size: int, p: int, k: int, ell: int) -> int:
    return (4 * ceil(k / 4) * ell + 2 * p + 5 * nt_size) * (ell + 6)


def _first_long_path(g: Graph, min_length: int, forbidden: frozenset[int]):
    for path in maximal_degree2_paths(g, forbidden):
        if path.length >= min_length:
            return path
    return None


def _twin_pendant(g: Graph) -> tuple[int, int] | None:
    """Lowest pendant that shares its neighbor with another pendant."""
    pend = sorted(pendant_vertices(g))
    hosts: dict[int, int] = {}
    for v in pend:
        (w,) = g.neighbors(v)
        hosts[w] = hosts.get(w, 0) + 1
    for v in pend:
        (w,) = g.neighbors(v)
        if hosts[w] >= 2:
            return v, w
    return None


_LI_RULES = ("R1", "R2", "R3", "R4", "R5", "R6")
_LNT_RULES = ("R7", "R8", "R9", "R5nt", "R6nt")


def apply_rule(
    inst: Instance | InstanceNT, rule: str
) -> tuple[Instance | InstanceNT, RuleApplication]:
    """Fire one reduction rule at its lowest canonical location.

    Returns the successor instance and the transcript entry; raises
    ValueError when the rule's guard does not hold.  Threshold rules
    mutate nothing and record a "reduced"/"large" decision.
    """
    if rule not in _LI_RULES and rule not in _LNT_RULES:
        raise ValueError(f"unknown rule {rule!r}")
    if isinstance(inst, InstanceNT) != (rule in _LNT_RULES):
        raise ValueError(f"{rule} does not apply to this problem variant")
    g = inst.graph
    if not g.is_connected:
        raise ValueError(f"{rule} guard: graph must be connected")

    if rule == "R1":
        path = _first_long_path(g, inst.ell + 3, frozenset())
        if path is None:
            raise ValueError("R1 guard: no degree-2-path of length >= ell+3")
        keep, drop = path.vertices[1], path.vertices[2]
        g2, _ = contract_path_edge(g, path)
        qd = -1 if inst.q > 0 else 0
        entry = RuleApplication(
            "R1", g.n, touched=(keep, drop), q_delta=qd, merged_edge=(keep, drop)
        )
        return Instance(g2, inst.p, inst.q + qd, inst.k, inst.ell), entry

    if rule == "R2":
        tw = _twin_pendant(g)
        if tw is None:
            raise ValueError("R2 guard: no two pendants share a neighbor")
        x, w = tw
        g2, _ = delete_vertex(g, x)
        pd = -1 if inst.p > 0 else 0
        entry = RuleApplication("R2", g.n, touched=(x, w), p_delta=pd, removed_vertex=x)
        return Instance(g2, inst.p + pd, inst.q, inst.k, inst.ell), entry

    if rule == "R3":
        h = len(pendant_vertices(g))
        pd = -inst.p if inst.p > 0 and h >= inst.p else 0
        qd = -inst.q if inst.q > 0 and h >= inst.q else 0
        if pd == 0 and qd == 0:
            raise ValueError("R3 guard: pendant count resets neither p nor q")
        entry = RuleApplication("R3", g.n, p_delta=pd, q_delta=qd)
        return Instance(g, inst.p + pd, inst.q + qd, inst.k, inst.ell), entry

    if rule == "R4":
        if inst.p or inst.q:
            raise ValueError("R4 guard: needs p = q = 0")
        pend = pendant_vertices(g)
        if not pend:
            raise ValueError("R4 guard: no pendant vertex")
        v = min(pend)
        (u,) = g.neighbors(v)
        g2, _ = delete_vertex(g, v)
        entry = RuleApplication("R4", g.n, touched=(v, u), removed_vertex=v)
        return Instance(g2, 0, 0, inst.k, inst.ell), entry

    if rule == "R5":
        if inst.p or inst.q:
            raise ValueError("R5 guard: needs p = q = 0")
        small = g.n < case1_bound_li(inst.k, inst.ell)
        entry = RuleApplication("R5", g.n, decision="reduced" if small else "large")
        return inst, entry

    if rule == "R6":
        if max(inst.p, inst.q) == 0:
            raise ValueError("R6 guard: needs max(p, q) > 0")
        small = g.n < case2_bound_li(inst.p, inst.q, inst.k, inst.ell)
        entry = RuleApplication("R6", g.n, decision="reduced" if small else "large")
        return inst, entry

    if rule == "R7":
        path = _first_long_path(g, inst.ell + 3, inst.nonterminals)
        if path is None:
            raise ValueError(
                "R7 guard: no degree-2-path of length >= ell+3 clear of the required-internal set"
            )
        keep, drop = path.vertices[1], path.vertices[2]
        g2, rename = contract_path_edge(g, path)
        nt2 = frozenset(rename[v] for v in inst.nonterminals)
        entry = RuleApplication("R7", g.n, touched=(keep, drop), merged_edge=(keep, drop))
        return InstanceNT(g2, nt2, inst.p, inst.k, inst.ell), entry

    if rule == "R8":
        h = len(pendant_vertices(g))
        if not (inst.p > 0 and h >= inst.p):
            raise ValueError("R8 guard: pendant count below p, or p already 0")
        entry = RuleApplication("R8", g.n, p_delta=-inst.p)
        return InstanceNT(g, inst.nonterminals, 0, inst.k, inst.ell), entry

    if rule == "R9":
        if inst.p:
            raise ValueError("R9 guard: needs p = 0")
        pend = pendant_vertices(g)
        if not pend:
            raise ValueError("R9 guard: no pendant vertex")
        if pend & inst.nonterminals:
            raise ValueError("R9 guard: a required-internal vertex is pendant")
        v = min(pend)
        (u,) = g.neighbors(v)
        g2, rename = delete_vertex(g, v)
        removed = (u,) if u in inst.nonterminals else ()
        nt2 = frozenset(rename[w] for w in inst.nonterminals if w != u)
        entry = RuleApplication(
            "R9", g.n, touched=(v, u), nt_removed=removed, removed_vertex=v
        )
        return InstanceNT(g2, nt2, 0, inst.k, inst.ell), entry

    if rule == "R5nt":
        if inst.p:
            raise ValueError("R5nt guard: needs p = 0")
        small = g.n < case1_bound_lnt(len(inst.nonterminals), inst.k, inst.ell)
        entry = RuleApplication("R5nt", g.n, decision="reduced" if small else "large")
        return inst, entry

    if inst.p == 0:
        raise ValueError("R6nt guard: needs p > 0")
    small = g.n < case2_bound_lnt(len(inst.nonterminals), inst.p, inst.k, inst.ell)
    entry = RuleApplication("R6nt", g.n, decision="reduced" if small else "large")
    return inst, entry


def _oriented_key(vs: list[int]) -> tuple[int, ...]:
    # mirror of the canonical path orientation used by graphcore
    if vs[0] == vs[-1]:
        if len(vs) > 2 and vs[1] > vs[-2]:
            return tuple([vs[0]] + vs[-2:0:-1] + [vs[0]])
        return tuple(vs)
    rev = list(reversed(vs))
    return tuple(rev) if rev < vs else tuple(vs)


def _exhaust_contractions(
    g: Graph,
    ell: int,
    nt: frozenset[int],
    q: int,
    rule_id: str,
    decrement_q: bool,
    transcript: list[RuleApplication],
) -> tuple[Graph, int, frozenset[int], bool]:
    """Contract long degree-2-paths to exhaustion in one pass.

    Behaves exactly like firing R1/R7 repeatedly at the lowest
    canonical location — contracting an interior edge never disturbs
    another maximal path, so the path list can be maintained
    incrementally and the graph rebuilt once at the end.  Renumbering
    is arithmetic: after dropping a vertex every higher id slides down,
    so the current id of a survivor is its id minus the dropped ids
    below it.
    """
    threshold = ell + 3
    paths = [list(p.vertices) for p in maximal_degree2_paths(g, nt)]
    if not any(len(vs) - 1 >= threshold for vs in paths):
        return g, q, nt, False
    adj: dict[int, set[int]] = {v: set(g.neighbors(v)) for v in g.vertices()}
    dropped: list[int] = []

    def cur(x: int) -> int:
        return x - bisect_left(dropped, x)

    keys = [_oriented_key(vs) for vs in paths]
    while True:
        best = None
        for i, vs in enumerate(paths):
            if len(vs) - 1 >= threshold and (best is None or keys[i] < keys[best]):
                best = i
        if best is None:
            break
        ordered = list(keys[best])
        b, c, d = ordered[1], ordered[2], ordered[3]
        adj[b].discard(c)
        adj[d].discard(c)
        del adj[c]
        adj[b].add(d)
        adj[d].add(b)
        transcript.append(
            RuleApplication(
                rule_id,
                g.n - len(dropped),
                touched=(cur(b), cur(c)),
                q_delta=-1 if decrement_q and q > 0 else 0,
                merged_edge=(cur(b), cur(c)),
            )
        )
        if decrement_q:
            q = max(0, q - 1)
        insort(dropped, c)
        del ordered[2]
        paths[best] = ordered
        keys[best] = _oriented_key(ordered)
    edges = frozenset(
        (cur(u), cur(v)) for u, nbrs in adj.items() for v in nbrs if u < v
    )
    g2 = Graph(g.n - len(dropped), edges)
    return g2, q, frozenset(cur(v) for v in nt), True


def _long_path_via(
    adj: dict[int, set[int]], forbidden: set[int], u: int, threshold: int
) -> bool:
    """Does ``u`` now sit inside a degree-2-path of length >= threshold?

    Called after a deletion dropped ``u`` to degree 2 (or removed it
    from the forbidden set); only paths through ``u`` can be new, so a
    two-sided walk bounded by ``threshold`` suffices.
    """
    if len(adj[u]) != 2 or u in forbidden:
        return False
    a, b = sorted(adj[u])
    length = 2
    prev, x = u, a
    while x != u and len(adj[x]) == 2 and x not in forbidden:
        if length >= threshold:
            return True
        (nxt,) = adj[x] - {prev}
        prev, x = x, nxt
        length += 1
    if x == u:
        # walked all the way around a bare cycle; u-b was counted twice
        return length - 1 >= threshold
    prev, x = u, b
    while len(adj[x]) == 2 and x not in forbidden:
        if length >= threshold:
            return True
        (nxt,) = adj[x] - {prev}
        prev, x = x, nxt
        length += 1
    return length >= threshold


def _exhaust_pendant_deletions(
    g: Graph,
    threshold: int,
    p: int,
    nt: frozenset[int],
    variant: str,
    include_r4: bool,
    transcript: list[RuleApplication],
) -> tuple[Graph, int, frozenset[int], bool]:
    """Delete pendants to exhaustion in one pass (R2/R4, or R9).

    Sequentially identical to firing the rules one at a time with the
    contraction rule at higher priority: the batch stops as soon as a
    deletion opens a degree-2-path of length >= threshold, so the
    caller can contract before deletions resume.  A deletion only
    changes its host's degree, so that check is local.  Ids and the
    single final rebuild follow _exhaust_contractions.
    """
    adj: dict[int, set[int]] = {v: set(g.neighbors(v)) for v in g.vertices()}
    live_nt = set(nt)
    dropped: list[int] = []

    def cur(x: int) -> int:
        return x - bisect_left(dropped, x)

    pend = {v for v, nbrs in adj.items() if len(nbrs) == 1}
    host_count: dict[int, int] = {}
    for v in pend:
        (u,) = adj[v]
        host_count[u] = host_count.get(u, 0) + 1

    while pend:
        if variant == "lnt":
            bad = pend & live_nt
            if bad:
                raise InternalInvariantError(
                    f"required-internal vertex {min(bad)} became pendant"
                )
            v, rule = min(pend), "R9"
        else:
            twin = min(
                (x for x in pend if host_count[next(iter(adj[x]))] >= 2),
                default=None,
            )
            if twin is not None:
                v, rule = twin, "R2"
            elif include_r4:
                v, rule = min(pend), "R4"
            else:
                break
        (u,) = adj[v]
        pend.discard(v)
        host_count[u] -= 1
        if not host_count[u]:
            del host_count[u]
        host_count.pop(v, None)
        del adj[v]
        adj[u].discard(v)
        n_now = g.n - len(dropped)
        if rule == "R2":
            pd = -1 if p > 0 else 0
            p += pd
            transcript.append(
                RuleApplication(
                    "R2",
                    n_now,
                    touched=(cur(v), cur(u)),
                    p_delta=pd,
                    removed_vertex=cur(v),
                )
            )
        elif rule == "R4":
            transcript.append(
                RuleApplication(
                    "R4", n_now, touched=(cur(v), cur(u)), removed_vertex=cur(v)
                )
            )
        else:
            removed = (cur(u),) if u in live_nt else ()
            live_nt.discard(u)
            transcript.append(
                RuleApplication(
                    "R9",
                    n_now,
                    touched=(cur(v), cur(u)),
                    nt_removed=removed,
                    removed_vertex=cur(v),
                )
            )
        insort(dropped, v)
        if u in pend:
            # u lost its only neighbor (K_2 endgame); no longer deletable
            pend.discard(u)
        elif len(adj[u]) == 1:
            pend.add(u)
            (w,) = adj[u]
            host_count[w] = host_count.get(w, 0) + 1
        if _long_path_via(adj, live_nt, u, threshold):
            break
    if not dropped:
        return g, p, nt, False
    edges = frozenset(
        (cur(a), cur(b)) for a, nbrs in adj.items() for b in nbrs if a < b
    )
    g2 = Graph(g.n - len(dropped), edges)
    return g2, p, frozenset(cur(x) for x in live_nt), True


def _li_fixpoint(
    inst: Instance, transcript: list[RuleApplication], include_r4: bool
) -> Instance:
    for _ in range(inst.graph.n + inst.graph.m + 4):
        g2, q2, _, c_fired = _exhaust_contractions(
            inst.graph, inst.ell, frozenset(), inst.q, "R1", True, transcript
        )
        if c_fired:
            inst = Instance(g2, inst.p, q2, inst.k, inst.ell)
        g3, p3, _, d_fired = _exhaust_pendant_deletions(
            inst.graph, inst.ell + 3, inst.p, frozenset(), "li", include_r4, transcript
        )
        if d_fired:
            inst = Instance(g3, p3, inst.q, inst.k, inst.ell)
        if not c_fired and not d_fired:
            return inst
    raise InternalInvariantError("reduction loop failed to reach a fixpoint")


def _case1_witness_li(cur: Instance) -> tuple[SpanningTree, ...]:
    g = cur.graph
    target = 2 * ceil(cur.k / 4) * cur.ell
    grown = grow_leaves(g, arbitrary_spanning_tree(g), frozenset(), target, cur.ell + 3)
    if not isinstance(grown, SpanningTree):
        raise InternalInvariantError("leaf growth fell short above the size threshold")
    plan = plan_swaps(g, grown, grown.leaves, cur.k, cur.ell)
    family = tuple(build_diverse_family(g, grown, plan))
    if not verify_family(g, family, cur.p, cur.q, cur.k).verdict:
        raise InternalInvariantError("constructed family failed verification")
    return family


def kernelize_li(
    inst: Instance,
    *,
    construct_witness: bool = False,
    blackbox: Callable[[MistInstance], MistInstance | None] | None = mist_kernel,
) -> KernelResult:
    """Kernelize a leaf/internal instance.

    Outcomes: trivial answers for degenerate inputs, a Reduced instance
    below the size threshold of whichever case applied, a TrivialYes
    above the p=q=0 threshold (with a constructed witness family when
    asked), or delegation of the surviving internal-count constraint to
    the plug-in kernel.
    """
    transcript: list[RuleApplication] = []

    def done(outcome: str, current: Instance, **kw) -> KernelResult:
        return KernelResult(
            outcome=outcome,
            transcript=tuple(transcript),
            final_instance=current,
            **kw,
        )

    g = inst.graph
    if not g.is_connected:
        transcript.append(RuleApplication("PC-disconnected", g.n, decision="no"))
        return done("trivial_no", inst, reason="disconnected graphs have no spanning tree")
    if g.is_tree():
        t = SpanningTree(g, g.edges)
        good = inst.ell == 1 and t.leaf_count >= inst.p and t.internal_count >= inst.q
        transcript.append(RuleApplication("PC-tree", g.n, decision="yes" if good else "no"))
        if good:
            witness = (t,)
            if not verify_family(g, witness, inst.p, inst.q, inst.k).verdict:
                raise InternalInvariantError("tree witness failed verification")
            return done("trivial_yes", inst, witness=witness)
        return done(
            "trivial_no",
            inst,
            reason="a tree has exactly one spanning tree and it fails the requirements",
        )
    # non-tree connected graphs have n >= 3, so a tree can have at most
    # n-1 leaves and, having at least 2 leaves, at most n-2 internals
    if inst.p >= g.n:
        transcript.append(RuleApplication("PC-p", g.n, decision="no"))
        return done("trivial_no", inst, reason="p exceeds any possible leaf count")
    if inst.q >= g.n:
        transcript.append(RuleApplication("PC-q", g.n, decision="no"))
        return done("trivial_no", inst, reason="q exceeds any possible internal count")

    cur = _li_fixpoint(inst, transcript, include_r4=False)
    h = len(pendant_vertices(cur.graph))
    if (cur.p > 0 and h >= cur.p) or (cur.q > 0 and h >= cur.q):
        cur, e = apply_rule(cur, "R3")
        transcript.append(e)

    if cur.p == 0 and cur.q == 0:
        cur = _li_fixpoint(cur, transcript, include_r4=True)
        cur, e = apply_rule(cur, "R5")
        transcript.append(e)
        if e.decision == "reduced":
            return done("reduced", cur, instance=cur)
        witness = _case1_witness_li(cur) if construct_witness else None
        return done("trivial_yes", cur, witness=witness)

    # contraction can shrink n below the leftover targets, so re-check
    if cur.p >= cur.graph.n:
        transcript.append(RuleApplication("PC-p", cur.graph.n, decision="no"))
        return done("trivial_no", cur, reason="p exceeds any possible leaf count")
    if cur.q >= cur.graph.n:
        transcript.append(RuleApplication("PC-q", cur.graph.n, decision="no"))
        return done("trivial_no", cur, reason="q exceeds any possible internal count")
    cur, e = apply_rule(cur, "R6")
    transcript.append(e)
    if e.decision == "reduced":
        return done("reduced", cur, instance=cur)
    out = blackbox(MistInstance(cur.graph, cur.q)) if blackbox is not None else None
    if out is None:
        return done(
            "delegated_unavailable",
            cur,
            instance=cur,
            reason="subroutine kernel unavailable within budget",
        )
    return done("delegated", cur, instance=Instance(out.graph, 0, out.q, 1, 1))


def kernelize_lnt(
    inst: InstanceNT,
    *,
    blackbox: Callable[[NtstInstance], NtstInstance | None] | None = ntst_kernel,
) -> KernelResult:
    """Kernelize a leaf/non-terminal instance.

    Mirrors :func:`kernelize_li`; both parameter cases end below their
    size threshold (Reduced) or delegate the required-internal
    constraint to the plug-in kernel (no trivial-yes branch here).
    """
    transcript: list[RuleApplication] = []

    def done(outcome: str, current: InstanceNT, **kw) -> KernelResult:
        return KernelResult(
            outcome=outcome,
            transcript=tuple(transcript),
            final_instance=current,
            **kw,
        )

    g = inst.graph
    nt = inst.nonterminals
    if not g.is_connected:
        transcript.append(RuleApplication("PC-disconnected", g.n, decision="no"))
        return done("trivial_no", inst, reason="disconnected graphs have no spanning tree")
    if g.is_tree():
        t = SpanningTree(g, g.edges)
        good = inst.ell == 1 and t.leaf_count >= inst.p and nt <= t.internal_vertices
        transcript.append(RuleApplication("PC-tree", g.n, decision="yes" if good else "no"))
        if good:
            witness = (t,)
            if not verify_family(g, witness, inst.p, 0, inst.k, nt=nt).verdict:
                raise InternalInvariantError("tree witness failed verification")
            return done("trivial_yes", inst, witness=witness)
        return done(
            "trivial_no",
            inst,
            reason="a tree has exactly one spanning tree and it fails the requirements",
        )
    nt_pendants = pendant_vertices(g) & nt
    if nt_pendants:
        transcript.append(
            RuleApplication(
                "PC-nt-pendant", g.n, touched=tuple(sorted(nt_pendants)), decision="no"
            )
        )
        return done(
            "trivial_no", inst, reason="a required-internal vertex has degree one"
        )
    if inst.p >= g.n:
        transcript.append(RuleApplication("PC-p", g.n, decision="no"))
        return done("trivial_no", inst, reason="p exceeds any possible leaf count")

    cur = inst
    g2, _, nt2, fired = _exhaust_contractions(
        cur.graph, cur.ell, cur.nonterminals, 0, "R7", False, transcript
    )
    if fired:
        cur = InstanceNT(g2, nt2, cur.p, cur.k, cur.ell)
    h = len(pendant_vertices(cur.graph))
    if cur.p > 0 and h >= cur.p:
        cur, e = apply_rule(cur, "R8")
        transcript.append(e)

    if cur.p == 0:
        for _ in range(cur.graph.n + cur.graph.m + 4):
            g2, _, nt2, c_fired = _exhaust_contractions(
                cur.graph, cur.ell, cur.nonterminals, 0, "R7", False, transcript
            )
            if c_fired:
                cur = InstanceNT(g2, nt2, 0, cur.k, cur.ell)
            g3, _, nt3, d_fired = _exhaust_pendant_deletions(
                cur.graph, cur.ell + 3, 0, cur.nonterminals, "lnt", False, transcript
            )
            if d_fired:
                cur = InstanceNT(g3, nt3, 0, cur.k, cur.ell)
            if not c_fired and not d_fired:
                break
        else:
            raise InternalInvariantError("reduction loop failed to reach a fixpoint")
        cur, e = apply_rule(cur, "R5nt")
    else:
        if cur.p >= cur.graph.n:
            transcript.append(RuleApplication("PC-p", cur.graph.n, decision="no"))
            return done("trivial_no", cur, reason="p exceeds any possible leaf count")
        cur, e = apply_rule(cur, "R6nt")
    transcript.append(e)
    if e.decision == "reduced":
        return done("reduced", cur, instance=cur)
    out = blackbox(NtstInstance(cur.graph, cur.nonterminals)) if blackbox is not None else None
    if out is None:
        return done(
            "delegated_unavailable",
            cur,
            instance=cur,
            reason="subroutine kernel unavailable within budget",
        )
    return done(
        "delegated", cur, instance=InstanceNT(out.graph, out.nonterminals, 0, 1, 1)
    )


def kernelize(
    inst: Instance | InstanceNT, *, construct_witness: bool = False, blackbox=None
) -> KernelResult:
    """Dispatch to the right pipeline; blackbox=None keeps the defaults."""
    if isinstance(inst, InstanceNT):
        if blackbox is None:
            return kernelize_lnt(inst)
        return kernelize_lnt(inst, blackbox=blackbox)
    if blackbox is None:
        return kernelize_li(inst, construct_witness=construct_witness)
    return kernelize_li(inst, construct_witness=construct_witness, blackbox=blackbox)


def replay(
    inst: Instance | InstanceNT, transcript: tuple[RuleApplication, ...]
) -> Instance | InstanceNT:
    """Re-apply a transcript's mutations to the starting instance.

    Decision entries are no-ops; contractions and deletions are
    re-applied at their recorded locations.  The result must equal the
    producing run's final_instance.
    """
    for e in transcript:
        if e.merged_edge is not None:
            keep, drop = e.merged_edge
            g2, rename = _contract_edge(inst.graph, keep, drop)
            if isinstance(inst, InstanceNT):
                nt2 = frozenset(rename[v] for v in inst.nonterminals)
                inst = InstanceNT(g2, nt2, inst.p + e.p_delta, inst.k, inst.ell)
            else:
                inst = Instance(g2, inst.p + e.p_delta, inst.q + e.q_delta, inst.k, inst.ell)
        elif e.removed_vertex is not None:
            g2, rename = delete_vertex(inst.graph, e.removed_vertex)
            if isinstance(inst, InstanceNT):
                nt2 = frozenset(
                    rename[v] for v in inst.nonterminals if v not in e.nt_removed
                )
                inst = InstanceNT(g2, nt2, inst.p + e.p_delta, inst.k, inst.ell)
            else:
                inst = Instance(g2, inst.p + e.p_delta, inst.q + e.q_delta, inst.k, inst.ell)
        elif e.p_delta or e.q_delta:
            if isinstance(inst, InstanceNT):
                inst = InstanceNT(
                    inst.graph, inst.nonterminals, inst.p + e.p_delta, inst.k, inst.ell
                )
            else:
                inst = Instance(
                    inst.graph, inst.p + e.p_delta, inst.q + e.q_delta, inst.k, inst.ell
                )
    return inst
