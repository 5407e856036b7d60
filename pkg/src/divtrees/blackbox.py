"""Pluggable subroutine kernels for two delegated spanning-tree problems.

The pipelines hand off their hard cases to external kernels for
max-internal spanning tree (given q, is there a spanning tree with at
least q internal vertices?) and non-terminal spanning tree (is there a
spanning tree keeping every marked vertex internal?).  The default
plug-in decides each instance exactly by bounded tree enumeration and
answers with a tiny canonical equivalent; when the budget runs out it
reports unavailable (None) instead of guessing.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graphcore import Graph, InternalInvariantError
from .spantree import TreeEnumerationOverflow, enumerate_spanning_trees


@dataclass(frozen=True)
class MistInstance:
    """Max-internal spanning tree: graph plus required internal count."""

    graph: Graph
    q: int

    def __post_init__(self) -> None:
        if self.q < 0:
            raise ValueError("required internal count must be non-negative")


@dataclass(frozen=True)
class NtstInstance:
    """Non-terminal spanning tree: graph plus must-stay-internal set."""

    graph: Graph
    nonterminals: frozenset[int]

    def __post_init__(self) -> None:
        for v in self.nonterminals:
            if not 1 <= v <= self.graph.n:
                raise ValueError(f"non-terminal {v} outside vertex range")


_K2 = Graph(n=2, edges=frozenset({(1, 2)}))


def _checked_mist(out: MistInstance) -> MistInstance:
    if out.graph.n > max(2 * out.q, 2):
        raise InternalInvariantError("mist kernel output exceeds its size bound")
    return out


def _checked_ntst(out: NtstInstance) -> NtstInstance:
    if out.graph.n > max(3 * len(out.nonterminals), 2):
        raise InternalInvariantError("ntst kernel output exceeds its size bound")
    return out


# K_2 has a single spanning tree: one edge, two leaves, zero internal
# vertices.  Demanding 0 internals always holds; demanding 2 never does.
_MIST_YES = MistInstance(graph=_K2, q=0)
_MIST_NO = MistInstance(graph=_K2, q=2)
_NTST_YES = NtstInstance(graph=_K2, nonterminals=frozenset())
_NTST_NO = NtstInstance(graph=_K2, nonterminals=frozenset({1, 2}))


def mist_kernel(inst: MistInstance, budget: int = 200000) -> MistInstance | None:
    """Reduce a max-internal spanning tree instance to a canonical
    2-vertex equivalent by deciding it outright.

    ``budget`` caps the number of spanning trees examined; exceeding it
    returns None (unavailable) unless a witness already turned up.
    """
    g = inst.graph
    if not g.is_connected:
        return _checked_mist(_MIST_NO)
    if inst.q == 0:
        return _checked_mist(_MIST_YES)
    try:
        for t in enumerate_spanning_trees(g, limit=budget):
            if t.internal_count >= inst.q:
                return _checked_mist(_MIST_YES)
    except TreeEnumerationOverflow:
        return None
    return _checked_mist(_MIST_NO)


def ntst_kernel(inst: NtstInstance, budget: int = 200000) -> NtstInstance | None:
    """Reduce a non-terminal spanning tree instance to a canonical
    2-vertex equivalent by deciding it outright.

    Same budget semantics as :func:`mist_kernel`.
    """
    g = inst.graph
    if not g.is_connected:
        return _checked_ntst(_NTST_NO)
    if not inst.nonterminals:
        return _checked_ntst(_NTST_YES)
    try:
        for t in enumerate_spanning_trees(g, limit=budget):
            if inst.nonterminals <= t.internal_vertices:
                return _checked_ntst(_NTST_YES)
    except TreeEnumerationOverflow:
        return None
    return _checked_ntst(_NTST_NO)


def mist_yes_instance() -> MistInstance:
    return _MIST_YES


def mist_no_instance() -> MistInstance:
    return _MIST_NO


def ntst_yes_instance() -> NtstInstance:
    return _NTST_YES


def ntst_no_instance() -> NtstInstance:
    return _NTST_NO
