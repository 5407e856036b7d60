"""Command-line front end.

Subcommands: kernelize (run a reduction pipeline, JSON out), solve
(exact oracle, exit code carries the verdict), verify (check a family
file against an instance), construct (build a diverse family directly),
gen (emit corpus graphs), audit (batch safety check of kernelization
against the oracle).

Exit codes: solve uses 0/1/2 for yes/no/inconclusive; verify and
construct use 0/1 for pass/fail; everything else 0 on success.  Usage
problems exit 64, unreadable or malformed data 65, violated internal
invariants 70.  All JSON is key-sorted so identical invocations give
byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import partial
from math import ceil
from pathlib import Path

from .blackbox import mist_kernel, ntst_kernel
from .diversify import build_diverse_family, plan_swaps, verify_family
from .graphcore import (
    GraphFormatError,
    Instance,
    InstanceNT,
    InternalInvariantError,
    _check_instance_bounds,
    generate,
    read_instance,
    write_graph,
)
from .kernelizer import kernelize_li, kernelize_lnt, transcript_to_ndjson
from .oracle import OracleLimits, solve
from .spantree import (
    SmallnessReport,
    TreeEnumerationOverflow,
    arbitrary_spanning_tree,
    enumerate_spanning_trees,
    grow_leaves,
    read_edge_set_family,
    write_family,
)

EX_USAGE = 64
EX_DATA = 65
EX_INTERNAL = 70


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Validated flag bundle for the instance-reading subcommands."""

    subcommand: str
    input: str
    problem: str | None
    p: int | None
    q: int | None
    k: int | None
    ell: int | None
    nt: frozenset[int] | None
    output: str | None

    def __post_init__(self) -> None:
        if self.problem == "lnt" and self.q is not None:
            raise UsageError("-q has no meaning for the lnt problem")
        if self.problem == "li" and self.nt is not None:
            raise UsageError("--nt has no meaning for the li problem")


def _parse_nt(text: str | None) -> frozenset[int] | None:
    if text is None:
        return None
    if not text.strip():
        return frozenset()
    return frozenset(int(x) for x in text.split(","))


def _config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        subcommand=args.cmd,
        input=args.input,
        problem=args.problem,
        p=args.p,
        q=args.q,
        k=args.k,
        ell=args.ell,
        nt=_parse_nt(args.nt),
        output=args.output,
    )


def _load_instance(cfg: RunConfig) -> Instance | InstanceNT:
    """Read the input file and overlay any parameter flags."""
    text = Path(cfg.input).read_text()
    base = read_instance(text)
    file_lnt = isinstance(base, InstanceNT)
    problem = cfg.problem or ("lnt" if file_lnt else "li")
    if problem == "li" and file_lnt and base.nonterminals:
        raise UsageError("input file carries non-terminals but the problem is li")
    g = base.graph
    p = cfg.p if cfg.p is not None else base.p
    k = cfg.k if cfg.k is not None else base.k
    ell = cfg.ell if cfg.ell is not None else base.ell
    if problem == "lnt":
        file_nt = base.nonterminals if file_lnt else frozenset()
        nt = cfg.nt if cfg.nt is not None else file_nt
        inst: Instance | InstanceNT = InstanceNT(g, nt, p, k, ell)
    else:
        q = cfg.q if cfg.q is not None else (base.q if not file_lnt else 0)
        inst = Instance(g, p, q, k, ell)
    _check_instance_bounds(inst)
    return inst


def _emit(output: str | None, text: str) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


def _emit_json(output: str | None, payload: dict) -> None:
    _emit(output, json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _family_json(family) -> list[list[list[int]]]:
    return [[list(e) for e in t.sorted_edges()] for t in family]


# ---------------------------------------------------------------------------
# subcommands

def _cmd_kernelize(args: argparse.Namespace) -> int:
    cfg = _config(args)
    inst = _load_instance(cfg)
    if isinstance(inst, InstanceNT):
        bb = None if args.blackbox == "none" else partial(ntst_kernel, budget=args.budget)
        result = kernelize_lnt(inst, blackbox=bb)
        problem = "lnt"
    else:
        bb = None if args.blackbox == "none" else partial(mist_kernel, budget=args.budget)
        result = kernelize_li(inst, construct_witness=args.witness, blackbox=bb)
        problem = "li"
    if args.transcript is not None:
        Path(args.transcript).write_text(transcript_to_ndjson(result.transcript))
    if args.family_out is not None:
        if result.witness is None:
            raise UsageError("no witness family to write; outcome was " + result.outcome)
        Path(args.family_out).write_text(write_family(list(result.witness)))
    payload = {"schema": 1, "problem": problem}
    payload.update(result.to_json_dict())
    _emit_json(cfg.output, payload)
    return 0


def _cmd_solve(args: argparse.Namespace) -> int:
    cfg = _config(args)
    inst = _load_instance(cfg)
    limits = OracleLimits(max_trees=args.max_trees, max_clique_nodes=args.max_clique_nodes)
    verdict = solve(inst, limits)
    payload = {
        "schema": 1,
        "problem": "lnt" if isinstance(inst, InstanceNT) else "li",
        "answer": verdict.answer,
        "stats": verdict.stats.to_json_dict(),
        "witness": None if verdict.witness is None else _family_json(verdict.witness),
    }
    _emit_json(cfg.output, payload)
    return {"yes": 0, "no": 1, "inconclusive": 2}[verdict.answer]


def _cmd_verify(args: argparse.Namespace) -> int:
    cfg = _config(args)
    inst = _load_instance(cfg)
    family_text = Path(args.family).read_text()
    edge_sets = read_edge_set_family(family_text, inst.graph.n)
    size_ok = len(edge_sets) == inst.ell
    if isinstance(inst, InstanceNT):
        report = verify_family(
            inst.graph, edge_sets, inst.p, 0, inst.k, nt=inst.nonterminals
        )
    else:
        report = verify_family(inst.graph, edge_sets, inst.p, inst.q, inst.k)
    ok = size_ok and report.verdict
    payload = {
        "schema": 1,
        "ok": ok,
        "family_size": len(edge_sets),
        "expected_size": inst.ell,
        "report": report.to_json_dict(),
    }
    _emit_json(cfg.output, payload)
    return 0 if ok else 1


def _construct_family(inst: Instance | InstanceNT, budget: int):
    """Build a family the constructive way: grow leaves, then swap.

    Returns (family, reason); exactly one is None.
    """
    g = inst.graph
    k, ell = inst.k, inst.ell
    block = ceil(k / 4)
    if not g.is_connected:
        return None, "graph is disconnected"
    if isinstance(inst, InstanceNT):
        nt = inst.nonterminals
        seed = None
        try:
            for t in enumerate_spanning_trees(g, limit=budget):
                if nt <= t.internal_vertices:
                    seed = t
                    break
        except TreeEnumerationOverflow:
            return None, "seed search exhausted its budget"
        if seed is None:
            return None, "no spanning tree keeps the required vertices internal"
        target = max(2 * block * ell + 2 * len(nt), inst.p + block + 2 * len(nt))
    else:
        nt = frozenset()
        seed = arbitrary_spanning_tree(g)
        target = max(2 * block * ell, inst.p + block)
    try:
        grown = grow_leaves(g, seed, nt, target, ell + 3)
    except ValueError as exc:
        return None, f"leaf growth failed: {exc}"
    if isinstance(grown, SmallnessReport):
        return None, (
            f"growth stalled at {grown.leaves_reached} leaves; "
            f"the graph has fewer than {grown.bound} vertices"
        )
    excluded: set[int] = set()
    for v in sorted(nt):
        excluded.update(sorted(grown.adjacency[v])[:2])
    chosen = frozenset(
        v for v in grown.leaves if v not in excluded and g.degree(v) >= 2
    )
    try:
        plan = plan_swaps(g, grown, chosen, k, ell)
        family = build_diverse_family(g, grown, plan, nt=nt)
    except ValueError as exc:
        return None, f"swap planning failed: {exc}"
    return family, None


def _cmd_construct(args: argparse.Namespace) -> int:
    cfg = _config(args)
    inst = _load_instance(cfg)
    family, reason = _construct_family(inst, args.budget)
    ok = False
    report_json = None
    if family is not None:
        if isinstance(inst, InstanceNT):
            report = verify_family(
                inst.graph, family, inst.p, 0, inst.k, nt=inst.nonterminals
            )
        else:
            report = verify_family(inst.graph, family, inst.p, inst.q, inst.k)
        ok = report.verdict and len(family) == inst.ell
        report_json = report.to_json_dict()
        if args.family_out is not None:
            Path(args.family_out).write_text(write_family(list(family)))
    payload = {
        "schema": 1,
        "ok": ok,
        "reason": reason,
        "family": None if family is None else _family_json(family),
        "report": report_json,
    }
    _emit_json(cfg.output, payload)
    return 0 if ok else 1


def _cmd_gen(args: argparse.Namespace) -> int:
    fam = args.family
    raw = args.params
    if fam in ("subdivided", "twin-pendant-gadget"):
        if len(raw) < 3:
            raise UsageError(f"{fam} needs BASE-FAMILY BASE-PARAMS... FACTOR")
        base = generate(raw[0], tuple(int(x) for x in raw[1:-1]), seed=args.seed)
        g = generate(fam, (base, int(raw[-1])), seed=args.seed)
    else:
        g = generate(fam, tuple(int(x) for x in raw), seed=args.seed)
    _emit(args.output, write_graph(g))
    return 0


def _random_instance(rng: random.Random, problem: str, max_n: int) -> Instance | InstanceNT:
    n = rng.randint(3, max_n)
    m_cap = min(n * (n - 1) // 2, 14)
    m = rng.randint(n - 1, m_cap)
    g = generate("random-connected", (n, m), seed=rng.randrange(2**30))
    p = rng.randint(0, min(4, n))
    k = rng.randint(1, 4)
    ell = rng.randint(1, 3)
    if problem == "lnt":
        nt = frozenset(rng.sample(range(1, n + 1), rng.randint(0, min(3, n))))
        return InstanceNT(g, nt, p, k, ell)
    q = rng.randint(0, min(4, n))
    return Instance(g, p, q, k, ell)


def _audit_one(inst: Instance | InstanceNT, budget: int) -> tuple[str, str, str]:
    if isinstance(inst, InstanceNT):
        result = kernelize_lnt(inst, blackbox=partial(ntst_kernel, budget=budget))
    else:
        result = kernelize_li(inst, blackbox=partial(mist_kernel, budget=budget))
    original = solve(inst).answer
    if result.outcome == "trivial_yes":
        reduced = "yes"
    elif result.outcome == "trivial_no":
        reduced = "no"
    elif result.outcome in ("reduced", "delegated"):
        assert result.instance is not None
        reduced = solve(result.instance).answer
    else:
        reduced = "inconclusive"
    return result.outcome, original, reduced


def _cmd_audit(args: argparse.Namespace) -> int:
    rng = random.Random(args.seed)
    instances = [
        _random_instance(rng, args.problem, args.max_n) for _ in range(args.count)
    ]
    lines = []
    passes = 0
    with ThreadPoolExecutor(max_workers=args.workers) as pool:
        rows = list(pool.map(lambda i: _audit_one(i, args.budget), instances))
    for idx, (inst, (outcome, original, reduced)) in enumerate(zip(instances, rows)):
        good = original == reduced and original in ("yes", "no")
        passes += good
        nt_note = (
            ",".join(map(str, sorted(inst.nonterminals)))
            if isinstance(inst, InstanceNT)
            else "-"
        )
        q_note = "-" if isinstance(inst, InstanceNT) else str(inst.q)
        lines.append(
            f"{idx:4d}  n={inst.graph.n} m={inst.graph.m} p={inst.p} q={q_note}"
            f" k={inst.k} l={inst.ell} nt={nt_note:12s}"
            f" outcome={outcome:22s} original={original:12s}"
            f" kernel={reduced:12s} {'pass' if good else 'FAIL'}"
        )
    lines.append(f"{passes}/{args.count} equivalence passes")
    _emit(args.output, "\n".join(lines) + "\n")
    return 0 if passes == args.count else 1


# ---------------------------------------------------------------------------
# argument plumbing

def _add_instance_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("-i", "--input", required=True, help="instance file")
    sp.add_argument("--problem", choices=["li", "lnt"])
    sp.add_argument("-p", type=int, default=None, help="required leaves per tree")
    sp.add_argument("-q", type=int, default=None, help="required internal vertices (li)")
    sp.add_argument("-k", type=int, default=None, help="pairwise distance floor")
    sp.add_argument("-l", "--ell", type=int, default=None, help="family size")
    sp.add_argument("--nt", default=None, help="comma-separated required-internal vertices (lnt)")
    sp.add_argument("-o", "--output", default=None, help="write output here instead of stdout")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="divtrees",
        description="Kernelization and exact solving for diverse spanning tree families.",
    )
    sub = parser.add_subparsers(dest="cmd", required=True)

    sp = sub.add_parser("kernelize", help="run the reduction pipeline")
    _add_instance_flags(sp)
    sp.add_argument("--witness", action="store_true", help="construct a family on trivial-yes")
    sp.add_argument("--blackbox", choices=["exact", "none"], default="exact")
    sp.add_argument("--budget", type=int, default=200000, help="subroutine kernel tree budget")
    sp.add_argument("--transcript", default=None, help="write the transcript here, one JSON object per line")
    sp.add_argument("--family-out", default=None, help="write the witness family here")

    sp = sub.add_parser("solve", help="exact oracle; exit 0 yes, 1 no, 2 inconclusive")
    _add_instance_flags(sp)
    sp.add_argument("--max-trees", type=int, default=200000)
    sp.add_argument("--max-clique-nodes", type=int, default=5_000_000)

    sp = sub.add_parser("verify", help="check a family file; exit 0 pass, 1 fail")
    _add_instance_flags(sp)
    sp.add_argument("--family", required=True, help="family file to check")

    sp = sub.add_parser("construct", help="build a diverse family; exit 0 pass, 1 fail")
    _add_instance_flags(sp)
    sp.add_argument("--budget", type=int, default=200000, help="seed tree search budget")
    sp.add_argument("--family-out", default=None, help="write the family here")

    sp = sub.add_parser("gen", help="emit a corpus graph")
    sp.add_argument("family")
    sp.add_argument("params", nargs="*")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("-o", "--output", default=None)

    sp = sub.add_parser("audit", help="batch kernelize-vs-oracle safety check")
    sp.add_argument("--problem", choices=["li", "lnt"], required=True)
    sp.add_argument("--count", type=int, default=100)
    sp.add_argument("--max-n", type=int, default=9)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=4)
    sp.add_argument("--budget", type=int, default=200000)
    sp.add_argument("-o", "--output", default=None)

    return parser


_COMMANDS = {
    "kernelize": _cmd_kernelize,
    "solve": _cmd_solve,
    "verify": _cmd_verify,
    "construct": _cmd_construct,
    "gen": _cmd_gen,
    "audit": _cmd_audit,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else EX_USAGE
    try:
        return _COMMANDS[args.cmd](args)
    except (GraphFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_DATA
    except InternalInvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EX_INTERNAL
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EX_USAGE


if __name__ == "__main__":
    sys.exit(main())
