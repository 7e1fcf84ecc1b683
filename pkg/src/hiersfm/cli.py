"""Command-line front end.

Exit codes: 0 optimal / all checks pass, 1 solver-oracle mismatch,
2 infeasible or exhausted values, 3 parse error or size cap, 4 structural
violation, 5 numerical stall.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

from hiersfm import __version__
from hiersfm.brute import (
    brute_check_lemmas,
    brute_check_theorem1,
    brute_check_theorem2,
    brute_min,
)
from hiersfm.core import GroundSetTooLarge, count_st_pairs, full_mask
from hiersfm.families import (
    ExplicitFamily,
    StructureViolation,
    crossing_partition,
    intersecting_partition,
    validate_crossing,
    validate_intersecting,
    validate_k_hierarchical,
    validate_lattice,
    verify_hierarchy,
)
from hiersfm.functions import check_submodular
from hiersfm.generate import GEN_KINDS, UnsupportedKind, generate
from hiersfm.instance import Instance, ParseError, build_instance, emit_instance, parse_instance
from hiersfm.sfm import NumericalStall, OverflowRisk
from hiersfm.solver import (
    INFEASIBLE,
    OPTIMAL,
    STALL,
    ExhaustedValues,
    SolveReport,
    kth_smallest,
    minimize_over_crossing_complement,
    minimize_over_hierarchical_complement,
    minimize_over_intersecting_complement,
)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_INFEASIBLE = 2
EXIT_PARSE = 3
EXIT_STRUCTURE = 4
EXIT_STALL = 5

VERIFY_MAX_N = 14
STRUCTURE_MAX_N = 10

REPORT_SCHEMA = "hiersfm-report/1"


def solve_instance(inst: Instance, engine: str = "auto", parallel: int = 1, early_exit: bool = False,
                   validate: bool = False) -> SolveReport:
    """Run the solver driver matching the instance's constraint kind."""
    opts = dict(engine=engine, parallel=parallel, early_exit=early_exit, value_bound=inst.value_bound)
    f = inst.function
    if inst.constraint_kind == "complement_of_intersecting":
        return minimize_over_intersecting_complement(f, inst.family, validate=validate, **opts)
    if inst.constraint_kind == "complement_of_crossing":
        return minimize_over_crossing_complement(f, inst.family, validate=validate, **opts)
    return minimize_over_hierarchical_complement(f, inst.constraint, **opts)


def structured_family(inst: Instance):
    """Feasible-family membership and bound to which the structural box checks apply.

    For intersecting/crossing kinds that is the complement of ``G + {empty}``
    (resp. ``G + {empty, V}``), not the complement of ``G`` itself.
    """
    v = full_mask(inst.n)
    if inst.constraint_kind == "complement_of_intersecting":
        G = inst.family
        return (lambda x: x != 0 and x not in G), inst.k
    if inst.constraint_kind == "complement_of_crossing":
        G = inst.family
        return (lambda x: x != 0 and x != v and x not in G), inst.k
    return inst.constraint.member, inst.k


def _envelope(command: str, inst: Instance | None, payload: dict) -> dict:
    out = {"schema": REPORT_SCHEMA, "command": command, "version": __version__}
    if inst is not None:
        out["instance_digest"] = inst.digest()
        out["seed"] = inst.seed
    out.update(payload)
    return out


def _write(doc: dict, out: str | None):
    text = json.dumps(doc, indent=1, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def report_document(inst: Instance, rep: SolveReport, engine: str) -> dict:
    body = rep.to_dict()
    if rep.minimizer is not None:
        body["minimizer_labels"] = inst.ground.names(rep.minimizer)
    return _envelope("solve", inst, {"engine": engine, "report": body})


def read_report(path) -> tuple[dict, SolveReport]:
    doc = json.loads(Path(path).read_text())
    return doc, SolveReport.from_dict(doc["report"])


def _load(path) -> Instance:
    return parse_instance(path)


def cmd_solve(args) -> int:
    inst = _load(args.instance)
    rep = solve_instance(inst, args.engine, args.parallel, args.early_exit)
    _write(report_document(inst, rep, args.engine), args.out)
    return {OPTIMAL: EXIT_OK, INFEASIBLE: EXIT_INFEASIBLE, STALL: EXIT_STALL}[rep.status]


def verify_instance(inst: Instance, engine: str = "auto") -> tuple[int, dict]:
    """Structure checks, solver-vs-brute cross-check, and box/interval checks."""
    if inst.n > VERIFY_MAX_N:
        raise GroundSetTooLarge(f"verify needs n <= {VERIFY_MAX_N}, got {inst.n}")
    checks: dict = {}
    f = inst.function

    checks["submodular"] = bool(check_submodular(f))
    kind = inst.constraint_kind
    if kind == "complement_of_rings":
        checks["rings_are_lattices"] = all(validate_lattice(r.explicit()) for r in inst.constraint.rings)
        checks["hierarchy"] = verify_hierarchy(inst.constraint)
    elif kind == "complement_of_intersecting":
        checks["intersecting"] = validate_intersecting(inst.family)
        checks["hierarchy"] = _witness_ok(inst, intersecting_partition)
    elif kind == "complement_of_crossing":
        checks["crossing"] = validate_crossing(inst.family)
        checks["hierarchy"] = _witness_ok(inst, crossing_partition)
    elif kind == "explicit":
        checks["hierarchy"] = verify_hierarchy(inst.constraint)
    structural_ok = all(v is not False for v in checks.values())
    if not structural_ok:
        return EXIT_STRUCTURE, {"checks": checks}

    rep = solve_instance(inst, engine)
    if rep.status == STALL:
        return EXIT_STALL, {"checks": checks, "report": rep.to_dict()}
    if kind in ("complement_of_intersecting", "complement_of_crossing"):
        G = inst.family
        feasible = lambda x: x not in G  # noqa: E731
    else:
        feasible = inst.constraint.member
    ref = brute_min(f, feasible)
    agree = (rep.status == OPTIMAL) == ref.feasible
    if agree and ref.feasible:
        agree = rep.value == ref.min_value and feasible(rep.minimizer)
    checks["solver_matches_brute"] = agree
    checks["brute_min_value"] = ref.min_value

    if inst.n <= STRUCTURE_MAX_N and inst.k >= 1:
        member, k = structured_family(inst)
        t1 = brute_check_theorem1(f, member, k)
        t2 = brute_check_theorem2(f, member, k)
        lem = brute_check_lemmas(member, inst.n, k)
        checks["box_minimizer"] = t1.ok
        checks["unique_minimal"] = t2.ok
        checks["interval"] = lem.ok
        checks["witnesses"] = {str(x): list(st) for x, st in t2.witnesses.items()}
    else:
        checks["structure_checks"] = "skipped"
    mismatch = not all(checks.get(key, True) for key in ("solver_matches_brute", "box_minimizer", "unique_minimal", "interval"))
    return (EXIT_MISMATCH if mismatch else EXIT_OK), {"checks": checks, "report": rep.to_dict()}


def _witness_ok(inst: Instance, partition) -> bool:
    v = full_mask(inst.n)
    adjoin = [0] if partition is intersecting_partition else [0, v]
    parts = partition(inst.family.union(ExplicitFamily(inst.n, adjoin)))
    return validate_k_hierarchical(parts)


def cmd_verify(args) -> int:
    inst = _load(args.instance)
    code, payload = verify_instance(inst, args.engine)
    payload["exit_code"] = code
    _write(_envelope("verify", inst, payload), args.out)
    return code


def cmd_gen(args) -> int:
    data = generate(args.kind, args.n, args.k, args.seed)
    text = emit_instance(data, args.out)
    if not args.out:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_kth(args) -> int:
    inst = _load(args.instance)
    try:
        res = kth_smallest(inst.function, args.k, engine=args.engine, value_bound=inst.value_bound)
    except ExhaustedValues as exc:
        _write(_envelope("kth", inst, {"status": "ExhaustedValues", "k": args.k, "values": exc.found}), args.out)
        return EXIT_INFEASIBLE
    payload = {
        "status": "Optimal",
        "k": args.k,
        "values": res.values,
        "witnesses": res.witnesses,
        "witness_labels": [inst.ground.names(w) for w in res.witnesses],
    }
    _write(_envelope("kth", inst, payload), args.out)
    return EXIT_OK


def _int_range(text: str) -> list[int]:
    out = []
    for part in str(text).split(","):
        if "-" in part:
            lo, hi = part.split("-")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


BENCH_FIELDS = ["kind", "n", "k", "seed", "candidates", "expected_candidates", "oracle_calls",
                "max_inner_calls", "wall_ms", "status"]


def bench_rows(kind: str, ns, ks, seeds: int, engine: str = "auto"):
    for n in ns:
        for k in ks:
            if k > n:
                continue
            for seed in range(seeds):
                inst = build_instance(generate(kind, n, k, seed))
                t0 = time.perf_counter()
                rep = solve_instance(inst, engine)
                yield {
                    "kind": kind,
                    "n": n,
                    "k": inst.k,
                    "seed": seed,
                    "candidates": rep.candidates_examined,
                    "expected_candidates": count_st_pairs(n, inst.k),
                    "oracle_calls": rep.oracle_calls,
                    "max_inner_calls": rep.max_inner_calls,
                    "wall_ms": round(1000 * (time.perf_counter() - t0), 3),
                    "status": rep.status,
                }


def cmd_bench(args) -> int:
    fh = open(args.csv, "w", newline="") if args.csv else sys.stdout
    try:
        writer = csv.DictWriter(fh, fieldnames=BENCH_FIELDS)
        writer.writeheader()
        for row in bench_rows(args.kind, _int_range(args.n), _int_range(args.k), args.seeds, args.engine):
            writer.writerow(row)
            fh.flush()
    finally:
        if args.csv:
            fh.close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hiersfm", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def engine(sp):
        sp.add_argument("--engine", choices=("auto", "wolfe", "brute"), default="auto")

    sp = sub.add_parser("solve", help="minimize f over the instance's feasible family")
    sp.add_argument("--instance", required=True)
    engine(sp)
    sp.add_argument("--parallel", type=int, default=1)
    sp.add_argument("--early-exit", action="store_true")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("verify", help="cross-check solver, brute force, and declared structure")
    sp.add_argument("--instance", required=True)
    engine(sp)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("gen", help="emit a seeded random instance")
    sp.add_argument("--kind", choices=GEN_KINDS, default="cut+rings")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("kth", help="k smallest distinct values of f")
    sp.add_argument("--instance", required=True)
    sp.add_argument("--k", type=int, required=True)
    engine(sp)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_kth)

    sp = sub.add_parser("bench", help="CSV scaling sweep over generated instances")
    sp.add_argument("--kind", choices=GEN_KINDS, default="cut+rings")
    sp.add_argument("--n", default="6-10", help="sizes, e.g. 6-14 or 6,8,10")
    sp.add_argument("--k", default="1", help="hierarchy bounds, e.g. 1-2")
    sp.add_argument("--seeds", type=int, default=3)
    engine(sp)
    sp.add_argument("--csv")
    sp.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, GroundSetTooLarge, FileNotFoundError, UnsupportedKind, OverflowRisk) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except StructureViolation as exc:
        print(f"structure violation: {exc}", file=sys.stderr)
        return EXIT_STRUCTURE
    except NumericalStall as exc:
        print(f"numerical stall: {exc}", file=sys.stderr)
        return EXIT_STALL


if __name__ == "__main__":
    sys.exit(main())
