"""Minimization over complements of k-hierarchical lattices.

For every pair of disjoint sets ``S, T`` with ``|S|, |T| <= k`` the minimal
minimizer of ``f`` on the box ``{X : S <= X <= V - T}`` is computed; the best
box minimizer that lies in the feasible family is optimal over that family.
"""

from __future__ import annotations

import multiprocessing as mp
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

from hiersfm.core import SubmodularOracle, count_st_pairs, enumerate_st_pairs, full_mask
from hiersfm.families import (
    ConstraintFamily,
    ExplicitFamily,
    StructureViolation,
    crossing_partition,
    intersecting_partition,
    validate_crossing,
    validate_intersecting,
)
from hiersfm.sfm import NumericalStall, min_over_box

OPTIMAL = "Optimal"
INFEASIBLE = "Infeasible"
STALL = "NumericalStall"


class InvalidBound(ValueError):
    pass


class ExhaustedValues(LookupError):
    """Fewer distinct function values exist than were requested."""

    def __init__(self, requested: int, found: list[int]):
        super().__init__(f"only {len(found)} distinct values, asked for {requested}")
        self.requested = requested
        self.found = found


@dataclass
class Candidate:
    S: int
    T: int
    X: int
    value: int
    feasible: bool
    rank: int = 0


@dataclass
class SolveReport:
    status: str
    minimizer: int | None
    value: int | None
    candidates_examined: int
    feasible_candidates: int
    oracle_calls: int
    wall_time: float
    n: int = 0
    k: int = 0
    max_inner_calls: int = 0
    early_exit: bool = False
    message: str = ""
    candidates: list[Candidate] | None = field(default=None, repr=False)

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("candidates")
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SolveReport":
        keys = cls.__dataclass_fields__.keys() - {"candidates"}
        return cls(**{k: d[k] for k in keys if k in d})


def _solve_pairs(f, member, pairs, n_full, engine, value_bound, start_rank, stop_value=None):
    out = []
    max_calls = 0
    for rank, (S, T) in enumerate(pairs, start=start_rank):
        box = min_over_box(f, S, T, n_full, engine=engine, value_bound=value_bound)
        max_calls = max(max_calls, box.oracle_calls)
        cand = Candidate(S, T, box.minimizer, box.value, member(box.minimizer), rank)
        out.append(cand)
        if stop_value is not None and cand.feasible and cand.value == stop_value:
            break
    return out, max_calls


_WORK = None


def _worker(chunk):
    f, member, n_full, engine, value_bound = _WORK
    before = f.calls
    try:
        cands, max_calls = _solve_pairs(f, member, chunk[1], n_full, engine, value_bound, chunk[0])
    except NumericalStall as exc:
        return None, str(exc), f.calls - before, 0
    return cands, "", f.calls - before, max_calls


def _solve_parallel(f, member, pairs, n_full, engine, value_bound, workers):
    global _WORK
    size = max(1, -(-len(pairs) // (4 * workers)))
    chunks = [(i, pairs[i:i + size]) for i in range(0, len(pairs), size)]
    _WORK = (f, member, n_full, engine, value_bound)
    try:
        with mp.get_context("fork").Pool(workers) as pool:
            results = pool.map(_worker, chunks)
    finally:
        _WORK = None
    cands, calls, max_calls = [], 0, 0
    for part, err, c, m in results:
        calls += c
        max_calls = max(max_calls, m)
        if part is None:
            raise NumericalStall(err)
        cands.extend(part)
    # the parent never evaluated anything; credit worker calls to it
    f.calls += calls
    return cands, max_calls


def minimize_over_hierarchical_complement(
    f: SubmodularOracle,
    F: ConstraintFamily,
    engine: str = "auto",
    parallel: int = 1,
    early_exit: bool = False,
    value_bound: int | None = None,
    keep_candidates: bool = False,
) -> SolveReport:
    """Minimize ``f`` over ``F``, whose complement is a ``F.hierarchy_bound``-hierarchical lattice.

    Every candidate is checked for membership, so a wrong bound degrades to a
    feasible but possibly suboptimal answer rather than an infeasible one.
    Ties go to the first candidate in enumeration order.
    """
    n, k = f.n, F.hierarchy_bound
    if F.n != n:
        raise ValueError(f"family lives on n={F.n}, function on n={n}")
    if k > n:
        raise InvalidBound(f"hierarchy bound {k} exceeds ground set size {n}")
    t0 = time.perf_counter()
    calls0 = f.calls
    pairs = list(enumerate_st_pairs(n, k))
    try:
        if parallel > 1 and len(pairs) > 1 and not early_exit and "fork" in mp.get_all_start_methods():
            cands, max_calls = _solve_parallel(f, F.member, pairs, n, engine, value_bound, parallel)
        else:
            stop = None
            if early_exit:
                first = min_over_box(f, 0, 0, n, engine=engine, value_bound=value_bound)
                stop = first.value
            cands, max_calls = _solve_pairs(f, F.member, pairs, n, engine, value_bound, 0, stop)
    except NumericalStall as exc:
        return SolveReport(STALL, None, None, 0, 0, f.calls - calls0, time.perf_counter() - t0,
                           n=n, k=k, message=str(exc))

    feasible = [c for c in cands if c.feasible]
    best = min(feasible, key=lambda c: (c.value, c.rank)) if feasible else None
    report = SolveReport(
        status=OPTIMAL if best else INFEASIBLE,
        minimizer=best.X if best else None,
        value=best.value if best else None,
        candidates_examined=len(cands),
        feasible_candidates=len(feasible),
        oracle_calls=f.calls - calls0,
        wall_time=time.perf_counter() - t0,
        n=n,
        k=k,
        max_inner_calls=max_calls,
        early_exit=len(cands) < len(pairs),
        candidates=cands if keep_candidates else None,
    )
    return report


def expected_candidates(n: int, k: int) -> int:
    return count_st_pairs(n, k)


def _as_member(G) -> Callable[[int], bool]:
    if isinstance(G, ExplicitFamily):
        return G.member
    return G


def _with_fallbacks(f, report: SolveReport, extra: list[int]) -> SolveReport:
    """Compare the solver's answer against sets that were excluded only to
    obtain the hierarchical structure."""
    for x in extra:
        fx = f(x)
        report.oracle_calls += 1
        if report.status == INFEASIBLE or (report.status == OPTIMAL and fx < report.value):
            report.status = OPTIMAL
            report.minimizer = x
            report.value = fx
    return report


def minimize_over_intersecting_complement(
    f: SubmodularOracle,
    G,
    validate: bool = True,
    **options,
) -> SolveReport:
    """Minimize ``f`` over ``2^V - G`` for an intersecting family ``G``.

    ``G`` is an :class:`ExplicitFamily` (validated when ``n <= 14``) or a
    membership callable trusted to be intersecting.
    """
    n = f.n
    member = _as_member(G)
    witness = None
    if isinstance(G, ExplicitFamily):
        if validate and n <= 14 and not validate_intersecting(G):
            raise StructureViolation("family is not intersecting")
        witness = intersecting_partition(G.union(ExplicitFamily(n, [0])))
    F = ConstraintFamily(n, lambda x: x != 0 and not member(x), min(2, n), witness=witness,
                         kind="complement_of_intersecting")
    report = minimize_over_hierarchical_complement(f, F, **options)
    return _with_fallbacks(f, report, [] if member(0) else [0])


def minimize_over_crossing_complement(
    f: SubmodularOracle,
    G,
    validate: bool = True,
    **options,
) -> SolveReport:
    """Minimize ``f`` over ``2^V - G`` for a crossing family ``G``."""
    n = f.n
    v = full_mask(n)
    member = _as_member(G)
    witness = None
    if isinstance(G, ExplicitFamily):
        if validate and n <= 14 and not validate_crossing(G):
            raise StructureViolation("family is not crossing")
        witness = crossing_partition(G.union(ExplicitFamily(n, [0, v])))
    F = ConstraintFamily(n, lambda x: x != 0 and x != v and not member(x), min(2, n), witness=witness,
                         kind="complement_of_crossing")
    report = minimize_over_hierarchical_complement(f, F, **options)
    extra = [x for x in (0, v) if not member(x)]
    return _with_fallbacks(f, report, list(dict.fromkeys(extra)))


@dataclass
class KthSmallestResult:
    values: list[int]
    witnesses: list[int]
    reports: list[SolveReport] = field(default_factory=list, repr=False)


def kth_smallest(f: SubmodularOracle, k: int, engine: str = "auto", **options) -> KthSmallestResult:
    """The ``k`` smallest distinct values of ``f`` with a set attaining each.

    Step ``i`` minimizes over ``{X : f(X) > v_(i-1)}``, whose complement is the
    union of the first ``i - 1`` value classes, an ``(i - 1)``-hierarchical
    lattice. Raises :class:`ExhaustedValues` when ``f`` has fewer than ``k``
    distinct values.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    n = f.n
    first = min_over_box(f, 0, 0, n, engine=engine, value_bound=options.get("value_bound"))
    values, witnesses, reports = [first.value], [first.minimizer], []
    for i in range(2, k + 1):
        threshold = values[-1]
        # a bound of n already enumerates every set as its own box
        F = ConstraintFamily(n, lambda x, t=threshold: f(x) > t, min(i - 1, n), kind="kth")
        rep = minimize_over_hierarchical_complement(f, F, engine=engine, **options)
        reports.append(rep)
        if rep.status == STALL:
            raise NumericalStall(rep.message)
        if rep.status == INFEASIBLE:
            raise ExhaustedValues(k, values)
        values.append(rep.value)
        witnesses.append(rep.minimizer)
    return KthSmallestResult(values, witnesses, reports)
