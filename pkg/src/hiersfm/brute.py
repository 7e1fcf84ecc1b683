"""Exhaustive reference computations.

Nothing here reuses the solver or the Wolfe engine: every quantity is obtained
by scanning all ``2**n`` subsets, so agreement with the solver is evidence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable

import numpy as np

from hiersfm.core import GroundSetTooLarge

HARD_CAP = 24
STRUCTURE_CAP = 10


def _cap(n: int, limit: int):
    if n > limit:
        raise GroundSetTooLarge(f"brute force limited to n <= {limit}, got {n}")


def value_table(f, n: int | None = None) -> np.ndarray:
    n = f.n if n is None else n
    _cap(n, HARD_CAP)
    return np.fromiter((f(x) for x in range(1 << n)), dtype=np.int64, count=1 << n)


def member_table(member: Callable[[int], bool], n: int) -> np.ndarray:
    _cap(n, HARD_CAP)
    return np.fromiter((bool(member(x)) for x in range(1 << n)), dtype=bool, count=1 << n)


def _minimal(masks: np.ndarray) -> list[int]:
    ms = [int(m) for m in masks]
    return [x for x in ms if not any(y != x and y & x == y for y in ms)]


@dataclass
class BruteReport:
    min_value: int | None
    all_minimizers: list[int] = field(default_factory=list)
    minimal_minimizers: list[int] = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return bool(self.all_minimizers)


def _report(values: np.ndarray, feasible: np.ndarray) -> BruteReport:
    if not feasible.any():
        return BruteReport(None)
    m = int(values[feasible].min())
    argmins = np.flatnonzero(feasible & (values == m))
    return BruteReport(m, [int(x) for x in argmins], _minimal(argmins))


def brute_min(f, member: Callable[[int], bool] | None = None, n: int | None = None) -> BruteReport:
    """Minimum of ``f`` over ``{X : member(X)}`` with all (and all minimal) minimizers."""
    n = f.n if n is None else n
    _cap(n, HARD_CAP)
    values = value_table(f, n)
    feasible = np.ones(1 << n, dtype=bool) if member is None else member_table(member, n)
    return _report(values, feasible)


def box_mask(n: int, S: int, T: int) -> np.ndarray:
    xs = np.arange(1 << n, dtype=np.int64)
    return ((xs & S) == S) & ((xs & T) == 0)


def box_report(values: np.ndarray, n: int, S: int, T: int) -> BruteReport:
    return _report(values, box_mask(n, S, T))


def _small_subsets(pool: list[int], k: int):
    for size in range(k + 1):
        for combo in combinations(pool, size):
            m = 0
            for i in combo:
                m |= 1 << i
            yield m


def _bits(x: int, n: int) -> list[int]:
    return [i for i in range(n) if x >> i & 1]


def _witness_pairs(x: int, n: int, k: int):
    inside = _bits(x, n)
    outside = [i for i in range(n) if not x >> i & 1]
    for S in _small_subsets(inside, k):
        for T in _small_subsets(outside, k):
            yield S, T


@dataclass
class StructureCheck:
    ok: bool
    witnesses: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def brute_check_theorem1(f, member: Callable[[int], bool], k: int, n: int | None = None) -> StructureCheck:
    """Every minimizer ``X*`` over the family minimizes ``f`` over some box
    ``[S, V - T]`` with ``S <= X*``, ``T`` disjoint from ``X*``, ``|S|, |T| <= k``."""
    n = f.n if n is None else n
    _cap(n, STRUCTURE_CAP)
    values = value_table(f, n)
    rep = _report(values, member_table(member, n))
    out = StructureCheck(True)
    xs = np.arange(1 << n, dtype=np.int64)
    for x in rep.all_minimizers:
        for S, T in _witness_pairs(x, n, k):
            inbox = ((xs & S) == S) & ((xs & T) == 0)
            if values[inbox].min() == values[x]:
                out.witnesses[x] = (S, T)
                break
        else:
            out.ok = False
            out.failures.append(x)
    return out


def brute_check_theorem2(f, member: Callable[[int], bool], k: int, n: int | None = None) -> StructureCheck:
    """Every minimal minimizer ``X*`` over the family is the unique minimal
    minimizer of ``f`` over some box ``[S, V - T]`` with the same size bounds."""
    n = f.n if n is None else n
    _cap(n, STRUCTURE_CAP)
    values = value_table(f, n)
    rep = _report(values, member_table(member, n))
    out = StructureCheck(True)
    xs = np.arange(1 << n, dtype=np.int64)
    for x in rep.minimal_minimizers:
        for S, T in _witness_pairs(x, n, k):
            inbox = ((xs & S) == S) & ((xs & T) == 0)
            m = values[inbox].min()
            if m != values[x]:
                continue
            argmins = xs[inbox & (values == m)]
            # x is a box minimizer; it is the unique minimal one iff all others contain it
            if np.all((argmins & x) == x):
                out.witnesses[x] = (S, T)
                break
        else:
            out.ok = False
            out.failures.append(x)
    return out


def brute_check_lemmas(member: Callable[[int], bool], n: int, k: int) -> StructureCheck:
    """For each feasible ``X``: some ``S <= X`` with ``|S| <= k`` has the whole
    interval ``[S, X]`` feasible, and some ``T`` outside ``X`` with ``|T| <= k``
    has ``[X, V - T]`` feasible."""
    _cap(n, STRUCTURE_CAP)
    feas = member_table(member, n)
    xs = np.arange(1 << n, dtype=np.int64)
    infeasible = xs[~feas]
    out = StructureCheck(True)
    full = (1 << n) - 1
    for x in xs[feas]:
        x = int(x)
        below = infeasible[(infeasible & ~x) == 0]  # infeasible subsets of x
        above = infeasible[(infeasible & x) == x]  # infeasible supersets of x
        s_found = next((S for S in _small_subsets(_bits(x, n), k)
                        if not np.any((below & S) == S)), None)
        t_found = next((T for T in _small_subsets(_bits(full & ~x, n), k)
                        if not np.any((above & T) == 0)), None)
        if s_found is None or t_found is None:
            out.ok = False
            out.failures.append(x)
        else:
            out.witnesses[x] = (s_found, t_found)
    return out


class ExhaustedValues(LookupError):
    pass


def brute_kth_distinct(f, k: int, n: int | None = None) -> tuple[list[int], list[int]]:
    """First ``k`` distinct values of ``f`` in ascending order, each with its
    numerically smallest witness mask."""
    n = f.n if n is None else n
    _cap(n, 20)
    values = value_table(f, n)
    distinct = np.unique(values)
    if len(distinct) < k:
        raise ExhaustedValues(f"only {len(distinct)} distinct values, asked for {k}")
    vals = [int(v) for v in distinct[:k]]
    wits = [int(np.flatnonzero(values == v)[0]) for v in vals]
    return vals, wits


def brute_tie_break_argmin(values: np.ndarray, n: int, S: int, T: int) -> list[int]:
    """All minimizers of ``(n + 1) * f(X) + |X|`` over the box ``[S, V - T]``."""
    xs = np.arange(1 << n, dtype=np.int64)
    sizes = np.array([bin(int(x)).count("1") for x in xs], dtype=np.int64)
    g = (n + 1) * values + sizes
    inbox = box_mask(n, S, T)
    m = g[inbox].min()
    return [int(x) for x in xs[inbox & (g == m)]]
