"""Set families: ring families (lattices), explicit families, structural
validators, and the feasible-family wrapper the solver consumes.

Exhaustive validators work on explicit families and use a numpy level array
indexed by mask, so they are limited to small ground sets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from hiersfm.core import GroundSetTooLarge, full_mask, is_subset

EXHAUSTIVE_MAX_N = 16


class OverlappingParts(ValueError):
    """A claimed k-hierarchical partition has a set in two parts."""


class StructureViolation(ValueError):
    """An explicit family does not have the structure it was declared with."""


def _check_n(n: int, limit: int = EXHAUSTIVE_MAX_N):
    if n > limit:
        raise GroundSetTooLarge(f"exhaustive family check needs n <= {limit}, got {n}")


@dataclass(frozen=True)
class RingFamily:
    """Lattice ``{X : A <= X <= B, u in X implies v in X for each arc (u, v)}``."""

    n: int
    forced_in: int = 0
    allowed: int | None = None
    arcs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        allowed = full_mask(self.n) if self.allowed is None else self.allowed
        object.__setattr__(self, "allowed", allowed)
        object.__setattr__(self, "arcs", tuple((int(u), int(v)) for u, v in self.arcs))
        if not is_subset(self.forced_in, allowed):
            raise ValueError("forced_in must be a subset of allowed")
        if not is_subset(allowed, full_mask(self.n)):
            raise ValueError("allowed has bits outside the ground set")
        for u, v in self.arcs:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"arc ({u}, {v}) out of range for n={self.n}")

    def member(self, x: int) -> bool:
        if x & self.forced_in != self.forced_in or x & ~self.allowed:
            return False
        for u, v in self.arcs:
            if x >> u & 1 and not x >> v & 1:
                return False
        return True

    __contains__ = member

    def members(self) -> list[int]:
        _check_n(self.n, 20)
        return [x for x in range(1 << self.n) if self.member(x)]

    def explicit(self) -> "ExplicitFamily":
        return ExplicitFamily(self.n, self.members())


def ring_membership(ring: RingFamily, x: int) -> bool:
    return ring.member(x)


@dataclass(frozen=True)
class ExplicitFamily:
    n: int
    members: frozenset = field(default_factory=frozenset)

    def __init__(self, n: int, members: Iterable[int] = ()):
        object.__setattr__(self, "n", n)
        ms = frozenset(int(m) for m in members)
        bad = [m for m in ms if not 0 <= m <= full_mask(n)]
        if bad:
            raise ValueError(f"masks {bad[:3]} outside a ground set of size {n}")
        object.__setattr__(self, "members", ms)

    def member(self, x: int) -> bool:
        return x in self.members

    __contains__ = member

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(sorted(self.members))

    def sorted(self) -> list[int]:
        return sorted(self.members)

    def complement(self) -> "ExplicitFamily":
        _check_n(self.n, 20)
        return ExplicitFamily(self.n, (x for x in range(1 << self.n) if x not in self.members))

    def union(self, other: "ExplicitFamily") -> "ExplicitFamily":
        return ExplicitFamily(self.n, self.members | other.members)

    def minus(self, other: Iterable[int]) -> "ExplicitFamily":
        return ExplicitFamily(self.n, self.members - frozenset(other))

    def indicator(self) -> np.ndarray:
        ind = np.zeros(1 << self.n, dtype=bool)
        if self.members:
            ind[np.fromiter(self.members, dtype=np.int64)] = True
        return ind


def _pairs_ok(members: np.ndarray, ok: Callable[[np.ndarray, np.ndarray, int], np.ndarray]) -> bool:
    # row-by-row over the upper triangle; ok(x, ys, ...) is vectorized over ys
    for i, x in enumerate(members):
        ys = members[i:]
        if not ok(int(x), ys).all():
            return False
    return True


def validate_lattice(F: ExplicitFamily) -> bool:
    """Closed under pairwise union and intersection."""
    _check_n(F.n)
    ind = F.indicator()
    mem = np.array(F.sorted(), dtype=np.int64)
    return _pairs_ok(mem, lambda x, ys: ind[x | ys] & ind[x & ys])


def validate_intersecting(F: ExplicitFamily) -> bool:
    """Pairs with a common element keep their union and intersection in F."""
    _check_n(F.n)
    ind = F.indicator()
    mem = np.array(F.sorted(), dtype=np.int64)
    return _pairs_ok(mem, lambda x, ys: ((x & ys) == 0) | (ind[x | ys] & ind[x & ys]))


def validate_crossing(F: ExplicitFamily) -> bool:
    """As intersecting, but pairs whose union is all of V are exempt."""
    _check_n(F.n)
    ind = F.indicator()
    v = full_mask(F.n)
    mem = np.array(F.sorted(), dtype=np.int64)
    return _pairs_ok(mem, lambda x, ys: ((x & ys) == 0) | ((x | ys) == v) | (ind[x | ys] & ind[x & ys]))


def validate_parity(F: ExplicitFamily) -> bool:
    """For non-members X, Y: ``X | Y in F`` iff ``X & Y in F``."""
    _check_n(F.n)
    ind = F.indicator()
    outside = np.flatnonzero(~ind).astype(np.int64)
    return _pairs_ok(outside, lambda x, ys: ind[x | ys] == ind[x & ys])


def hierarchy_levels(parts: Sequence[ExplicitFamily]) -> np.ndarray:
    """Array over all masks: 1-based index of the part holding the mask, 0 if none."""
    if not parts:
        raise ValueError("need at least one part")
    n = parts[0].n
    _check_n(n)
    level = np.zeros(1 << n, dtype=np.int64)
    for i, part in enumerate(parts, start=1):
        if part.n != n:
            raise ValueError("parts live on different ground sets")
        idx = np.fromiter(part.members, dtype=np.int64, count=len(part.members))
        if idx.size and np.any(level[idx]):
            raise OverlappingParts(f"part {i} shares sets with an earlier part")
        level[idx] = i
    return level


def validate_k_hierarchical(parts: Sequence[ExplicitFamily]) -> bool:
    """The first part is a lattice, and each pair inside part ``i >= 2`` either
    stays in part ``i`` under union and intersection or drops one of them
    into a lower part.
    """
    level = hierarchy_levels(parts)
    for i, part in enumerate(parts, start=1):
        mem = np.array(part.sorted(), dtype=np.int64)

        def ok(x, ys, i=i):
            lu, lc = level[x | ys], level[x & ys]
            both = (lu == i) & (lc == i)
            if i == 1:
                return both
            lower = ((lu >= 1) & (lu < i)) | ((lc >= 1) & (lc < i))
            return both | lower

        if not _pairs_ok(mem, ok):
            return False
    return True


def lattice_closure(seed: ExplicitFamily) -> ExplicitFamily:
    """Smallest union/intersection-closed family containing ``seed``."""
    _check_n(seed.n, 12)
    fam = set(seed.members)
    frontier = list(fam)
    while frontier:
        new = set()
        current = list(fam)
        for x in frontier:
            for y in current:
                for z in (x | y, x & y):
                    if z not in fam and z not in new:
                        new.add(z)
        fam |= new
        frontier = list(new)
    return ExplicitFamily(seed.n, fam)


# witness partitions for the standard constructions


def union_of_lattices_partition(lattices: Sequence[ExplicitFamily]) -> list[ExplicitFamily]:
    """``F_i = L_i - (L_1 | ... | L_{i-1})``; empty parts are kept."""
    seen: set[int] = set()
    parts = []
    for lat in lattices:
        parts.append(ExplicitFamily(lat.n, lat.members - seen))
        seen |= lat.members
    return parts


def intersecting_partition(G: ExplicitFamily) -> list[ExplicitFamily]:
    """Parts ``[{empty}, G - {empty}]`` of ``G + {empty}``."""
    return [ExplicitFamily(G.n, [0]), G.minus([0])]


def crossing_partition(G: ExplicitFamily) -> list[ExplicitFamily]:
    """Parts ``[{empty, V}, G - {empty, V}]`` of ``G + {empty, V}``."""
    v = full_mask(G.n)
    return [ExplicitFamily(G.n, [0, v]), G.minus([0, v])]


def level_set_partition(values: Sequence[int], k: int) -> list[ExplicitFamily]:
    """Sets attaining each of the ``k`` smallest distinct values of a table."""
    n = (len(values) - 1).bit_length()
    distinct = sorted(set(values))[:k]
    return [ExplicitFamily(n, (x for x, fx in enumerate(values) if fx == d)) for d in distinct]


class ConstraintFamily:
    """Feasible family ``F`` (membership oracle) whose complement is claimed to
    be a ``hierarchy_bound``-hierarchical lattice.

    The solver trusts the bound. ``witness_partition``, when available, lets
    :func:`verify_hierarchy` check the claim exhaustively.
    """

    def __init__(
        self,
        n: int,
        member: Callable[[int], bool],
        hierarchy_bound: int,
        witness: Callable[[], list[ExplicitFamily]] | list[ExplicitFamily] | None = None,
        kind: str = "oracle",
    ):
        if hierarchy_bound < 0:
            raise ValueError("hierarchy bound must be nonnegative")
        self.n = n
        self._member = member
        self.hierarchy_bound = hierarchy_bound
        self._witness = witness
        self.kind = kind

    def member(self, x: int) -> bool:
        return bool(self._member(x))

    __contains__ = member

    @property
    def witness_partition(self) -> list[ExplicitFamily] | None:
        w = self._witness
        if callable(w):
            w = w()
        return w

    def __repr__(self):
        return f"ConstraintFamily(kind={self.kind!r}, n={self.n}, k={self.hierarchy_bound})"

    @classmethod
    def unconstrained(cls, n: int) -> "ConstraintFamily":
        return cls(n, lambda x: True, 0, witness=[], kind="none")

    @classmethod
    def infeasible(cls, n: int) -> "ConstraintFamily":
        """Empty family: the complement of the lattice of all subsets."""
        return cls(
            n,
            lambda x: False,
            1,
            witness=lambda: [ExplicitFamily(n, range(1 << n))],
            kind="empty",
        )

    @classmethod
    def complement_of_rings(cls, rings: Sequence[RingFamily]) -> "ConstraintFamily":
        """Intersection of the complements of the given lattices."""
        rings = list(rings)
        if not rings:
            raise ValueError("need at least one ring family")
        n = rings[0].n
        if any(r.n != n for r in rings):
            raise ValueError("ring families live on different ground sets")

        def member(x):
            return not any(r.member(x) for r in rings)

        fam = cls(n, member, len(rings), witness=lambda: union_of_lattices_partition([r.explicit() for r in rings]),
                  kind="complement_of_rings")
        fam.rings = rings
        return fam

    @classmethod
    def complement_of_parts(cls, parts: Sequence[ExplicitFamily]) -> "ConstraintFamily":
        """Complement of the union of explicitly listed hierarchy parts."""
        parts = list(parts)
        if not parts:
            raise ValueError("need at least one part")
        n = parts[0].n
        excluded = frozenset().union(*(p.members for p in parts))
        return cls(n, lambda x: x not in excluded, len(parts), witness=parts, kind="explicit")

    @classmethod
    def from_oracle(cls, n: int, member: Callable[[int], bool], k: int) -> "ConstraintFamily":
        return cls(n, member, k, kind="oracle")


def complement_of_union_membership(rings: Sequence[RingFamily], x: int) -> bool:
    return not any(r.member(x) for r in rings)


def verify_hierarchy(F: ConstraintFamily) -> bool | None:
    """Exhaustively check the declared structure; ``None`` when no witness exists.

    Checks that the witness partition is k-hierarchical and that it covers
    exactly the complement of ``F``.
    """
    parts = F.witness_partition
    if parts is None:
        return None
    _check_n(F.n, 14)
    if len(parts) > F.hierarchy_bound:
        return False
    excluded = set()
    for p in parts:
        excluded |= p.members
    for x in range(1 << F.n):
        if F.member(x) == (x in excluded):
            return False
    if not parts:
        return True
    return validate_k_hierarchical(parts)
