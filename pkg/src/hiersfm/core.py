"""Ground sets, subset bitmasks and the evaluation-oracle interface.

Subsets of a ground set ``V = {0, ..., n-1}`` are plain Python ints used as
bitmasks: bit ``i`` set means element ``i`` belongs to the subset.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Callable, Iterator, Sequence

MAX_N = 64


class GroundSetTooLarge(ValueError):
    """Raised when an exhaustive routine is asked for more elements than it supports."""


def full_mask(n: int) -> int:
    return (1 << n) - 1


def popcount(mask: int) -> int:
    return mask.bit_count()


def elements(mask: int) -> list[int]:
    """Indices of the set bits of ``mask`` in ascending order."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def mask_of(items) -> int:
    m = 0
    for i in items:
        m |= 1 << i
    return m


def is_subset(x: int, y: int) -> bool:
    return x & ~y == 0


def set_algebra(x: int, y: int, n: int) -> dict:
    """Union, intersection, difference, complement (within V) and cardinality."""
    v = full_mask(n)
    return {
        "union": x | y,
        "intersection": x & y,
        "difference": x & ~y,
        "complement": v & ~x,
        "is_subset": is_subset(x, y),
        "cardinality": popcount(x),
    }


def submasks(mask: int) -> Iterator[int]:
    """All submasks of ``mask``, ascending."""
    sub = 0
    while True:
        yield sub
        if sub == mask:
            return
        sub = (sub - mask) & mask


@dataclass(frozen=True)
class GroundSet:
    labels: tuple[str, ...]

    def __post_init__(self):
        labels = tuple(str(x) for x in self.labels)
        object.__setattr__(self, "labels", labels)
        if not 1 <= len(labels) <= MAX_N:
            raise ValueError(f"ground set must have between 1 and {MAX_N} elements, got {len(labels)}")
        if len(set(labels)) != len(labels):
            raise ValueError("ground set labels must be distinct")

    @classmethod
    def of_size(cls, n: int) -> "GroundSet":
        return cls(tuple(str(i) for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def full(self) -> int:
        return full_mask(self.n)

    def mask(self, names: Sequence[str]) -> int:
        index = {lab: i for i, lab in enumerate(self.labels)}
        return mask_of(index[str(x)] for x in names)

    def names(self, mask: int) -> list[str]:
        return [self.labels[i] for i in elements(mask)]

    def contains(self, mask: int) -> bool:
        return 0 <= mask <= self.full


def enumerate_subsets(n: int) -> Iterator[int]:
    """Every subset of an ``n``-element ground set, in ascending numeric order.

    Exhaustive callers should keep ``n`` at 24 or below.
    """
    return iter(range(1 << n))


def _masks_of_size(pool: list[int], size: int) -> list[int]:
    return sorted(mask_of(c) for c in combinations(pool, size))


def enumerate_st_pairs(n: int, k: int) -> Iterator[tuple[int, int]]:
    """Ordered pairs ``(S, T)`` of disjoint subsets with ``|S|, |T| <= k``.

    Order: ascending ``|S|``, then ``S``, then ``|T|``, then ``T``. Downstream
    tie-breaking ("first wins") depends on this order being fixed.
    """
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    ground = list(range(n))
    for s_size in range(k + 1):
        for s in _masks_of_size(ground, s_size):
            rest = [i for i in ground if not s >> i & 1]
            for t_size in range(k + 1):
                for t in _masks_of_size(rest, t_size):
                    yield s, t


def count_st_pairs(n: int, k: int) -> int:
    return sum(comb(n, s) * comb(n - s, t) for s in range(k + 1) for t in range(k + 1))


class SubmodularOracle:
    """Evaluation oracle for an integer-valued set function on ``n`` elements.

    Subclasses implement ``_value``; callers go through :meth:`evaluate` (or
    call the object), which counts evaluations in ``calls``. ``value_bound``
    is an upper bound on ``max |f|`` when known.
    """

    n: int
    value_bound: int | None = None

    def __init__(self, n: int):
        if not 0 <= n <= MAX_N:
            raise ValueError(f"ground set size must be in [0, {MAX_N}], got {n}")
        self.n = n
        self.calls = 0

    def _value(self, mask: int) -> int:
        raise NotImplementedError

    def evaluate(self, mask: int) -> int:
        self.calls += 1
        return self._value(mask)

    __call__ = evaluate

    def reset_calls(self) -> None:
        self.calls = 0

    @classmethod
    def from_callable(cls, n: int, fn: Callable[[int], int], value_bound: int | None = None) -> "CallableOracle":
        return CallableOracle(n, fn, value_bound)


class CallableOracle(SubmodularOracle):
    def __init__(self, n: int, fn: Callable[[int], int], value_bound: int | None = None):
        super().__init__(n)
        self.fn = fn
        self.value_bound = value_bound

    def _value(self, mask: int) -> int:
        return int(self.fn(mask))
