"""Integer-valued submodular test functions and an exhaustive submodularity check."""

from __future__ import annotations

from dataclasses import dataclass

from hiersfm.core import GroundSetTooLarge, SubmodularOracle, elements, full_mask


class CutFunction(SubmodularOracle):
    """Cut function of a graph with nonnegative integer edge weights.

    Directed: total weight of arcs leaving ``X``. Undirected: total weight of
    edges with exactly one endpoint in ``X``.
    """

    def __init__(self, n: int, edges, directed: bool = False):
        super().__init__(n)
        self.directed = bool(directed)
        self.edges = []
        for e in edges:
            u, v, w = (int(x) for x in e)
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if w < 0:
                raise ValueError(f"negative weight {w} on edge ({u}, {v})")
            self.edges.append((u, v, w))
        self.value_bound = sum(w for _, _, w in self.edges)

    def _value(self, mask: int) -> int:
        total = 0
        if self.directed:
            for u, v, w in self.edges:
                if mask >> u & 1 and not mask >> v & 1:
                    total += w
        else:
            for u, v, w in self.edges:
                if (mask >> u ^ mask >> v) & 1:
                    total += w
        return total

    def __repr__(self):
        return f"CutFunction(n={self.n}, directed={self.directed}, m={len(self.edges)})"


def cut_value(graph: CutFunction, mask: int) -> int:
    return graph._value(mask)


class CoverageFunction(SubmodularOracle):
    """Weighted coverage: total weight of universe items covered by ``X``."""

    def __init__(self, universe_weights, incidence):
        super().__init__(len(incidence))
        self.universe_weights = [int(w) for w in universe_weights]
        if any(w < 0 for w in self.universe_weights):
            raise ValueError("universe weights must be nonnegative")
        size = len(self.universe_weights)
        self.incidence = []
        self._cover = []
        for i, items in enumerate(incidence):
            items = sorted({int(j) for j in items})
            if any(not 0 <= j < size for j in items):
                raise ValueError(f"incidence of element {i} indexes outside the universe")
            self.incidence.append(items)
            m = 0
            for j in items:
                m |= 1 << j
            self._cover.append(m)
        self.value_bound = sum(self.universe_weights)

    def _value(self, mask: int) -> int:
        covered = 0
        for i in elements(mask):
            covered |= self._cover[i]
        return sum(self.universe_weights[j] for j in elements(covered))

    def __repr__(self):
        return f"CoverageFunction(n={self.n}, universe={len(self.universe_weights)})"


def coverage_value(system: CoverageFunction, mask: int) -> int:
    return system._value(mask)


class TableFunction(SubmodularOracle):
    """Set function given by an explicit table of ``2**n`` values indexed by mask."""

    MAX_N = 20

    def __init__(self, n: int, values):
        if n > self.MAX_N:
            raise GroundSetTooLarge(f"table functions support n <= {self.MAX_N}, got {n}")
        super().__init__(n)
        self.values = [int(v) for v in values]
        if len(self.values) != 1 << n:
            raise ValueError(f"table for n={n} needs {1 << n} values, got {len(self.values)}")
        self.value_bound = max(abs(v) for v in self.values)

    def _value(self, mask: int) -> int:
        if not 0 <= mask < len(self.values):
            raise IndexError(f"mask {mask} out of range for n={self.n}")
        return self.values[mask]

    @classmethod
    def from_oracle(cls, f: SubmodularOracle) -> "TableFunction":
        return cls(f.n, [f(x) for x in range(1 << f.n)])

    def __repr__(self):
        return f"TableFunction(n={self.n})"


def table_value(table: TableFunction, mask: int) -> int:
    return table._value(mask)


class ModularShift(SubmodularOracle):
    """``base(X) + sum of weights[v] for v in X``; submodular whenever ``base`` is."""

    def __init__(self, base: SubmodularOracle, weights):
        super().__init__(base.n)
        self.base = base
        self.weights = [int(w) for w in weights]
        if len(self.weights) != base.n:
            raise ValueError(f"need {base.n} weights, got {len(self.weights)}")
        if base.value_bound is not None:
            self.value_bound = base.value_bound + sum(abs(w) for w in self.weights)

    def _value(self, mask: int) -> int:
        return self.base.evaluate(mask) + sum(self.weights[i] for i in elements(mask))

    def __repr__(self):
        return f"ModularShift({self.base!r})"


class ModularFunction(SubmodularOracle):
    """``f(X) = offset + sum of weights[v] for v in X``."""

    def __init__(self, weights, offset: int = 0):
        super().__init__(len(weights))
        self.weights = [int(w) for w in weights]
        self.offset = int(offset)
        self.value_bound = abs(self.offset) + sum(abs(w) for w in self.weights)

    def _value(self, mask: int) -> int:
        return self.offset + sum(self.weights[i] for i in elements(mask))


def constant(n: int, value: int = 0) -> ModularFunction:
    return ModularFunction([0] * n, offset=value)


@dataclass
class SubmodularityCheck:
    ok: bool
    witness: tuple[int, int, int] | None = None  # (X, u, v)

    def __bool__(self):
        return self.ok


def check_submodular(f: SubmodularOracle, max_n: int = 16) -> SubmodularityCheck:
    """Exhaustive local test ``f(X+u) + f(X+v) >= f(X+u+v) + f(X)``.

    Equivalent to the global submodular inequality. Evaluates the full table
    once; the witness is the first violation in (X ascending, u, v) order.
    """
    n = f.n
    if n > max_n:
        raise GroundSetTooLarge(f"exhaustive submodularity check needs n <= {max_n}, got {n}")
    vals = [f(x) for x in range(1 << n)]
    for x in range(1 << n):
        fx = vals[x]
        outside = [i for i in range(n) if not x >> i & 1]
        for a, u in enumerate(outside):
            xu = x | 1 << u
            for v in outside[a + 1:]:
                xv = x | 1 << v
                if vals[xu] + vals[xv] < vals[xu | xv] + fx:
                    return SubmodularityCheck(False, (x, u, v))
    return SubmodularityCheck(True)


def is_symmetric(f: SubmodularOracle) -> bool:
    v = full_mask(f.n)
    return all(f(x) == f(v & ~x) for x in range(1 << f.n))
