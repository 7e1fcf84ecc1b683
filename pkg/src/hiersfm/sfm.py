"""Unconstrained and box-constrained submodular minimization.

The engine is the Fujishige-Wolfe minimum-norm-point method over the base
polytope of ``f - f(empty)``. Floating point lives only inside the Wolfe
iteration: termination is certified with integer oracle values, using that
``f(empty) + sum(min(x_v, 0))`` is a lower bound on ``min f`` for every point
``x`` of that base polytope. For an integer-valued ``f`` a gap below 1 proves
optimality.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from hiersfm.core import SubmodularOracle, full_mask, popcount

OVERFLOW_LIMIT = 1 << 62


class NumericalStall(RuntimeError):
    """The Wolfe iteration ran out of major cycles before certifying optimality."""


class OverflowRisk(ValueError):
    """The tie-break transform could exceed the 64-bit value range."""


class OverlappingST(ValueError):
    pass


@dataclass
class BaseVertex:
    coordinates: np.ndarray
    generating_order: list[int]


@dataclass
class SfmResult:
    minimizer: int
    value: int
    certificate_gap: float
    oracle_calls: int
    major_cycles: int = 0
    point: np.ndarray | None = field(default=None, repr=False)


def _greedy(f: SubmodularOracle, order, empty_value: int):
    """Greedy vertex plus the prefix masks/values it evaluated on the way."""
    n = f.n
    x = np.empty(n)
    prev = empty_value
    mask = 0
    masks = [0]
    vals = [empty_value]
    for v in order:
        mask |= 1 << int(v)
        cur = f(mask)
        x[v] = cur - prev
        prev = cur
        masks.append(mask)
        vals.append(cur)
    return x, masks, vals


def greedy_vertex(f: SubmodularOracle, order) -> BaseVertex:
    """Edmonds greedy: ``x[order[i]] = f(first i+1) - f(first i)``."""
    order = [int(v) for v in order]
    if sorted(order) != list(range(f.n)):
        raise ValueError("order must be a permutation of the ground set")
    x, _, _ = _greedy(f, order, f(0))
    return BaseVertex(x, order)


def _affine_minimizer(P: np.ndarray, tol: float):
    """Coefficients ``mu`` (summing to 1) of the min-norm point of aff(rows of P)."""
    m = P.shape[0]
    G = P @ P.T
    M = np.empty((m + 1, m + 1))
    M[0, 0] = 0.0
    M[0, 1:] = 1.0
    M[1:, 0] = 1.0
    M[1:, 1:] = G
    rhs = np.zeros(m + 1)
    rhs[0] = 1.0
    scale = max(1.0, float(np.abs(G).max()))
    try:
        sol = np.linalg.solve(M, rhs)
        if not np.all(np.isfinite(sol)) or np.abs(M @ sol - rhs).max() > tol * scale * m:
            raise np.linalg.LinAlgError
    except np.linalg.LinAlgError:
        sol = np.linalg.lstsq(M, rhs, rcond=tol)[0]
    mu = sol[1:]
    mu = mu / mu.sum()
    return mu, mu @ P


def min_norm_sfm(
    f: SubmodularOracle,
    max_major: int | None = None,
    degeneracy_tol: float = 1e-10,
    drop_tol: float = 1e-12,
    callback=None,
) -> SfmResult:
    """Minimize an integer-valued submodular ``f`` over all subsets.

    Returns a certified global minimizer. The minimizer is the best level set
    seen (first found wins on ties), not necessarily the minimal one.
    Raises :class:`NumericalStall` after ``max_major`` major cycles
    (default ``10 * n**3``) without a certificate.

    ``callback(major, x, lower_bound, best_value)`` is called once per major
    cycle, before the optimality test.
    """
    n = f.n
    start = f.calls
    empty_value = f(0)
    if n == 0:
        return SfmResult(0, empty_value, 0.0, f.calls - start)
    if max_major is None:
        max_major = max(10 * n ** 3, 10)

    best_set, best_val = 0, empty_value

    def absorb(masks, vals):
        nonlocal best_set, best_val
        for m, v in zip(masks, vals):
            if v < best_val:
                best_set, best_val = m, v

    q, masks, vals = _greedy(f, range(n), empty_value)
    absorb(masks, vals)
    P = q[None, :]
    lam = np.ones(1)
    x = q.copy()

    def certificate():
        # Slack absorbs float error in x; the bound is exact for exact arithmetic.
        lb = empty_value + float(np.minimum(x, 0.0).sum())
        slack = 1e-9 * (1.0 + float(np.abs(P).max()) * n)
        return best_val - lb, slack

    for major in range(1, max_major + 1):
        gap, slack = certificate()
        if callback is not None:
            callback(major, x.copy(), best_val - gap, best_val)
        if gap < 1.0 - slack:
            return SfmResult(best_set, best_val, gap, f.calls - start, major - 1, x)

        order = np.argsort(x, kind="stable")
        q, masks, vals = _greedy(f, order, empty_value)
        absorb(masks, vals)

        xx = float(x @ x)
        norm_scale = max(float(q @ q), float((P * P).sum(axis=1).max()))
        if float(x @ q) >= xx - 1e-12 * norm_scale or np.any(np.all(np.abs(P - q) < 1e-10, axis=1)):
            # x is (numerically) the min-norm point
            gap, slack = certificate()
            if gap < 1.0 - slack:
                return SfmResult(best_set, best_val, gap, f.calls - start, major, x)
            raise NumericalStall(f"min-norm point reached with certificate gap {gap:.3g} >= 1")

        P = np.vstack([P, q])
        lam = np.append(lam, 0.0)
        while True:
            mu, y = _affine_minimizer(P, degeneracy_tol)
            if np.all(mu > drop_tol):
                lam = mu
                break
            neg = mu <= drop_tol
            denom = lam[neg] - mu[neg]
            ok = denom > 0
            theta = float(np.min(lam[neg][ok] / denom[ok])) if np.any(ok) else 0.0
            theta = min(max(theta, 0.0), 1.0)
            lam = theta * mu + (1.0 - theta) * lam
            keep = lam > drop_tol
            if keep.all():
                # theta hit no vertex exactly; drop the smallest coefficient
                keep[int(np.argmin(lam))] = False
            P = P[keep]
            lam = lam[keep]
            lam = lam / lam.sum()
            if P.shape[0] == 1:
                break
        keep = lam > drop_tol
        P, lam = P[keep], lam[keep]
        lam = np.maximum(lam, 0.0)
        lam = lam / lam.sum()
        x = lam @ P

    gap, slack = certificate()
    if gap < 1.0 - slack:
        return SfmResult(best_set, best_val, gap, f.calls - start, max_major, x)
    raise NumericalStall(f"no certificate after {max_major} major cycles (gap {gap:.3g})")


class ContractedOracle(SubmodularOracle):
    """``f'(X) = f(X | S)`` on the ground set ``V - (S | T)``.

    Local bit ``i`` stands for the ``i``-th free element of the original
    ground set, in ascending order.
    """

    def __init__(self, base: SubmodularOracle, S: int, T: int):
        if S & T:
            raise OverlappingST(f"S and T overlap: {S & T:#x}")
        free = [i for i in range(base.n) if not (S | T) >> i & 1]
        super().__init__(len(free))
        self.base = base
        self.S = S
        self.T = T
        self.free = free
        self.value_bound = base.value_bound
        # byte-wise lookup tables for local -> global mask expansion
        self._chunks = []
        for lo in range(0, len(free), 8):
            bits = free[lo:lo + 8]
            table = [0] * (1 << len(bits))
            for b in range(1, len(table)):
                low = b & -b
                table[b] = table[b ^ low] | 1 << bits[low.bit_length() - 1]
            self._chunks.append(table)

    def expand(self, local: int) -> int:
        out = self.S
        for table in self._chunks:
            out |= table[local & 0xFF]
            local >>= 8
        return out

    def _value(self, mask: int) -> int:
        return self.base.evaluate(self.expand(mask))


def restrict_contract(f: SubmodularOracle, S: int, T: int) -> ContractedOracle:
    """Oracle for ``f`` on the box ``{X : S <= X <= V - T}``, reindexed to the free elements."""
    return ContractedOracle(f, S, T)


class TieBreakOracle(SubmodularOracle):
    """``g(X) = (n_full + 1) * f(X) + |X|``.

    Over any lattice the unique minimizer of ``g`` is the minimal minimizer
    of ``f``, since ``|X| <= n_full`` can never outweigh a unit step in ``f``.
    """

    def __init__(self, base: SubmodularOracle, n_full: int, value_bound: int | None = None):
        super().__init__(base.n)
        if n_full < base.n:
            raise ValueError("n_full must be at least the size of the oracle's ground set")
        bound = value_bound if value_bound is not None else base.value_bound
        if bound is not None and (n_full + 1) * bound + n_full >= OVERFLOW_LIMIT:
            raise OverflowRisk(f"(n+1)*M + n >= 2^62 for n={n_full}, M={bound}")
        self.base = base
        self.factor = n_full + 1
        if bound is not None:
            self.value_bound = self.factor * bound + n_full

    def _value(self, mask: int) -> int:
        return self.factor * self.base.evaluate(mask) + popcount(mask)

    def base_value(self, mask: int, g_value: int) -> int:
        return (g_value - popcount(mask)) // self.factor


def tie_break(f: SubmodularOracle, n_full: int, value_bound: int | None = None) -> TieBreakOracle:
    return TieBreakOracle(f, n_full, value_bound)


@dataclass
class BoxResult:
    minimizer: int
    value: int
    oracle_calls: int
    engine: str


def _brute_box(g: SubmodularOracle) -> tuple[int, int]:
    best, best_val = 0, g(0)
    for x in range(1, 1 << g.n):
        v = g(x)
        if v < best_val:
            best, best_val = x, v
    return best, best_val


BRUTE_FALLBACK_N = 24


def min_over_box(
    f: SubmodularOracle,
    S: int,
    T: int,
    n_full: int | None = None,
    engine: str = "auto",
    value_bound: int | None = None,
    **wolfe_options,
) -> BoxResult:
    """Minimal minimizer of ``f`` over ``{X : S <= X <= V - T}``.

    The box is contracted to its free elements and minimized under the
    tie-break transform, whose minimizer is unique. ``engine`` is ``"wolfe"``,
    ``"brute"``, or ``"auto"`` (Wolfe, falling back to enumeration on a
    stall when the box has at most 24 free elements).
    """
    if n_full is None:
        n_full = f.n
    if engine not in ("auto", "wolfe", "brute"):
        raise ValueError(f"unknown engine {engine!r}")
    start = f.calls
    h = restrict_contract(f, S, T)
    g = tie_break(h, n_full, value_bound)
    used = engine
    if engine == "brute":
        local, g_val = _brute_box(g)
    else:
        try:
            res = min_norm_sfm(g, **wolfe_options)
            local, g_val = res.minimizer, res.value
            used = "wolfe"
        except NumericalStall:
            if engine == "wolfe" or g.n > BRUTE_FALLBACK_N:
                raise
            local, g_val = _brute_box(g)
            used = "brute"
    return BoxResult(h.expand(local), g.base_value(local, g_val), f.calls - start, used)


def unconstrained_minimal_minimizer(f: SubmodularOracle, engine: str = "auto", value_bound: int | None = None) -> BoxResult:
    return min_over_box(f, 0, 0, f.n, engine=engine, value_bound=value_bound)


__all__ = [
    "BaseVertex",
    "BoxResult",
    "ContractedOracle",
    "NumericalStall",
    "OverflowRisk",
    "OverlappingST",
    "SfmResult",
    "TieBreakOracle",
    "full_mask",
    "greedy_vertex",
    "min_norm_sfm",
    "min_over_box",
    "restrict_contract",
    "tie_break",
]
