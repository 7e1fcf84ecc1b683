"""Seeded random instances, emitted as instance-file dictionaries."""

from __future__ import annotations

import random

from hiersfm.core import full_mask
from hiersfm.families import (
    ExplicitFamily,
    RingFamily,
    lattice_closure,
    level_set_partition,
    validate_crossing,
    validate_intersecting,
)
from hiersfm.functions import CoverageFunction, CutFunction, ModularShift
from hiersfm.instance import SCHEMA, set_list

GEN_KINDS = ("cut+rings", "coverage+rings", "table+intersecting", "table+crossing", "cut+explicit")


class UnsupportedKind(ValueError):
    pass


def random_cut_spec(rng: random.Random, n: int, wmax: int = 10, density: float = 0.4) -> dict:
    directed = rng.random() < 0.5
    edges = []
    for u in range(n):
        for v in range(n):
            if u == v or (not directed and v < u):
                continue
            if rng.random() < density:
                edges.append([u, v, rng.randint(1, wmax)])
    return {"kind": "cut", "directed": directed, "edges": edges}


def random_coverage_spec(rng: random.Random, n: int, wmax: int = 10) -> dict:
    size = rng.randint(max(1, n // 2), 2 * n)
    weights = [rng.randint(0, wmax) for _ in range(size)]
    incidence = [sorted(rng.sample(range(size), rng.randint(0, min(size, 4)))) for _ in range(n)]
    return {"kind": "coverage", "universe_weights": weights, "incidence": incidence}


def shifted(rng: random.Random, base: dict, n: int, lo: int = -10, hi: int = 10) -> dict:
    return {"kind": "modular_shift", "base": base, "weights": [rng.randint(lo, hi) for _ in range(n)]}


def _oracle(spec: dict, n: int):
    kind = spec["kind"]
    if kind == "cut":
        return CutFunction(n, spec["edges"], spec["directed"])
    if kind == "coverage":
        return CoverageFunction(spec["universe_weights"], spec["incidence"])
    if kind == "modular_shift":
        return ModularShift(_oracle(spec["base"], n), spec["weights"])
    raise UnsupportedKind(kind)


def random_table_spec(rng: random.Random, n: int) -> dict:
    """Tabulated sum of a random cut, a random coverage and a modular shift."""
    cut = _oracle(random_cut_spec(rng, n, wmax=5), n)
    cov = _oracle(random_coverage_spec(rng, n, wmax=5), n)
    w = [rng.randint(-8, 8) for _ in range(n)]
    values = []
    for x in range(1 << n):
        values.append(cut(x) + cov(x) + sum(w[i] for i in range(n) if x >> i & 1))
    return {"kind": "table", "values": values}


def random_function_spec(rng: random.Random, n: int, kind: str) -> dict:
    if kind == "cut":
        return shifted(rng, random_cut_spec(rng, n), n)
    if kind == "coverage":
        return shifted(rng, random_coverage_spec(rng, n), n)
    if kind == "table":
        return random_table_spec(rng, n)
    raise UnsupportedKind(kind)


def random_ring(rng: random.Random, n: int) -> RingFamily:
    """Random bounds ``A <= B`` plus a random implication DAG on the elements."""
    order = list(range(n))
    rng.shuffle(order)
    forced = 0
    allowed = full_mask(n)
    for i in range(n):
        r = rng.random()
        if r < 0.15:
            forced |= 1 << i
        elif r < 0.3:
            allowed &= ~(1 << i)
    arcs = []
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < 1.5 / n:
                arcs.append((order[a], order[b]))
    return RingFamily(n, forced, allowed, tuple(arcs))


def ring_spec(r: RingFamily) -> dict:
    return {"forced_in": set_list(r.forced_in), "allowed": set_list(r.allowed), "arcs": [list(a) for a in r.arcs]}


def _blocks(rng: random.Random, n: int) -> list[list[int]]:
    elems = [i for i in range(n) if rng.random() < 0.85] or [rng.randrange(n)]
    rng.shuffle(elems)
    count = rng.randint(1, min(3, len(elems)))
    cuts = sorted(rng.sample(range(1, len(elems)), count - 1)) if count > 1 else []
    out, prev = [], 0
    for c in cuts + [len(elems)]:
        out.append(elems[prev:c])
        prev = c
    return out


def _random_sub(rng: random.Random, block: list[int]) -> int:
    m = 0
    for i in block:
        if rng.random() < 0.5:
            m |= 1 << i
    return m


def random_intersecting(rng: random.Random, n: int) -> ExplicitFamily:
    """Union over disjoint blocks of a lattice closure with the empty set removed.

    Sets from different blocks are disjoint, so the union stays intersecting.
    """
    members: set[int] = set()
    for block in _blocks(rng, n):
        seeds = [_random_sub(rng, block) for _ in range(rng.randint(1, 3))]
        members |= lattice_closure(ExplicitFamily(n, seeds)).members - {0}
    if rng.random() < 0.3:
        members.add(0)
    if rng.random() < 0.3:
        members.add(full_mask(n))
    fam = ExplicitFamily(n, members)
    assert validate_intersecting(fam)
    return fam


def random_crossing(rng: random.Random, n: int) -> ExplicitFamily:
    """An intersecting family or the complements of one (both are crossing)."""
    v = full_mask(n)
    base = random_intersecting(rng, n)
    if rng.random() < 0.5:
        members = {v & ~x for x in base.members}
    else:
        members = set(base.members)
    members.discard(0)
    members.discard(v)
    if rng.random() < 0.4:
        members.add(0)
    if rng.random() < 0.4:
        members.add(v)
    fam = ExplicitFamily(n, members)
    assert validate_crossing(fam)
    return fam


def random_explicit_parts(rng: random.Random, n: int, k: int) -> list[ExplicitFamily]:
    """A k-part hierarchy: value classes of a random submodular table, or a
    union of random ring families split into its standard parts."""
    if rng.random() < 0.5:
        values = random_table_spec(rng, n)["values"]
        parts = level_set_partition(values, k)
        while len(parts) < k:
            parts.append(ExplicitFamily(n))
        return parts
    seen: set[int] = set()
    parts = []
    for _ in range(k):
        lat = set(random_ring(rng, n).members())
        parts.append(ExplicitFamily(n, lat - seen))
        seen |= lat
    return parts


def generate(kind: str, n: int, k: int, seed: int) -> dict:
    """Deterministic instance dictionary for ``kind`` (one of ``GEN_KINDS``)."""
    if kind not in GEN_KINDS:
        raise UnsupportedKind(f"unknown kind {kind!r}; choose from {', '.join(GEN_KINDS)}")
    if not 1 <= n <= 20:
        raise ValueError("generator supports 1 <= n <= 20")
    rng = random.Random(f"{kind}:{n}:{k}:{seed}")
    fkind, ckind = kind.split("+")
    fspec = random_function_spec(rng, n, fkind)
    if k == 0:
        constraint = {"kind": "none"}
    elif ckind == "rings":
        constraint = {"kind": "complement_of_rings", "rings": [ring_spec(random_ring(rng, n)) for _ in range(k)]}
    elif ckind == "intersecting":
        constraint = {"kind": "complement_of_intersecting",
                      "family": [set_list(x) for x in random_intersecting(rng, n).sorted()]}
    elif ckind == "crossing":
        constraint = {"kind": "complement_of_crossing",
                      "family": [set_list(x) for x in random_crossing(rng, n).sorted()]}
    else:
        constraint = {"kind": "explicit",
                      "parts": [[set_list(x) for x in p.sorted()] for p in random_explicit_parts(rng, n, k)]}
    if ckind in ("intersecting", "crossing") and k:
        k = min(2, n)
    data = {
        "schema": SCHEMA,
        "ground_set": n,
        "function": fspec,
        "constraint": constraint,
        "k": k,
        "seed": seed,
        "kind": kind,
    }
    data["value_bound"] = _oracle_bound(fspec, n)
    return data


def _oracle_bound(spec: dict, n: int) -> int:
    if spec["kind"] == "table":
        return max(abs(v) for v in spec["values"])
    return _oracle(spec, n).value_bound
