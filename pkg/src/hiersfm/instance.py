"""JSON instance files: schema, parsing to live objects, and emission.

Example::

    {
      "schema": "hiersfm-instance/1",
      "ground_set": 3,
      "function": {"kind": "cut", "directed": false, "edges": [[0, 1, 1], [1, 2, 1]]},
      "constraint": {"kind": "complement_of_rings",
                     "rings": [{"forced_in": [], "allowed": [], "arcs": []}]},
      "k": 1,
      "value_bound": 2
    }

Sets are lists of element indices; labels from ``ground_set`` are accepted too.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from hiersfm.core import MAX_N, GroundSet, SubmodularOracle, full_mask
from hiersfm.families import ConstraintFamily, ExplicitFamily, RingFamily
from hiersfm.functions import CoverageFunction, CutFunction, ModularShift, TableFunction

SCHEMA = "hiersfm-instance/1"
FUNCTION_KINDS = ("cut", "coverage", "table", "modular_shift")
CONSTRAINT_KINDS = ("none", "complement_of_rings", "complement_of_intersecting", "complement_of_crossing", "explicit")


class ParseError(ValueError):
    def __init__(self, msg: str, where: str = ""):
        super().__init__(f"{where}: {msg}" if where else msg)
        self.where = where


@dataclass
class Instance:
    ground: GroundSet
    function: SubmodularOracle
    constraint_kind: str
    constraint: ConstraintFamily
    k: int
    value_bound: int | None
    data: dict
    # the excluded family for intersecting/crossing kinds
    family: ExplicitFamily | None = None
    seed: int | None = None

    @property
    def n(self) -> int:
        return self.ground.n

    def digest(self) -> str:
        return instance_digest(self.data)


def instance_digest(data: dict) -> str:
    blob = json.dumps(data, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _need(d, key, where, types=None):
    if not isinstance(d, dict):
        raise ParseError("expected an object", where)
    if key not in d:
        raise ParseError(f"missing field {key!r}", where)
    val = d[key]
    if types is not None and not isinstance(val, types):
        raise ParseError(f"field {key!r} has the wrong type ({type(val).__name__})", f"{where}.{key}" if where else key)
    return val


def _int(v, where):
    if isinstance(v, bool) or not isinstance(v, int):
        raise ParseError(f"expected an integer, got {v!r}", where)
    return v


def _set(items, ground: GroundSet, where) -> int:
    if not isinstance(items, list):
        raise ParseError("expected a list of elements", where)
    index = {lab: i for i, lab in enumerate(ground.labels)}
    m = 0
    for j, it in enumerate(items):
        if isinstance(it, str):
            if it not in index:
                raise ParseError(f"unknown element label {it!r}", f"{where}[{j}]")
            i = index[it]
        else:
            i = _int(it, f"{where}[{j}]")
            if not 0 <= i < ground.n:
                raise ParseError(f"element index {i} out of range for n={ground.n}", f"{where}[{j}]")
        m |= 1 << i
    return m


def _ground(data) -> GroundSet:
    g = _need(data, "ground_set", "")
    if isinstance(g, bool):
        raise ParseError("ground_set must be an integer or a list of labels", "ground_set")
    if isinstance(g, int):
        if not 1 <= g <= MAX_N:
            raise ParseError(f"ground set size must be in [1, {MAX_N}], got {g}", "ground_set")
        return GroundSet.of_size(g)
    if isinstance(g, list):
        if not 1 <= len(g) <= MAX_N:
            raise ParseError(f"ground set size must be in [1, {MAX_N}], got {len(g)}", "ground_set")
        try:
            return GroundSet(tuple(g))
        except ValueError as exc:
            raise ParseError(str(exc), "ground_set") from None
    raise ParseError("ground_set must be an integer or a list of labels", "ground_set")


def _function(d, ground: GroundSet, where="function") -> SubmodularOracle:
    kind = _need(d, "kind", where, str)
    n = ground.n
    try:
        if kind == "cut":
            edges = _need(d, "edges", where, list)
            rows = []
            for j, e in enumerate(edges):
                w = f"{where}.edges[{j}]"
                if not isinstance(e, list) or len(e) != 3:
                    raise ParseError("edge must be [u, v, weight]", w)
                u, v, wt = (_int(x, w) for x in e)
                if not (0 <= u < n and 0 <= v < n) or u == v:
                    raise ParseError(f"bad endpoints ({u}, {v}) for n={n}", w)
                if wt < 0:
                    raise ParseError(f"negative weight {wt}", w)
                rows.append((u, v, wt))
            return CutFunction(n, rows, directed=bool(d.get("directed", False)))
        if kind == "coverage":
            weights = [_int(x, f"{where}.universe_weights") for x in _need(d, "universe_weights", where, list)]
            incidence = _need(d, "incidence", where, list)
            if len(incidence) != n:
                raise ParseError(f"need {n} incidence lists, got {len(incidence)}", f"{where}.incidence")
            inc = []
            for j, items in enumerate(incidence):
                if not isinstance(items, list):
                    raise ParseError("expected a list", f"{where}.incidence[{j}]")
                inc.append([_int(x, f"{where}.incidence[{j}]") for x in items])
            return CoverageFunction(weights, inc)
        if kind == "table":
            values = [_int(x, f"{where}.values") for x in _need(d, "values", where, list)]
            if len(values) != 1 << n:
                raise ParseError(f"table for n={n} needs {1 << n} values, got {len(values)}", f"{where}.values")
            return TableFunction(n, values)
        if kind == "modular_shift":
            base = _function(_need(d, "base", where, dict), ground, f"{where}.base")
            weights = [_int(x, f"{where}.weights") for x in _need(d, "weights", where, list)]
            if len(weights) != n:
                raise ParseError(f"need {n} weights, got {len(weights)}", f"{where}.weights")
            return ModularShift(base, weights)
    except ParseError:
        raise
    except ValueError as exc:
        raise ParseError(str(exc), where) from None
    raise ParseError(f"unknown function kind {kind!r} (expected one of {', '.join(FUNCTION_KINDS)})", f"{where}.kind")


def _ring(d, ground: GroundSet, where) -> RingFamily:
    forced = _set(d.get("forced_in", []), ground, f"{where}.forced_in")
    allowed_raw = d.get("allowed")
    allowed = full_mask(ground.n) if allowed_raw is None else _set(allowed_raw, ground, f"{where}.allowed")
    if forced & ~allowed:
        raise ParseError("forced_in is not a subset of allowed", where)
    arcs = []
    for j, a in enumerate(d.get("arcs", [])):
        w = f"{where}.arcs[{j}]"
        if not isinstance(a, list) or len(a) != 2:
            raise ParseError("arc must be [u, v]", w)
        u, v = (_set([x], ground, w).bit_length() - 1 for x in a)
        arcs.append((u, v))
    return RingFamily(ground.n, forced, allowed, tuple(arcs))


def _family(items, ground, where) -> ExplicitFamily:
    if not isinstance(items, list):
        raise ParseError("expected a list of sets", where)
    return ExplicitFamily(ground.n, (_set(s, ground, f"{where}[{j}]") for j, s in enumerate(items)))


def build_instance(data: dict) -> Instance:
    """Validate a parsed JSON document and build live objects from it."""
    if not isinstance(data, dict):
        raise ParseError("instance must be a JSON object")
    schema = data.get("schema", SCHEMA)
    if schema != SCHEMA:
        raise ParseError(f"unsupported schema {schema!r}", "schema")
    ground = _ground(data)
    n = ground.n
    f = _function(_need(data, "function", "", dict), ground)
    c = _need(data, "constraint", "", dict)
    kind = _need(c, "kind", "constraint", str)
    family = None
    if kind == "none":
        F, derived_k = ConstraintFamily.unconstrained(n), 0
    elif kind == "complement_of_rings":
        rings = _need(c, "rings", "constraint", list)
        if not rings:
            raise ParseError("need at least one ring", "constraint.rings")
        F = ConstraintFamily.complement_of_rings(
            [_ring(r, ground, f"constraint.rings[{j}]") for j, r in enumerate(rings)])
        derived_k = len(rings)
    elif kind in ("complement_of_intersecting", "complement_of_crossing"):
        family = _family(_need(c, "family", "constraint", list), ground, "constraint.family")
        derived_k = min(2, n)
        G = family
        F = ConstraintFamily(n, lambda x: x not in G, derived_k, kind=kind)
    elif kind == "explicit":
        parts_raw = _need(c, "parts", "constraint", list)
        if not parts_raw:
            raise ParseError("need at least one part", "constraint.parts")
        parts = [_family(p, ground, f"constraint.parts[{j}]") for j, p in enumerate(parts_raw)]
        F = ConstraintFamily.complement_of_parts(parts)
        derived_k = len(parts)
    else:
        raise ParseError(f"unknown constraint kind {kind!r} (expected one of {', '.join(CONSTRAINT_KINDS)})",
                         "constraint.kind")

    k = data.get("k", derived_k)
    k = _int(k, "k")
    if k != derived_k:
        raise ParseError(f"declared k={k} but constraint kind {kind!r} implies k={derived_k}", "k")
    if k > n:
        raise ParseError(f"k={k} exceeds ground set size {n}", "k")
    bound = data.get("value_bound")
    if bound is not None:
        bound = _int(bound, "value_bound")
        if bound < 0:
            raise ParseError("value_bound must be nonnegative", "value_bound")
        if isinstance(f, TableFunction) and f.value_bound > bound:
            raise ParseError(f"table attains |f| = {f.value_bound} above value_bound {bound}", "value_bound")
    seed = data.get("seed")
    return Instance(ground, f, kind, F, k, bound, data, family, seed)


def parse_instance(path) -> Instance:
    """Read and validate an instance file. Raises :class:`ParseError`."""
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", f"line {exc.lineno} column {exc.colno}") from None
    return build_instance(data)


def dumps(data: dict) -> str:
    return json.dumps(data, indent=1, sort_keys=True) + "\n"


def emit_instance(data: dict, path=None) -> str:
    text = dumps(data)
    if path is not None:
        Path(path).write_text(text)
    return text


def set_list(mask: int) -> list[int]:
    return [i for i in range(mask.bit_length()) if mask >> i & 1]
