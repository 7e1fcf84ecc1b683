import csv
import json
import random

import pytest

from hiersfm.brute import brute_min
from hiersfm.cli import main, read_report, solve_instance, verify_instance
from hiersfm.core import count_st_pairs
from hiersfm.functions import CutFunction, TableFunction
from hiersfm.generate import GEN_KINDS, UnsupportedKind, generate
from hiersfm.instance import ParseError, build_instance, dumps, emit_instance, parse_instance

EDGE = {"kind": "cut", "directed": False, "edges": [[0, 1, 1]]}
TRIANGLE = {"kind": "cut", "directed": False, "edges": [[0, 1, 1], [1, 2, 1], [0, 2, 1]]}


def doc(n, function, constraint, k, **extra):
    d = {"schema": "hiersfm-instance/1", "ground_set": n, "function": function, "constraint": constraint, "k": k}
    d.update(extra)
    return d


def write(tmp_path, data, name="inst.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data) if isinstance(data, dict) else data)
    return str(p)


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip().startswith("{") else out)


# parsing

def test_minimal_instance():
    inst = build_instance(doc(2, EDGE, {"kind": "none"}, 0))
    assert isinstance(inst.function, CutFunction)
    assert [inst.function(x) for x in range(4)] == [0, 1, 1, 0]
    assert inst.k == 0 and inst.constraint.hierarchy_bound == 0


def test_two_rings():
    rings = [{"forced_in": [0]}, {"allowed": [1, 2], "arcs": [[1, 2]]}]
    inst = build_instance(doc(3, TRIANGLE, {"kind": "complement_of_rings", "rings": rings}, 2))
    assert inst.constraint.hierarchy_bound == 2
    assert not inst.constraint.member(0b001)
    assert not inst.constraint.member(0b110)
    assert inst.constraint.member(0b010)


def test_table_instance():
    inst = build_instance(doc(3, {"kind": "table", "values": list(range(8))}, {"kind": "none"}, 0))
    assert isinstance(inst.function, TableFunction)


def test_labels():
    inst = build_instance(doc(["a", "b", "c"], TRIANGLE,
                              {"kind": "complement_of_rings", "rings": [{"forced_in": ["b"]}]}, 1))
    assert not inst.constraint.member(0b010)
    assert inst.ground.names(0b101) == ["a", "c"]


@pytest.mark.parametrize("data, fragment", [
    (doc(65, EDGE, {"kind": "none"}, 0), "ground set size"),
    (doc(2, {"kind": "cut", "edges": [[0, 2, 1]]}, {"kind": "none"}, 0), "edges[0]"),
    (doc(2, {"kind": "cut", "edges": [[0, 0, 1]]}, {"kind": "none"}, 0), "bad endpoints"),
    (doc(2, {"kind": "cut", "edges": [[0, 1]]}, {"kind": "none"}, 0), "edge must be"),
    (doc(2, {"kind": "cut", "edges": [[0, 1, -1]]}, {"kind": "none"}, 0), "negative weight"),
    (doc(2, EDGE, {"kind": "complement_of_rings", "rings": [{"forced_in": [0], "allowed": [1]}]}, 1), "forced_in"),
    (doc(2, EDGE, {"kind": "complement_of_rings", "rings": [{}]}, 2), "declared k=2"),
    (doc(2, EDGE, {"kind": "none"}, 1), "declared k=1"),
    (doc(2, {"kind": "table", "values": [0, 1]}, {"kind": "none"}, 0), "needs 4 values"),
    (doc(2, {"kind": "wavelet"}, {"kind": "none"}, 0), "unknown function kind"),
    (doc(2, EDGE, {"kind": "mystery"}, 0), "unknown constraint kind"),
    (doc(2, {"kind": "table", "values": [0, 9, 0, 0]}, {"kind": "none"}, 0, value_bound=3), "value_bound"),
])
def test_parse_errors(data, fragment):
    with pytest.raises(ParseError) as exc:
        build_instance(data)
    assert fragment in str(exc.value)


def test_bad_json_location(tmp_path):
    p = write(tmp_path, '{"ground_set": 2,\n  "function": }')
    with pytest.raises(ParseError) as exc:
        parse_instance(p)
    assert "line 2" in str(exc.value)


def test_parse_error_exit_code(tmp_path, capsys):
    p = write(tmp_path, doc(65, EDGE, {"kind": "none"}, 0))
    assert main(["solve", "--instance", p]) == 3
    assert main(["solve", "--instance", str(tmp_path / "missing.json")]) == 3


def test_roundtrip_random_instances(tmp_path):
    for seed in range(25):
        kind = GEN_KINDS[seed % len(GEN_KINDS)]
        n = 1 + seed % 6
        data = generate(kind, n, seed % 3, seed)
        p = tmp_path / "i.json"
        emit_instance(data, p)
        a, b = build_instance(data), parse_instance(p)
        assert a.k == b.k and a.constraint_kind == b.constraint_kind and a.digest() == b.digest()
        for x in range(1 << n):
            assert a.function(x) == b.function(x)
            assert a.constraint.member(x) == b.constraint.member(x)
        assert dumps(json.loads(p.read_text())) == p.read_text()


# gen

def test_gen_deterministic(tmp_path, capsys):
    outs = []
    for name in ("a.json", "b.json"):
        assert main(["gen", "--kind", "cut+rings", "--n", "8", "--k", "2", "--seed", "1",
                     "--out", str(tmp_path / name)]) == 0
        outs.append((tmp_path / name).read_bytes())
    assert outs[0] == outs[1]
    assert main(["gen", "--n", "8", "--k", "2", "--seed", "2"]) == 0
    assert capsys.readouterr().out.encode() != outs[0]


def test_gen_k0_is_unconstrained():
    for kind in GEN_KINDS:
        assert generate(kind, 5, 0, 3)["constraint"] == {"kind": "none"}


def test_gen_unsupported_kind():
    with pytest.raises(UnsupportedKind):
        generate("cut+triangles", 4, 1, 0)


def test_gen_then_verify(tmp_path, capsys):
    p = str(tmp_path / "g.json")
    assert main(["gen", "--kind", "cut+rings", "--n", "8", "--k", "2", "--seed", "1", "--out", p]) == 0
    code, rep = run(["verify", "--instance", p], capsys)
    assert code == 0 and rep["exit_code"] == 0
    checks = rep["checks"]
    assert checks["solver_matches_brute"] and checks["box_minimizer"] and checks["unique_minimal"] and checks["interval"]


def test_generated_instances_verify():
    # every generator kind, n up to 12, 100 seeds each
    for kind in GEN_KINDS:
        for seed in range(100):
            rng = random.Random(seed)
            n = rng.choice([1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12] if seed % 10 == 0 else [2, 3, 4, 5, 6, 7])
            k = 0 if seed % 17 == 0 else rng.randint(1, min(2, n))
            code, payload = verify_instance(build_instance(generate(kind, n, k, seed)))
            assert code == 0, (kind, n, k, seed, payload["checks"])


# verify negatives

def test_verify_rejects_fake_intersecting(tmp_path, capsys):
    fam = [[0, 1], [1, 2]]  # meet at {1}, but the union {0,1,2} is missing
    p = write(tmp_path, doc(3, TRIANGLE, {"kind": "complement_of_intersecting", "family": fam}, 2))
    code, rep = run(["verify", "--instance", p], capsys)
    assert code == 4 and rep["checks"]["intersecting"] is False


def test_verify_rejects_fake_crossing(tmp_path, capsys):
    # {0,1} and {1,2} cross on n=4 ({0,1,2} != V) yet neither union nor meet is present
    p = write(tmp_path, doc(4, TRIANGLE, {"kind": "complement_of_crossing", "family": [[0, 1], [1, 2]]}, 2))
    code, rep = run(["verify", "--instance", p], capsys)
    assert code == 4 and rep["checks"]["crossing"] is False


def test_verify_rejects_bad_explicit(tmp_path, capsys):
    parts = [[[0], [1]]]  # not a lattice
    p = write(tmp_path, doc(2, EDGE, {"kind": "explicit", "parts": parts}, 1))
    code, _ = run(["verify", "--instance", p], capsys)
    assert code == 4


def test_verify_cap(tmp_path, capsys):
    p = write(tmp_path, doc(16, {"kind": "cut", "edges": [[0, 1, 1]]}, {"kind": "none"}, 0))
    assert main(["verify", "--instance", p]) == 3


def test_verify_non_submodular(tmp_path, capsys):
    # a non-submodular table is a structural violation, not a silent pass
    p = write(tmp_path, doc(2, {"kind": "table", "values": [0, 0, 0, 5]}, {"kind": "none"}, 0))
    code, rep = run(["verify", "--instance", p], capsys)
    assert code == 4 and rep["checks"]["submodular"] is False


# solve

def test_solve_triangle_without_empty(tmp_path, capsys):
    p = write(tmp_path, doc(3, TRIANGLE, {"kind": "complement_of_rings",
                                          "rings": [{"forced_in": [], "allowed": [], "arcs": []}]}, 1))
    out = str(tmp_path / "r.json")
    assert main(["solve", "--instance", p, "--out", out]) == 0
    d, rep = read_report(out)
    assert (rep.minimizer, rep.value) == (0b111, 0)
    assert d["schema"] == "hiersfm-report/1" and d["instance_digest"] == parse_instance(p).digest()
    assert d["report"]["minimizer_labels"] == ["0", "1", "2"]
    assert rep.candidates_examined == count_st_pairs(3, 1)


def test_solve_unconstrained(tmp_path, capsys):
    p = write(tmp_path, doc(2, EDGE, {"kind": "none"}, 0))
    code, d = run(["solve", "--instance", p], capsys)
    assert code == 0 and d["report"]["value"] == 0 and d["report"]["candidates_examined"] == 1


def test_solve_infeasible(tmp_path, capsys):
    # a ring with no bounds and no arcs is every subset; its complement is empty
    p = write(tmp_path, doc(3, TRIANGLE, {"kind": "complement_of_rings", "rings": [{}]}, 1))
    code, d = run(["solve", "--instance", p], capsys)
    assert code == 2 and d["report"]["status"] == "Infeasible"


def test_solve_flags_and_engines(tmp_path, capsys):
    p = str(tmp_path / "g.json")
    emit_instance(generate("coverage+rings", 6, 2, 4), p)
    inst = parse_instance(p)
    ref = brute_min(inst.function, inst.constraint.member)
    for argv in (["--engine", "wolfe"], ["--engine", "brute"], ["--parallel", "2"], ["--early-exit"]):
        code, d = run(["solve", "--instance", p] + argv, capsys)
        assert code == {True: 0, False: 2}[ref.feasible]
        assert d["report"]["value"] == ref.min_value


def test_exit_code_matches_status():
    for seed in range(40):
        kind = GEN_KINDS[seed % len(GEN_KINDS)]
        inst = build_instance(generate(kind, 2 + seed % 5, 1 + seed % 2, seed))
        rep = solve_instance(inst)
        if rep.status == "Optimal":
            feasible = (lambda x: x not in inst.family) if inst.family is not None else inst.constraint.member
            assert feasible(rep.minimizer)
        else:
            assert rep.status == "Infeasible" and rep.minimizer is None


# kth

def test_kth_examples(tmp_path, capsys):
    card = doc(3, {"kind": "table", "values": [bin(x).count("1") for x in range(8)]}, {"kind": "none"}, 0)
    code, d = run(["kth", "--instance", write(tmp_path, card), "--k", "2"], capsys)
    assert code == 0 and d["values"] == [0, 1] and d["witnesses"][0] == 0
    code, d = run(["kth", "--instance", write(tmp_path, doc(2, EDGE, {"kind": "none"}, 0)), "--k", "2"], capsys)
    assert code == 0 and d["values"] == [0, 1]
    flat = doc(2, {"kind": "table", "values": [3, 3, 3, 3]}, {"kind": "none"}, 0)
    code, d = run(["kth", "--instance", write(tmp_path, flat), "--k", "2"], capsys)
    assert code == 2 and d["status"] == "ExhaustedValues" and d["values"] == [3]


# bench

def test_bench_k1(tmp_path):
    out = tmp_path / "b.csv"
    assert main(["bench", "--n", "6-8", "--k", "1", "--seeds", "2", "--csv", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 3 * 2
    assert list(rows[0]) == ["kind", "n", "k", "seed", "candidates", "expected_candidates", "oracle_calls",
                             "max_inner_calls", "wall_ms", "status"]
    for r in rows:
        n = int(r["n"])
        assert int(r["candidates"]) == 1 + n + n + n * (n - 1)


def test_bench_k0(tmp_path, capsys):
    assert main(["bench", "--n", "3,5", "--k", "0", "--seeds", "2"]) == 0
    rows = list(csv.DictReader(capsys.readouterr().out.splitlines()))
    assert len(rows) == 4 and {r["candidates"] for r in rows} == {"1"}


def test_bench_k_ratio(tmp_path, capsys):
    assert main(["bench", "--n", "7", "--k", "1-2", "--seeds", "1"]) == 0
    rows = list(csv.DictReader(capsys.readouterr().out.splitlines()))
    c = {int(r["k"]): int(r["candidates"]) for r in rows}
    assert c[2] / c[1] == count_st_pairs(7, 2) / count_st_pairs(7, 1)


def test_bench_intersecting_clamps_k(capsys):
    assert main(["bench", "--kind", "table+intersecting", "--n", "5", "--k", "1", "--seeds", "1"]) == 0
    rows = list(csv.DictReader(capsys.readouterr().out.splitlines()))
    assert rows[0]["k"] == "2" and int(rows[0]["candidates"]) == count_st_pairs(5, 2)


def test_version(capsys):
    with pytest.raises(SystemExit):
        main(["--version"])
    assert "hiersfm" in capsys.readouterr().out
