import random

import pytest

from hiersfm.brute import (
    ExhaustedValues,
    brute_check_lemmas,
    brute_check_theorem1,
    brute_check_theorem2,
    brute_kth_distinct,
    brute_min,
)
from hiersfm.core import GroundSetTooLarge
from hiersfm.families import ConstraintFamily, ExplicitFamily, validate_k_hierarchical
from hiersfm.functions import ModularFunction, TableFunction, check_submodular, constant
from hiersfm.generate import random_ring

from conftest import random_function


def test_brute_triangle_nonempty(triangle):
    rep = brute_min(triangle, lambda x: x != 0)
    assert rep.min_value == 0
    assert rep.all_minimizers == [0b111]


def test_brute_infeasible(triangle):
    rep = brute_min(triangle, lambda x: False)
    assert rep.min_value is None and rep.all_minimizers == [] and not rep.feasible


def test_brute_constant():
    rep = brute_min(constant(3))
    assert rep.min_value == 0
    assert rep.minimal_minimizers == [0]
    assert len(rep.all_minimizers) == 8


def test_brute_cap():
    with pytest.raises(GroundSetTooLarge):
        brute_min(constant(25))
    with pytest.raises(GroundSetTooLarge):
        brute_check_theorem1(constant(11), lambda x: True, 1)


def test_minimizers_form_lattice():
    for seed in range(40):
        n = 1 + seed % 8
        f = random_function(seed, n)
        mins = set(brute_min(f).all_minimizers)
        assert all((x | y) in mins and (x & y) in mins for x in mins for y in mins)


def test_box_checks_single_ring():
    for seed in range(30):
        rng = random.Random(seed)
        n = rng.randint(1, 8)
        f = random_function(seed, n)
        F = ConstraintFamily.complement_of_rings([random_ring(rng, n)])
        assert brute_check_theorem1(f, F.member, 1)
        assert brute_check_theorem2(f, F.member, 1)
        assert brute_check_lemmas(F.member, n, 1)


def test_box_checks_vacuous_at_k_equals_n():
    for seed in range(10):
        n = 1 + seed % 5
        f = random_function(seed, n)
        rng = random.Random(seed)
        bad = set(rng.sample(range(1 << n), rng.randint(0, (1 << n) - 1)))
        assert brute_check_theorem1(f, lambda x: x not in bad, n)
        assert brute_check_theorem2(f, lambda x: x not in bad, n)


def test_interval_check_all_subsets():
    res = brute_check_lemmas(lambda x: True, 5, 0)
    assert res.ok and set(res.witnesses.values()) == {(0, 0)}


def test_interval_check_two_rings():
    for seed in range(100):
        rng = random.Random(seed)
        n = rng.randint(1, 7)
        F = ConstraintFamily.complement_of_rings([random_ring(rng, n) for _ in range(2)])
        assert brute_check_lemmas(F.member, n, 2), seed


def test_negative_control_non_hierarchical():
    # excluded family {{0},{1}} on n=2 is not 1-hierarchical (not a lattice)
    excluded = ExplicitFamily(2, [0b01, 0b10])
    assert not validate_k_hierarchical([excluded])
    # X = {0,1} is feasible; every interval [S, X] with |S| <= 1 hits {0} or {1}
    assert not brute_check_lemmas(lambda x: x not in excluded, 2, 1)


def test_box_check_fails_with_too_small_k():
    # feasible sets are those of size >= 2; excluding the empty set and the
    # singletons needs two lattices, so k = 1 is too small
    f = TableFunction(3, [0, 4, 4, 6, 7, 9, 7, 7])
    assert check_submodular(f)
    member = lambda x: bin(x).count("1") >= 2  # noqa: E731
    assert brute_min(f, member).all_minimizers == [0b011]
    assert brute_check_theorem1(f, member, 1).failures == [0b011]
    assert brute_check_theorem1(f, member, 2)
    assert brute_check_theorem2(f, member, 2)


def test_kth_distinct_examples(unit_edge):
    assert brute_kth_distinct(ModularFunction([1, 1, 1]), 3)[0] == [0, 1, 2]
    assert brute_kth_distinct(unit_edge, 2) == ([0, 1], [0, 1])
    assert brute_kth_distinct(constant(2, 5), 1)[0] == [5]
    with pytest.raises(ExhaustedValues):
        brute_kth_distinct(constant(2, 5), 2)


def test_witness_maps_are_valid():
    f = random_function(4, 6)
    F = ConstraintFamily.complement_of_rings([random_ring(random.Random(4), 6)])
    res = brute_check_theorem2(f, F.member, 1)
    for x, (S, T) in res.witnesses.items():
        assert S & ~x == 0 and T & x == 0
        assert bin(S).count("1") <= 1 and bin(T).count("1") <= 1
