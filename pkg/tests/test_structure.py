import pytest

from qsteiner.design import DesignMultiset, spread_field_reduction, verify_steiner
from qsteiner.errors import DesignError, DimensionError
from qsteiner.gf import field_new
from qsteiner.puncture import extension_up_dim
from qsteiner.punctured import construct_s237_5
from qsteiner.structure import (
    ForcedBlocks,
    audit_formulas,
    classify_blocks,
    count_zero_column_blocks,
    find_z2_witness,
    no_double_special,
    normalize_z1_z2,
    normalize_z1_z3,
    prefix_distribution_check,
    spread_through_point_check,
    z1,
    z2,
    z3,
)
from qsteiner.subspace import span

from synth import packings

F2 = field_new(2)


def test_audit_q2_values():
    a = audit_formulas(2)
    assert a.as_tuple() == (140, 140, 49, 91, 148, 381)
    assert a.identity_holds


@pytest.mark.parametrize("q", range(2, 10))
def test_audit_identity(q):
    a = audit_formulas(q)
    assert a.identity_holds
    assert a.sizeA == a.sizeB == a.sizeAonly + a.sizeAB
    assert a.to_dict()["total"] == (q**7 - 1) // (q - 1) * (q * q - q + 1)


def test_audit_q3():
    assert audit_formulas(3).as_tuple() == (1170, 1170, 169, 1001, 5478, 7651)


def test_forced_blocks_columns():
    Z = ForcedBlocks.for_q(2)
    D = DesignMultiset(F2, 7, [Z.Z1, Z.Z2, Z.Z3])
    cols = {S: c for S, c in count_zero_column_blocks(D)}
    assert cols == {
        Z.Z1: frozenset({1, 2, 3, 4}),
        Z.Z2: frozenset({4, 5, 6, 7}),
        Z.Z3: frozenset({1, 2, 5, 6}),
    }


def test_classification_partitions():
    for D in packings("z2", 10, seed=4):
        D = normalize_z1_z2(D)
        sizes = classify_blocks(D).sizes()
        assert sum(sizes.values()) == D.total_size
        assert sizes["z_blocks"] == 2
        assert sizes["a_and_b"] <= audit_formulas(2).sizeAB


def test_classify_examples():
    a_only = span([(0, 0, 0, 0, 1, 0, 0), (1, 0, 0, 1, 0, 0, 0), (0, 1, 0, 0, 0, 1, 0)], F2, 7)
    ab = span([(0, 0, 0, 0, 1, 0, 0), (1, 0, 0, 0, 0, 0, 0), (0, 0, 0, 1, 0, 1, 1)], F2, 7)
    rest = span([(1, 0, 0, 1, 0, 0, 0), (0, 1, 0, 0, 1, 0, 0), (0, 0, 1, 0, 0, 1, 0)], F2, 7)
    cls = classify_blocks(DesignMultiset(F2, 7, [z1(2), z2(2), a_only, ab, rest]))
    assert cls.sizes() == {"z_blocks": 2, "a_only": 1, "b_only": 0, "a_and_b": 1, "rest": 1}
    with pytest.raises(DimensionError):
        classify_blocks(DesignMultiset(F2, 7, [span([(1, 0, 0, 0, 0, 0, 0)], F2, 7)]))


def test_no_double_special():
    bad = span([(0, 0, 0, 0, 1, 0, 0), (0, 0, 0, 0, 0, 1, 0), (1, 0, 0, 0, 0, 0, 0)], F2, 7)
    D = DesignMultiset(F2, 7, [z1(2), z2(2), bad])
    assert no_double_special(D) == [(bad, "leading")]
    assert no_double_special(DesignMultiset(F2, 7, [z1(2), z2(2)])) == []


def test_normalize_z2_hand_example():
    X = span([(1, 0, 0, 0, 1, 0, 0), (0, 1, 0, 0, 0, 1, 0), (0, 0, 1, 0, 0, 0, 1)], F2, 7)
    D = DesignMultiset(F2, 7, [z1(2), X])
    assert normalize_z1_z2(D) == DesignMultiset(F2, 7, [z1(2), z2(2)])


def test_normalize_z2_fixed_point():
    D = DesignMultiset(F2, 7, [z1(2), z2(2)])
    assert find_z2_witness(D) == z2(2)
    assert normalize_z1_z2(D) == D


@pytest.mark.parametrize("q", [2, 3])
def test_normalize_z2_random_packings(q):
    for D in packings("z2", 50 if q == 2 else 15, q=q, seed=q):
        before = verify_steiner(D, 2, 3, "packing")
        assert before.verdict == "packing"
        N = normalize_z1_z2(D)
        assert z1(q) in N and z2(q) in N
        assert N.total_size == D.total_size
        assert verify_steiner(N, 2, 3, "packing").verdict == before.verdict
        assert normalize_z1_z2(N) == N


@pytest.mark.parametrize("q", [2, 3])
def test_normalize_z3_random_packings(q):
    for D in packings("z3", 50 if q == 2 else 15, q=q, seed=10 + q):
        before = verify_steiner(D, 2, 3, "packing").verdict
        N = normalize_z1_z3(D)
        assert z1(q) in N and z3(q) in N
        assert verify_steiner(N, 2, 3, "packing").verdict == before
        assert normalize_z1_z3(N) == N


def test_normalize_preconditions():
    X = span([(1, 0, 0, 0, 1, 0, 0), (0, 1, 0, 0, 0, 1, 0), (0, 0, 1, 0, 0, 0, 1)], F2, 7)
    with pytest.raises(DesignError):
        normalize_z1_z2(DesignMultiset(F2, 7, [X]))
    with pytest.raises(DesignError):
        normalize_z1_z2(DesignMultiset(F2, 7, [z1(2)]))
    with pytest.raises(DesignError):
        normalize_z1_z3(DesignMultiset(F2, 7, [z1(2), X]))


def test_spread_through_point():
    # up-extensions of an S_2(1,2,6) spread pass through e_7 and puncture back to it
    spread = spread_field_reduction(2, 2, 6)
    D = spread.map_blocks(extension_up_dim, n=7)
    rep = spread_through_point_check(D, 7)
    assert rep.verdict == "exact-design" and rep.num_blocks == 21

    rep = spread_through_point_check(DesignMultiset(F2, 7, [z1(2)]), 7, "packing")
    assert rep.ok and rep.num_blocks == 1

    a = span([(0, 0, 0, 0, 0, 0, 1), (1, 0, 0, 0, 0, 0, 0), (0, 1, 0, 0, 0, 0, 0)], F2, 7)
    b = span([(0, 0, 0, 0, 0, 0, 1), (1, 0, 0, 0, 0, 0, 0), (0, 0, 1, 0, 0, 0, 0)], F2, 7)
    rep = spread_through_point_check(DesignMultiset(F2, 7, [a, b]), 7, "packing")
    assert rep.verdict == "violation"


def test_prefix_distribution():
    rep = prefix_distribution_check(DesignMultiset(F2, 7, [z1(2)]))
    assert rep.target == 4 and len(rep.per_point) == 7
    assert all(p["max_tally"] == 0 and p["blocks"] == 0 for p in rep.per_point)
    assert rep.within_bound and not rep.complete
    with pytest.raises(DimensionError):
        prefix_distribution_check(construct_s237_5(2))
    with pytest.raises(DesignError):
        prefix_distribution_check(DesignMultiset(F2, 7, [z2(2)]))


def test_prefix_distribution_on_packing():
    for D in packings("z2", 5, seed=8):
        rep = prefix_distribution_check(normalize_z1_z2(D))
        # in a packing the blocks through one point of Z1 meet only there,
        # so no direction can be hit more than the full-design count
        assert rep.within_bound
