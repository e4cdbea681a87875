from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given

import _oracles as oracle
import _reference as ref
from _properties import check_decompositions, check_half_counts
from conftest import SEEDS
from epclust.errors import DomainError, StructuralError
from epclust.symbols import (BoxedSymbol, Decomposition, classification_table, count_even,
                             count_odd, count_scenarios, enumerate_decompositions,
                             enumerate_even_half, enumerate_odd_half, full_diagonal,
                             half_block_elements, half_to_decomposition, sequence_report,
                             table_to_csv, table_to_text)


def as_sets(decs):
    return frozenset(oracle.decomposition_as_sets(d) for d in decs)


def half_sets(blocks):
    return frozenset(frozenset(half_block_elements(b)) for b in blocks)


@pytest.mark.parametrize("N", range(2, 13))
def test_matches_exact_cover_oracle(N):
    assert as_sets(enumerate_decompositions(N)) == oracle.exact_cover_partitions(N)


@pytest.mark.parametrize("N", range(2, 11))
def test_matches_set_partition_brute_force(N):
    assert as_sets(enumerate_decompositions(N)) == oracle.brute_force_partitions(N)


def test_counts_match_oracle_up_to_17():
    got = [count_scenarios(N) for N in range(2, 18)]
    want = [len(oracle.exact_cover_partitions(N)) for N in range(2, 18)]
    assert got == want
    assert got == [1, 1, 2, 3, 3, 6, 4, 11, 6, 17, 7, 32, 8, 45, 13, 66]


def test_half_counts_match_oracle():
    assert [count_even(J) for J in range(1, 15)] == list(ref.SEQUENCE_B)
    odd = [count_odd(J) for J in range(1, 9)]
    assert odd == [len(oracle.exact_cover_partitions(2 * J + 1)) for J in range(1, 9)]


@given(SEEDS)
def test_decomposition_invariants_random(seed):
    check_decompositions(np.random.default_rng(seed))


@given(SEEDS)
def test_half_counts_random(seed):
    check_half_counts(np.random.default_rng(seed))


def test_trivial_split_first_and_order_deterministic():
    for N in range(2, 12):
        decs = enumerate_decompositions(N)
        assert decs[0].K == 1 and decs[0].label == f"{N}x1"
        assert decs == enumerate_decompositions(N)
        assert [d.sort_key() for d in decs] == sorted(d.sort_key() for d in decs)


def test_small_cases():
    assert [d.label for d in enumerate_decompositions(4)] == ["4x1", "2x1,2x3"]
    assert as_sets(enumerate_decompositions(5, anomalous_only=True)) == ref.ANOMALOUS_N5


def test_anomalous_n7_and_n8():
    assert as_sets(enumerate_decompositions(7, anomalous_only=True)) == ref.ANOMALOUS_N7
    assert as_sets(enumerate_decompositions(8, anomalous_only=True)) == ref.ANOMALOUS_N8


def test_even_half_listing():
    assert frozenset(half_sets(s) for s in enumerate_even_half(5)) == ref.EVEN_HALF_J5
    assert {half_sets(s) for s in enumerate_even_half(2)} == {
        frozenset({frozenset({1, 3})}), frozenset({frozenset({1}), frozenset({3})})}


def test_odd_half_listing():
    assert frozenset(half_sets(s) for s in enumerate_odd_half(2)) == ref.ODD_HALF_J2
    assert frozenset(half_sets(s) for s in enumerate_odd_half(3)) == ref.ODD_HALF_J3


@pytest.mark.parametrize("J", range(1, 7))
def test_half_translation_agrees_with_full(J):
    even = {half_to_decomposition(s, 2 * J) for s in enumerate_even_half(J)}
    odd = {half_to_decomposition(s, 2 * J + 1) for s in enumerate_odd_half(J)}
    assert even == set(enumerate_decompositions(2 * J))
    assert odd == set(enumerate_decompositions(2 * J + 1))


def test_classification_table_n6():
    rows = [r for r in classification_table(6) if r.N == 6]
    assert [(r.K, r.partition, r.j, r.n_j, r.c_j, r.label) for r in rows] == list(ref.TABLE_N6)


def test_table_serialization():
    rows = classification_table(5)
    csv_text = table_to_csv(rows)
    assert csv_text.splitlines()[0] == "N,K,partition,j,n_j,c_j,label"
    assert csv_text.splitlines()[1] == '4,2,2+2,1,2,1,"[-1,1]"'
    assert len(table_to_text(rows).splitlines()) == len(rows) + 1


def test_sequence_report():
    rep = sequence_report("a", 9)
    assert rep.as_dict() == {2: 1, 3: 1, 4: 2, 5: 3, 6: 3, 7: 6, 8: 4, 9: 11}
    assert sequence_report("b", 4).as_dict() == {1: 1, 2: 2, 3: 3, 4: 4}
    with pytest.raises(DomainError):
        sequence_report("d", 3)


def test_label_round_trip():
    for N in range(2, 14):
        for d in enumerate_decompositions(N):
            assert Decomposition.from_label(d.label, N) == d


def test_boxed_symbol():
    b = BoxedSymbol(3, 2)
    assert b.diagonal() == [-4, 0, 4]
    assert b.label == "3x2"
    assert b.boxed() == "[-4,0,4]"
    assert BoxedSymbol(2, Fraction(1, 2)).diagonal() == [Fraction(-1, 2), Fraction(1, 2)]
    with pytest.raises(DomainError):
        BoxedSymbol(1)
    with pytest.raises(DomainError):
        BoxedSymbol(2, 0)


@pytest.mark.parametrize("label, N, match", [
    ("2x1,2x2", 4, "union"),
    ("2x1,2x1", 4, "overlaps"),
    ("3x1", 4, "sum"),
    ("2y1", 2, "malformed"),
    ("1x3,3x1", 4, "n >= 2"),
])
def test_invalid_decompositions(label, N, match):
    with pytest.raises(StructuralError, match=match):
        Decomposition.from_label(label, N)


def test_invalid_n():
    with pytest.raises(DomainError):
        enumerate_decompositions(1)
    with pytest.raises(DomainError):
        count_even(0)


def test_full_diagonal():
    assert full_diagonal(5) == [-4, -2, 0, 2, 4]
