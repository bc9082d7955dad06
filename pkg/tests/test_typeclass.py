from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from nnrank.linalg import ExactMatrix
from nnrank.paperdata import constants
from nnrank.typeclass import NegativeEntry, classify, feasible_profiles, type_tags


def unit_columns(rows_nonzero):
    cols = []
    for i in rows_nonzero:
        c = [Fraction(0)] * 6
        c[i] = Fraction(1)
        cols.append(c)
    return ExactMatrix.from_columns(cols)


def test_w_is_type1():
    prof = classify(constants().W)
    assert prof.as_tuple() == (1, 2, 2)
    assert prof.type_tag == 1


def test_identity_columns_type4():
    prof = classify(unit_columns(range(5)))
    assert prof.as_tuple() == (3, 1, 1) and prof.type_tag == 4


def test_type4_pattern_with_dense_tail():
    cols = [[1, 0, 0, 0, 0, 0], [0, 1, 0, 0, 0, 0]] + [[0, 0, 1, 1, 1, 1]] * 3
    prof = classify(ExactMatrix.from_columns(cols))
    assert prof.as_tuple() == (3, 1, 1)


def test_overlapping_families_first_match():
    assert type_tags(2, 1, 1) == (2, 3)
    prof = classify(unit_columns([0, 1, 2, 3]))
    assert prof.as_tuple() == (2, 1, 1)
    assert prof.type_tag == 2 and prof.matches == (2, 3)


def test_unmatched_profile():
    prof = classify(unit_columns([2, 3]))
    assert prof.type_tag == "none" and prof.matches == ()


def test_errors():
    with pytest.raises(NegativeEntry):
        classify(ExactMatrix.from_columns([[-1, 0, 0, 0, 0, 0]]))
    with pytest.raises(ValueError):
        classify(ExactMatrix.identity(5))
    with pytest.raises(ValueError):
        feasible_profiles(0)


def test_feasible_profiles():
    assert feasible_profiles(5) == {(1, 2, 2), (2, 1, 1), (2, 1, 2), (2, 2, 1), (3, 1, 1)}
    assert feasible_profiles(4) == {(2, 1, 1)}
    assert feasible_profiles(2) == set()


def test_profile_arithmetic():
    for k, k1, k2 in feasible_profiles(5):
        assert 2 * k >= 6 - k1 - k2
        assert k in (1, 2, 3)
        assert type_tags(k, k1, k2)


def test_brute_force_profiles_match_families():
    # every type-family profile that fits in dimension 5 and obeys the inequalities
    fam = {(1, 2, 2), (2, 1, 0), (2, 1, 1), (2, 1, 2), (2, 0, 1), (2, 2, 1), (3, 1, 1)}
    allowed = {p for p in fam if p[1] >= 1 and p[2] >= 1}
    assert feasible_profiles(5) == allowed


entry = st.sampled_from([Fraction(0), Fraction(1, 3), Fraction(2)])


@given(st.lists(st.lists(entry, min_size=6, max_size=6), min_size=1, max_size=6), st.randoms())
def test_column_permutation_invariance(cols, rnd):
    L = ExactMatrix.from_columns(cols)
    perm = list(range(len(cols)))
    rnd.shuffle(perm)
    assert classify(L) == classify(ExactMatrix.from_columns([cols[p] for p in perm]))
