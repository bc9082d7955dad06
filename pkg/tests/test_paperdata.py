from fractions import Fraction

import pytest

from nnrank.exactnum import SQRT2, QuadExt
from nnrank.linalg import ExactMatrix, is_stochastic, matmul, rank
from nnrank.paperdata import (
    EPSILON,
    GOLDEN_NAMES,
    Constraint,
    ConstraintTable,
    apply_f,
    constants,
    exact_constraints,
    figure4_constraints,
    load_golden,
    membership_in_P,
    verify_certificate,
)

F = Fraction
PC = constants()


def test_certificate_passes_every_check():
    rep = verify_certificate()
    assert [c.id for c in rep.checks] == list("abcdefgh")
    assert rep.valid, [(c.id, c.defect) for c in rep.failed()]


def test_factor_products():
    assert matmul(PC.W, PC.Hprime) == PC.Mprime
    assert matmul(PC.W, PC.Heps) == PC.Weps


def test_ranks():
    assert rank(PC.M) == 4
    assert rank(PC.W) == 4
    assert rank(PC.C) == 3
    assert rank(ExactMatrix.identity(5)) == 5


def test_stochastic_matrices():
    for name in ("M", "Mprime", "Weps", "W", "Hprime", "Heps"):
        assert is_stochastic(PC.matrices()[name]), name


def test_golden_files_match_source():
    for name in GOLDEN_NAMES:
        assert load_golden(name) == PC.matrices()[name], name


def test_f_of_r1():
    assert PC.r[0] == (F(3, 4), F(1, 8), F(0))
    assert apply_f(PC.f, PC.r[0]) == (F(5, 44), 0, F(1, 11), F(1, 44), F(3, 11), F(1, 2))


def test_f_of_q1_star():
    assert PC.qstar[0] == (2 - SQRT2, 0, 0)
    assert apply_f(PC.f, PC.qstar[0]) == PC.W.column(0)


def test_w41_is_positive():
    assert PC.W[3, 0] == QuadExt(F(-1, 11), F(1, 11))
    assert PC.W[3, 0] > 0


@pytest.mark.parametrize(
    "x, inside, violated",
    [
        ((0, 0, 0), True, ()),
        (((26 + 7 * SQRT2) / 17, 0, (12 - 2 * SQRT2) / 17), True, ()),
        ((3, 0, 0), False, (2, 3)),
        ((0, -1, 0), False, (0,)),
    ],
)
def test_membership(x, inside, violated):
    mem = membership_in_P(x)
    assert bool(mem) is inside
    assert mem.violated == violated


def test_membership_facet_name():
    assert "-x + 5z/2 + 1 >= 0" in membership_in_P((3, 0, 0)).violated_facets


def test_perturbed_w_fails_check_a_at_1_2():
    W = PC.W.with_entry(0, 1, PC.W[0, 1] + F(1, 10**6))
    rep = verify_certificate(PC.replace(W=W))
    a = rep["a"]
    assert not a.passed
    assert a.details == {"row": 1, "col": 2}


def test_column_outside_p_fails_check_g():
    # negate a column of Weps: M column 7 becomes negative
    Weps = ExactMatrix.from_columns(
        [PC.Weps.column(j) if j != 0 else [-e for e in PC.Weps.column(0)] for j in range(PC.Weps.cols)]
    )
    rep = verify_certificate(PC.replace(Weps=Weps))
    assert not rep["g"].passed


def test_constraint_table_csv_roundtrip():
    tab = figure4_constraints()
    assert ConstraintTable.from_csv(tab.to_csv()) == tab
    assert tab.upper(2, 1) == EPSILON
    assert tab.lower(1, 2) == F(8, 10)
    assert tab.is_zero(1, 1)
    assert tab.upper(3, 1) == 1


def test_weps_satisfies_table_and_exact_table():
    assert figure4_constraints().violations(PC.Weps) == []
    assert exact_constraints(PC.Weps).violations(PC.Weps) == []


def test_constraint_validation():
    with pytest.raises(ValueError):
        Constraint(1, 1, "lt", F(0))
    with pytest.raises(ValueError):
        Constraint(1, 1, "le", F(3, 2))
    with pytest.raises(ValueError):
        ConstraintTable.from_csv("1,1,le,1/2,extra\n")
