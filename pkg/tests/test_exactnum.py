from decimal import Decimal, localcontext
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from nnrank.exactnum import SQRT2, QuadExt, RadicandMismatch, format_entry, parse_entry, sign

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=60)


def decimal_sign(a: Fraction, b: Fraction, d: int = 2) -> int:
    # independent oracle: 80-digit decimal evaluation
    with localcontext() as ctx:
        ctx.prec = 80
        val = Decimal(a.numerator) / Decimal(a.denominator) + Decimal(b.numerator) / Decimal(b.denominator) * Decimal(d).sqrt()
    return (val > 0) - (val < 0)


@given(rationals, rationals)
def test_sign_matches_high_precision(a, b):
    assert sign(QuadExt(a, b)) == decimal_sign(a, b)


@given(rationals, rationals, st.sampled_from([3, 5, 7]))
def test_sign_other_radicands(a, b, d):
    assert sign(QuadExt(a, b, d)) == decimal_sign(a, b, d)


def test_sign_threshold_values():
    u = 2 - SQRT2
    assert sign(u) == 1
    assert sign(u - Fraction(37, 64)) == 1
    assert sign(u - Fraction(38, 64)) == -1
    assert sign(u * u - 4 * u + 2) == 0
    assert sign(QuadExt(0, 0)) == 0


@given(rationals, rationals, rationals, rationals)
def test_field_axioms(a, b, c, d):
    x, y = QuadExt(a, b), QuadExt(c, d)
    assert x + y == y + x
    assert x * y == y * x
    assert (x - y) + y == x
    if y:
        assert (x / y) * y == x


@given(rationals, rationals)
def test_norm_is_multiplicative_with_conjugate(a, b):
    x = QuadExt(a, b)
    assert x * x.conjugate() == x.norm()


def test_inverse_of_zero_raises():
    with pytest.raises(ZeroDivisionError):
        QuadExt(0, 0).inverse()


def test_mixed_radicands_rejected():
    with pytest.raises(RadicandMismatch):
        QuadExt(1, 1, 2) + QuadExt(1, 1, 3)


def test_radicand_must_be_square_free():
    with pytest.raises(ValueError):
        QuadExt(1, 1, 4)


def test_rational_embedding_hash_and_eq():
    assert QuadExt(Fraction(3, 4), 0) == Fraction(3, 4)
    assert hash(QuadExt(Fraction(3, 4), 0)) == hash(Fraction(3, 4))
    assert QuadExt(1, 1) != 1


def test_ordering():
    assert QuadExt(1, 1) > Fraction(12, 5)
    assert QuadExt(1, 1) < Fraction(5, 2)
    assert sorted([SQRT2, Fraction(3, 2), Fraction(7, 5)]) == [Fraction(7, 5), SQRT2, Fraction(3, 2)]


@pytest.mark.parametrize(
    "text, value",
    [
        ("5/44", Fraction(5, 44)),
        ("-3", Fraction(-3)),
        ("3/4+1/8s", QuadExt(Fraction(3, 4), Fraction(1, 8))),
        ("-1/11+1/11s", QuadExt(Fraction(-1, 11), Fraction(1, 11))),
        ("2-1s", QuadExt(2, -1)),
        ("1/7s", QuadExt(0, Fraction(1, 7))),
        ("-1/7s", QuadExt(0, Fraction(-1, 7))),
        ("3+0s", Fraction(3)),
    ],
)
def test_parse_entry(text, value):
    assert parse_entry(text) == value


@pytest.mark.parametrize("bad", ["", "s", "1/2/3", "1+s", "abc", "1.5", "1/-2", "1+-2s"])
def test_parse_entry_rejects(bad):
    with pytest.raises(ValueError):
        parse_entry(bad)


@given(rationals, rationals)
def test_format_parse_roundtrip(a, b):
    x = QuadExt(a, b)
    assert parse_entry(format_entry(x)) == x


def test_format_canonical():
    assert format_entry(QuadExt(Fraction(3, 7), Fraction(-1, 7))) == "3/7-1/7s"
    assert format_entry(Fraction(0)) == "0"
    assert format_entry(QuadExt(0, 1)) == "0+1s"
    assert parse_entry("0+1s") == SQRT2


def test_float_conversion():
    assert float(2 - SQRT2) == pytest.approx(0.5857864376269049, abs=1e-15)
