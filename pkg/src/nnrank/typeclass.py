"""Zero-pattern profiles of a left factor.

For a nonnegative 6-row left factor ``L`` the profile counts

* ``k``: columns whose first two entries are both zero,
* ``k1``: columns with first entry positive and second entry zero,
* ``k2``: columns with second entry positive and first entry zero.

A rank-forcing argument on ``M`` shows ``k + k1 >= 3``, ``k + k2 >= 3`` and
``k1, k2 >= 1`` for any stochastic factorization, which leaves four
families of profiles ("types").
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .exactnum import sign
from .linalg import ExactMatrix

__all__ = ["TypeProfile", "NegativeEntry", "TYPE_FAMILIES", "classify", "feasible_profiles", "type_tags"]


class NegativeEntry(ValueError):
    """The candidate factor has a negative entry."""


def _type1(k: int, k1: int, k2: int) -> bool:
    return (k, k1, k2) == (1, 2, 2)


def _type2(k: int, k1: int, k2: int) -> bool:
    return k == 2 and k1 == 1 and k2 in (0, 1, 2)


def _type3(k: int, k1: int, k2: int) -> bool:
    return k == 2 and k2 == 1 and k1 in (0, 1, 2)


def _type4(k: int, k1: int, k2: int) -> bool:
    return (k, k1, k2) == (3, 1, 1)


# in listing order; the first match gives the tag
TYPE_FAMILIES = ((1, _type1), (2, _type2), (3, _type3), (4, _type4))


def type_tags(k: int, k1: int, k2: int) -> tuple[int, ...]:
    return tuple(tag for tag, pred in TYPE_FAMILIES if pred(k, k1, k2))


@dataclass(frozen=True)
class TypeProfile:
    k: int
    k1: int
    k2: int
    type_tag: int | str
    # every family the profile belongs to; (2,1,1) is both type 2 and type 3
    matches: tuple[int, ...] = field(default=())
    inner_dimension: int = 0

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.k, self.k1, self.k2)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "k1": self.k1,
            "k2": self.k2,
            "type_tag": self.type_tag,
            "matches": list(self.matches),
            "inner_dimension": self.inner_dimension,
        }


def classify(L: ExactMatrix) -> TypeProfile:
    """Profile of a nonnegative left factor with six rows."""
    if L.rows != 6:
        raise ValueError(f"expected a 6-row factor, got {L.rows} rows")
    for i in range(L.rows):
        for j in range(L.cols):
            if sign(L[i, j]) < 0:
                raise NegativeEntry(f"negative entry at ({i + 1},{j + 1}): {L[i, j]}")
    k = k1 = k2 = 0
    for j in range(L.cols):
        s1, s2 = sign(L[0, j]), sign(L[1, j])
        if s1 == 0 and s2 == 0:
            k += 1
        elif s2 == 0:
            k1 += 1
        elif s1 == 0:
            k2 += 1
    tags = type_tags(k, k1, k2)
    return TypeProfile(k, k1, k2, tags[0] if tags else "none", tags, L.cols)


def feasible_profiles(d: int) -> set[tuple[int, int, int]]:
    """All profiles allowed by the counting inequalities for inner dimension d."""
    if d < 1:
        raise ValueError("inner dimension must be at least 1")
    return {
        (k, k1, k2)
        for k, k1, k2 in itertools.product(range(d + 1), repeat=3)
        if k + k1 + k2 <= d and k + k1 >= 3 and k + k2 >= 3 and k1 >= 1 and k2 >= 1
    }
