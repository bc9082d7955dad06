"""Dense exact matrices over Q or Q(sqrt 2).

Entries are ``Fraction`` or :class:`~nnrank.exactnum.QuadExt`; mixed
products promote through the QuadExt operators, so there is a single
product code path.  Rank is computed by fraction-free (Bareiss)
elimination.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

from .exactnum import Number, QuadExt, format_entry, parse_entry, sign

__all__ = [
    "ExactMatrix",
    "DimensionMismatch",
    "StochasticReport",
    "NormalizedColumns",
    "matmul",
    "rank",
    "rank_by_minors",
    "determinant_leibniz",
    "is_stochastic",
    "normalize_columns",
    "parse_matrix",
    "format_matrix",
    "read_matrix",
    "write_matrix",
]


class DimensionMismatch(ValueError):
    pass


def _normalize(x: Number) -> Number:
    if isinstance(x, QuadExt):
        return x.a if x.b == 0 else x
    return Fraction(x)


class ExactMatrix:
    """Immutable ``rows x cols`` matrix stored row-major."""

    __slots__ = ("rows", "cols", "_entries")

    def __init__(self, rows: int, cols: int, entries: Iterable[Number]) -> None:
        data = tuple(_normalize(e) for e in entries)
        if rows <= 0 or cols <= 0:
            raise DimensionMismatch(f"dimensions must be positive, got {rows}x{cols}")
        if len(data) != rows * cols:
            raise DimensionMismatch(f"expected {rows * cols} entries, got {len(data)}")
        self.rows = rows
        self.cols = cols
        self._entries = data

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Number]]) -> ExactMatrix:
        if not rows or not rows[0]:
            raise DimensionMismatch("empty matrix")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise DimensionMismatch("ragged rows")
        return cls(len(rows), width, (e for r in rows for e in r))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[Number]]) -> ExactMatrix:
        return cls.from_rows(columns).transpose()

    @classmethod
    def identity(cls, n: int) -> ExactMatrix:
        return cls(n, n, (Fraction(int(i == j)) for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> ExactMatrix:
        return cls(rows, cols, [Fraction(0)] * (rows * cols))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def entries(self) -> tuple[Number, ...]:
        return self._entries

    def __getitem__(self, ij: tuple[int, int]) -> Number:
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(ij)
        return self._entries[i * self.cols + j]

    def row(self, i: int) -> tuple[Number, ...]:
        return self._entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j: int) -> tuple[Number, ...]:
        return self._entries[j::self.cols]

    def to_rows(self) -> list[list[Number]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def __iter__(self) -> Iterator[tuple[Number, ...]]:
        return (self.row(i) for i in range(self.rows))

    def transpose(self) -> ExactMatrix:
        return ExactMatrix(self.cols, self.rows, (self[i, j] for j in range(self.cols) for i in range(self.rows)))

    @property
    def T(self) -> ExactMatrix:
        return self.transpose()

    def map(self, fn: Callable[[Number], Number]) -> ExactMatrix:
        return ExactMatrix(self.rows, self.cols, (fn(e) for e in self._entries))

    def hstack(self, other: ExactMatrix) -> ExactMatrix:
        if self.rows != other.rows:
            raise DimensionMismatch(f"cannot concatenate {self.shape} and {other.shape}")
        return ExactMatrix.from_rows([list(a) + list(b) for a, b in zip(self, other)])

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> ExactMatrix:
        return ExactMatrix(len(rows), len(cols), (self[i, j] for i in rows for j in cols))

    def columns_subset(self, cols: Sequence[int]) -> ExactMatrix:
        return self.submatrix(range(self.rows), cols)

    def with_entry(self, i: int, j: int, value: Number) -> ExactMatrix:
        data = list(self._entries)
        data[i * self.cols + j] = value
        return ExactMatrix(self.rows, self.cols, data)

    def is_rational(self) -> bool:
        return not any(isinstance(e, QuadExt) for e in self._entries)

    def is_nonnegative(self) -> bool:
        return all(sign(e) >= 0 for e in self._entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.shape == other.shape and self._entries == other._entries

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self._entries))

    def _elementwise(self, other: ExactMatrix, op: Callable[[Number, Number], Number]) -> ExactMatrix:
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} vs {other.shape}")
        return ExactMatrix(self.rows, self.cols, (op(a, b) for a, b in zip(self._entries, other._entries)))

    def __add__(self, other: ExactMatrix) -> ExactMatrix:
        return self._elementwise(other, lambda a, b: a + b)

    def __sub__(self, other: ExactMatrix) -> ExactMatrix:
        return self._elementwise(other, lambda a, b: a - b)

    def __neg__(self) -> ExactMatrix:
        return self.map(lambda a: -a)

    def scale(self, c: Number) -> ExactMatrix:
        return self.map(lambda a: a * c)

    def __matmul__(self, other: ExactMatrix) -> ExactMatrix:
        return matmul(self, other)

    def nonzero_positions(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.rows) for j in range(self.cols) if self[i, j] != 0]

    def to_float_rows(self) -> list[list[float]]:
        return [[float(e) for e in r] for r in self]

    def __repr__(self) -> str:
        return f"ExactMatrix({self.rows}x{self.cols})"

    def __str__(self) -> str:
        return format_matrix(self)


def matmul(A: ExactMatrix, B: ExactMatrix) -> ExactMatrix:
    if A.cols != B.rows:
        raise DimensionMismatch(f"cannot multiply {A.shape} by {B.shape}")
    out = []
    for i in range(A.rows):
        arow = A.row(i)
        for j in range(B.cols):
            acc: Number = Fraction(0)
            for k, a in enumerate(arow):
                if a:
                    b = B[k, j]
                    if b:
                        acc = acc + a * b
            out.append(acc)
    return ExactMatrix(A.rows, B.cols, out)


def rank(A: ExactMatrix) -> int:
    """Exact rank by Bareiss fraction-free elimination.

    Pivot rows are swapped in whenever the current pivot vanishes; columns
    without a pivot are skipped.  Every division by the previous pivot is
    exact in the underlying domain.
    """
    m = [list(r) for r in A]
    nrows, ncols = A.rows, A.cols
    prev: Number = Fraction(1)
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        pivot_row = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if pivot_row is None:
            continue
        if pivot_row != r:
            m[r], m[pivot_row] = m[pivot_row], m[r]
        p = m[r][c]
        for i in range(r + 1, nrows):
            mic = m[i][c]
            for j in range(c + 1, ncols):
                m[i][j] = (p * m[i][j] - mic * m[r][j]) / prev
            m[i][c] = Fraction(0)
        prev = p
        r += 1
    return r


def determinant_leibniz(A: ExactMatrix) -> Number:
    """Permutation-sum determinant; only meant as an independent oracle."""
    if A.rows != A.cols:
        raise DimensionMismatch("determinant of a non-square matrix")
    n = A.rows
    total: Number = Fraction(0)
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for a, b in itertools.combinations(perm, 2) if a > b)
        term: Number = Fraction(-1 if inversions % 2 else 1)
        for i, p in enumerate(perm):
            term = term * A[i, p]
            if not term:
                break
        total = total + term
    return total


def rank_by_minors(A: ExactMatrix) -> int:
    """Largest k with a nonvanishing k x k minor (brute force)."""
    for k in range(min(A.rows, A.cols), 0, -1):
        for rows in itertools.combinations(range(A.rows), k):
            for cols in itertools.combinations(range(A.cols), k):
                if determinant_leibniz(A.submatrix(rows, cols)) != 0:
                    return k
    return 0


@dataclass(frozen=True)
class StochasticReport:
    ok: bool
    column: int | None = None
    defect: Number | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def is_stochastic(A: ExactMatrix) -> StochasticReport:
    """Nonnegative entries and every column summing to exactly 1.

    On failure the report names the first offending column; ``defect`` is
    the negative entry, or ``column sum - 1``.
    """
    for j in range(A.cols):
        col = A.column(j)
        for e in col:
            if sign(e) < 0:
                return StochasticReport(False, j, e, "negative entry")
        total = sum(col, Fraction(0))
        if total != 1:
            return StochasticReport(False, j, total - 1, "column sum differs from 1")
    return StochasticReport(True)


@dataclass(frozen=True)
class NormalizedColumns:
    matrix: ExactMatrix
    scales: tuple[Number, ...]
    kept: tuple[int, ...]
    original_cols: int

    def reconstruct(self) -> ExactMatrix:
        """Undo the normalization, reinserting the removed zero columns."""
        cols: list[list[Number]] = [[Fraction(0)] * self.matrix.rows for _ in range(self.original_cols)]
        for pos, (j, s) in enumerate(zip(self.kept, self.scales)):
            cols[j] = [e * s for e in self.matrix.column(pos)]
        return ExactMatrix.from_columns(cols)


def normalize_columns(A: ExactMatrix) -> NormalizedColumns:
    """Drop zero columns and divide the others by their sums."""
    if not A.is_nonnegative():
        raise ValueError("normalize_columns requires a nonnegative matrix")
    kept: list[int] = []
    scales: list[Number] = []
    cols: list[list[Number]] = []
    for j in range(A.cols):
        col = A.column(j)
        s = sum(col, Fraction(0))
        if s == 0:
            continue
        kept.append(j)
        scales.append(s)
        cols.append([e / s for e in col])
    if not cols:
        raise ValueError("normalize_columns requires a nonzero matrix")
    return NormalizedColumns(ExactMatrix.from_columns(cols), tuple(scales), tuple(kept), A.cols)


def parse_matrix(text: str) -> ExactMatrix:
    """Read the ``rows cols`` header followed by whitespace-separated rows."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ValueError("empty matrix text")
    header = lines[0].split()
    if len(header) != 2:
        raise ValueError(f"bad header line: {lines[0]!r}")
    rows, cols = int(header[0]), int(header[1])
    body = lines[1:]
    if len(body) != rows:
        raise ValueError(f"expected {rows} rows, found {len(body)}")
    data: list[Number] = []
    for ln in body:
        toks = ln.split()
        if len(toks) != cols:
            raise ValueError(f"expected {cols} entries in row {ln!r}")
        data.extend(parse_entry(t) for t in toks)
    return ExactMatrix(rows, cols, data)


def format_matrix(A: ExactMatrix) -> str:
    lines = [f"{A.rows} {A.cols}"]
    lines.extend(" ".join(format_entry(e) for e in row) for row in A)
    return "\n".join(lines) + "\n"


def read_matrix(path) -> ExactMatrix:
    with open(path, encoding="utf-8") as fh:
        return parse_matrix(fh.read())


def write_matrix(path, A: ExactMatrix) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_matrix(A))
