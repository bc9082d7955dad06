"""The fixed matrices, points and polytope of the counterexample, and the
exact certificate checks built on them.

All constants are literals in the entry grammar of :mod:`nnrank.exactnum`
(``s`` = sqrt 2).  A second copy lives in ``nnrank/data/*.mat``; the test
suite checks that both agree.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Sequence

from .exactnum import Number, format_entry, parse_entry, sign
from .linalg import ExactMatrix, is_stochastic, matmul, parse_matrix, rank

__all__ = [
    "PaperConstants",
    "AffineMap3to6",
    "Constraint",
    "ConstraintTable",
    "CheckResult",
    "CertificateReport",
    "FACETS",
    "EPSILON",
    "constants",
    "apply_f",
    "membership_in_P",
    "figure4_constraints",
    "exact_constraints",
    "verify_certificate",
    "load_golden",
    "GOLDEN_NAMES",
]

EPSILON = Fraction(1, 10**5)


def _m(rows: Sequence[str]) -> ExactMatrix:
    return ExactMatrix.from_rows([[parse_entry(t) for t in r.split()] for r in rows])


_MPRIME = (
    "5/44   5/11  85/121  0     0      0",
    "0      0     0       2/11  3/11   7/33",
    "1/11   1/44  2/121   1/44  15/88  17/88",
    "1/44   1/44  8/121   1/44  19/88  5/24",
    "3/11   3/11  12/121  8/11  2/11   2/33",
    "1/2    5/22  14/121  1/22  7/44   43/132",
)

_WEPS = (
    "0              133/165      640/2233     0            0",
    "1/111540       0            0            17209/58047  997/5082",
    "114721/892320  1/146850     17/506       385/1759     2921/203280",
    "47/1248        413/5874     1/102718     2915/10554   4381/203280",
    "36/169         22/267       18674/51359  1/116094     3252/4235",
    "276953/446160  1009/24475   16239/51359  1100/5277    1/101640",
)

_W = (
    "0            5/7+5/77s     15/77+5/77s  0              0",
    "0            0             0            20/77+2/77s    48/187-8/187s",
    "1/11s        0             4/77-1/77s   3/14+1/308s    14/187-8/187s",
    "-1/11+1/11s  4/77+1/77s    0            39/154+5/308s  21/187-12/187s",
    "8/11-4/11s   12/77-4/77s   4/11         0              104/187+28/187s",
    "4/11+2/11s   6/77-2/77s    30/77-4/77s  3/11-1/22s     0",
)

_HPRIME = (
    "1/4+1/4s  0          1/11s    1/4-1/8s  0             1/6+1/12s",
    "0         1/2-1/8s   1-1/11s  0         0             0",
    "3/4-1/4s  1/2+1/8s   0        0         0             0",
    "0         0          0        0         21/34+7/68s   5/6-1/12s",
    "0         0          0        3/4+1/8s  13/34-7/68s   0",
)

_HEPS = (
    "30419/40560+28679/162240s  -2728/46725+5791/140175s  2741/98049-642/32683s"
    "  -689/10554+15595/337728s  389/1848-5501/36960s",
    "0  163318/140175-7277/62300s  5958/32683-50543/392196s  0  0",
    "0  -2137/20025+6047/80100s  11062/14007+8321/56028s  0  0",
    "7443/8840-51313/86190s  0  0  148897/179418+172627/1435344s  -1741/26180+1847/39270s",
    "-408157/689520+1154473/2758080s  0  0  7039/29903-318541/1913792s  134461/157080+1163/11424s",
)

# f(x) = C x + d, both scaled by 1/11
_C11 = (
    "0   10   0",
    "0   0    4",
    "-1  -2   1/2",
    "-1  0    5/2",
    "4   0    0",
    "-2  -8   -7",
)
_D11 = ("0", "0", "2", "1", "0", "8")

_R_POINTS = (
    "3/4 1/8 0",
    "3/4 1/2 0",
    "3/11 17/22 0",
    "2 0 1/2",
    "1/2 0 3/4",
    "1/6 0 7/12",
)

_QEPS_POINTS = (
    "99/169 0 1/40560",
    "121/534 133/150 0",
    "9337/9338 64/203 0",
    "1/42216 0 17209/21108",
    "813/385 0 997/1848",
)

_QSTAR_POINTS = (
    "2-1s 0 0",
    "3/7-1/7s 11/14+1/14s 0",
    "1 3/14+1/14s 0",
    "0 0 5/7+1/14s",
    "26/17+7/17s 0 12/17-2/17s",
)

# Facets of P in the normalization used for display; row i is a positive
# multiple of row i of (C | d).
FACETS: tuple[tuple[str, tuple[Fraction, Fraction, Fraction, Fraction]], ...] = (
    ("y >= 0", (Fraction(0), Fraction(1), Fraction(0), Fraction(0))),
    ("z >= 0", (Fraction(0), Fraction(0), Fraction(1), Fraction(0))),
    ("-x/2 - y + z/4 + 1 >= 0", (Fraction(-1, 2), Fraction(-1), Fraction(1, 4), Fraction(1))),
    ("-x + 5z/2 + 1 >= 0", (Fraction(-1), Fraction(0), Fraction(5, 2), Fraction(1))),
    ("x >= 0", (Fraction(1), Fraction(0), Fraction(0), Fraction(0))),
    ("-x/4 - y - 7z/8 + 1 >= 0", (Fraction(-1, 4), Fraction(-1), Fraction(-7, 8), Fraction(1))),
)

Point3 = tuple[Number, Number, Number]


def _points(rows: Sequence[str]) -> tuple[Point3, ...]:
    return tuple(tuple(parse_entry(t) for t in r.split()) for r in rows)  # type: ignore[misc]


@dataclass(frozen=True)
class AffineMap3to6:
    """The injective affine parameterization ``x -> C x + d``."""

    C: ExactMatrix
    dvec: ExactMatrix

    def __post_init__(self) -> None:
        if self.C.shape != (6, 3) or self.dvec.shape != (6, 1):
            raise ValueError("expected C of shape 6x3 and d of shape 6x1")
        if rank(self.C) != 3:
            raise ValueError("C must have full column rank")


@dataclass(frozen=True)
class PaperConstants:
    Mprime: ExactMatrix
    Weps: ExactMatrix
    W: ExactMatrix
    Hprime: ExactMatrix
    Heps: ExactMatrix
    f: AffineMap3to6
    r: tuple[Point3, ...]
    qeps: tuple[Point3, ...]
    qstar: tuple[Point3, ...]

    @property
    def M(self) -> ExactMatrix:
        return self.Mprime.hstack(self.Weps)

    @property
    def C(self) -> ExactMatrix:
        return self.f.C

    @property
    def dvec(self) -> ExactMatrix:
        return self.f.dvec

    def matrices(self) -> dict[str, ExactMatrix]:
        return {
            "M": self.M,
            "Mprime": self.Mprime,
            "Weps": self.Weps,
            "W": self.W,
            "Hprime": self.Hprime,
            "Heps": self.Heps,
            "C": self.C,
            "d": self.dvec,
        }

    def replace(self, **changes) -> PaperConstants:
        fields = {
            "Mprime": self.Mprime,
            "Weps": self.Weps,
            "W": self.W,
            "Hprime": self.Hprime,
            "Heps": self.Heps,
            "f": self.f,
            "r": self.r,
            "qeps": self.qeps,
            "qstar": self.qstar,
        }
        fields.update(changes)
        return PaperConstants(**fields)


@lru_cache(maxsize=1)
def constants() -> PaperConstants:
    eleventh = Fraction(1, 11)
    C = _m(_C11).scale(eleventh)
    dvec = _m(_D11).scale(eleventh)
    return PaperConstants(
        Mprime=_m(_MPRIME),
        Weps=_m(_WEPS),
        W=_m(_W),
        Hprime=_m(_HPRIME),
        Heps=_m(_HEPS),
        f=AffineMap3to6(C, dvec),
        r=_points(_R_POINTS),
        qeps=_points(_QEPS_POINTS),
        qstar=_points(_QSTAR_POINTS),
    )


GOLDEN_NAMES = ("M", "Mprime", "Weps", "W", "Hprime", "Heps", "C", "d")


def load_golden(name: str) -> ExactMatrix:
    text = resources.files("nnrank").joinpath("data").joinpath(f"{name}.mat").read_text(encoding="utf-8")
    return parse_matrix(text)


def apply_f(fmap: AffineMap3to6, x: Sequence[Number]) -> tuple[Number, ...]:
    if len(x) != 3:
        raise ValueError("apply_f expects a point in 3-space")
    col = ExactMatrix(3, 1, x)
    return (matmul(fmap.C, col) + fmap.dvec).column(0)


@dataclass(frozen=True)
class Membership:
    inside: bool
    violated: tuple[int, ...]
    values: tuple[Number, ...]

    def __bool__(self) -> bool:
        return self.inside

    @property
    def violated_facets(self) -> tuple[str, ...]:
        return tuple(FACETS[i][0] for i in self.violated)


def membership_in_P(x: Sequence[Number]) -> Membership:
    """Test ``x`` against the six facets; ``violated`` holds facet indices."""
    values = []
    for _, (a, b, c, off) in FACETS:
        values.append(a * x[0] + b * x[1] + c * x[2] + off)
    violated = tuple(i for i, v in enumerate(values) if sign(v) < 0)
    return Membership(not violated, violated, tuple(values))


# Entrywise constraints on a stochastic 6x5 matrix.

KINDS = ("eq0", "le", "ge")


@dataclass(frozen=True)
class Constraint:
    row: int  # 1-based
    col: int  # 1-based
    kind: str
    bound: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown constraint kind {self.kind!r}")
        if not (0 <= self.bound <= 1):
            raise ValueError("constraint bounds must lie in [0, 1]")

    def holds(self, value: Number) -> bool:
        if self.kind == "eq0":
            return value == 0
        if self.kind == "le":
            return sign(value - self.bound) <= 0
        return sign(value - self.bound) >= 0

    def describe(self) -> str:
        if self.kind == "eq0":
            return f"W~[{self.row},{self.col}] = 0"
        op = "<=" if self.kind == "le" else ">="
        return f"W~[{self.row},{self.col}] {op} {format_entry(self.bound)}"


@dataclass(frozen=True)
class ConstraintTable:
    entries: tuple[Constraint, ...]
    rows: int = 6
    cols: int = 5

    def upper(self, i: int, j: int) -> Fraction:
        """Best upper bound on entry (i, j) (1-based); 1 when unconstrained."""
        ub = Fraction(1)
        for c in self.entries:
            if (c.row, c.col) == (i, j):
                if c.kind == "eq0":
                    ub = Fraction(0)
                elif c.kind == "le":
                    ub = min(ub, c.bound)
        return ub

    def lower(self, i: int, j: int) -> Fraction:
        lb = Fraction(0)
        for c in self.entries:
            if (c.row, c.col) == (i, j) and c.kind == "ge":
                lb = max(lb, c.bound)
        return lb

    def is_zero(self, i: int, j: int) -> bool:
        return self.upper(i, j) == 0

    def violations(self, Wt: ExactMatrix) -> list[tuple[Constraint, Number]]:
        return [(c, Wt[c.row - 1, c.col - 1]) for c in self.entries if not c.holds(Wt[c.row - 1, c.col - 1])]

    def to_csv(self) -> str:
        lines = ["row,col,kind,bound"]
        lines.extend(f"{c.row},{c.col},{c.kind},{format_entry(c.bound)}" for c in self.entries)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> ConstraintTable:
        out = []
        for ln in text.splitlines():
            ln = ln.strip()
            if not ln or ln.startswith("#") or ln.lower().startswith("row"):
                continue
            parts = [p.strip() for p in ln.split(",")]
            if len(parts) == 3:
                parts.append("0")
            if len(parts) != 4:
                raise ValueError(f"bad constraint line {ln!r}")
            bound = parse_entry(parts[3])
            if not isinstance(bound, Fraction):
                raise ValueError("constraint bounds must be rational")
            out.append(Constraint(int(parts[0]), int(parts[1]), parts[2], bound))
        return cls(tuple(out))


def figure4_constraints(eps: Fraction = EPSILON) -> ConstraintTable:
    """The entrywise constraint table, parameterized by epsilon."""
    F = Fraction
    spec = [
        (1, 1, "eq0", 0), (1, 2, "ge", F(8, 10)), (1, 3, "ge", F(286, 1000)), (1, 3, "le", F(287, 1000)),
        (1, 4, "eq0", 0), (1, 5, "eq0", 0),
        (2, 1, "le", eps), (2, 2, "eq0", 0), (2, 3, "eq0", 0), (2, 4, "ge", F(29, 100)), (2, 5, "ge", F(196, 1000)),
        (3, 2, "le", eps), (3, 3, "ge", F(335, 10000)), (3, 4, "ge", F(21, 100)), (3, 5, "le", F(15, 1000)),
        (4, 2, "ge", F(7, 100)), (4, 3, "le", eps), (4, 4, "ge", F(27, 100)), (4, 5, "le", F(22, 1000)),
        (5, 4, "le", eps), (5, 5, "ge", F(767, 1000)),
        (6, 1, "ge", F(62, 100)), (6, 3, "le", F(32, 100)), (6, 4, "le", F(21, 100)), (6, 5, "le", eps),
    ]
    return ConstraintTable(tuple(Constraint(i, j, k, F(b)) for i, j, k, b in spec))


def exact_constraints(Wt: ExactMatrix) -> ConstraintTable:
    """Pin every entry of a rational 6x5 matrix: eq0 for zeros, le+ge otherwise."""
    out = []
    for i in range(Wt.rows):
        for j in range(Wt.cols):
            v = Wt[i, j]
            if not isinstance(v, Fraction):
                raise ValueError("exact_constraints needs a rational matrix")
            if v == 0:
                out.append(Constraint(i + 1, j + 1, "eq0"))
            else:
                out.append(Constraint(i + 1, j + 1, "ge", v))
                out.append(Constraint(i + 1, j + 1, "le", v))
    return ConstraintTable(tuple(out), Wt.rows, Wt.cols)


# Certificate


@dataclass
class CheckResult:
    id: str
    description: str
    passed: bool
    defect: str | None = None
    details: dict = field(default_factory=dict)


@dataclass
class CertificateReport:
    checks: list[CheckResult]
    elapsed_ms: float = 0.0

    @property
    def valid(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, check_id: str) -> CheckResult:
        for c in self.checks:
            if c.id == check_id:
                return c
        raise KeyError(check_id)


def _first_difference(A: ExactMatrix, B: ExactMatrix) -> tuple[int, int, Number] | None:
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch {A.shape} vs {B.shape}")
    for i in range(A.rows):
        for j in range(A.cols):
            diff = A[i, j] - B[i, j]
            if diff != 0:
                return (i, j, diff)
    return None


def _equality_check(cid: str, desc: str, lhs: ExactMatrix, rhs: ExactMatrix) -> CheckResult:
    diff = _first_difference(lhs, rhs)
    if diff is None:
        return CheckResult(cid, desc, True)
    i, j, d = diff
    return CheckResult(cid, desc, False, f"({i + 1},{j + 1}): {format_entry(d)}", {"row": i + 1, "col": j + 1})


def _points_matrix(points: Sequence[Point3]) -> ExactMatrix:
    return ExactMatrix.from_columns([list(p) for p in points])


def verify_certificate(pc: PaperConstants | None = None, table: ConstraintTable | None = None) -> CertificateReport:
    """Run certificate checks (a)-(h) exactly; never raises on failure."""
    start = time.perf_counter()
    pc = constants() if pc is None else pc
    table = figure4_constraints() if table is None else table
    M = pc.M
    checks: list[CheckResult] = []

    H = pc.Hprime.hstack(pc.Heps)
    checks.append(_equality_check("a", "M = W (H' | Heps)", matmul(pc.W, H), M))

    bad = []
    for name, mat in (("M", M), ("Mprime", pc.Mprime), ("W", pc.W), ("Hprime", pc.Hprime),
                      ("Heps", pc.Heps), ("Weps", pc.Weps)):
        rep = is_stochastic(mat)
        if not rep:
            bad.append(f"{name} column {rep.column + 1}: {rep.reason} ({format_entry(rep.defect)})")
    checks.append(CheckResult("b", "M, M', W, H', Heps, Weps stochastic", not bad, "; ".join(bad) or None))

    rk = rank(M)
    checks.append(CheckResult("c", "rank(M) = 4", rk == 4, None if rk == 4 else f"rank {rk}"))

    fr = _points_matrix([apply_f(pc.f, r) for r in pc.r])
    checks.append(_equality_check("d", "f(r_i) = M'[:, i], i = 1..6", fr, pc.Mprime))

    fqe = _points_matrix([apply_f(pc.f, q) for q in pc.qeps])
    fqs = _points_matrix([apply_f(pc.f, q) for q in pc.qstar])
    res_e = _equality_check("e", "", fqe, pc.Weps)
    res_s = _equality_check("e", "", fqs, pc.W)
    defect = "; ".join(f"{lbl} {r.defect}" for lbl, r in (("qeps", res_e), ("qstar", res_s)) if not r.passed)
    checks.append(CheckResult("e", "f(q_i^eps) = Weps[:, i] and f(q_i^*) = W[:, i]",
                              res_e.passed and res_s.passed, defect or None))

    Q = _points_matrix(pc.qstar)
    r1 = _equality_check("f", "", _points_matrix(pc.r), matmul(Q, pc.Hprime))
    r2 = _equality_check("f", "", _points_matrix(pc.qeps), matmul(Q, pc.Heps))
    defect = "; ".join(f"{lbl} {r.defect}" for lbl, r in (("r = q* H'", r1), ("qeps = q* Heps", r2)) if not r.passed)
    checks.append(CheckResult("f", "(r_1..r_6) = (q*_1..q*_5) H' and (qeps_1..qeps_5) = (q*_1..q*_5) Heps",
                              r1.passed and r2.passed, defect or None))

    outside = []
    for label, pts in (("q*", pc.qstar), ("qeps", pc.qeps), ("r", pc.r)):
        for idx, p in enumerate(pts, start=1):
            mem = membership_in_P(p)
            if not mem:
                outside.append(f"{label}_{idx} violates {', '.join(mem.violated_facets)}")
    # columns of M must also map into P': M columns are nonnegative
    for j in range(M.cols):
        for i, e in enumerate(M.column(j)):
            if sign(e) < 0:
                outside.append(f"M column {j + 1} negative at row {i + 1}")
    checks.append(CheckResult("g", "all q*_i, qeps_i, r_i lie in P (Cx + d >= 0)", not outside,
                              "; ".join(outside) or None))

    viol = table.violations(pc.Weps)
    checks.append(CheckResult("h", "Weps satisfies the entrywise constraint table", not viol,
                              "; ".join(f"{c.describe()} fails with {format_entry(v)}" for c, v in viol) or None))

    return CertificateReport(checks, (time.perf_counter() - start) * 1000)
