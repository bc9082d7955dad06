"""Exact interval propagation for type-4 factorizations ``Wt = L @ R``.

``L`` is a stochastic 6x5 matrix with the type-4 zero pattern (``L[1,1] > 0``,
``L[2,2] > 0`` and every other entry of rows 1 and 2 zero), ``R`` is a
stochastic 5x5 matrix and ``Wt`` obeys an entrywise :class:`ConstraintTable`.
Every rule reads the current interval bounds, derives a valid bound on one
entry (or a contradiction) and returns a new :class:`BoundState`; bounds are
only ever tightened.

All indices in the public API are 1-based, matching the usual ``L[i,k]``
notation.  :func:`replay_type4_proof` runs the fixed script that ends in a
contradiction in every case split; :func:`fixpoint` applies the generic rules
blindly and carries no correctness claim.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Sequence

from .exactnum import format_entry
from .paperdata import EPSILON, ConstraintTable

__all__ = [
    "BoundState",
    "Firing",
    "Contradiction",
    "RuleInapplicable",
    "ZeroLowerBound",
    "UnsupportedDecomposition",
    "ProofAssertionError",
    "ClaimCheck",
    "BranchOutcome",
    "ProofOutcome",
    "FixpointOutcome",
    "initial_state",
    "simple_upper_bound",
    "zero_product_rule",
    "column_sum_rule",
    "group_lower_bound",
    "lower_bound_L",
    "lower_bound_R",
    "assume_max",
    "linear_functional_rule",
    "functional_lhs_bound",
    "replay_type4_proof",
    "fixpoint",
]

L_SHAPE = (6, 5)
R_SHAPE = (5, 5)
_ONE = Fraction(1)
_ZERO = Fraction(0)
FIXPOINT_CAP = 10_000

Grid = tuple[tuple[Fraction, ...], ...]


class Contradiction(Exception):
    """The current bounds admit no factorization."""

    def __init__(self, reason: str, firing: Firing | None = None) -> None:
        super().__init__(reason)
        self.reason = reason
        self.firing = firing


class RuleInapplicable(ValueError):
    """The rule's preconditions do not hold in the current state."""


class ZeroLowerBound(RuleInapplicable):
    """Division by a factor whose lower bound is zero."""


class UnsupportedDecomposition(RuleInapplicable):
    """The functional does not have the one-positive-coefficient shape."""


@dataclass(frozen=True)
class Firing:
    """One bound change: ``target`` is e.g. ``"L[2,2]"``, ``side`` is lo/up."""

    rule: str
    target: str
    side: str
    before: Fraction
    after: Fraction
    via: str
    branch: str = ""

    def to_dict(self) -> dict:
        return {
            "rule": self.rule,
            "target": self.target,
            "side": self.side,
            "before": format_entry(self.before),
            "after": format_entry(self.after),
            "after_approx": float(self.after),
            "via": self.via,
            "branch": self.branch,
        }


def _grid(rows: int, cols: int, value: Fraction) -> Grid:
    return tuple(tuple(value for _ in range(cols)) for _ in range(rows))


def _set(g: Grid, i: int, k: int, value: Fraction) -> Grid:
    row = list(g[i])
    row[k] = value
    return g[:i] + (tuple(row),) + g[i + 1:]


@dataclass(frozen=True)
class BoundState:
    L_lo: Grid
    L_up: Grid
    R_lo: Grid
    R_up: Grid
    W_lo: Grid
    W_up: Grid
    positive: frozenset[tuple[int, int]]  # 1-based L entries known to be > 0
    assumptions: tuple[str, ...] = ()
    trace: tuple[Firing, ...] = ()
    branch: str = "root"

    # accessors, 1-based

    def L(self, i: int, k: int) -> tuple[Fraction, Fraction]:
        return self.L_lo[i - 1][k - 1], self.L_up[i - 1][k - 1]

    def R(self, k: int, j: int) -> tuple[Fraction, Fraction]:
        return self.R_lo[k - 1][j - 1], self.R_up[k - 1][j - 1]

    def W(self, i: int, j: int) -> tuple[Fraction, Fraction]:
        return self.W_lo[i - 1][j - 1], self.W_up[i - 1][j - 1]

    def bound(self, which: str, a: int, b: int) -> tuple[Fraction, Fraction]:
        return self.L(a, b) if which == "L" else self.R(a, b)

    def tighten(self, which: str, a: int, b: int, side: str, value: Fraction, rule: str, via: str) -> BoundState:
        """Intersect one bound with ``value``; raises on an empty interval."""
        value = Fraction(value)
        lo, up = self.bound(which, a, b)
        target = f"{which}[{a},{b}]"
        if side == "up":
            if value >= up:
                return self
            new_lo, new_up = lo, value
            firing = Firing(rule, target, "up", up, value, via, self.branch)
        else:
            if value <= lo:
                return self
            new_lo, new_up = value, up
            firing = Firing(rule, target, "lo", lo, value, via, self.branch)
        grid_lo, grid_up = (self.L_lo, self.L_up) if which == "L" else (self.R_lo, self.R_up)
        grid_lo = _set(grid_lo, a - 1, b - 1, new_lo)
        grid_up = _set(grid_up, a - 1, b - 1, new_up)
        if which == "L":
            state = replace(self, L_lo=grid_lo, L_up=grid_up, trace=self.trace + (firing,))
        else:
            state = replace(self, R_lo=grid_lo, R_up=grid_up, trace=self.trace + (firing,))
        if new_lo > new_up:
            raise Contradiction(f"{target}: lower {new_lo} exceeds upper {new_up}", firing)
        if which == "L" and new_up == 0 and (a, b) in self.positive:
            raise Contradiction(f"{target} must be positive but is bounded by 0", firing)
        return state

    def with_branch(self, name: str, assumption: str | None = None) -> BoundState:
        extra = (assumption,) if assumption else ()
        return replace(self, branch=name, assumptions=self.assumptions + extra)

    def contains(self, L: Sequence[Sequence[Fraction]], R: Sequence[Sequence[Fraction]]) -> bool:
        """Whether concrete factors lie inside the current boxes."""
        for i, k in itertools.product(range(6), range(5)):
            if not (self.L_lo[i][k] <= L[i][k] <= self.L_up[i][k]):
                return False
        for k, j in itertools.product(range(5), range(5)):
            if not (self.R_lo[k][j] <= R[k][j] <= self.R_up[k][j]):
                return False
        return True

    def bounds_dict(self) -> dict:
        def grid(lo: Grid, up: Grid) -> list[list[list[str]]]:
            return [[[format_entry(l), format_entry(u)] for l, u in zip(rl, ru)] for rl, ru in zip(lo, up)]

        return {"L": grid(self.L_lo, self.L_up), "R": grid(self.R_lo, self.R_up)}


def initial_state(table: ConstraintTable) -> BoundState:
    """All bounds [0, 1] plus the type-4 zero pattern of ``L``."""
    L_lo, L_up = _grid(6, 5, _ZERO), _grid(6, 5, _ONE)
    for i, k in itertools.product((1, 2), range(1, 6)):
        if k != i:
            L_up = _set(L_up, i - 1, k - 1, _ZERO)
    W_lo = tuple(tuple(table.lower(i, j) for j in range(1, 6)) for i in range(1, 7))
    W_up = tuple(tuple(table.upper(i, j) for j in range(1, 6)) for i in range(1, 7))
    for i, j in itertools.product(range(6), range(5)):
        if W_lo[i][j] > W_up[i][j]:
            raise Contradiction(f"constraint table is empty at W~[{i + 1},{j + 1}]")
    return BoundState(L_lo, L_up, _grid(5, 5, _ZERO), _grid(5, 5, _ONE), W_lo, W_up, frozenset({(1, 1), (2, 2)}))


# Rules


def simple_upper_bound(
    state: BoundState, i: int, k: int, j: int, Wbound: Fraction | None = None, direction: str = "bound_L"
) -> BoundState:
    """From ``L[i,k] * R[k,j] <= Wt[i,j]``: bound one factor by dividing by
    the lower bound of the other."""
    W = state.W(i, j)[1] if Wbound is None else Fraction(Wbound)
    via = f"W~[{i},{j}] <= {W}"
    if direction == "bound_L":
        other = state.R(k, j)[0]
        if other == 0:
            raise ZeroLowerBound(f"R[{k},{j}] has lower bound 0")
        return state.tighten("L", i, k, "up", W / other, "simple_upper_bound", via)
    if direction == "bound_R":
        other = state.L(i, k)[0]
        if other == 0:
            raise ZeroLowerBound(f"L[{i},{k}] has lower bound 0")
        return state.tighten("R", k, j, "up", W / other, "simple_upper_bound", via)
    raise ValueError(f"unknown direction {direction!r}")


def zero_product_rule(state: BoundState, i: int, k: int, j: int) -> BoundState:
    """``Wt[i,j] = 0`` and ``L[i,k] > 0`` force ``R[k,j] = 0``."""
    if state.W(i, j)[1] != 0:
        raise RuleInapplicable(f"W~[{i},{j}] is not constrained to 0")
    if (i, k) not in state.positive and state.L(i, k)[0] == 0:
        raise ZeroLowerBound(f"L[{i},{k}] is not known to be positive")
    return state.tighten("R", k, j, "up", _ZERO, "zero_product", f"W~[{i},{j}] = 0, L[{i},{k}] > 0")


def column_sum_rule(state: BoundState, which: str, col: int) -> BoundState:
    """Columns of L and R sum to one."""
    rows = 6 if which == "L" else 5
    if which not in ("L", "R"):
        raise ValueError("which must be 'L' or 'R'")
    cells = [state.bound(which, r, col) for r in range(1, rows + 1)]
    sum_lo = sum(lo for lo, _ in cells)
    sum_up = sum(up for _, up in cells)
    if sum_lo > 1:
        raise Contradiction(f"lower bounds of {which}[:,{col}] sum to {sum_lo} > 1")
    if sum_up < 1:
        raise Contradiction(f"upper bounds of {which}[:,{col}] sum to {sum_up} < 1")
    via = f"{which}[:,{col}] sums to 1"
    for r, (lo, up) in enumerate(cells, start=1):
        state = state.tighten(which, r, col, "lo", 1 - (sum_up - up), "column_sum", via)
        state = state.tighten(which, r, col, "up", 1 - (sum_lo - lo), "column_sum", via)
    return state


def group_lower_bound(state: BoundState, i: int, group: Iterable[int], j: int) -> Fraction:
    """Lower bound on ``max(L[i,k] for k in group)`` from ``Wt[i,j] >= lo``.

    Columns outside the group contribute at most ``L_up * R_up``; the group
    contributes at most its max times the R-mass it can carry.
    """
    group = sorted(set(group))
    rest = [k for k in range(1, 6) if k not in group]
    outside = sum((state.L(i, k)[1] * state.R(k, j)[1] for k in rest), _ZERO)
    mass = min(1 - sum((state.R(k, j)[0] for k in rest), _ZERO), sum((state.R(k, j)[1] for k in group), _ZERO))
    need = state.W(i, j)[0] - outside
    if need <= 0:
        return _ZERO
    if mass <= 0:
        raise Contradiction(f"W~[{i},{j}] >= {state.W(i, j)[0]} but columns {group} carry no mass")
    return need / mass


def lower_bound_L(state: BoundState, i: int, k: int, j: int) -> BoundState:
    bound = group_lower_bound(state, i, (k,), j)
    return state.tighten("L", i, k, "lo", bound, "lower_bound", f"W~[{i},{j}] >= {state.W(i, j)[0]}")


def lower_bound_R(state: BoundState, i: int, t: int, j: int) -> BoundState:
    """``R[t,j] >= (Wt_lo[i,j] - sum_{k != t} L_up[i,k] R_up[k,j]) / L_up[i,t]``."""
    outside = sum((state.L(i, k)[1] * state.R(k, j)[1] for k in range(1, 6) if k != t), _ZERO)
    need = state.W(i, j)[0] - outside
    if need <= 0:
        return state
    cap = state.L(i, t)[1]
    if cap == 0:
        raise Contradiction(f"W~[{i},{j}] needs R[{t},{j}] but L[{i},{t}] = 0")
    return state.tighten("R", t, j, "lo", need / cap, "lower_bound", f"W~[{i},{j}] >= {state.W(i, j)[0]}")


def assume_max(state: BoundState, i: int, k: int, bound: Fraction, tag: str) -> BoundState:
    """Branch on which entry attains a max that is known to be >= bound."""
    state = state.with_branch(tag, tag if tag not in state.assumptions else None)
    return state.tighten("L", i, k, "lo", bound, "case_split", tag)


def functional_lhs_bound(state: BoundState, coeffs: Sequence[Fraction], j: int) -> Fraction:
    """Lower bound on ``sum_i c_i Wt[i,j]`` read off the table."""
    total = _ZERO
    for i, c in enumerate(coeffs, start=1):
        lo, up = state.W(i, j)
        total += c * (lo if c > 0 else up)
    return total


def linear_functional_rule(
    state: BoundState,
    coeffs: Sequence[Fraction],
    j: int,
    lhs_bound: Fraction | None = None,
    support: Iterable[int] | None = None,
    target: int | None = None,
) -> BoundState:
    """Lower-bound ``L[p,target]`` where ``p`` is the only row with a positive
    coefficient.

    ``c @ Wt[:,j] = sum_k R[k,j] (c @ L[:,k])``; each ``c @ L[:,k]`` for
    ``k != target`` is at most ``U_k`` from the boxes and the target term is
    at most ``c_p L[p,target]``, so ``lhs <= max(0, max U_k) + c_p L[p,target]``.
    """
    coeffs = [Fraction(c) for c in coeffs]
    if len(coeffs) != 6:
        raise ValueError("need one coefficient per row of L")
    if all(c == 0 for c in coeffs):
        return state
    pos = [i for i, c in enumerate(coeffs, start=1) if c > 0]
    if len(pos) != 1:
        raise UnsupportedDecomposition("exactly one positive coefficient is supported")
    p = pos[0]
    support = sorted(set(range(1, 6) if support is None else support))
    if target is None or target not in support:
        raise UnsupportedDecomposition("target column must be part of the support")
    for k in range(1, 6):
        if k not in support and state.R(k, j)[1] != 0:
            raise RuleInapplicable(f"R[{k},{j}] is not known to vanish outside the support")
    lhs = functional_lhs_bound(state, coeffs, j) if lhs_bound is None else Fraction(lhs_bound)
    caps = []
    for k in support:
        if k == target:
            continue
        caps.append(sum((c * (state.L(i, k)[1] if c > 0 else state.L(i, k)[0]) for i, c in enumerate(coeffs, start=1)), _ZERO))
    drop = max([_ZERO] + caps)
    bound = (lhs - drop) / coeffs[p - 1]
    via = f"functional {[str(c) for c in coeffs]} on W~[:,{j}] >= {lhs}"
    return state.tighten("L", p, target, "lo", bound, "linear_functional", via)


# Scripted replay


# Cases not run explicitly: permuting columns 3..5 of L together with rows
# 3..5 of R keeps Wt and the type-4 pattern, so each is a relabeling.
SYMMETRY_REDUCTIONS = (
    "A1: max{L63,L64,L65} at L64 or L65 is a relabeling of columns 3..5",
    "A2: max{L54,L55} at L55 is a relabeling of columns 4 and 5",
)


class ProofAssertionError(AssertionError):
    """A stated bound could not be re-derived."""

    def __init__(self, step: str, derived: Fraction | None, trace: tuple[Firing, ...], detail: str = "") -> None:
        msg = f"failed at step {step!r}"
        if derived is not None:
            msg += f" (derived {derived} ~ {float(derived):.6g})"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.step = step
        self.derived = derived
        self.trace = trace


@dataclass(frozen=True)
class ClaimCheck:
    label: str
    derived: Fraction
    threshold: Fraction
    relation: str
    branch: str

    @property
    def ok(self) -> bool:
        return self.derived >= self.threshold if self.relation == ">=" else self.derived <= self.threshold

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "relation": self.relation,
            "threshold": format_entry(self.threshold),
            "derived": format_entry(self.derived),
            "derived_approx": float(self.derived),
            "ok": self.ok,
            "branch": self.branch,
        }


@dataclass
class BranchOutcome:
    name: str
    assumptions: tuple[str, ...]
    contradiction: str | None
    steps: int

    def to_dict(self) -> dict:
        return {"name": self.name, "assumptions": list(self.assumptions), "contradiction": self.contradiction, "steps": self.steps}


@dataclass
class ProofOutcome:
    branches: list[BranchOutcome]
    claims: list[ClaimCheck]
    trace: tuple[Firing, ...]
    eps: Fraction
    symmetry_reductions: tuple[str, ...] = SYMMETRY_REDUCTIONS

    @property
    def contradiction_in_all_branches(self) -> bool:
        return bool(self.branches) and all(b.contradiction for b in self.branches)

    def claim(self, label: str) -> ClaimCheck:
        for c in self.claims:
            if c.label == label:
                return c
        raise KeyError(label)

    def to_dict(self) -> dict:
        return {
            "contradiction_in_all_branches": self.contradiction_in_all_branches,
            "eps": format_entry(self.eps),
            "branches": [b.to_dict() for b in self.branches],
            "symmetry_reductions": list(self.symmetry_reductions),
            "claims": [c.to_dict() for c in self.claims],
            "trace": [f.to_dict() for f in self.trace],
        }


class _Replay:
    def __init__(self, eps: Fraction) -> None:
        self.eps = eps
        self.claims: list[ClaimCheck] = []
        self.branches: list[BranchOutcome] = []
        self.trace: list[Firing] = []
        self.flushed = 0

    def flush(self, state: BoundState) -> None:
        """Move main-line firings into the trace, in execution order."""
        self.trace.extend(state.trace[self.flushed:])
        self.flushed = len(state.trace)

    def check(self, state: BoundState, label: str, value: Fraction, relation: str, threshold: Fraction) -> None:
        c = ClaimCheck(label, value, Fraction(threshold), relation, state.branch)
        self.claims.append(c)
        if not c.ok:
            self.flush(state)
            raise ProofAssertionError(label, value, tuple(self.trace))

    def lo(self, state: BoundState, label: str, which: str, a: int, b: int, threshold: Fraction) -> None:
        self.check(state, label, state.bound(which, a, b)[0], ">=", threshold)

    def up(self, state: BoundState, label: str, which: str, a: int, b: int, threshold: Fraction) -> None:
        self.check(state, label, state.bound(which, a, b)[1], "<=", threshold)

    def refute(self, parent: BoundState, name: str, steps) -> None:
        """Run ``steps`` in a new branch and require a contradiction."""
        self.flush(parent)
        state = parent.with_branch(name)
        try:
            steps(state)
        except Contradiction as exc:
            if exc.firing is not None:
                self.trace.append(exc.firing)
            self.branches.append(BranchOutcome(name, parent.assumptions + (name,), exc.reason, 1))
            return
        raise ProofAssertionError(f"contradiction in branch {name}", None, tuple(self.trace))


def replay_type4_proof(constraints: ConstraintTable, eps: Fraction = EPSILON) -> ProofOutcome:
    """Replay the scripted refutation of type-4 factorizations.

    Every intermediate bound is compared with its stated threshold (the
    thresholds that scale with epsilon use ``eps``).  Raises
    :class:`ProofAssertionError` naming the first threshold that fails.
    """
    F = Fraction
    eps = F(eps)
    rp = _Replay(eps)
    for i, j in ((1, 1), (1, 4), (1, 5), (2, 2), (2, 3)):
        if constraints.upper(i, j) != 0:
            raise ProofAssertionError(f"W~[{i},{j}] = 0 in the table", None, ())
    try:
        _script(rp, initial_state(constraints), F, eps)
    except Contradiction as exc:
        # sound, but not the scripted refutation
        raise ProofAssertionError("unexpected contradiction", None, tuple(rp.trace), exc.reason) from exc
    return ProofOutcome(rp.branches, rp.claims, tuple(rp.trace), eps)


def _script(rp: _Replay, s: BoundState, F, eps: Fraction) -> None:
    # R[2,4], R[2,5]: L[:,2] is the only column with a positive second entry
    s = lower_bound_R(s, 2, 2, 4)
    s = lower_bound_R(s, 2, 2, 5)
    rp.lo(s, "R24 >= 29/100", "R", 2, 4, F(29, 100))
    rp.lo(s, "R25 >= 196/1000", "R", 2, 5, F(196, 1000))

    # second column of L
    s = simple_upper_bound(s, 3, 2, 5)
    s = simple_upper_bound(s, 4, 2, 5)
    s = simple_upper_bound(s, 6, 2, 5)
    s = simple_upper_bound(s, 5, 2, 4)
    rp.up(s, "L32 <= 77/1000", "L", 3, 2, F(77, 1000))
    rp.up(s, "L42 <= 12/100", "L", 4, 2, F(12, 100))
    rp.up(s, "L52 <= 4eps", "L", 5, 2, 4 * eps)
    rp.up(s, "L62 <= 6eps", "L", 6, 2, 6 * eps)
    s = column_sum_rule(s, "L", 2)
    rp.lo(s, "L22 >= 8/10", "L", 2, 2, F(8, 10))

    # L[6,3] through W~[6,1]
    s = simple_upper_bound(s, 2, 2, 1, direction="bound_R")
    s = zero_product_rule(s, 1, 1, 1)
    rp.up(s, "R21 <= 2eps", "R", 2, 1, 2 * eps)
    m63 = group_lower_bound(s, 6, (3, 4, 5), 1)
    rp.check(s, "max{L63,L64,L65} >= 62/100 - 6eps*2eps", m63, ">=", F(62, 100) - 12 * eps * eps)
    # (A1): columns 3..5 of L are interchangeable, so the max sits in column 3
    s = assume_max(s, 6, 3, m63, "A1: L63 = max{L63,L64,L65}")
    rp.lo(s, "L63 >= 61/100", "L", 6, 3, F(61, 100))

    # L[5,4] through W~[5,5]
    s = zero_product_rule(s, 1, 1, 5)
    m5 = group_lower_bound(s, 5, (3, 4, 5), 5)
    rp.check(s, "max{L53,L54,L55} >= 9539/10000", m5, ">=", F(9539, 10000))
    rp.refute(s, "max{L53,L54,L55} = L53", lambda b: column_sum_rule(assume_max(b, 5, 3, m5, b.branch), "L", 3))
    # (A2): columns 4 and 5 are still interchangeable
    s = assume_max(s, 5, 4, m5, "A2: L54 = max{L54,L55}")
    rp.lo(s, "L54 >= 9539/10000", "L", 5, 4, F(9539, 10000))

    # table (16): upper bounds in column 4 and the column-3 complement of L63
    s = column_sum_rule(s, "L", 4)
    s = column_sum_rule(s, "L", 3)
    rp.up(s, "L34 <= 461/10000", "L", 3, 4, F(461, 10000))
    rp.up(s, "L44 <= 461/10000", "L", 4, 4, F(461, 10000))

    # R[5,2] via a lower bound on L[3,5]
    s = zero_product_rule(s, 1, 1, 4)
    c3 = (0, 0, 2, 0, 0, -1)
    lhs3 = functional_lhs_bound(s, c3, 4)
    rp.check(s, "2W~34 - W~64 >= 21/100", lhs3, ">=", F(21, 100))
    s = linear_functional_rule(s, c3, 4, lhs3, support=(2, 3, 4, 5), target=5)
    rp.lo(s, "L35 >= 2/100", "L", 3, 5, F(2, 100))
    s = simple_upper_bound(s, 3, 5, 2, direction="bound_R")
    rp.up(s, "R52 <= 50eps", "R", 5, 2, 50 * eps)

    # R[5,3] via a lower bound on L[4,5]
    c4 = (0, 0, 0, 2, 0, -1)
    lhs4 = functional_lhs_bound(s, c4, 4)
    rp.check(s, "2W~44 - W~64 >= 33/100", lhs4, ">=", F(33, 100))
    s = linear_functional_rule(s, c4, 4, lhs4, support=(2, 3, 4, 5), target=5)
    rp.lo(s, "L45 >= 45/1000", "L", 4, 5, F(45, 1000))
    s = simple_upper_bound(s, 4, 5, 3, direction="bound_R")
    rp.up(s, "R53 <= 23eps", "R", 5, 3, 23 * eps)

    # columns 2 and 3 of W~: only L[:,1] has a positive first entry
    s = lower_bound_R(s, 1, 1, 2)
    s = lower_bound_R(s, 1, 1, 3)
    rp.lo(s, "R12 >= 8/10", "R", 1, 2, F(8, 10))
    rp.lo(s, "R13 >= 286/1000", "R", 1, 3, F(286, 1000))
    s = lower_bound_L(s, 1, 1, 2)
    s = simple_upper_bound(s, 3, 1, 2)
    rp.up(s, "L31 <= 2eps", "L", 3, 1, 2 * eps)
    s = simple_upper_bound(s, 1, 1, 3, direction="bound_R")
    rp.up(s, "R13 <= 36/100", "R", 1, 3, F(36, 100))
    s = simple_upper_bound(s, 6, 3, 3, direction="bound_R")
    rp.up(s, "R33 <= 53/100", "R", 3, 3, F(53, 100))
    s = zero_product_rule(s, 2, 2, 3)
    s = column_sum_rule(s, "R", 3)
    rp.lo(s, "R43 >= 1/10", "R", 4, 3, F(1, 10))
    s = simple_upper_bound(s, 4, 4, 3)
    s = simple_upper_bound(s, 4, 1, 3)
    rp.up(s, "L44 <= 10eps", "L", 4, 4, 10 * eps)
    rp.up(s, "L41 <= 4eps", "L", 4, 1, 4 * eps)

    # L[4,3] through W~[4,2], max{L33, L34} through W~[3,3]
    s = zero_product_rule(s, 2, 2, 2)
    s = column_sum_rule(s, "R", 2)
    s = lower_bound_L(s, 4, 3, 2)
    rp.lo(s, "L43 >= 346/1000", "L", 4, 3, F(346, 1000))
    m3 = group_lower_bound(s, 3, (3, 4), 3)
    rp.check(s, "max{L33,L34} >= 465/10000", m3, ">=", F(465, 10000))

    rp.refute(s, "max{L33,L34} = L33", lambda b: column_sum_rule(assume_max(b, 3, 3, m3, b.branch), "L", 3))
    rp.refute(s, "max{L33,L34} = L34", lambda b: column_sum_rule(assume_max(b, 3, 4, m3, b.branch), "L", 4))


# Blind fixpoint


@dataclass
class FixpointOutcome:
    contradiction: str | None
    firings: int
    converged: bool
    state: BoundState | None = field(repr=False, default=None)

    def to_dict(self) -> dict:
        return {"contradiction": self.contradiction, "firings": self.firings, "converged": self.converged}


def _generic_rules(state: BoundState):
    for i, k, j in itertools.product(range(1, 7), range(1, 6), range(1, 6)):
        if state.W(i, j)[1] == 0 and ((i, k) in state.positive or state.L(i, k)[0] > 0):
            yield lambda s, i=i, k=k, j=j: zero_product_rule(s, i, k, j)
        if state.R(k, j)[0] > 0:
            yield lambda s, i=i, k=k, j=j: simple_upper_bound(s, i, k, j, direction="bound_L")
        if state.L(i, k)[0] > 0:
            yield lambda s, i=i, k=k, j=j: simple_upper_bound(s, i, k, j, direction="bound_R")
        if state.W(i, j)[0] > 0:
            yield lambda s, i=i, k=k, j=j: lower_bound_L(s, i, k, j)
            yield lambda s, i=i, k=k, j=j: lower_bound_R(s, i, k, j)
    for c in range(1, 6):
        yield lambda s, c=c: column_sum_rule(s, "L", c)
        yield lambda s, c=c: column_sum_rule(s, "R", c)


def fixpoint(constraints: ConstraintTable, cap: int = FIXPOINT_CAP) -> FixpointOutcome:
    """Apply every generic rule until nothing changes (no case splits)."""
    state = initial_state(constraints)
    fired = 0
    try:
        while fired < cap:
            before = fired
            for rule in list(_generic_rules(state)):
                new = rule(state)
                fired += len(new.trace) - len(state.trace)
                state = new
                if fired >= cap:
                    break
            if fired == before:
                return FixpointOutcome(None, fired, True, state)
    except Contradiction as exc:
        return FixpointOutcome(exc.reason, fired + 1, True, None)
    return FixpointOutcome(None, fired, False, state)
