"""Floating-point NMF by Frobenius multiplicative updates.

A numerical shadow of the exact modules: it fits ``V ~ Wf @ Hf`` with
nonnegative factors of a given inner dimension and aligns a recovered left
factor with a reference one up to column permutation and scaling.
Restarts are run as one batched computation; each restart draws its
initial factors from its own counter-based stream so results do not depend
on how many restarts run alongside it.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .linalg import ExactMatrix

__all__ = [
    "SolveConfig",
    "SolveResult",
    "Alignment",
    "ZeroColumn",
    "NonFinite",
    "DEFAULT_SEED",
    "default_seed",
    "to_float",
    "nmf_solve",
    "align_to_reference",
]

DEFAULT_SEED = 0
DENOM_FLOOR = 1e-16


class ZeroColumn(ValueError):
    pass


class NonFinite(FloatingPointError):
    pass


def default_seed() -> int:
    """``NNRANK_SEED`` from the environment, else :data:`DEFAULT_SEED`."""
    raw = os.environ.get("NNRANK_SEED")
    return int(raw) if raw not in (None, "") else DEFAULT_SEED


def to_float(A: ExactMatrix | np.ndarray) -> np.ndarray:
    if isinstance(A, ExactMatrix):
        return np.array(A.to_float_rows(), dtype=float)
    return np.asarray(A, dtype=float)


@dataclass(frozen=True)
class SolveConfig:
    inner_dim: int
    max_iters: int = 50_000
    tol: float = 1e-10
    restarts: int = 32
    seed: int = field(default_factory=default_seed)

    def __post_init__(self) -> None:
        if self.inner_dim < 1 or self.max_iters < 1 or self.restarts < 1:
            raise ValueError("inner_dim, max_iters and restarts must be positive")
        if not self.tol > 0:
            raise ValueError("tol must be positive")


@dataclass
class SolveResult:
    W: np.ndarray
    H: np.ndarray
    residual: float
    best_restart: int
    histories: list[np.ndarray]  # per restart, residual after each update

    @property
    def history(self) -> np.ndarray:
        return self.histories[self.best_restart]

    @property
    def residuals(self) -> np.ndarray:
        return np.array([h[-1] for h in self.histories])


def _stream(seed: int, restart: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, restart])))


def nmf_solve(V: np.ndarray | ExactMatrix, cfg: SolveConfig) -> SolveResult:
    """Best of ``cfg.restarts`` Lee-Seung runs (ties go to the lower index).

    A restart stops once the relative decrease of its residual drops below
    ``cfg.tol`` or after ``cfg.max_iters`` updates.
    """
    V = to_float(V)
    if V.ndim != 2 or V.size == 0:
        raise ValueError("V must be a nonempty matrix")
    if not np.all(np.isfinite(V)):
        raise NonFinite("V has non-finite entries")
    if np.any(V < 0):
        raise ValueError("V must be nonnegative")
    m, n = V.shape
    d, R = cfg.inner_dim, cfg.restarts

    W = np.empty((R, m, d))
    H = np.empty((R, d, n))
    for r in range(R):
        g = _stream(cfg.seed, r)
        W[r] = g.uniform(0.1, 1.0, size=(m, d))
        H[r] = g.uniform(0.1, 1.0, size=(d, n))

    def residual(W: np.ndarray, H: np.ndarray) -> np.ndarray:
        return np.sqrt(((V - W @ H) ** 2).sum(axis=(1, 2)))

    active = np.ones(R, dtype=bool)
    prev = residual(W, H)
    hist = [prev.copy()]
    stopped_at = np.full(R, cfg.max_iters)
    for it in range(1, cfg.max_iters + 1):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        Wa, Ha = W[idx], H[idx]
        WT = Wa.transpose(0, 2, 1)
        Ha = Ha * (WT @ V) / (WT @ Wa @ Ha + DENOM_FLOOR)
        HT = Ha.transpose(0, 2, 1)
        Wa = Wa * (V @ HT) / (Wa @ Ha @ HT + DENOM_FLOOR)
        W[idx], H[idx] = Wa, Ha
        cur = prev.copy()
        cur[idx] = residual(Wa, Ha)
        if not np.all(np.isfinite(cur)):
            raise NonFinite(f"residual blew up at iteration {it}")
        hist.append(cur)
        done = idx[(prev[idx] - cur[idx]) <= cfg.tol * np.maximum(prev[idx], np.finfo(float).tiny)]
        active[done] = False
        stopped_at[done] = it
        prev = cur

    table = np.array(hist)
    histories = [table[: stopped_at[r] + 1, r] for r in range(R)]
    final = np.array([h[-1] for h in histories])
    best = int(np.argmin(final))  # first minimal index
    return SolveResult(W[best].copy(), H[best].copy(), float(final[best]), best, histories)


@dataclass(frozen=True)
class Alignment:
    permutation: tuple[int, ...]  # column p[j] of Wf matches column j of Wref
    scalings: tuple[float, ...]  # column sums of Wf before normalization
    max_abs_deviation: float


def _stochastic(A: np.ndarray, name: str) -> tuple[np.ndarray, np.ndarray]:
    sums = A.sum(axis=0)
    zero = np.flatnonzero(sums <= 0)
    if zero.size:
        raise ZeroColumn(f"{name} has a zero column at index {int(zero[0]) + 1}")
    return A / sums, sums


def align_to_reference(Wf: np.ndarray | ExactMatrix, Wref: np.ndarray | ExactMatrix) -> Alignment:
    """Match normalized columns by minimum total L2 distance."""
    A, B = to_float(Wf), to_float(Wref)
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch: {A.shape} vs {B.shape}")
    A, scales = _stochastic(A, "Wf")
    B, _ = _stochastic(B, "Wref")
    cost = np.linalg.norm(A[:, :, None] - B[:, None, :], axis=0)
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty(B.shape[1], dtype=int)
    perm[cols] = rows
    dev = float(np.max(np.abs(A[:, perm] - B)))
    return Alignment(tuple(int(p) for p in perm), tuple(float(s) for s in scales[perm]), dev)
