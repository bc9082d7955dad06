import numpy as np
import pytest

from nnrank.numnmf import (
    DEFAULT_SEED,
    NonFinite,
    SolveConfig,
    ZeroColumn,
    align_to_reference,
    default_seed,
    nmf_solve,
    to_float,
)
from nnrank.paperdata import constants


def test_rank_one_fit_is_exact():
    V = np.outer([1.0, 2.0, 3.0], [0.5, 1.0, 0.25, 2.0])
    res = nmf_solve(V, SolveConfig(1, max_iters=2000, restarts=4, seed=0))
    assert res.residual < 1e-12


def test_histories_monotone_and_factors_nonnegative():
    pc = constants()
    res = nmf_solve(pc.M, SolveConfig(5, max_iters=400, restarts=6, seed=1))
    for h in res.histories:
        assert np.max(np.diff(h)) <= 1e-12
    assert (res.W >= 0).all() and (res.H >= 0).all()
    assert res.residual == res.residuals.min()
    assert res.history[-1] == res.residual


def test_reproducible_and_restart_independent():
    V = to_float(constants().M)
    a = nmf_solve(V, SolveConfig(4, max_iters=200, restarts=3, seed=7))
    b = nmf_solve(V, SolveConfig(4, max_iters=200, restarts=3, seed=7))
    c = nmf_solve(V, SolveConfig(4, max_iters=200, restarts=5, seed=7))
    assert np.array_equal(a.W, b.W) and a.residual == b.residual
    # restart r draws the same stream however many restarts run
    for r in range(3):
        assert np.array_equal(a.histories[r], c.histories[r])


def test_seed_from_environment(monkeypatch):
    monkeypatch.delenv("NNRANK_SEED", raising=False)
    assert default_seed() == DEFAULT_SEED
    monkeypatch.setenv("NNRANK_SEED", "42")
    assert default_seed() == 42
    assert SolveConfig(5).seed == 42


def test_float_image_of_certificate():
    pc = constants()
    W = to_float(pc.W)
    H = np.hstack([to_float(pc.Hprime), to_float(pc.Heps)])
    assert np.max(np.abs(W @ H - to_float(pc.M))) < 1e-14


def test_alignment_recovers_permutation_and_scale():
    W = to_float(constants().W)
    perm = [3, 0, 4, 1, 2]
    scales = np.array([2.0, 0.5, 3.0, 1.0, 7.0])
    Wf = W[:, perm] * scales
    al = align_to_reference(Wf, W)
    assert [perm[p] for p in al.permutation] == list(range(5))
    assert al.max_abs_deviation < 1e-14
    assert np.allclose(np.array(al.scalings), scales[list(al.permutation)])


def test_alignment_errors():
    W = to_float(constants().W)
    Z = W.copy()
    Z[:, 2] = 0
    with pytest.raises(ZeroColumn):
        align_to_reference(Z, W)
    with pytest.raises(ValueError):
        align_to_reference(W[:, :4], W)


def test_input_validation():
    with pytest.raises(ValueError):
        nmf_solve(-np.ones((2, 2)), SolveConfig(1))
    with pytest.raises(NonFinite):
        nmf_solve(np.array([[np.nan, 1.0]]), SolveConfig(1))
    with pytest.raises(ValueError):
        SolveConfig(0)
    with pytest.raises(ValueError):
        SolveConfig(2, tol=0)
