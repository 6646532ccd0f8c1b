import numpy as np
import pytest

from lvlmg.cycle import CycleConfig, WorkMeter, build_hierarchy, precondition
from lvlmg.krylov import fgmres, mg_preconditioner
from lvlmg.operator import LevelOperator, dense_matrix
from lvlmg.problems import constant_k
from lvlmg.smoother import WeightedJacobi

from conftest import crandn, dirichlet_grid


def test_identity_preconditioner_poisson():
    op = LevelOperator(dirichlet_grid(8), 0.0)
    b = np.arange(1, 8, dtype=complex)
    x, rep = fgmres(op, b, restart=None, tol=1e-10, maxiter=50)
    assert rep.converged and rep.iterations <= 7
    assert np.linalg.norm(b - op(x)) < 1e-10 * np.linalg.norm(b)


def _right_gmres_oracle(A, M, b, j):
    """j-th right-preconditioned GMRES iterate from an explicit Krylov basis."""
    K = [b / np.linalg.norm(b)]
    for _ in range(j - 1):
        v = A @ (M @ K[-1])
        K.append(v / np.linalg.norm(v))
    Q, _ = np.linalg.qr(np.stack(K, axis=1))
    y = np.linalg.lstsq(A @ M @ Q, b, rcond=None)[0]
    return M @ Q @ y


def test_matches_right_preconditioned_gmres():
    prob = constant_k(10, 16, dim=2)
    h = build_hierarchy(prob, CycleConfig(smoother=WeightedJacobi(0.5)))
    A = dense_matrix(h.base)
    n = A.shape[0]
    M = np.stack([precondition(h, e.reshape(prob.rhs.shape)).ravel() for e in np.eye(n)], axis=1)
    b = prob.rhs.ravel()
    pre = mg_preconditioner(h)
    for j in range(1, 7):
        x, _ = fgmres(h.base, b, lambda r: precondition(h, r), tol=1e-30, maxiter=j)
        ref = _right_gmres_oracle(A, M, b, j)
        np.testing.assert_allclose(x, ref, atol=1e-10 * np.abs(ref).max())
    assert pre.meter.units == 0


def test_history_monotone_within_restart():
    prob = constant_k(30, 64)
    h = build_hierarchy(prob, CycleConfig(fixed_angle=True))
    _, rep = fgmres(h.base, prob.rhs, mg_preconditioner(h), restart=5)
    assert rep.converged
    hist = rep.residual_history
    for start in range(0, rep.iterations, 5):
        window = hist[start:start + 6]
        assert all(b <= a * (1 + 1e-8) for a, b in zip(window, window[1:]))
    assert len(hist) == rep.iterations + 1


def test_work_accounting():
    prob = constant_k(20, 32)
    h = build_hierarchy(prob, CycleConfig(fixed_angle=True))
    cost = WorkMeter()
    precondition(h, prob.rhs, cost)
    pre = mg_preconditioner(h)
    _, rep = fgmres(h.base, prob.rhs, pre, tol=1e-7)
    # one matvec plus one V-cycle per outer step, and the final true residual
    assert rep.work_units == pytest.approx(rep.iterations * (1 + cost.units) + 1)


def test_exact_preconditioner_breakdown():
    op = LevelOperator(dirichlet_grid(16), 30.0)
    A = dense_matrix(op)
    b = np.ones(15, dtype=complex)
    x, rep = fgmres(op, b, lambda r: np.linalg.solve(A, r))
    assert rep.converged and rep.iterations == 1


def test_maxiter_reported():
    prob = constant_k(40, 64)
    h = build_hierarchy(prob, CycleConfig(fixed_angle=True))
    _, rep = fgmres(h.base, prob.rhs, mg_preconditioner(h), maxiter=4)
    assert not rep.converged and rep.iterations == 4


@pytest.mark.parametrize("restart", [None, 10])
def test_mg_fgmres_iterations(restart):
    prob = constant_k(40, 64)
    h = build_hierarchy(prob, CycleConfig(fixed_angle=True))
    _, rep = fgmres(h.base, prob.rhs, mg_preconditioner(h), restart=restart)
    assert rep.converged
    assert 15 <= rep.iterations <= (44 if restart is None else 45)
