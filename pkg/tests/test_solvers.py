"""Solver tests.

The headline check compares the iterative solver against an exhaustive
sign-pattern oracle: every pattern in {-1, 0, +1}^N gets its stationarity
system solved densely, every candidate is scored under the true objective,
and the best feasible candidate is the global minimizer.
"""

import numpy as np
import pytest
from oracles import augmented_oracle, sign_pattern_oracle

from sparsedyn.operators import MatrixOperator
from sparsedyn.solvers import (
    ConvergenceWarning,
    SolverSettings,
    WeightedL1Problem,
    _prox_two_kink,
    estimate_lipschitz,
    kkt_residual,
    kkt_tolerance,
    objective,
    soft_threshold,
    solve_weighted_l1,
)


# ---------------------------------------------------------------------------
# building blocks
# ---------------------------------------------------------------------------


def test_soft_threshold_values():
    v = np.array([3.0, -0.5, 0.2, -4.0])
    out = soft_threshold(v, 1.0)
    assert np.allclose(out, [2.0, 0.0, 0.0, -3.0])


def test_two_kink_prox_matches_grid_search():
    # brute-force the scalar objective on a fine grid around the kinks
    rng = np.random.default_rng(0)
    for _ in range(200):
        v = rng.uniform(-4, 4)
        a = rng.uniform(0, 2)
        b = rng.uniform(0, 2)
        c = rng.uniform(-3, 3)
        got = _prox_two_kink(np.array([v]), np.array([a]), np.array([b]), np.array([c]))[0]
        grid = np.unique(np.concatenate((np.linspace(-8, 8, 20001), [0.0, c])))
        vals = 0.5 * (grid - v) ** 2 + a * np.abs(grid) + b * np.abs(grid - c)
        ref = grid[np.argmin(vals)]
        ref_val = np.min(vals)
        got_val = 0.5 * (got - v) ** 2 + a * abs(got) + b * abs(got - c)
        assert got_val <= ref_val + 1e-9
        assert abs(got - ref) < 2e-3


def test_estimate_lipschitz_identity():
    op = MatrixOperator(np.eye(5))
    assert abs(estimate_lipschitz(op, iters=50, rng=np.random.default_rng(1)) - 1.0) < 1e-6


def test_estimate_lipschitz_diagonal():
    op = MatrixOperator(np.diag([3.0, 1.0]))
    L = estimate_lipschitz(op, iters=100, rng=np.random.default_rng(2))
    assert abs(L - 9.0) < 1e-4


def test_estimate_lipschitz_matches_dense_eigensolve():
    rng = np.random.default_rng(3)
    A = rng.standard_normal((4, 6))
    L = estimate_lipschitz(MatrixOperator(A), iters=500, rng=rng)
    L_ref = float(np.max(np.linalg.eigvalsh(A.T @ A)))
    assert abs(L - L_ref) < 1e-3 * L_ref
    assert L >= 0.99 * L_ref


def test_estimate_lipschitz_zero_operator():
    op = MatrixOperator(np.zeros((3, 4)))
    assert estimate_lipschitz(op, rng=np.random.default_rng(4)) == 0.0


# ---------------------------------------------------------------------------
# the solver itself
# ---------------------------------------------------------------------------


def test_solve_zero_measurements_returns_zero():
    rng = np.random.default_rng(5)
    prob = WeightedL1Problem(
        MatrixOperator(rng.standard_normal((4, 7))), np.zeros(4), 0.3, np.ones(7)
    )
    res = solve_weighted_l1(prob)
    assert np.all(res.z == 0.0)
    assert res.converged and res.kkt_ok


def test_solve_scalar_closed_form():
    # identity sensing in one dimension: the solution is y shrunk by half
    # the effective penalty weight
    prob = WeightedL1Problem(MatrixOperator(np.eye(1)), np.array([1.0]), 0.5, np.ones(1))
    res = solve_weighted_l1(prob)
    assert abs(res.z[0] - 0.75) < 1e-10


def test_solve_matches_sign_pattern_oracle():
    rng = np.random.default_rng(6)
    for trial in range(25):
        m, n = 4, 6
        A = rng.standard_normal((m, n)) / np.sqrt(m)
        y = rng.standard_normal(m)
        lam0 = 0.1
        w = rng.uniform(0.2, 2.0, size=n)
        prob = WeightedL1Problem(MatrixOperator(A), y, lam0, w)
        res = solve_weighted_l1(prob)
        ref = sign_pattern_oracle(A, y, lam0, w)
        assert np.linalg.norm(res.z - ref) < 1e-4, f"trial {trial}"


def test_solve_kkt_certified():
    rng = np.random.default_rng(7)
    for _ in range(10):
        A = rng.standard_normal((30, 80))
        A /= np.linalg.norm(A, axis=0)
        x = np.zeros(80)
        x[rng.choice(80, 6, replace=False)] = rng.standard_normal(6)
        y = A @ x + 0.01 * rng.standard_normal(30)
        w = rng.uniform(0.5, 3.0, size=80)
        prob = WeightedL1Problem(MatrixOperator(A), y, 0.05, w)
        res = solve_weighted_l1(prob)
        assert res.kkt_ok
        assert kkt_residual(prob, res.z) <= kkt_tolerance(prob)


def test_solve_objective_history_non_increasing():
    rng = np.random.default_rng(8)
    A = rng.standard_normal((20, 50))
    y = rng.standard_normal(20)
    prob = WeightedL1Problem(MatrixOperator(A), y, 0.2, np.ones(50))
    res = solve_weighted_l1(prob)
    h = res.objective_history
    assert np.all(np.diff(h) <= 1e-9 * np.maximum(1.0, np.abs(h[:-1])))


def test_solve_warm_start_agrees_with_cold_start():
    rng = np.random.default_rng(9)
    A = rng.standard_normal((15, 40))
    A /= np.linalg.norm(A, axis=0)
    y = rng.standard_normal(15)
    prob = WeightedL1Problem(MatrixOperator(A), y, 0.3, np.ones(40))
    cold = solve_weighted_l1(prob)
    warm = solve_weighted_l1(prob, z0=cold.z + 0.01 * rng.standard_normal(40))
    assert np.linalg.norm(cold.z - warm.z) < 1e-6
    assert warm.iterations <= cold.iterations


def test_solve_flags_non_convergence():
    rng = np.random.default_rng(10)
    A = rng.standard_normal((40, 200))
    y = rng.standard_normal(40)
    prob = WeightedL1Problem(MatrixOperator(A), y, 1e-6, np.ones(200))
    with pytest.warns(ConvergenceWarning):
        res = solve_weighted_l1(prob, SolverSettings(max_iters=2, rel_tol=1e-16))
    assert not res.converged
    assert res.iterations == 2


def test_solve_with_offset_term_matches_augmented_oracle():
    # two-kink problems: check against enumeration over joint sign
    # patterns of z and z - target
    rng = np.random.default_rng(11)
    for trial in range(10):
        m, n = 3, 4
        A = rng.standard_normal((m, n)) / np.sqrt(m)
        y = rng.standard_normal(m)
        gamma, kappa = 0.15, 0.1
        target = rng.standard_normal(n)
        prob = WeightedL1Problem(
            MatrixOperator(A),
            y,
            gamma,
            np.ones(n),
            offset_weights=np.full(n, kappa),
            offset_targets=target,
        )
        res = solve_weighted_l1(prob)
        ref = augmented_oracle(A, y, gamma, kappa, target)
        assert np.linalg.norm(res.z - ref) < 1e-4, f"trial {trial}"


def test_problem_validation():
    op = MatrixOperator(np.eye(3))
    with pytest.raises(ValueError):
        WeightedL1Problem(op, np.zeros(4), 0.5, np.ones(3))
    with pytest.raises(ValueError):
        WeightedL1Problem(op, np.zeros(3), 0.0, np.ones(3))
    with pytest.raises(ValueError):
        WeightedL1Problem(op, np.zeros(3), 0.5, -np.ones(3))
    with pytest.raises(ValueError):
        WeightedL1Problem(op, np.zeros(3), 0.5, np.ones(3), offset_weights=np.ones(3))
    with pytest.raises(ValueError):
        SolverSettings(max_iters=0)


def test_objective_matches_direct_evaluation():
    rng = np.random.default_rng(12)
    A = rng.standard_normal((5, 8))
    y = rng.standard_normal(5)
    z = rng.standard_normal(8)
    w = rng.uniform(0.1, 1.0, 8)
    prob = WeightedL1Problem(MatrixOperator(A), y, 0.7, w)
    direct = np.sum((y - A @ z) ** 2) + 0.7 * np.sum(w * np.abs(z))
    assert abs(objective(prob, z) - direct) < 1e-12
