"""Causal single-frame estimators for time-varying sparse signals.

Each function consumes one MeasurementFrame plus whatever side
information its model uses (a prediction from the previous estimate,
a dynamics matrix) and returns the new estimate. Nothing here owns the
time loop; the harness drives these step by step.

The two re-weighted schemes share one EM skeleton: an M-step that
solves a weighted l1 problem and an E-step that maps the coefficients
(and, for the dynamic variant, the prediction) to fresh weights.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .operators import IdentityOperator, LinearOperator, MeasurementFrame, StackedOperator
from .solvers import SolverSettings, WeightedL1Problem, solve_weighted_l1

# relative weight movement below which the EM loop stops early
EM_WEIGHT_TOL = 1e-4


@dataclass(frozen=True)
class LsmParams:
    """Parameters of the Laplacian-scale-mixture weight model.

    lambda0 scales the whole penalty; tau sets the weight numerator of
    the dynamic update; beta scales the current coefficient in the
    denominator; eta keeps denominators away from zero. em_iters caps
    the EM rounds.
    """

    lambda0: float
    tau: float = 1.0
    beta: float = 1.0
    eta: float = 0.01
    em_iters: int = 10

    def __post_init__(self):
        for name in ("lambda0", "tau", "beta", "eta"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.em_iters < 1:
            raise ValueError("em_iters must be at least 1")


@dataclass(frozen=True)
class BpdnDfParams:
    """Dynamic BPDN parameters: gamma on the l1 term, kappa on the
    prediction-error term, q selects that term's norm (1 or 2).
    kappa = 0 degenerates to plain BPDN."""

    gamma: float
    kappa: float
    q: int = 2

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if self.kappa < 0:
            raise ValueError("kappa must be non-negative")
        if self.q not in (1, 2):
            raise ValueError("q must be 1 or 2")


@dataclass(frozen=True)
class DynamicsModel:
    """A known state-transition map x_k = predict(x_{k-1})."""

    predict: Callable[[np.ndarray], np.ndarray]
    description: str = ""


@dataclass
class KalmanState:
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=np.float64)
        self.cov = np.asarray(self.cov, dtype=np.float64)
        n = self.mean.shape[0]
        if self.mean.ndim != 1 or self.cov.shape != (n, n):
            raise ValueError("mean must be a vector and cov a matching square matrix")


def _sensing(frame: MeasurementFrame, synthesis: LinearOperator | None):
    if synthesis is None:
        return frame.op
    return frame.op @ synthesis


def bpdn_step(
    frame: MeasurementFrame,
    synthesis: LinearOperator | None,
    lam: float,
    settings: SolverSettings | None = None,
    z0=None,
    lipschitz=None,
) -> np.ndarray:
    """Memoryless baseline: min ||y - A z||^2 + lam ||z||_1."""
    A = _sensing(frame, synthesis)
    prob = WeightedL1Problem(A, frame.y, lam, np.ones(A.in_dim))
    return solve_weighted_l1(prob, settings, z0=z0, lipschitz=lipschitz).z


def _em_loop(A, y, lambda0, weights, update_fn, em_iters, settings, z0, lipschitz):
    z = z0
    for _ in range(em_iters):
        prob = WeightedL1Problem(A, y, lambda0, weights)
        z = solve_weighted_l1(prob, settings, z0=z, lipschitz=lipschitz).z
        new_weights = update_fn(z)
        moved = np.linalg.norm(new_weights - weights) / max(np.linalg.norm(weights), 1e-300)
        weights = new_weights
        if moved < EM_WEIGHT_TOL:
            break
    return z, weights


def rwl1_weight_update(z, p: LsmParams) -> np.ndarray:
    """Static re-weighting rule: beta / (|z| + eta)."""
    return p.beta / (np.abs(z) + p.eta)


def rwl1_static(
    frame: MeasurementFrame,
    synthesis: LinearOperator | None,
    p: LsmParams,
    settings: SolverSettings | None = None,
    lipschitz=None,
):
    """Re-weighted l1 with no temporal information. Initial weights are
    all ones. Returns (coefficients, final weights)."""
    A = _sensing(frame, synthesis)
    return _em_loop(
        A,
        frame.y,
        p.lambda0,
        np.ones(A.in_dim),
        lambda z: rwl1_weight_update(z, p),
        p.em_iters,
        settings,
        None,
        lipschitz,
    )


def rwl1_df_weight_update(z_current, prediction, p: LsmParams) -> np.ndarray:
    """Dynamic re-weighting rule: 2 tau / (beta |z| + |prediction| + eta).

    Coordinates supported by either the current estimate or the model
    prediction get small weights (cheap to activate); the rest are
    pushed toward zero with weight up to 2 tau / eta.
    """
    z_current = np.asarray(z_current, dtype=np.float64)
    prediction = np.asarray(prediction, dtype=np.float64)
    if z_current.shape != prediction.shape:
        raise ValueError("coefficient and prediction vectors must have the same length")
    return 2.0 * p.tau / (p.beta * np.abs(z_current) + np.abs(prediction) + p.eta)


def rwl1_df_step(
    frame: MeasurementFrame,
    synthesis: LinearOperator | None,
    prediction: np.ndarray,
    p: LsmParams,
    settings: SolverSettings | None = None,
    z0=None,
    lipschitz=None,
):
    """One time step of the dynamic re-weighted l1 filter.

    prediction is the model-propagated previous estimate expressed in
    coefficient space. Weights are initialized from the update rule
    with the current estimate at zero, then EM rounds alternate the
    weighted l1 solve with the weight update. Returns (coefficients,
    final weights).
    """
    A = _sensing(frame, synthesis)
    prediction = np.asarray(prediction, dtype=np.float64)
    if prediction.shape != (A.in_dim,):
        raise ValueError("prediction length does not match coefficient dimension")
    w0 = rwl1_df_weight_update(np.zeros(A.in_dim), prediction, p)
    return _em_loop(
        A,
        frame.y,
        p.lambda0,
        w0,
        lambda z: rwl1_df_weight_update(z, prediction, p),
        p.em_iters,
        settings,
        z0,
        lipschitz,
    )


def bpdn_df_step(
    frame: MeasurementFrame,
    synthesis: LinearOperator | None,
    prediction_signal: np.ndarray,
    p: BpdnDfParams,
    settings: SolverSettings | None = None,
    z0=None,
    lipschitz=None,
) -> np.ndarray:
    """Dynamic BPDN: min ||y - A z||^2 + gamma ||z||_1 + kappa ||W z - pred||_q^q.

    q = 2 folds the prediction term into the quadratic part by stacking
    sqrt(kappa) W under the sensing operator, for any synthesis W.
    q = 1 keeps the penalty separable and exact, which requires the
    synthesis to be the identity (the prediction then lives directly in
    coefficient space).
    """
    if p.kappa == 0.0:
        return bpdn_step(frame, synthesis, p.gamma, settings, z0=z0, lipschitz=lipschitz)
    A = _sensing(frame, synthesis)
    n = A.in_dim
    prediction_signal = np.asarray(prediction_signal, dtype=np.float64)
    if prediction_signal.shape != (n,):
        raise ValueError("prediction length does not match signal dimension")
    if p.q == 2:
        W = synthesis if synthesis is not None else IdentityOperator(n)
        root = np.sqrt(p.kappa)
        stacked = StackedOperator([A, W], [1.0, root])
        y_aug = np.concatenate((frame.y, root * prediction_signal))
        prob = WeightedL1Problem(stacked, y_aug, p.gamma, np.ones(n))
        lip = None if lipschitz is None else lipschitz + p.kappa
        return solve_weighted_l1(prob, settings, z0=z0, lipschitz=lip).z
    if synthesis is not None and not isinstance(synthesis, IdentityOperator):
        raise ValueError("q=1 prediction penalty requires an identity synthesis operator")
    prob = WeightedL1Problem(
        A,
        frame.y,
        p.gamma,
        np.ones(n),
        offset_weights=np.full(n, p.kappa),
        offset_targets=prediction_signal,
    )
    return solve_weighted_l1(prob, settings, z0=z0, lipschitz=lipschitz).z


def _dense_phi(frame: MeasurementFrame):
    mat = getattr(frame.op, "matrix", None)
    return mat if mat is not None else frame.op.materialize()


def kalman_step(
    frame: MeasurementFrame,
    state: KalmanState,
    dynamics_matrix: np.ndarray,
    process_cov: np.ndarray,
    measurement_cov=None,
) -> KalmanState:
    """Linear-Gaussian predict/update.

    measurement_cov may be a full matrix, a scalar variance, or None to
    use frame.noise_var. The posterior covariance is re-symmetrized to
    suppress drift.
    """
    phi = _dense_phi(frame)
    m = phi.shape[0]
    F = np.asarray(dynamics_matrix, dtype=np.float64)
    Q = np.asarray(process_cov, dtype=np.float64)
    if measurement_cov is None:
        measurement_cov = frame.noise_var
    R = (
        np.asarray(measurement_cov, dtype=np.float64)
        if np.ndim(measurement_cov) == 2
        else float(measurement_cov) * np.eye(m)
    )
    mean_pred = F @ state.mean
    cov_pred = F @ state.cov @ F.T + Q
    PhiSigma = phi @ cov_pred
    S = PhiSigma @ phi.T + R
    K = np.linalg.solve(S, PhiSigma).T
    innov = frame.y - phi @ mean_pred
    mean = mean_pred + K @ innov
    cov = cov_pred - K @ PhiSigma
    cov = 0.5 * (cov + cov.T)
    return KalmanState(mean, cov)
