"""Causal recovery of time-varying sparse signals.

The package implements a dynamic re-weighted l1 filter alongside the
standard baselines (BPDN, static re-weighted l1, BPDN with a prediction
penalty, and a linear Kalman filter), the measurement operators used by
the benchmarks, and a reproducible experiment harness with a CLI.
"""

from .filters import (
    BpdnDfParams,
    DynamicsModel,
    KalmanState,
    LsmParams,
    bpdn_df_step,
    bpdn_step,
    kalman_step,
    rwl1_df_step,
    rwl1_df_weight_update,
    rwl1_static,
    rwl1_weight_update,
)
from .operators import (
    IdentityOperator,
    LinearOperator,
    MatrixOperator,
    MeasurementFrame,
    NoiseletOperator,
    StackedOperator,
    WaveletConfig,
    WaveletSynthesisOperator,
    dwt_forward,
    dwt_inverse,
    gaussian_sensing,
    noiselet_operator,
    wavelet_synthesis_operator,
)
from .solvers import (
    ConvergenceWarning,
    SolverSettings,
    SolveResult,
    WeightedL1Problem,
    estimate_lipschitz,
    solve_weighted_l1,
)
from .synthetic import (
    GroundTruthSequence,
    SignedPermutation,
    SyntheticConfig,
    gen_initial_state,
    generate_sequence,
    measure_state,
    permutation_dynamics_step,
)

__version__ = "0.1.0"

__all__ = [
    "BpdnDfParams",
    "ConvergenceWarning",
    "DynamicsModel",
    "GroundTruthSequence",
    "IdentityOperator",
    "KalmanState",
    "LinearOperator",
    "LsmParams",
    "MatrixOperator",
    "MeasurementFrame",
    "NoiseletOperator",
    "SignedPermutation",
    "SolverSettings",
    "SolveResult",
    "StackedOperator",
    "SyntheticConfig",
    "WaveletConfig",
    "WaveletSynthesisOperator",
    "WeightedL1Problem",
    "bpdn_df_step",
    "bpdn_step",
    "dwt_forward",
    "dwt_inverse",
    "estimate_lipschitz",
    "gaussian_sensing",
    "gen_initial_state",
    "generate_sequence",
    "kalman_step",
    "measure_state",
    "noiselet_operator",
    "permutation_dynamics_step",
    "rwl1_df_step",
    "rwl1_df_weight_update",
    "rwl1_static",
    "rwl1_weight_update",
    "solve_weighted_l1",
    "wavelet_synthesis_operator",
]
