"""Ground-truth generators for the synthetic tracking benchmark.

States are s-sparse vectors pushed forward by a fresh random signed
permutation at every step.  The filter under test is told the exact
permutation (the model), but a small number p of active coefficients are
secretly rerouted to wrong slots, producing a sparse innovation the
filter has to absorb.  Measurements come from fresh Gaussian matrices
with additive white noise.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .operators import MeasurementFrame, gaussian_sensing

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SyntheticConfig:
    n: int = 500
    s: int = 20
    m: int = 70
    p: int = 3
    noise_var: float = 0.001
    t_steps: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("state dimension must be positive")
        if not 0 <= self.s <= self.n:
            raise ValueError("sparsity must lie in [0, n]")
        if not 1 <= self.m <= self.n:
            raise ValueError("measurement count must lie in [1, n]")
        if not 0 <= self.p <= self.s:
            raise ValueError("innovation parameter must lie in [0, s]")
        if self.noise_var < 0:
            raise ValueError("noise variance must be nonnegative")
        if self.t_steps < 1:
            raise ValueError("need at least one time step")


@dataclass(frozen=True)
class SignedPermutation:
    """Dynamics descriptor: routes source i to slot perm[i] with sign signs[i]."""

    perm: np.ndarray
    signs: np.ndarray

    def apply(self, x: np.ndarray) -> np.ndarray:
        out = np.zeros_like(x, dtype=float)
        out[self.perm] = self.signs * x
        return out

    def matrix(self) -> np.ndarray:
        n = self.perm.size
        F = np.zeros((n, n))
        F[self.perm, np.arange(n)] = self.signs
        return F


@dataclass
class GroundTruthSequence:
    states: list            # length t_steps
    dynamics: list          # length t_steps - 1, SignedPermutation per step
    innovation_log: list    # length t_steps - 1, list of (source, slot) pairs

    def __post_init__(self):
        if len(self.dynamics) != len(self.states) - 1:
            raise ValueError("need one dynamics descriptor per transition")
        if len(self.innovation_log) != len(self.dynamics):
            raise ValueError("innovation log must cover every transition")


def gen_initial_state(cfg: SyntheticConfig, rng: np.random.Generator) -> np.ndarray:
    x = np.zeros(cfg.n)
    if cfg.s > 0:
        support = rng.choice(cfg.n, size=cfg.s, replace=False)
        x[support] = rng.standard_normal(cfg.s)
    return x


def permutation_dynamics_step(x_prev, cfg: SyntheticConfig, rng):
    """Advance one step.

    Returns (x_next, descriptor, misroutes) where the descriptor is the
    model handed to the filters and misroutes lists the (source, slot)
    pairs that silently violated it.
    """
    x_prev = np.asarray(x_prev, dtype=float)
    n = x_prev.size
    perm = rng.permutation(n)
    signs = rng.choice(np.array([-1.0, 1.0]), size=n)
    f_k = SignedPermutation(perm, signs)
    x_next = f_k.apply(x_prev)

    support = np.flatnonzero(x_prev)
    k = min(cfg.p, support.size)
    if cfg.p > support.size:
        log.warning(
            "p=%d exceeds support size %d; rerouting all active coefficients",
            cfg.p,
            support.size,
        )
    misroutes = []
    if k > 0:
        sources = rng.choice(support, size=k, replace=False)
        vacated = perm[sources]
        x_next[vacated] = 0.0
        empty = np.flatnonzero(x_next == 0.0)
        slots = rng.choice(empty, size=k, replace=False)
        x_next[slots] = signs[sources] * x_prev[sources]
        collisions = np.intersect1d(slots, vacated).size
        if collisions:
            log.debug("%d misroute(s) landed on a vacated slot", collisions)
        misroutes = list(zip(sources.tolist(), slots.tolist()))
    return x_next, f_k, misroutes


def measure_state(x, m: int, noise_var: float, rng) -> MeasurementFrame:
    x = np.asarray(x, dtype=float)
    if m < 1:
        raise ValueError("need at least one measurement")
    op = gaussian_sensing(m, x.size, rng)
    y = op.apply(x)
    if noise_var > 0:
        y = y + np.sqrt(noise_var) * rng.standard_normal(m)
    return MeasurementFrame(op, y, noise_var)


def generate_sequence(cfg: SyntheticConfig, rng=None) -> GroundTruthSequence:
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    x = gen_initial_state(cfg, rng)
    states = [x]
    dynamics = []
    innovation_log = []
    for _ in range(cfg.t_steps - 1):
        x, f_k, moved = permutation_dynamics_step(states[-1], cfg, rng)
        states.append(x)
        dynamics.append(f_k)
        innovation_log.append(moved)
    return GroundTruthSequence(states, dynamics, innovation_log)


def save_states_csv(path, states) -> None:
    """Write nonzero entries as t,index,value rows (repr floats, lossless)."""
    with open(path, "w") as fh:
        fh.write("t,index,value\n")
        for t, x in enumerate(states):
            x = np.asarray(x)
            for i in np.flatnonzero(x):
                fh.write(f"{t},{i},{float(x[i])!r}\n")


def load_states_csv(path, n: int) -> list:
    states = {}
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "t,index,value":
            raise ValueError(f"unexpected header {header!r}")
        for line in fh:
            t_str, i_str, v_str = line.strip().split(",")
            t, i = int(t_str), int(i_str)
            if not 0 <= i < n:
                raise ValueError(f"index {i} out of range for n={n}")
            states.setdefault(t, np.zeros(n))[i] = float(v_str)
    if not states:
        return []
    t_max = max(states)
    return [states.get(t, np.zeros(n)) for t in range(t_max + 1)]
