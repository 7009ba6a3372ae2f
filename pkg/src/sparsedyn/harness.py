"""Benchmark orchestration.

Runs the five estimators causally over shared measurement sequences,
aggregates relative recovery error, and writes deterministic CSV and
plain-text reports. Trials are independent given (master seed, trial
index), so thread-level parallelism cannot change any output byte.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .filters import (
    BpdnDfParams,
    KalmanState,
    LsmParams,
    bpdn_df_step,
    bpdn_step,
    kalman_step,
    rwl1_df_step,
    rwl1_static,
)
from .operators import (
    MeasurementFrame,
    WaveletConfig,
    noiselet_operator,
    wavelet_synthesis_operator,
)
from .solvers import SolverSettings, estimate_lipschitz
from .synthetic import SyntheticConfig, generate_sequence, measure_state

log = logging.getLogger(__name__)

ALGO_ORDER = ("bpdn", "rwl1", "bpdn-df", "rwl1-df", "kalman")
VIDEO_ALGOS = ("bpdn", "rwl1", "bpdn-df", "rwl1-df")

TIMESERIES_HEADER = "trial,t,algorithm,rmse"
SWEEP_HEADER = "axis,algorithm,mean_rmse,stderr"
HIST_HEADER = "algorithm,bin_lo,bin_hi,count"

DEFAULT_M_VALUES = (50, 60, 70, 90, 110)
DEFAULT_P_VALUES = (0, 1, 2, 3, 4, 5)


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------


def rmse(x_true, x_est) -> float:
    """Squared recovery error normalized by the true signal energy."""
    x_true = np.asarray(x_true, dtype=np.float64)
    x_est = np.asarray(x_est, dtype=np.float64)
    if x_true.shape != x_est.shape:
        raise ValueError("length mismatch between truth and estimate")
    denom = float(np.dot(x_true, x_true))
    if denom == 0.0:
        raise ValueError("rMSE is undefined for a zero true signal")
    diff = x_true - x_est
    return float(np.dot(diff, diff)) / denom


def steady_state_window(t_steps: int) -> int:
    return max(1, round(0.2 * t_steps))


def steady_state_rmse(series) -> float:
    series = np.asarray(series, dtype=np.float64)
    if series.size == 0:
        return float("nan")
    return float(np.mean(series[-steady_state_window(series.size):]))


@dataclass
class TrialRecord:
    trial_id: int
    algorithm: str
    rmse_series: np.ndarray
    steady_state_rmse: float
    wall_time: float
    error: str | None = None

    def __post_init__(self):
        if self.error is None and np.any(np.asarray(self.rmse_series) < 0):
            raise ValueError("rMSE entries must be nonnegative")


# ---------------------------------------------------------------------------
# parameter blocks
# ---------------------------------------------------------------------------


def cfg_float(overrides, key, default) -> float:
    v = overrides.get(key)
    return float(default) if v is None else float(v)


def cfg_int(overrides, key, default) -> int:
    v = overrides.get(key)
    return int(default) if v is None else int(v)


@dataclass(frozen=True)
class AlgoParams:
    bpdn_lam: float
    rwl1: LsmParams
    bpdn_df: BpdnDfParams
    rwl1_df: LsmParams
    kalman_process_var: float = 1e-6
    kalman_measure_var: float = 1e-12
    kalman_prior_var: float = 1.0


def synthetic_algo_params(scfg: SyntheticConfig, overrides=None) -> AlgoParams:
    """Benchmark defaults for the synthetic tracking experiment.

    The l1 scales track the measurement noise floor; the dynamic
    variants additionally adapt to the innovation parameter p (weaker
    prediction terms when the model is less trustworthy).
    """
    ov = overrides or {}
    sigma2 = scfg.noise_var
    floor = 1e-12  # keeps penalties positive in noise-free runs
    rwl1 = LsmParams(
        lambda0=cfg_float(ov, "rwl1.lambda0", 0.0011),
        tau=cfg_float(ov, "rwl1.tau", 1.0),
        beta=cfg_float(ov, "rwl1.beta", 1.0),
        eta=cfg_float(ov, "rwl1.eta", 0.01),
        em_iters=cfg_int(ov, "rwl1.em_iters", 10),
    )
    bpdn_df = BpdnDfParams(
        gamma=cfg_float(ov, "bpdndf.gamma", max(0.5 * sigma2, floor)),
        kappa=cfg_float(ov, "bpdndf.kappa", 0.001 / (scfg.p + 1)),
        q=cfg_int(ov, "bpdndf.q", 1),
    )
    eta_df = max(1.0 - 2.0 * scfg.p / scfg.s, 0.01) if scfg.s else 1.0
    rwl1_df = LsmParams(
        lambda0=cfg_float(ov, "rwl1df.lambda0", 0.0011),
        tau=cfg_float(ov, "rwl1df.tau", 1.0),
        beta=cfg_float(ov, "rwl1df.beta", 1.0),
        eta=cfg_float(ov, "rwl1df.eta", eta_df),
        em_iters=cfg_int(ov, "rwl1df.em_iters", 10),
    )
    return AlgoParams(
        bpdn_lam=cfg_float(ov, "bpdn.lam", max(0.55 * sigma2, floor)),
        rwl1=rwl1,
        bpdn_df=bpdn_df,
        rwl1_df=rwl1_df,
        kalman_process_var=cfg_float(
            ov, "kalman.process_var", max(2.0 * scfg.p / scfg.n, 1e-6)
        ),
        kalman_measure_var=cfg_float(ov, "kalman.measure_var", max(sigma2, 1e-12)),
        kalman_prior_var=cfg_float(
            ov, "kalman.prior_var", scfg.s / scfg.n if scfg.s else 1.0
        ),
    )


def video_algo_params(overrides=None) -> AlgoParams:
    """Benchmark defaults for compressive video with a wavelet synthesis."""
    ov = overrides or {}
    rwl1 = LsmParams(
        lambda0=cfg_float(ov, "rwl1.lambda0", 0.001),
        tau=cfg_float(ov, "rwl1.tau", 0.05),
        beta=cfg_float(ov, "rwl1.beta", 1.0),
        eta=cfg_float(ov, "rwl1.eta", 0.1),
        em_iters=cfg_int(ov, "rwl1.em_iters", 10),
    )
    bpdn_df = BpdnDfParams(
        gamma=cfg_float(ov, "bpdndf.gamma", 0.01),
        kappa=cfg_float(ov, "bpdndf.kappa", 0.4),
        q=cfg_int(ov, "bpdndf.q", 2),
    )
    rwl1_df = LsmParams(
        lambda0=cfg_float(ov, "rwl1df.lambda0", 0.001),
        tau=cfg_float(ov, "rwl1df.tau", 0.2),
        beta=cfg_float(ov, "rwl1df.beta", 1.0),
        eta=cfg_float(ov, "rwl1df.eta", 0.2),
        em_iters=cfg_int(ov, "rwl1df.em_iters", 10),
    )
    return AlgoParams(
        bpdn_lam=cfg_float(ov, "bpdn.lam", 0.01),
        rwl1=rwl1,
        bpdn_df=bpdn_df,
        rwl1_df=rwl1_df,
    )


def solver_settings(overrides=None) -> SolverSettings:
    ov = overrides or {}
    base = SolverSettings()
    # lightly regularized cold solves converge much faster with a short
    # continuation ladder; warm starts skip it automatically
    cont_spec = str(ov.get("solver.continuation", "100,10"))
    continuation = tuple(
        float(v) for v in cont_spec.split(",") if v.strip()
    )
    return SolverSettings(
        max_iters=cfg_int(ov, "solver.max_iters", base.max_iters),
        rel_tol=cfg_float(ov, "solver.rel_tol", base.rel_tol),
        kkt_every=cfg_int(ov, "solver.kkt_every", base.kkt_every),
        polish_max_support=cfg_int(
            ov, "solver.polish_max_support", base.polish_max_support
        ),
        stall_limit=cfg_int(ov, "solver.stall_limit", base.stall_limit),
        continuation=continuation,
    )


# ---------------------------------------------------------------------------
# synthetic trials
# ---------------------------------------------------------------------------


def _algo_series(tag, seq, frames, lips, params: AlgoParams, settings, scfg):
    t_steps = len(frames)
    n = scfg.n
    series = np.zeros(t_steps)
    if tag == "bpdn":
        for t, fr in enumerate(frames):
            z = bpdn_step(fr, None, params.bpdn_lam, settings, lipschitz=lips[t])
            series[t] = rmse(seq.states[t], z)
    elif tag == "rwl1":
        for t, fr in enumerate(frames):
            z, _ = rwl1_static(fr, None, params.rwl1, settings, lipschitz=lips[t])
            series[t] = rmse(seq.states[t], z)
    elif tag == "bpdn-df":
        z_prev = np.zeros(n)
        for t, fr in enumerate(frames):
            if t == 0:
                # no prediction yet: plain l1 recovery with the same gamma
                first = replace(params.bpdn_df, kappa=0.0)
                z = bpdn_df_step(fr, None, z_prev, first, settings, lipschitz=lips[t])
            else:
                pred = seq.dynamics[t - 1].apply(z_prev)
                z = bpdn_df_step(
                    fr, None, pred, params.bpdn_df, settings, z0=pred, lipschitz=lips[t]
                )
            series[t] = rmse(seq.states[t], z)
            z_prev = z
    elif tag == "rwl1-df":
        z_prev = np.zeros(n)
        for t, fr in enumerate(frames):
            pred = np.zeros(n) if t == 0 else seq.dynamics[t - 1].apply(z_prev)
            z, _ = rwl1_df_step(
                fr,
                None,
                pred,
                params.rwl1_df,
                settings,
                z0=None if t == 0 else pred,
                lipschitz=lips[t],
            )
            series[t] = rmse(seq.states[t], z)
            z_prev = z
    elif tag == "kalman":
        state = KalmanState(np.zeros(n), params.kalman_prior_var * np.eye(n))
        eye = np.eye(n)
        no_drift = np.zeros((n, n))
        Q = params.kalman_process_var * np.eye(n)
        for t, fr in enumerate(frames):
            if t == 0:
                state = kalman_step(fr, state, eye, no_drift, params.kalman_measure_var)
            else:
                F = seq.dynamics[t - 1].matrix()
                state = kalman_step(fr, state, F, Q, params.kalman_measure_var)
            series[t] = rmse(seq.states[t], state.mean)
    else:
        raise ValueError(f"unknown algorithm tag {tag!r}")
    return series


def run_synthetic_trial(
    scfg: SyntheticConfig,
    algos,
    params: AlgoParams,
    settings: SolverSettings,
    master_seed: int,
    trial_id: int,
) -> list:
    """One ground-truth sequence, every requested algorithm on the same
    measurements. A failing algorithm yields an error record; the rest
    of the trial continues."""
    rng = np.random.default_rng(np.random.SeedSequence((master_seed, trial_id)))
    seq = generate_sequence(scfg, rng)
    frames = [measure_state(x, scfg.m, scfg.noise_var, rng) for x in seq.states]
    lips = [estimate_lipschitz(fr.op, iters=30, rng=rng) for fr in frames]
    records = []
    for tag in algos:
        start = time.perf_counter()
        try:
            series = _algo_series(tag, seq, frames, lips, params, settings, scfg)
        except Exception as exc:  # noqa: BLE001 - recorded, trial continues
            log.warning("trial %d algorithm %s failed: %s", trial_id, tag, exc)
            records.append(
                TrialRecord(
                    trial_id,
                    tag,
                    np.zeros(0),
                    float("nan"),
                    time.perf_counter() - start,
                    error=str(exc),
                )
            )
            continue
        records.append(
            TrialRecord(
                trial_id,
                tag,
                series,
                steady_state_rmse(series),
                time.perf_counter() - start,
            )
        )
    return records


def run_trials(scfg, algos, overrides, trials, master_seed, threads=1, settings=None):
    """All trials of one synthetic configuration, optionally on a thread
    pool. Records come back sorted by (trial, algorithm), so the output
    is identical for any thread count."""
    _check_algos(algos, ALGO_ORDER)
    if trials < 1:
        raise ValueError("need at least one trial")
    params = synthetic_algo_params(scfg, overrides)
    settings = settings or solver_settings(overrides)

    def one(trial_id):
        return run_synthetic_trial(scfg, algos, params, settings, master_seed, trial_id)

    if threads <= 1:
        nested = [one(i) for i in range(trials)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            nested = list(pool.map(one, range(trials)))
    records = [rec for sub in nested for rec in sub]
    records.sort(key=lambda r: (r.trial_id, ALGO_ORDER.index(r.algorithm)))
    return records


def _check_algos(algos, allowed):
    if not algos:
        raise ValueError("no algorithms requested")
    for tag in algos:
        if tag not in allowed:
            raise ValueError(f"unknown algorithm {tag!r}; choose from {allowed}")


def sweep_statistics(records_by_value, algos):
    """Mean and standard error of steady-state rMSE per (axis value,
    algorithm); rows appear in axis order, then algorithm order."""
    rows = []
    for value, records in records_by_value.items():
        for tag in algos:
            vals = [
                r.steady_state_rmse
                for r in records
                if r.algorithm == tag and r.error is None
            ]
            if vals:
                mean = float(np.mean(vals))
                se = (
                    float(np.std(vals, ddof=1) / np.sqrt(len(vals)))
                    if len(vals) > 1
                    else float("nan")
                )
            else:
                mean, se = float("nan"), float("nan")
            rows.append((value, tag, mean, se))
    return rows


def run_sweep(
    base_cfg: SyntheticConfig,
    axis: str,
    values,
    algos,
    overrides,
    trials,
    master_seed,
    threads=1,
    settings=None,
):
    """Sweep a single SyntheticConfig field (m or p). Returns (rows,
    records_by_value); per-p parameter defaults re-derive at each point."""
    if axis not in ("m", "p"):
        raise ValueError("sweep axis must be 'm' or 'p'")
    if not len(values):
        raise ValueError("empty sweep axis")
    records_by_value = {}
    for value in values:
        scfg = replace(base_cfg, **{axis: int(value)})
        log.info("sweep %s=%s: %d trials", axis, value, trials)
        records_by_value[int(value)] = run_trials(
            scfg, algos, overrides, trials, master_seed, threads, settings
        )
    return sweep_statistics(records_by_value, algos), records_by_value


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


def _fmt(x) -> str:
    return repr(float(x))


def write_timeseries_csv(path, records) -> None:
    lines = [TIMESERIES_HEADER]
    for rec in records:
        if rec.error is not None:
            continue
        for t, v in enumerate(rec.rmse_series):
            lines.append(f"{rec.trial_id},{t},{rec.algorithm},{_fmt(v)}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_sweep_csv(path, rows) -> None:
    lines = [SWEEP_HEADER]
    for value, tag, mean, se in rows:
        lines.append(f"{value},{tag},{_fmt(mean)},{_fmt(se)}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_histogram_csv(path, series_by_algo, bins=20) -> None:
    pooled = np.concatenate([np.asarray(s) for s in series_by_algo.values()])
    hi = float(pooled.max()) if pooled.size and pooled.max() > 0 else 1.0
    edges = np.linspace(0.0, hi, bins + 1)
    lines = [HIST_HEADER]
    for tag, series in series_by_algo.items():
        counts, _ = np.histogram(np.asarray(series), bins=edges)
        for k in range(bins):
            lines.append(f"{tag},{_fmt(edges[k])},{_fmt(edges[k + 1])},{counts[k]}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_summary(path, records, algos) -> None:
    """Per-algorithm mean/median/steady-state table (deterministic text)."""
    lines = ["algorithm  trials  errors  mean_rmse  median_rmse  steady_state_rmse"]
    for tag in algos:
        recs = [r for r in records if r.algorithm == tag]
        good = [r for r in recs if r.error is None]
        errors = len(recs) - len(good)
        if good:
            pooled = np.concatenate([r.rmse_series for r in good])
            mean = _fmt(pooled.mean())
            median = _fmt(np.median(pooled))
            steady = _fmt(np.mean([r.steady_state_rmse for r in good]))
        else:
            mean = median = steady = _fmt(float("nan"))
        lines.append(
            f"{tag}  {len(recs)}  {errors}  {mean}  {median}  {steady}"
        )
    Path(path).write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# video ingestion and experiment
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VideoConfig:
    yuv_path: str
    width: int = 352
    height: int = 288
    crop: int = 64
    frames: int = 30
    m_over_n: float = 0.27
    levels: int = 0  # 0 derives a default from the crop size
    taps: int = 4
    noise_var: float = 0.0

    def __post_init__(self):
        if self.width < 2 or self.height < 2 or self.width % 2 or self.height % 2:
            raise ValueError("frame dimensions must be positive and even")
        if self.crop < 1 or self.crop & (self.crop - 1):
            raise ValueError("crop size must be a power of two")
        if self.crop > min(self.width, self.height):
            raise ValueError("crop exceeds the source frame")
        if self.frames < 1:
            raise ValueError("need at least one frame")
        if not 0.0 < self.m_over_n <= 1.0:
            raise ValueError("subsample ratio must lie in (0, 1]")
        if self.levels < 0:
            raise ValueError("levels must be nonnegative")
        if self.noise_var < 0:
            raise ValueError("noise variance must be nonnegative")

    @property
    def wavelet_levels(self) -> int:
        if self.levels:
            return self.levels
        return max(1, int(np.log2(self.crop)) - 2)


def read_yuv_luma(cfg: VideoConfig) -> np.ndarray:
    """Luma planes of a raw planar 4:2:0 file, center-cropped and scaled
    to [0, 1]. Returns an array of shape (frames, crop, crop)."""
    frame_bytes = cfg.width * cfg.height * 3 // 2
    needed = frame_bytes * cfg.frames
    data = Path(cfg.yuv_path).read_bytes()
    if len(data) < needed:
        raise ValueError(
            f"video file truncated: frame {len(data) // frame_bytes} is incomplete "
            f"(have {len(data)} bytes, need {needed} at byte offset {len(data)})"
        )
    r0 = (cfg.height - cfg.crop) // 2
    c0 = (cfg.width - cfg.crop) // 2
    out = np.empty((cfg.frames, cfg.crop, cfg.crop))
    for k in range(cfg.frames):
        plane = np.frombuffer(
            data, dtype=np.uint8, count=cfg.width * cfg.height, offset=k * frame_bytes
        ).reshape(cfg.height, cfg.width)
        out[k] = plane[r0 : r0 + cfg.crop, c0 : c0 + cfg.crop] / 255.0
    return out


def run_video_experiment(
    vcfg: VideoConfig,
    algos=VIDEO_ALGOS,
    overrides=None,
    master_seed: int = 0,
    settings: SolverSettings | None = None,
):
    """Causal compressive recovery of a video: per frame, a fresh random
    row subset of the orthonormal noiselet transform measures the image,
    and each algorithm reconstructs wavelet coefficients. The dynamics
    model is the identity on coefficients (previous estimate predicts
    the next frame). Returns per-algorithm rMSE series keyed by tag."""
    _check_algos(algos, VIDEO_ALGOS)
    params = video_algo_params(overrides)
    settings = settings or solver_settings(overrides)
    pixels = read_yuv_luma(vcfg)
    n = vcfg.crop * vcfg.crop
    m = round(vcfg.m_over_n * n)
    wcfg = WaveletConfig(size=vcfg.crop, levels=vcfg.wavelet_levels, taps=vcfg.taps, ndim=2)
    W = wavelet_synthesis_operator(wcfg)

    series = {tag: np.zeros(vcfg.frames) for tag in algos}
    wall = {tag: 0.0 for tag in algos}
    prev = {tag: None for tag in algos}
    for t in range(vcfg.frames):
        rng = np.random.default_rng(np.random.SeedSequence((master_seed, t)))
        x = pixels[t].ravel()
        op = noiselet_operator(n, num_rows=m, rng=rng)
        y = op.apply(x)
        if vcfg.noise_var > 0:
            y = y + np.sqrt(vcfg.noise_var) * rng.standard_normal(m)
        frame = MeasurementFrame(op, y, vcfg.noise_var)
        # rows of an orthonormal transform composed with an orthonormal
        # synthesis: the squared spectral norm is exactly 1
        lip = 1.0
        for tag in algos:
            start = time.perf_counter()
            if tag == "bpdn":
                z = bpdn_step(frame, W, params.bpdn_lam, settings, lipschitz=lip)
            elif tag == "rwl1":
                z, _ = rwl1_static(frame, W, params.rwl1, settings, lipschitz=lip)
            elif tag == "bpdn-df":
                if t == 0:
                    first = replace(params.bpdn_df, kappa=0.0)
                    z = bpdn_df_step(
                        frame, W, np.zeros(n), first, settings, lipschitz=lip
                    )
                else:
                    pred_signal = W.apply(prev[tag])
                    z = bpdn_df_step(
                        frame,
                        W,
                        pred_signal,
                        params.bpdn_df,
                        settings,
                        z0=prev[tag],
                        lipschitz=lip,
                    )
            else:  # rwl1-df
                pred = np.zeros(n) if t == 0 else prev[tag]
                z, _ = rwl1_df_step(
                    frame,
                    W,
                    pred,
                    params.rwl1_df,
                    settings,
                    z0=None if t == 0 else pred,
                    lipschitz=lip,
                )
            prev[tag] = z
            series[tag][t] = rmse(x, W.apply(z))
            wall[tag] += time.perf_counter() - start
        if (t + 1) % 10 == 0:
            log.info("video frame %d/%d done", t + 1, vcfg.frames)
    records = [
        TrialRecord(0, tag, series[tag], steady_state_rmse(series[tag]), wall[tag])
        for tag in algos
    ]
    return records, series


# ---------------------------------------------------------------------------
# experiment dispatch
# ---------------------------------------------------------------------------


@dataclass
class ExperimentConfig:
    kind: str
    synthetic: SyntheticConfig | None = None
    video: VideoConfig | None = None
    trials: int = 40
    seed: int = 0
    out_dir: str = "results"
    algos: tuple = ALGO_ORDER
    threads: int = 1
    axis: tuple = ()
    overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        kinds = ("synthetic", "sweep-m", "sweep-p", "video")
        if self.kind not in kinds:
            raise ValueError(f"experiment kind must be one of {kinds}")
        if self.trials < 1:
            raise ValueError("trials must be positive")
        if self.threads < 1:
            raise ValueError("threads must be positive")
        if self.kind == "video":
            if self.video is None:
                raise ValueError("video experiment needs a VideoConfig")
        elif self.synthetic is None:
            raise ValueError(f"{self.kind} experiment needs a SyntheticConfig")


def run_experiment(ecfg: ExperimentConfig) -> dict:
    """Execute one configured experiment and write its reports. Returns
    the output paths plus the in-memory records."""
    out = Path(ecfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    settings = solver_settings(ecfg.overrides)
    if ecfg.kind == "synthetic":
        records = run_trials(
            ecfg.synthetic,
            ecfg.algos,
            ecfg.overrides,
            ecfg.trials,
            ecfg.seed,
            ecfg.threads,
            settings,
        )
        csv_path = out / "synthetic_rmse.csv"
        write_timeseries_csv(csv_path, records)
        summary_path = out / "synthetic_summary.txt"
        write_summary(summary_path, records, ecfg.algos)
        return {"records": records, "paths": [csv_path, summary_path]}
    if ecfg.kind in ("sweep-m", "sweep-p"):
        axis = ecfg.kind[-1]
        values = ecfg.axis or (DEFAULT_M_VALUES if axis == "m" else DEFAULT_P_VALUES)
        rows, records_by_value = run_sweep(
            ecfg.synthetic,
            axis,
            values,
            ecfg.algos,
            ecfg.overrides,
            ecfg.trials,
            ecfg.seed,
            ecfg.threads,
            settings,
        )
        csv_path = out / f"sweep_{axis}.csv"
        write_sweep_csv(csv_path, rows)
        return {"rows": rows, "records_by_value": records_by_value, "paths": [csv_path]}
    # video
    algos = tuple(tag for tag in ecfg.algos if tag in VIDEO_ALGOS) or VIDEO_ALGOS
    records, series = run_video_experiment(
        ecfg.video, algos, ecfg.overrides, ecfg.seed, settings
    )
    csv_path = out / "video_rmse.csv"
    write_timeseries_csv(csv_path, records)
    hist_path = out / "video_hist.csv"
    write_histogram_csv(hist_path, series)
    summary_path = out / "video_summary.txt"
    write_summary(summary_path, records, algos)
    return {
        "records": records,
        "series": series,
        "paths": [csv_path, hist_path, summary_path],
    }
