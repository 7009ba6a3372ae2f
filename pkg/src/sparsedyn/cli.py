"""Command line front end for the benchmark harness.

Configuration is a flat key=value text file with dotted prefixes
(synthetic.m=70, rwl1df.tau=1.0, solver.max_iters=2000). Command line
flags override file values; --set key=value overrides both.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from .harness import (
    ALGO_ORDER,
    VIDEO_ALGOS,
    ExperimentConfig,
    VideoConfig,
    run_experiment,
)
from .synthetic import SyntheticConfig

log = logging.getLogger(__name__)

_SYNTH_KEYS = ("n", "s", "m", "p", "noise_var", "t_steps")
_VIDEO_KEYS = (
    "width",
    "height",
    "crop",
    "frames",
    "m_over_n",
    "levels",
    "taps",
    "noise_var",
)


def parse_config_text(text: str) -> dict:
    params = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if not key:
            raise ValueError(f"config line {lineno}: empty key")
        params[key] = value.strip()
    return params


def _load_params(args) -> dict:
    params = {}
    if args.config:
        with open(args.config) as fh:
            params.update(parse_config_text(fh.read()))
    for item in args.set or []:
        if "=" not in item:
            raise ValueError(f"--set expects key=value, got {item!r}")
        key, _, value = item.partition("=")
        params[key.strip()] = value.strip()
    return params


def _pick(cli_value, params, key, default):
    if cli_value is not None:
        return cli_value
    if key in params:
        return params[key]
    return default


def _synthetic_config(params) -> SyntheticConfig:
    kwargs = {}
    for name in _SYNTH_KEYS:
        key = f"synthetic.{name}"
        if key in params:
            value = params[key]
            kwargs[name] = float(value) if name == "noise_var" else int(value)
    return SyntheticConfig(**kwargs)


def _video_config(params, yuv_path) -> VideoConfig:
    path = yuv_path or params.get("video.path")
    if not path:
        raise ValueError("video experiment needs --yuv or config key video.path")
    kwargs = {"yuv_path": path}
    for name in _VIDEO_KEYS:
        key = f"video.{name}"
        if key in params:
            value = params[key]
            kwargs[name] = (
                float(value) if name in ("m_over_n", "noise_var") else int(value)
            )
    return VideoConfig(**kwargs)


def _parse_algos(spec_str, default):
    if not spec_str:
        return tuple(default)
    return tuple(tag.strip() for tag in spec_str.split(",") if tag.strip())


def _parse_values(spec_str):
    return tuple(int(v.strip()) for v in spec_str.split(",") if v.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparsedyn",
        description="Causal recovery benchmark for time-varying sparse signals",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key=value configuration file")
        p.add_argument("--seed", type=int, help="master RNG seed (default 0)")
        p.add_argument("--trials", type=int, help="independent trials (default 40)")
        p.add_argument("--out", help="output directory (default results)")
        p.add_argument("--algos", help="comma-separated algorithm tags")
        p.add_argument("--threads", type=int, help="trial worker threads (default 1)")
        p.add_argument(
            "--set",
            action="append",
            metavar="KEY=VALUE",
            help="override one config key (repeatable)",
        )
        p.add_argument("--verbose", action="store_true", help="progress logging")

    p = sub.add_parser("synthetic", help="tracking benchmark at one configuration")
    common(p)
    p = sub.add_parser("sweep-m", help="sweep the per-step measurement count")
    common(p)
    p.add_argument("--values", help="comma-separated m values")
    p = sub.add_parser("sweep-p", help="sweep the innovation parameter")
    common(p)
    p.add_argument("--values", help="comma-separated p values")
    p = sub.add_parser("video", help="compressive video recovery")
    common(p)
    p.add_argument("--yuv", help="raw planar 4:2:0 input file")
    p = sub.add_parser("selftest", help="quick internal consistency checks")
    common(p)
    return parser


def _run_selftest() -> int:
    from .filters import KalmanState, kalman_step
    from .operators import (
        MatrixOperator,
        MeasurementFrame,
        WaveletConfig,
        dwt_forward,
        dwt_inverse,
        noiselet_operator,
    )
    from .solvers import SolverSettings, WeightedL1Problem, solve_weighted_l1

    checks = []

    T = noiselet_operator(16, np.arange(16)).materialize()
    checks.append(("noiselet orthonormality", np.max(np.abs(T.T @ T - np.eye(16))) < 1e-12))

    rng = np.random.default_rng(0)
    cfg = WaveletConfig(size=64, levels=3, taps=4)
    x = rng.standard_normal(64)
    checks.append(
        ("wavelet reconstruction", np.max(np.abs(dwt_inverse(dwt_forward(x, cfg), cfg) - x)) < 1e-10)
    )

    prob = WeightedL1Problem(MatrixOperator(np.eye(1)), np.array([1.0]), 0.5, np.ones(1))
    res = solve_weighted_l1(prob, SolverSettings())
    checks.append(("scalar shrinkage solve", abs(res.z[0] - 0.75) < 1e-10 and res.kkt_ok))

    frame = MeasurementFrame(MatrixOperator(np.eye(1)), np.array([1.0]), 1.0)
    state = kalman_step(frame, KalmanState(np.zeros(1), np.eye(1)), np.eye(1), np.zeros((1, 1)), 1.0)
    checks.append(("scalar kalman update", abs(state.mean[0] - 0.5) < 1e-12))

    from .harness import run_trials

    scfg = SyntheticConfig(n=32, s=4, m=16, p=1, noise_var=0.001, t_steps=5)
    records = run_trials(scfg, ALGO_ORDER, {}, 2, 0)
    finite = all(np.all(np.isfinite(r.rmse_series)) for r in records if r.error is None)
    checks.append(("miniature benchmark run", finite and not any(r.error for r in records)))

    ok = True
    for name, passed in checks:
        print(f"selftest {name}: {'ok' if passed else 'FAILED'}")
        ok = ok and passed
    return 0 if ok else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
        format="%(message)s",
    )
    if args.command == "selftest":
        return _run_selftest()
    try:
        params = _load_params(args)
        seed = int(_pick(args.seed, params, "seed", 0))
        trials = int(_pick(args.trials, params, "trials", 40))
        out_dir = str(_pick(args.out, params, "out", "results"))
        threads = int(_pick(args.threads, params, "threads", 1))
        default_algos = VIDEO_ALGOS if args.command == "video" else ALGO_ORDER
        algos = _parse_algos(
            _pick(args.algos, params, "algos", None), default_algos
        )
        axis = ()
        synthetic = video = None
        if args.command == "video":
            video = _video_config(params, args.yuv)
        else:
            synthetic = _synthetic_config(params)
            if args.command == "sweep-m":
                spec_values = _pick(args.values, params, "sweep.m_values", None)
                axis = _parse_values(spec_values) if spec_values else ()
            elif args.command == "sweep-p":
                spec_values = _pick(args.values, params, "sweep.p_values", None)
                axis = _parse_values(spec_values) if spec_values else ()
        ecfg = ExperimentConfig(
            kind=args.command,
            synthetic=synthetic,
            video=video,
            trials=trials,
            seed=seed,
            out_dir=out_dir,
            algos=algos,
            threads=threads,
            axis=axis,
            overrides=params,
        )
        result = run_experiment(ecfg)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for path in result["paths"]:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
