"""``fovguard`` command line: optimize, simulate, sweep, gen-traces, classify.

Configuration is one JSON document (see ``DEFAULT_CONFIG``); command-line
flags override individual keys. Angles in config files are in degrees.

Exit codes: 0 success, 2 configuration error, 3 infeasible, 4 I/O error.
"""

from __future__ import annotations

import argparse
import copy
import json
import math
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .geometry import TileGrid
from .optimizer import (
    InfeasibleError,
    NoObservationWarning,
    StreamClock,
    manual_plan,
    max_resources_rate,
    optimize_durations,
)
from .prediction import PrecomputedPredictor, PredictorKind, resolve_predictor
from .privacy import (
    REFERENCE_CASES,
    DeploymentCase,
    PredictionStyle,
    PrivacySpec,
    Site,
    Upload,
    classify_deployment,
    overall_tile_count,
)
from .resources import (
    ChannelConfig,
    ComputeConfig,
    Rates,
    VideoConfig,
    cc_capability,
    computing_rate,
    dbm_to_watts,
    ensemble_average_rate,
    tile_bits,
)
from .simulator import Aggregate, InsufficientObservationError, plan_to_dict, simulate_trace, sweep
from .trace_io import SynthParams, TraceFormatError, load_traces, save_trace, synth_traces, trace_path

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_IO = 4

DEFAULT_CONFIG: dict = {
    "video": {
        "px_w": 192,
        "px_h": 216,
        "bits_per_pixel": 12,
        "frame_rate": 30.0,
        "T_seg": 1.0,
        "gamma_c": 2.41,
        "rows": 10,
        "cols": 20,
        "n_fov": 33,
    },
    "rates": {"C_com": 2.85e9, "C_cpt": 2.2e9},
    "channel": None,
    "compute": None,
    "clock": {"l0": 3, "L": None, "T_ps": None},
    "tau": 0.2,
    "rho_s": 0.0,
    "rho_grid": [round(0.1 * k, 10) for k in range(11)],
    "rcc_grid": [0.6, 1.0, 1.4, 2.0],
    "predictor": "trivial_motion",
    "predictions": None,
    "fov_diameter_deg": 100.0,
    "seed": 0,
    "mc_draws": 100_000,
    "plan": None,
    "synth": {
        "count": 50,
        "duration": 60.0,
        "interval": 0.2,
        "yaw_rate_std_deg": 35.0,
        "pitch_rate_std_deg": 12.0,
        "persistence": 0.9,
    },
    "trace_format": None,
}


class ConfigError(ValueError):
    pass


# --------------------------------------------------------------------------
# Config resolution
# --------------------------------------------------------------------------


def _merge(base: dict, update: dict, path: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, value in update.items():
        where = f"{path}{key}"
        if key not in base:
            raise ConfigError(f"{where}: unknown key")
        if isinstance(base[key], dict) and isinstance(value, dict):
            out[key] = _merge(base[key], value, where + ".")
        else:
            out[key] = copy.deepcopy(value)
    return out


def load_config(path: Optional[str]) -> dict:
    if path is None:
        return copy.deepcopy(DEFAULT_CONFIG)
    try:
        with open(path, encoding="utf-8") as fh:
            user = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(user, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    cfg = _merge(DEFAULT_CONFIG, user)
    if (user.get("channel") or user.get("compute")) and "rates" not in user:
        cfg["rates"] = None
    return cfg


def _set(cfg: dict, dotted: str, value) -> None:
    node = cfg
    *parents, leaf = dotted.split(".")
    for p in parents:
        node = node[p]
    node[leaf] = value


# flag dest -> config key
_OVERRIDES = {
    "rho_s": "rho_s",
    "rho_grid": "rho_grid",
    "rcc_grid": "rcc_grid",
    "tau": "tau",
    "l0": "clock.l0",
    "L": "clock.L",
    "t_ps": "clock.T_ps",
    "predictor": "predictor",
    "predictions": "predictions",
    "fov_diameter": "fov_diameter_deg",
    "seed": "seed",
    "c_com": "rates.C_com",
    "c_cpt": "rates.C_cpt",
    "n_fov": "video.n_fov",
    "rows": "video.rows",
    "cols": "video.cols",
    "mc_draws": "mc_draws",
    "trace_format": "trace_format",
    "count": "synth.count",
    "duration": "synth.duration",
    "interval": "synth.interval",
    "persistence": "synth.persistence",
}


def resolve_config(args: argparse.Namespace) -> dict:
    cfg = load_config(args.config)
    for dest, key in _OVERRIDES.items():
        value = getattr(args, dest, None)
        if value is None:
            continue
        if key.startswith("rates.") and cfg["rates"] is None:
            cfg["rates"] = {"C_com": None, "C_cpt": None}
        _set(cfg, key, value)
    return cfg


@dataclass
class RunConfig:
    video: VideoConfig
    rates: Rates
    clock_l0: int
    clock_L: Optional[int]
    T_ps: Optional[float]
    tau: float
    rho_s: float
    rho_grid: list
    rcc_grid: list
    predictor: object
    fov_diameter: float
    seed: int
    synth: SynthParams
    synth_count: int
    trace_format: Optional[str]
    plan: Optional[dict]

    def clock(self, L: Optional[int] = None) -> StreamClock:
        L = L if L is not None else self.clock_L
        if L is None:
            L = max(self.clock_l0, 2)
        try:
            return StreamClock(self.clock_l0, self.video.T_seg, L, self.T_ps)
        except ValueError as exc:
            raise ConfigError(f"clock: {exc}") from None


def _num(cfg: dict, key: str, positive: bool = True, integer: bool = False, allow_zero: bool = False):
    node = cfg
    for part in key.split("."):
        node = node[part]
    if isinstance(node, bool) or not isinstance(node, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {node!r}")
    if integer and int(node) != node:
        raise ConfigError(f"{key}: expected an integer, got {node!r}")
    if positive and not (node > 0 or (allow_zero and node == 0)):
        raise ConfigError(f"{key}: must be {'non-negative' if allow_zero else 'positive'}, got {node!r}")
    return int(node) if integer else float(node)


def _grid(cfg: dict, key: str) -> list:
    values = cfg[key]
    if not isinstance(values, list) or not values:
        raise ConfigError(f"{key}: expected a non-empty list")
    for v in values:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{key}: non-numeric entry {v!r}")
    return [float(v) for v in values]


def build_run_config(cfg: dict) -> RunConfig:
    try:
        grid = TileGrid(_num(cfg, "video.rows", integer=True), _num(cfg, "video.cols", integer=True))
        video = VideoConfig(
            px_w=_num(cfg, "video.px_w", integer=True),
            px_h=_num(cfg, "video.px_h", integer=True),
            b=_num(cfg, "video.bits_per_pixel", integer=True),
            r_f=_num(cfg, "video.frame_rate"),
            T_seg=_num(cfg, "video.T_seg"),
            gamma_c=_num(cfg, "video.gamma_c"),
            grid=grid,
            n_fov=_num(cfg, "video.n_fov", integer=True),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"video: {exc}") from None
    if video.n_fov >= video.M:
        raise ConfigError("video.n_fov: must be smaller than rows*cols (SDoP undefined otherwise)")

    has_rates = cfg["rates"] is not None
    has_phy = cfg["channel"] is not None or cfg["compute"] is not None
    if has_rates == has_phy:
        raise ConfigError("rates: give exactly one of 'rates' or 'channel'+'compute'")
    if has_rates:
        rates = Rates(_num(cfg, "rates.C_com"), _num(cfg, "rates.C_cpt"))
    else:
        if cfg["channel"] is None or cfg["compute"] is None:
            raise ConfigError("channel/compute: both sections are required when 'rates' is absent")
        rates = _rates_from_physical(cfg)

    tau = _num(cfg, "tau")
    rho = _num(cfg, "rho_s", allow_zero=True)
    if rho > 1:
        raise ConfigError(f"rho_s: must lie in [0, 1], got {rho}")
    rho_grid = _grid(cfg, "rho_grid")
    if any(not 0 <= r <= 1 for r in rho_grid):
        raise ConfigError("rho_grid: entries must lie in [0, 1]")
    rcc_grid = _grid(cfg, "rcc_grid")
    if any(r <= 0 for r in rcc_grid):
        raise ConfigError("rcc_grid: entries must be positive")

    if cfg["predictions"]:
        try:
            predictor = PrecomputedPredictor.load(cfg["predictions"])
        except OSError as exc:
            raise
        except ValueError as exc:
            raise ConfigError(f"predictions: {exc}") from None
    else:
        try:
            predictor = PredictorKind(cfg["predictor"])
        except ValueError:
            choices = ", ".join(k.value for k in PredictorKind)
            raise ConfigError(f"predictor: unknown predictor {cfg['predictor']!r}; choose from {choices}") from None

    fov = _num(cfg, "fov_diameter_deg", allow_zero=True)
    if fov > 360:
        raise ConfigError("fov_diameter_deg: must lie in [0, 360]")
    seed = _num(cfg, "seed", positive=False, integer=True)
    try:
        synth = SynthParams(
            seed=seed,
            duration=_num(cfg, "synth.duration"),
            interval=_num(cfg, "synth.interval"),
            yaw_rate_std=math.radians(_num(cfg, "synth.yaw_rate_std_deg", allow_zero=True)),
            pitch_rate_std=math.radians(_num(cfg, "synth.pitch_rate_std_deg", allow_zero=True)),
            persistence=_num(cfg, "synth.persistence", allow_zero=True),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"synth: {exc}") from None
    count = _num(cfg, "synth.count", integer=True, allow_zero=True)

    L = cfg["clock"]["L"]
    if L is not None:
        L = _num(cfg, "clock.L", integer=True)
    T_ps = cfg["clock"]["T_ps"]
    if T_ps is not None:
        T_ps = _num(cfg, "clock.T_ps")
    plan = cfg["plan"]
    if plan is not None:
        if not isinstance(plan, dict) or set(plan) != {"t_com", "t_cpt"}:
            raise ConfigError("plan: expected {'t_com': seconds, 't_cpt': seconds}")
        _num(cfg, "plan.t_com", allow_zero=True)
        _num(cfg, "plan.t_cpt", allow_zero=True)
    fmt = cfg["trace_format"]
    if fmt not in (None, "yaw_pitch_csv", "quaternion_csv"):
        raise ConfigError(f"trace_format: unknown format {fmt!r}")

    return RunConfig(
        video=video,
        rates=rates,
        clock_l0=_num(cfg, "clock.l0", integer=True),
        clock_L=L,
        T_ps=T_ps,
        tau=tau,
        rho_s=rho,
        rho_grid=rho_grid,
        rcc_grid=rcc_grid,
        predictor=predictor,
        fov_diameter=fov,
        seed=seed,
        synth=synth,
        synth_count=count,
        trace_format=fmt,
        plan=plan,
    )


def _rates_from_physical(cfg: dict) -> Rates:
    ch, cp = cfg["channel"], cfg["compute"]
    try:
        channel = ChannelConfig(
            B=float(ch["B"]),
            P_total=dbm_to_watts(float(ch["P_total_dbm"])),
            N_t=int(ch["N_t"]),
            K=int(ch["K"]),
            d=float(ch["d"]),
            alpha=float(ch["alpha"]),
            sigma2=dbm_to_watts(float(ch["sigma2_dbm"])),
        )
        compute = ComputeConfig(float(cp["F_cpt"]), float(cp["mu_r"]), int(cp.get("K", channel.K)))
        draws = _num(cfg, "mc_draws", integer=True)
        return Rates(ensemble_average_rate(channel, cfg["seed"], draws), computing_rate(compute))
    except KeyError as exc:
        raise ConfigError(f"channel/compute: missing key {exc}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"channel/compute: {exc}") from None


# --------------------------------------------------------------------------
# Commands
# --------------------------------------------------------------------------


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        Path(output).parent.mkdir(parents=True, exist_ok=True)
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_optimize(run: RunConfig, output: Optional[str] = None) -> int:
    video, rates = run.video, run.rates
    clock = run.clock()
    spec = PrivacySpec(run.rho_s)
    s_com, s_cpt = tile_bits(video)
    n_p = overall_tile_count(spec, video.M, video.n_fov)
    t_cc = (s_com / rates.C_com + s_cpt / rates.C_cpt) * n_p
    result = {
        "rho_s": run.rho_s,
        "M": video.M,
        "n_fov": video.n_fov,
        "N_p": n_p,
        "s_com_bits": s_com,
        "s_cpt_bits": s_cpt,
        "C_com": rates.C_com,
        "C_cpt": rates.C_cpt,
        "T_ps": clock.T_ps,
        "tau": run.tau,
        "t_cc": t_cc,
        "R_cc_max": max_resources_rate(video, rates),
    }
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", NoObservationWarning)
            plan = optimize_durations(clock, run.tau, spec, video, rates)
    except InfeasibleError as exc:
        result.update(feasible=False, reason=str(exc))
        _emit(_dump(result), output)
        return EXIT_INFEASIBLE
    result.update(
        feasible=True,
        plan=plan_to_dict(plan),
        C_cc=cc_capability(plan.t_com, plan.t_cpt, rates, s_com, s_cpt, video.M),
        warnings=[str(w.message) for w in caught],
    )
    _emit(_dump(result), output)
    return EXIT_OK


def _traces_for(run: RunConfig, trace_path_arg: Optional[str]):
    if trace_path_arg:
        traces = load_traces(trace_path_arg, run.trace_format)
        if not traces:
            raise FileNotFoundError(f"no *.csv traces under {trace_path_arg}")
        return traces
    return synth_traces(run.synth, run.synth_count)


def _clock_for(run: RunConfig, traces) -> StreamClock:
    if run.clock_L is not None:
        return run.clock()
    L = min(int(math.floor(tr.duration / run.video.T_seg + 1e-9)) for tr in traces)
    if L < run.clock_l0:
        raise ConfigError(f"clock.L: traces cover only {L} segments, fewer than l0={run.clock_l0}")
    return run.clock(L)


def cmd_simulate(run: RunConfig, trace_path_arg: Optional[str] = None, output: Optional[str] = None,
                 with_tiles: bool = False, config: Optional[dict] = None) -> int:
    traces = _traces_for(run, trace_path_arg)
    if not traces:
        raise ConfigError("synth.count: nothing to simulate")
    clock = _clock_for(run, traces)
    spec = PrivacySpec(run.rho_s)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NoObservationWarning)
            if run.plan is not None:
                n_p = overall_tile_count(spec, run.video.M, run.video.n_fov)
                plan = manual_plan(clock, run.tau, float(run.plan["t_com"]), float(run.plan["t_cpt"]), n_p)
            else:
                plan = optimize_durations(clock, run.tau, spec, run.video, run.rates)
        reports = [
            simulate_trace(tr, run.predictor, spec, plan, clock, run.video, run.rates, run.fov_diameter)
            for tr in traces
        ]
    except (InfeasibleError, InsufficientObservationError) as exc:
        _emit(_dump({"feasible": False, "reason": str(exc)}), output)
        return EXIT_INFEASIBLE
    agg = Aggregate.of(reports)
    doc = {
        "feasible": True,
        "config": config,
        "aggregate": {
            "n_traces": agg.n_traces,
            "average_qoe": agg.avg_qoe,
            "average_doo": agg.avg_doo,
            "cc_capability": agg.cc_capability,
            "rho_s": run.rho_s,
            "plan": plan_to_dict(plan),
            "leaked_segments": sum(r.leaked_segments for r in reports),
            "fallback_segments": sum(r.fallback_segments for r in reports),
        },
        "reports": [r.to_dict(with_tiles) for r in reports],
    }
    _emit(_dump(doc), output)
    return EXIT_OK


def cmd_sweep(run: RunConfig, trace_path_arg: Optional[str] = None, output: Optional[str] = None) -> int:
    traces = _traces_for(run, trace_path_arg)
    if not traces:
        raise ConfigError("synth.count: nothing to simulate")
    clock = _clock_for(run, traces)
    result = sweep(
        traces, run.predictor, run.rho_grid, run.rcc_grid, clock, run.video, run.tau, run.rates, run.fov_diameter
    )
    _emit(result.to_csv(), output)
    if output:
        meta = dict(result.metadata)
        meta["infeasible"] = [
            {"rho_s": c.rho_s, "rcc": c.rcc, "reason": c.reason} for c in result.cells if not c.feasible
        ]
        Path(str(output) + ".meta.json").write_text(_dump(meta), encoding="utf-8")
    return EXIT_OK


def cmd_gen_traces(run: RunConfig, out_dir: str) -> int:
    for tr in synth_traces(run.synth, run.synth_count):
        save_trace(tr, trace_path(out_dir, tr))
    return EXIT_OK


_STYLE_BY_FLAG = {"direct": PredictionStyle.DIRECT, "indirect": PredictionStyle.INDIRECT}
_SITE_BY_FLAG = {"mec": Site.MEC, "hmd": Site.HMD, "none": Site.NONE}

CLASSIFY_HEADER = ("no", "style", "train", "predict", "training_upload", "training", "prediction_upload", "prediction")


def _classify_row(no, case: DeploymentCase) -> tuple:
    training, prediction = classify_deployment(case)
    return (
        str(no),
        case.prediction_style.value,
        case.train_site.value,
        case.predict_site.value,
        case.training_upload.value,
        training.value,
        case.prediction_upload.value,
        prediction.value,
    )


def cmd_classify(args: argparse.Namespace) -> int:
    camouflage = args.camouflage == "on"
    if args.all or args.case is not None:
        rows = [
            _classify_row(no, DeploymentCase.standard(style, train, predict, camouflage))
            for no, style, train, predict in REFERENCE_CASES
            if args.all or no == args.case
        ]
        if not rows:
            raise ConfigError(f"--case: must lie in 1..12, got {args.case}")
    else:
        if not (args.style and args.train and args.predict):
            raise ConfigError("classify: give --all, --case N, or all of --style/--train/--predict")
        case = DeploymentCase.standard(
            _STYLE_BY_FLAG[args.style], _SITE_BY_FLAG[args.train], _SITE_BY_FLAG[args.predict], camouflage
        )
        if args.prediction_upload:
            try:
                case = DeploymentCase(
                    case.prediction_style,
                    case.train_site,
                    case.predict_site,
                    case.training_upload,
                    Upload(args.prediction_upload),
                    camouflage,
                )
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
        rows = [_classify_row("-", case)]
    widths = [max(len(h), *(len(r[i]) for r in rows)) for i, h in enumerate(CLASSIFY_HEADER)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(CLASSIFY_HEADER, widths)).rstrip()]
    lines += ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


# --------------------------------------------------------------------------
# Argument parsing
# --------------------------------------------------------------------------


def _float_list(text: str) -> list:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file (defaults reproduce the reference video settings)")
    p.add_argument("--print-config", action="store_true", help="echo the resolved config to stderr")
    p.add_argument("--output", "-o", help="write the result here instead of stdout")
    p.add_argument("--rho-s", type=float)
    p.add_argument("--tau", type=float, help="observation sampling interval, seconds")
    p.add_argument("--l0", type=int, help="first proactively streamed segment")
    p.add_argument("--L", type=int, help="number of segments (default: whole trace)")
    p.add_argument("--t-ps", type=float, help="override the proactive streaming time, seconds")
    p.add_argument("--c-com", type=float, help="transmission rate, bit/s")
    p.add_argument("--c-cpt", type=float, help="computing rate, bit/s")
    p.add_argument("--n-fov", type=int)
    p.add_argument("--rows", type=int)
    p.add_argument("--cols", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--mc-draws", type=int)


def _trace_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--traces", help="trace file or directory (default: synthesise from config)")
    p.add_argument("--trace-format", choices=["yaw_pitch_csv", "quaternion_csv"])
    p.add_argument("--predictor", choices=[k.value for k in PredictorKind])
    p.add_argument("--predictions", help="CSV of precomputed predictions (trace_id,segment_index,yaw_rad,pitch_rad)")
    p.add_argument("--fov-diameter", type=float, help="FoV diameter, degrees")
    p.add_argument("--count", type=int, help="number of synthetic traces")
    p.add_argument("--duration", type=float, help="synthetic trace length, seconds")
    p.add_argument("--interval", type=float, help="synthetic sample interval, seconds")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fovguard", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimize", help="optimal observation/computing/transmission durations")
    _common(p)

    p = sub.add_parser("simulate", help="simulate proactive streaming over traces")
    _common(p)
    _trace_opts(p)
    p.add_argument("--with-tiles", action="store_true", help="include per-segment tile lists")

    p = sub.add_parser("sweep", help="QoE/DoO/capability over rho_s x R_cc* grids (CSV)")
    _common(p)
    _trace_opts(p)
    p.add_argument("--rho-grid", type=_float_list)
    p.add_argument("--rcc-grid", type=_float_list)

    p = sub.add_parser("gen-traces", help="write synthetic yaw/pitch traces")
    _common(p)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--count", type=int)
    p.add_argument("--duration", type=float)
    p.add_argument("--interval", type=float)
    p.add_argument("--persistence", type=float)

    p = sub.add_parser("classify", help="FoV leakage verdicts for deployment cases")
    p.add_argument("--all", action="store_true", help="all twelve reference cases")
    p.add_argument("--case", type=int, help="one reference case, 1..12")
    p.add_argument("--camouflage", choices=["on", "off"], default="off")
    p.add_argument("--style", choices=list(_STYLE_BY_FLAG))
    p.add_argument("--train", choices=list(_SITE_BY_FLAG))
    p.add_argument("--predict", choices=["mec", "hmd"])
    p.add_argument("--prediction-upload", choices=[u.value for u in Upload])
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "classify":
            return cmd_classify(args)
        cfg = resolve_config(args)
        if args.print_config:
            sys.stderr.write(_dump(cfg))
        run = build_run_config(cfg)
        if args.command == "optimize":
            return cmd_optimize(run, args.output)
        if args.command == "simulate":
            return cmd_simulate(run, args.traces, args.output, args.with_tiles, cfg)
        if args.command == "sweep":
            return cmd_sweep(run, args.traces, args.output)
        if args.command == "gen-traces":
            return cmd_gen_traces(run, args.out_dir)
    except ConfigError as exc:
        print(f"fovguard: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, TraceFormatError) as exc:
        print(f"fovguard: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
