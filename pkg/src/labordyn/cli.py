"""Command-line pipeline.

Subcommands: ``simulate``, ``sweep``, ``equilibrium``, ``dissim``,
``ingest-validate``, ``analyze`` and ``render``. Options come from built-in
defaults, then an optional ``--config`` file, then command-line flags (flags
win). Each run writes its resolved configuration to ``run.cfg`` in its output
directory.

Exit codes: 0 success, 2 configuration or input error, 3 numerical failure
during integration, 4 equilibrium failure.
"""
from __future__ import annotations

import argparse
import os
import sys
from collections import namedtuple
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import config as cfgmod
from .analysis import find_peaks, phase_lag, relaxation_metric
from .config import ConfigError, format_config, format_value
from .dissimilarity import build_matrix, series_from_records
from .equilibrium import equilibrium_holling_k2zero, equilibrium_lv
from .errors import (DegenerateDenominator, EquilibriumError, InvalidParams, InvalidResponse, LabordynError,
                     NoConvergence, NonFiniteState, ParseError, SingularEquilibrium, UnsupportedCase, ZeroVariance)
from .export import (PlotSpec, export_matrix, export_report, export_series, export_trajectory, read_trajectory,
                     render_svg)
from .ingestion import (bundled_caged_1996_text, load_dataset, load_caged_1996, parse_dataset, serialize_dataset,
                        validate_balances)
from .integrator import IntegrationConfig, integrate, sign_changes
from .model import HOLLING, LV, FunctionalResponseKind, ModelParams, StateVector

OUTPUT_ROOT_ENV = "LABORDYN_OUTPUT_ROOT"
BUNDLED = "bundled"

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_EQUILIBRIUM = 0, 2, 3, 4

Option = namedtuple("Option", "key coerce default help")

_defaults = ModelParams()
MODEL = [Option(k, cfgmod.to_float, getattr(_defaults, k), h) for k, h in (
    ("a", "growth rate of the balance-of-workers dissimilarity"),
    ("b", "decay rate of the worker dissimilarity"),
    ("c", "decay rate of the employer dissimilarity"),
    ("alpha1", "resource-prey coupling"),
    ("alpha2", "prey-predator coupling"),
    ("k1", "saturation constant of f1"),
    ("k2", "saturation constant of f2"),
    ("w_dag", "employer dissimilarity floor"),
    ("u0", "observational scale of u"),
    ("v0", "observational scale of v"),
    ("w0", "observational scale of w"),
)] + [
    Option("response1", cfgmod.to_str, "lv", "f1 response: lv or holling"),
    Option("response2", cfgmod.to_str, "lv", "f2 response: lv or holling"),
    Option("eps_den", cfgmod.to_float, _defaults.eps_den, "Holling denominator guard"),
]
INTEGRATION = [
    Option("t0", cfgmod.to_float, 0.0, "start time"),
    Option("t_end", cfgmod.to_float, 200.0, "end time"),
    Option("dt", cfgmod.to_float, 0.01, "base step"),
    Option("adaptive", cfgmod.to_bool, False, "step-doubling error control"),
    Option("tol", cfgmod.to_float, 1e-8, "adaptive local error tolerance"),
    Option("record_every", cfgmod.to_int, 10, "keep every n-th step"),
]
INITIAL = [
    Option("u_init", cfgmod.to_float, 1.0, "initial u"),
    Option("v_init", cfgmod.to_float, 1.0, "initial v"),
    Option("w_init", cfgmod.to_float, 1.0, "initial w"),
]
ANALYSIS = [
    Option("smoothing_window", cfgmod.to_int, 3, "odd moving-average width for peak detection"),
    Option("prominence_fraction", cfgmod.to_float, 0.05, "minimum peak prominence as a fraction of range"),
    Option("split_fraction", cfgmod.to_float, 0.5, "relaxation split point"),
    Option("lag_window", cfgmod.to_float, 3.0, "largest phase lag searched, in time units"),
]
SVG = [
    Option("svg", cfgmod.to_bool, False, "also write trajectory.svg"),
    Option("svg_kind", cfgmod.to_str, "timeseries_overlay", "plot kind"),
    Option("svg_components", cfgmod.to_name_list, ["v", "w"], "components to draw"),
]
INPUT = Option("input", cfgmod.to_str, BUNDLED, "input file ('bundled' = packaged 1996 table)")
LOCALE = Option("locale", cfgmod.to_str, "brazilian", "number format: brazilian or plain")
GAPS = Option("allow_gaps", cfgmod.to_bool, False, "tolerate missing months")

COMMANDS = {
    "simulate": MODEL + INTEGRATION + INITIAL + ANALYSIS + SVG,
    "sweep": MODEL + INTEGRATION + INITIAL + ANALYSIS + SVG + [
        Option("alpha2_values", cfgmod.to_float_list, [1.0, 1.4, 1.8, 2.0], "comma-separated alpha2 values"),
        Option("jobs", cfgmod.to_int, 1, "parallel worker processes"),
    ],
    "equilibrium": MODEL + [
        Option("seed_u", cfgmod.to_float, 1.0, "fixed-point seed u"),
        Option("seed_v", cfgmod.to_float, 1.0, "fixed-point seed v"),
        Option("seed_w", cfgmod.to_float, 1.0, "fixed-point seed w"),
        Option("max_iter", cfgmod.to_int, 1000, "fixed-point iteration budget"),
        Option("fp_tol", cfgmod.to_float, 1e-12, "fixed-point state-change tolerance"),
    ],
    "dissim": [
        INPUT, LOCALE, GAPS,
        Option("r", cfgmod.to_float, 2.0, "Minkowski exponent"),
        Option("normalize", cfgmod.to_bool, False, "min-max scale features first"),
        Option("lag", cfgmod.to_int, 1, "register offset of the series"),
        Option("components", cfgmod.to_name_list, ["balance", "workers", "employers"], "series to write"),
        Option("layout", cfgmod.to_str, "dense", "matrix CSV layout: dense or long"),
    ],
    "ingest-validate": [INPUT, LOCALE, GAPS],
    "analyze": [INPUT, LOCALE] + ANALYSIS,
    "render": [
        INPUT,
        Option("kind", cfgmod.to_str, "timeseries_overlay", "plot kind"),
        Option("components", cfgmod.to_name_list, ["v", "w"], "components to draw"),
        Option("projection", cfgmod.to_optional_name_list, [], "axis pair of a 3-D projection"),
        Option("title", cfgmod.to_str, "", "plot title"),
        Option("width", cfgmod.to_int, 640, "pixels"),
        Option("height", cfgmod.to_int, 480, "pixels"),
    ],
}
POSITIONAL_INPUT = {"dissim", "ingest-validate", "analyze", "render"}


# -- argument handling ------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="labordyn", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, options in COMMANDS.items():
        p = sub.add_parser(name, help=f"{name} command")
        p.add_argument("--config", help="flat key = value config file")
        p.add_argument("--out", help=f"output directory (default ${OUTPUT_ROOT_ENV}/{name})")
        if name in POSITIONAL_INPUT:
            p.add_argument("input_path", nargs="?", metavar="INPUT", help=INPUT.help)
        for opt in options:
            flag = "--" + opt.key.replace("_", "-")
            if opt.key == "input":
                continue
            if opt.coerce is cfgmod.to_bool:
                p.add_argument(flag, dest=opt.key, action=argparse.BooleanOptionalAction, default=None,
                               help=f"{opt.help} (default {format_value(opt.default)})")
            else:
                p.add_argument(flag, dest=opt.key, default=None,
                               help=f"{opt.help} (default {format_value(opt.default)})")
    return parser


def resolve(command, args):
    """Merge defaults, config file and flags into typed values (option order)."""
    options = COMMANDS[command]
    known = {o.key for o in options}
    raw = {}
    if args.config:
        try:
            from_file = cfgmod.read_config(args.config)
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        unknown = sorted(set(from_file) - known)
        if unknown:
            raise ConfigError(f"unknown config key(s) for {command}: {', '.join(unknown)}", field=unknown[0])
        raw.update(from_file)
    for opt in options:
        value = getattr(args, opt.key, None)
        if value is not None:
            raw[opt.key] = value
    if getattr(args, "input_path", None):
        raw["input"] = args.input_path
    resolved = {}
    for opt in options:
        resolved[opt.key] = opt.coerce(opt.key, raw[opt.key]) if opt.key in raw else opt.default
    return resolved


def output_dir(command, args):
    if args.out:
        path = Path(args.out)
    else:
        root = os.environ.get(OUTPUT_ROOT_ENV, "labordyn-output")
        path = Path(root) / command
    path.mkdir(parents=True, exist_ok=True)
    return path


def emit(summary, out=None):
    text = "".join(f"{k}={format_value(v)}\n" for k, v in summary.items())
    sys.stdout.write(text)
    if out is not None:
        (out / "summary.txt").write_text(text, encoding="utf-8")


def fail(code, message):
    sys.stderr.write(f"labordyn: error: {message}\n")
    return code


# -- builders ---------------------------------------------------------------

def params_from(cfg):
    kwargs = {o.key: cfg[o.key] for o in MODEL}
    kwargs["response1"] = FunctionalResponseKind.parse(cfg["response1"])
    kwargs["response2"] = FunctionalResponseKind.parse(cfg["response2"])
    return ModelParams(**kwargs)


def integration_from(cfg):
    return IntegrationConfig(**{o.key: cfg[o.key] for o in INTEGRATION})


def initial_from(cfg):
    return StateVector(cfg["u_init"], cfg["v_init"], cfg["w_init"])


def canonical(cfg):
    """Normalize spellings so the echo is stable (e.g. response names)."""
    out = dict(cfg)
    for key in ("response1", "response2"):
        if key in out:
            out[key] = FunctionalResponseKind.parse(out[key]).short
    return out


def _spacing(times):
    return float(np.median(np.diff(times)))


def _lag_samples(times, lag_window):
    n = len(times)
    return int(max(0, min(round(lag_window / _spacing(times)), (n - 1) // 2)))


def series_summary(times, columns, cfg, pair=None):
    """Peaks, relaxation ratios and phase lag for named series."""
    out = {}
    for name, x in columns.items():
        prom = cfg["prominence_fraction"] * float(np.ptp(x))
        out[f"peaks_{name}"] = len(find_peaks(x, cfg["smoothing_window"], prom)) if len(x) >= 3 else 0
    for name, x in columns.items():
        out[f"relaxation_{name}"] = relaxation_metric(x, cfg["split_fraction"]).ratio if len(x) >= 8 else float("nan")
    if pair:
        a, b = pair
        key = f"phase_lag_{a}{b}" if len(a) == len(b) == 1 else f"phase_lag_{a}_{b}"
        max_lag = _lag_samples(times, cfg["lag_window"])
        try:
            lag = phase_lag(columns[a], columns[b], max_lag)
            out[key] = lag
            out[f"{key}_time"] = float(f"{lag * _spacing(times):.12g}")
        except ZeroVariance:
            out[key] = "nan"
            out[f"{key}_time"] = "nan"
    return out


def _simulation_config(cfg):
    keys = [o.key for o in COMMANDS["simulate"]]
    return {k: cfg[k] for k in keys}


def run_simulation(cfg, out):
    """Integrate, write ``trajectory.csv`` (+ svg), ``run.cfg`` and ``summary.txt``.

    Returns the summary mapping; numerical failures propagate.
    """
    cfg = canonical(_simulation_config(cfg))
    (out / "run.cfg").write_text(format_config(cfg), encoding="utf-8")
    params = params_from(cfg)
    traj = integrate(params, initial_from(cfg), integration_from(cfg))
    (out / "trajectory.csv").write_bytes(export_trajectory(traj))
    if cfg["svg"]:
        spec = PlotSpec(cfg["svg_kind"], tuple(cfg["svg_components"]),
                        title=f"alpha2 = {format_value(cfg['alpha2'])}")
        (out / "trajectory.svg").write_bytes(render_svg(traj, spec))
    summary = {
        "status": "ok",
        "steps": traj.steps,
        "samples": len(traj),
        "t_final": float(traj.times[-1]),
        "max_abs": float(np.max(np.abs(traj.states))),
    }
    summary.update(series_summary(traj.times, {"u": traj.u, "v": traj.v, "w": traj.w}, cfg, pair=("v", "w")))
    for name, count in sign_changes(traj).items():
        summary[f"sign_changes_{name}"] = count
    (out / "summary.txt").write_text("".join(f"{k}={format_value(v)}\n" for k, v in summary.items()),
                                     encoding="utf-8")
    return summary


# -- commands ---------------------------------------------------------------

def cmd_simulate(cfg, out):
    try:
        summary = run_simulation(cfg, out)
    except (NonFiniteState, DegenerateDenominator) as exc:
        t = getattr(exc, "last_finite_time", None)
        if t is None:
            t = getattr(exc, "time", None)
        sys.stdout.write(f"status=failed\nlast_finite_time={format_value(t)}\n")
        return fail(EXIT_NUMERIC, f"numerical failure: {exc}")
    summary["output"] = str(out)
    emit(summary)
    return EXIT_OK


def _sweep_one(job):
    cfg, out = job
    out.mkdir(parents=True, exist_ok=True)
    try:
        return run_simulation(cfg, out)
    except (NonFiniteState, DegenerateDenominator) as exc:
        t = getattr(exc, "last_finite_time", getattr(exc, "time", None))
        return {"status": "failed", "message": f"{type(exc).__name__} at t={format_value(t)}"}


SWEEP_COLUMNS = ("alpha2", "status", "steps", "peaks_v", "peaks_w", "phase_lag_vw", "phase_lag_vw_time",
                 "relaxation_v", "message")


def cmd_sweep(cfg, out):
    (out / "run.cfg").write_text(format_config(canonical(cfg)), encoding="utf-8")
    jobs = []
    for value in cfg["alpha2_values"]:
        run_cfg = dict(cfg, alpha2=value)
        jobs.append((run_cfg, out / f"alpha2_{format_value(value)}"))
    if cfg["jobs"] > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg["jobs"]) as pool:
            results = list(pool.map(_sweep_one, jobs))
    else:
        results = [_sweep_one(job) for job in jobs]
    lines = [",".join(SWEEP_COLUMNS)]
    for value, result in zip(cfg["alpha2_values"], results):
        row = dict(result, alpha2=value)
        lines.append(",".join(format_value(row.get(col, "")) for col in SWEEP_COLUMNS))
    table = "\n".join(lines) + "\n"
    (out / "summary.csv").write_text(table, encoding="utf-8")
    sys.stdout.write(table)
    n_ok = sum(r["status"] == "ok" for r in results)
    sys.stdout.write(f"runs={len(results)}\nsucceeded={n_ok}\noutput={out}\n")
    if n_ok == 0:
        return fail(EXIT_NUMERIC, "every sweep run failed")
    return EXIT_OK


def cmd_equilibrium(cfg, out):
    cfg = canonical(cfg)
    (out / "run.cfg").write_text(format_config(cfg), encoding="utf-8")
    params = params_from(cfg)
    pair = (params.response1, params.response2)
    try:
        if pair == (LV, LV):
            point = equilibrium_lv(params)
        elif pair == (HOLLING, HOLLING):
            if params.k2 != 0:
                return fail(EXIT_CONFIG, f"unsupported case: Holling equilibrium requires k2 = 0 (got {params.k2!r})")
            seed = StateVector(cfg["seed_u"], cfg["seed_v"], cfg["seed_w"])
            point = equilibrium_holling_k2zero(params, seed, max_iter=cfg["max_iter"], tol=cfg["fp_tol"])
        else:
            return fail(EXIT_CONFIG, "unsupported case: responses must be both lv or both holling")
    except (InvalidResponse, UnsupportedCase) as exc:
        return fail(EXIT_CONFIG, f"unsupported case: {exc}")
    except (SingularEquilibrium, NoConvergence) as exc:
        report = {"status": "failed", "error": type(exc).__name__, "message": str(exc)}
        best = getattr(exc, "best", None)
        if best is not None:
            report.update({f"best_{k}": v for k, v in best.as_dict().items()})
        (out / "equilibrium.json").write_bytes(export_report(report))
        emit(report)
        return fail(EXIT_EQUILIBRIUM, str(exc))
    report = dict(point.as_dict(), status="ok")
    (out / "equilibrium.json").write_bytes(export_report(report))
    emit({k: report[k] for k in ("status", "u", "v", "w", "residual", "method", "iterations",
                                 "negative_components")} | {"output": str(out)})
    return EXIT_OK


def _load_input(cfg):
    if cfg["input"] == BUNDLED:
        if cfg["locale"] == "brazilian" and not cfg["allow_gaps"]:
            return load_caged_1996()
        return parse_dataset(bundled_caged_1996_text(), locale=cfg["locale"], allow_gaps=cfg["allow_gaps"],
                             name=BUNDLED)
    try:
        return load_dataset(cfg["input"], locale=cfg["locale"], allow_gaps=cfg["allow_gaps"])
    except OSError as exc:
        raise ConfigError(f"cannot read input {cfg['input']}: {exc}") from None


def cmd_dissim(cfg, out):
    (out / "run.cfg").write_text(format_config(cfg), encoding="utf-8")
    dataset = _load_input(cfg)
    discrepancies = validate_balances(dataset) if len(dataset) >= 2 else []
    for period, d in discrepancies:
        sys.stderr.write(f"warning: balance of {period} differs from worker change by {d}\n")
    matrix = build_matrix(dataset, r=cfg["r"], normalize=cfg["normalize"])
    (out / "matrix.csv").write_bytes(export_matrix(matrix, cfg["layout"]))
    summary = {"records": len(dataset), "matrix_n": matrix.n, "balance_discrepancies": len(discrepancies)}
    for name in cfg["components"]:
        series = series_from_records(dataset, name, lag=cfg["lag"], r=cfg["r"])
        (out / f"series_{name}.csv").write_bytes(export_series(series))
        summary[f"series_{name}_length"] = len(series)
        summary[f"series_{name}_first"] = float(series.values[0])
    summary["output"] = str(out)
    emit(summary)
    return EXIT_OK


def cmd_ingest_validate(cfg, out):
    (out / "run.cfg").write_text(format_config(cfg), encoding="utf-8")
    dataset = _load_input(cfg)
    (out / "normalized.csv").write_text(serialize_dataset(dataset), encoding="utf-8")
    discrepancies = validate_balances(dataset) if len(dataset) >= 2 else []
    for period, d in discrepancies:
        sys.stdout.write(f"discrepancy {period} {d}\n")
    emit({"records": len(dataset), "first_period": str(dataset[0].period), "last_period": str(dataset[-1].period),
          "gaps": len(dataset.gaps), "balance_discrepancies": len(discrepancies), "output": str(out)})
    return EXIT_OK


def cmd_analyze(cfg, out):
    (out / "run.cfg").write_text(format_config(cfg), encoding="utf-8")
    path = cfg["input"]
    head = "" if path == BUNDLED else Path(path).read_text(encoding="utf-8").split("\n", 1)[0].strip()
    if head == "t,u,v,w":
        traj = read_trajectory(Path(path))
        times, columns, pair = traj.times, {"u": traj.u, "v": traj.v, "w": traj.w}, ("v", "w")
    else:
        dataset = _load_input(dict(cfg, allow_gaps=False))
        times = np.arange(len(dataset), dtype=float)
        columns = {name: np.array(dataset.column(name), dtype=float) for name in ("balance", "workers", "employers")}
        pair = ("workers", "employers")
    report = series_summary(times, columns, cfg, pair=pair)
    report["samples"] = len(times)
    (out / "analysis.json").write_bytes(export_report(report))
    emit(dict(report, output=str(out)))
    return EXIT_OK


def cmd_render(cfg, out):
    (out / "run.cfg").write_text(format_config(cfg), encoding="utf-8")
    if cfg["input"] == BUNDLED:
        raise ConfigError("render needs a trajectory CSV input", field="input")
    traj = read_trajectory(Path(cfg["input"]))
    spec = PlotSpec(cfg["kind"], tuple(cfg["components"]), title=cfg["title"],
                    projection=tuple(cfg["projection"]) or None)
    (out / "plot.svg").write_bytes(render_svg(traj, spec, cfg["width"], cfg["height"]))
    emit({"samples": len(traj), "kind": spec.kind, "output": str(out)})
    return EXIT_OK


HANDLERS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "equilibrium": cmd_equilibrium,
    "dissim": cmd_dissim,
    "ingest-validate": cmd_ingest_validate,
    "analyze": cmd_analyze,
    "render": cmd_render,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args.command, args)
        if args.command in ("simulate", "sweep"):
            # validate before touching the file system
            params_from(cfg), integration_from(cfg)
        elif args.command == "equilibrium":
            params_from(cfg)
        out = output_dir(args.command, args)
        return HANDLERS[args.command](cfg, out)
    except (InvalidParams, ParseError) as exc:
        return fail(EXIT_CONFIG, str(exc))
    except EquilibriumError as exc:
        return fail(EXIT_EQUILIBRIUM, str(exc))
    except (LabordynError, ValueError) as exc:
        return fail(EXIT_CONFIG, str(exc))


if __name__ == "__main__":
    sys.exit(main())
