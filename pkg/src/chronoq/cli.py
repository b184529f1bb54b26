"""Command-line front end.

Subcommands: ``simulate``, ``figures``, ``probe``, ``sweep``. Every physical
constant and integrator setting has a flag; a JSON config file with the same
field names (underscored) may supply values, and flags win over it.

Exit codes: 0 success, 2 I/O error, 3 numerical failure, 4 gate not found,
64 usage error.
"""

from __future__ import annotations

import argparse
import ast
import csv
import json
import math
import operator
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import __version__
from .analysis import (DEFAULT_HORIZON, DEFAULT_THRESHOLD, cnot_initial, cnot_probe,
                       mirror_residual)
from .errors import ChronoqError, GateNotFoundError, NumericalError, UsageError
from .formats import (TRAJECTORY_COLUMNS, fmt, trajectory_rows, write_table_csv,
                      write_trajectory_csv, write_trajectory_json)
from .integrate import IntegratorConfig, evolve
from .model import DEFAULT_PARAMS, SystemParameters, TwoQubitState

EXIT_OK = 0
EXIT_IO = 2
EXIT_NUMERICAL = 3
EXIT_NOT_FOUND = 4
EXIT_USAGE = 64

OUT_ENV = "CHRONOQ_OUT"
UNITY_CLAIM_LEVEL = 0.99
PROBE_MIRROR_LIMIT = 1e-5
FIGURE_STRIDE = 10
INIT_NORM_TOLERANCE = 1e-9

_BINOPS = {ast.Div: operator.truediv, ast.Mult: operator.mul, ast.Sub: operator.sub}


def parse_expr(text):
    """Evaluate a number or an expression such as ``pi/2``, ``-3*pi/4``.

    Only numeric literals, ``pi``, ``/``, ``*`` and ``-`` are accepted.
    """
    if isinstance(text, (int, float)):
        return float(text)

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and type(node.value) in (int, float):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -ev(node.operand)
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        raise UsageError(f"unsupported expression: {text!r}")

    try:
        tree = ast.parse(str(text).strip(), mode="eval")
    except SyntaxError:
        raise UsageError(f"cannot parse number: {text!r}") from None
    try:
        value = ev(tree)
    except ZeroDivisionError:
        raise UsageError(f"division by zero in {text!r}") from None
    if not math.isfinite(value):
        raise UsageError(f"not a finite number: {text!r}")
    return value


def parse_initial(spec):
    """A basis label (``10``, ``|10>``) or four comma-separated complex amplitudes."""
    if isinstance(spec, (list, tuple)):
        parts = list(spec)
    else:
        spec = str(spec).strip()
        if "," not in spec:
            return TwoQubitState.basis(spec)
        parts = spec.split(",")
    if len(parts) != 4:
        raise UsageError("initial state needs exactly four amplitudes")
    try:
        amps = [complex(str(p).replace(" ", "")) for p in parts]
    except ValueError:
        raise UsageError(f"cannot parse amplitudes {spec!r}") from None
    state = TwoQubitState(*amps)
    if abs(state.norm2() - 1.0) > INIT_NORM_TOLERANCE:
        raise UsageError(f"initial state norm^2 is {state.norm2()!r}, not 1")
    return state


@dataclass(frozen=True)
class RunConfig:
    params: SystemParameters = DEFAULT_PARAMS
    integrator: IntegratorConfig = IntegratorConfig()
    t_start: float = 0.0
    t_end: float = DEFAULT_HORIZON
    initial: TwoQubitState = cnot_initial()
    threshold: float = DEFAULT_THRESHOLD
    horizon: float = DEFAULT_HORIZON
    output_path: str | None = None
    output_format: str = "csv"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common_flags():
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("model and integrator")
    g.add_argument("--config", help="JSON file with default values (flags take precedence)")
    for name in SystemParameters.field_names():
        g.add_argument(f"--{name}", type=str, default=None,
                       help=f"override {name} (default {getattr(DEFAULT_PARAMS, name):g})")
    g.add_argument("--method", choices=["fixed_rk4", "adaptive_45"], default=None)
    g.add_argument("--dt", type=str, default=None)
    g.add_argument("--rel-tol", dest="rel_tol", type=str, default=None)
    g.add_argument("--abs-tol", dest="abs_tol", type=str, default=None)
    g.add_argument("--sample-stride", dest="sample_stride", type=int, default=None)
    g.add_argument("--t-start", dest="t_start", type=str, default=None)
    g.add_argument("--t-end", dest="t_end", type=str, default=None)
    g.add_argument("--threshold", type=str, default=None)
    g.add_argument("--horizon", type=str, default=None)
    return common


def build_parser():
    parser = _Parser(prog="chronoq", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _common_flags()

    p = sub.add_parser("simulate", parents=[common], help="write one trajectory")
    p.add_argument("--initial", default=None, help="basis label or 'a,b,c,d' amplitudes")
    p.add_argument("--output", "-o", default=None, help="output file (default: stdout)")
    p.add_argument("--format", dest="output_format", choices=["csv", "json"], default=None)

    p = sub.add_parser("figures", parents=[common], help="write norm and population curves")
    p.add_argument("--out-dir", default=None, help=f"target directory (default ${OUT_ENV} or .)")

    p = sub.add_parser("probe", parents=[common], help="detect the gate time and report")
    p.add_argument("--output", "-o", default=None, help="also write the JSON report here")

    p = sub.add_parser("sweep", parents=[common], help="probe over one parameter")
    p.add_argument("--axis", required=True, help="parameter to vary")
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--output", "-o", default=None, help="table file (default: stdout)")
    p.add_argument("--workers", type=int, default=1)
    return parser


def _load_config_file(path):
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("config file must contain a JSON object")
    return {k.replace("-", "_"): v for k, v in data.items()}


def resolve_run_config(args, *, default_stride=1):
    """Merge built-in defaults, the optional config file, and command-line flags."""
    file_values = _load_config_file(getattr(args, "config", None))

    def pick(name):
        value = getattr(args, name, None)
        return file_values.get(name) if value is None else value

    params = {}
    for name in SystemParameters.field_names():
        value = pick(name)
        params[name] = getattr(DEFAULT_PARAMS, name) if value is None else parse_expr(value)
    params = SystemParameters(**params)

    defaults = IntegratorConfig()
    stride = pick("sample_stride")
    integrator = IntegratorConfig(
        method=pick("method") or defaults.method,
        dt=parse_expr(pick("dt") if pick("dt") is not None else defaults.dt),
        rel_tol=parse_expr(pick("rel_tol") if pick("rel_tol") is not None else defaults.rel_tol),
        abs_tol=parse_expr(pick("abs_tol") if pick("abs_tol") is not None else defaults.abs_tol),
        sample_stride=default_stride if stride is None else stride,
    )

    def number(name, default):
        value = pick(name)
        return default if value is None else parse_expr(value)

    initial = pick("initial")
    return RunConfig(
        params=params,
        integrator=integrator,
        t_start=number("t_start", 0.0),
        t_end=number("t_end", DEFAULT_HORIZON),
        initial=cnot_initial() if initial is None else parse_initial(initial),
        threshold=number("threshold", DEFAULT_THRESHOLD),
        horizon=number("horizon", DEFAULT_HORIZON),
        output_path=pick("output"),
        output_format=pick("output_format") or "csv",
    )


def _summary(traj):
    pops = traj.populations()[-1]
    return ("t_final={} p00={} p01={} p10={} p11={} max_norm_error={:.3e}".format(
        fmt(traj.final_time), *(format(x, ".12f") for x in pops), traj.max_norm_error))


def cmd_simulate(cfg):
    traj = evolve(cfg.params, cfg.initial, cfg.t_start, cfg.t_end, cfg.integrator)
    if cfg.output_path:
        if cfg.output_format == "json":
            write_trajectory_json(cfg.output_path, traj)
        else:
            write_trajectory_csv(cfg.output_path, traj)
        print(_summary(traj))
    else:
        if cfg.output_format == "json":
            raise UsageError("json output requires --output")
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(TRAJECTORY_COLUMNS)
        writer.writerows(trajectory_rows(traj.times, traj.amplitudes))
        print(_summary(traj), file=sys.stderr)
    return traj


FIGURE_FILES = {
    "fig1": "fig1_norm.csv",
    "fig2": "fig2_c0.csv",
    "fig3": "fig3_c1.csv",
    "fig4": "fig4_c2.csv",
    "fig5": "fig5_c3.csv",
}


def _symmetric_series(params, config, half_width):
    """Samples on [-half_width, half_width] in increasing time, t=0 once."""
    start = cnot_initial()
    fwd = evolve(params, start, 0.0, half_width, config)
    bwd = evolve(params, start, 0.0, -half_width, config)
    times = np.concatenate([bwd.times[::-1], fwd.times[1:]])
    amps = np.concatenate([bwd.amplitudes[::-1], fwd.amplitudes[1:]])
    return times, amps, max(fwd.max_norm_error, bwd.max_norm_error), fwd, bwd


def cmd_figures(cfg, out_dir):
    """Write five curve files plus ``manifest.json``; returns the manifest."""
    os.makedirs(out_dir, exist_ok=True)
    # detection always uses every step; the stride only thins the written curves
    detect = replace(cfg.integrator, sample_stride=1)
    try:
        report = cnot_probe(cfg.params, detect, cfg.horizon, cfg.threshold)
        half_width, found = report.gate_time, True
    except GateNotFoundError as exc:
        print(f"warning: {exc}; writing curves over the full horizon", file=sys.stderr)
        report, half_width, found = exc, cfg.horizon, False

    times, amps, max_norm_error, fwd, bwd = _symmetric_series(
        cfg.params, cfg.integrator, half_width)
    pops = np.abs(amps) ** 2
    norm2 = pops.sum(axis=1)
    write_table_csv(os.path.join(out_dir, FIGURE_FILES["fig1"]), ("t", "norm2"),
                    ([fmt(t), fmt(n)] for t, n in zip(times, norm2)))
    for k in range(4):
        name = FIGURE_FILES[f"fig{k + 2}"]
        write_table_csv(os.path.join(out_dir, name), ("t", f"p{k:02b}"),
                        ([fmt(t), fmt(p)] for t, p in zip(times, pops[:, k])))

    fwd_pops = fwd.populations()
    bwd_pops = bwd.populations()
    manifest = {
        "generator": f"chronoq {__version__}",
        "gate_found": found,
        "gate_time": report.gate_time if found else None,
        "peak_population": report.peak_population_forward if found else None,
        "peak_population_backward": report.peak_population_backward if found else None,
        "best_peak_seen": None if found else report.best_peak,
        "threshold": cfg.threshold,
        "horizon": cfg.horizon,
        "unity_peak_claim": {
            "criterion": f"peak >= {UNITY_CLAIM_LEVEL}",
            "reproduced": bool(found and report.peak_population_forward >= UNITY_CLAIM_LEVEL),
            "note": ("the |11> population is asserted to reach exactly 1; "
                     "'peak_population' is the value these parameters actually attain"),
        },
        "max_norm_error": max_norm_error,
        "mirror_residual_curves": mirror_residual(fwd_pops, bwd_pops),
        "params": cfg.params.to_dict(),
        "integrator": cfg.integrator.to_dict(),
        "files": dict(FIGURE_FILES),
    }
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {len(FIGURE_FILES)} curve files to {out_dir} "
          f"(T={manifest['gate_time']}, peak={manifest['peak_population']})")
    return manifest


def cmd_probe(cfg):
    """Print the probe report as JSON; returns ``(exit_code, document)``."""
    try:
        report = cnot_probe(cfg.params, cfg.integrator, cfg.horizon, cfg.threshold)
    except GateNotFoundError as exc:
        doc = {"found": False, "best_peak": exc.best_peak, "best_time": exc.best_time,
               "threshold": cfg.threshold, "horizon": cfg.horizon,
               "max_norm_error": exc.max_norm_error}
        code = EXIT_NOT_FOUND
    else:
        doc = {"found": True, **report.to_dict()}
        code = EXIT_OK if report.mirror_residual <= PROBE_MIRROR_LIMIT else EXIT_NUMERICAL
    doc["params"] = cfg.params.to_dict()
    text = json.dumps(doc, indent=2, sort_keys=True)
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text + "\n")
    print(text)
    return code, doc


SWEEP_COLUMNS = ("value", "found", "T", "peak", "max_norm_error")


def _sweep_row(cfg, axis, value):
    params = cfg.params.with_(**{axis: value})
    try:
        report = cnot_probe(params, cfg.integrator, cfg.horizon, cfg.threshold)
    except GateNotFoundError as exc:
        return [fmt(value), "false", "", "", fmt(exc.max_norm_error)]
    return [fmt(value), "true", fmt(report.gate_time), fmt(report.peak_population_forward),
            fmt(report.max_norm_error)]


def cmd_sweep(cfg, axis, values, workers=1):
    """One probe per value; rows come back in input order whatever the scheduling."""
    if axis not in SystemParameters.field_names():
        raise UsageError(f"unknown axis {axis!r}; choose from {', '.join(SystemParameters.field_names())}")
    values = [parse_expr(v) for v in values]
    # validate every value before starting any work
    for v in values:
        cfg.params.with_(**{axis: v})
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        rows = list(pool.map(lambda v: _sweep_row(cfg, axis, v), values))
    if cfg.output_path:
        write_table_csv(cfg.output_path, SWEEP_COLUMNS, rows)
    else:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS)
        writer.writerows(rows)
    return rows


def run(argv=None):
    """Parse ``argv`` and dispatch; returns the process exit code."""
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            cmd_simulate(resolve_run_config(args))
        elif args.command == "figures":
            cfg = resolve_run_config(args, default_stride=FIGURE_STRIDE)
            out_dir = args.out_dir or os.environ.get(OUT_ENV) or "."
            cmd_figures(cfg, out_dir)
        elif args.command == "probe":
            code, _ = cmd_probe(resolve_run_config(args))
            return code
        elif args.command == "sweep":
            values = [v for v in args.values.split(",") if v.strip()]
            cmd_sweep(resolve_run_config(args), args.axis, values, args.workers)
    except UsageError as exc:
        print(f"chronoq: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"chronoq: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except GateNotFoundError as exc:
        print(f"chronoq: {exc}", file=sys.stderr)
        return EXIT_NOT_FOUND
    except OSError as exc:
        print(f"chronoq: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ChronoqError as exc:
        print(f"chronoq: {exc}", file=sys.stderr)
        return exc.exit_code
    return EXIT_OK


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
