"""Command-line interface.

Every subcommand emits plot-ready CSV/JSON plus a manifest.json capturing
the fully resolved configuration and tool version, so any output can be
reproduced from its run directory alone.  No rendering happens here.

Exit codes: 0 success, 1 verification failure, 2 usage or config error,
3 infeasible parameters.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import pilotqec
from pilotqec import capacity, harness, verify
from pilotqec._kernels import backend_name

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_INFEASIBLE = 3

DEFAULT_RATES_HZ = [100e6, 500e6, 1e9, 5e9, 10e9]
DEFAULT_N_LIST = [2446, 12446, 24946, 124946, 249946]


def _default_seed() -> int:
    return int(os.environ.get("PILOTQEC_SEED", "0"))


def _write_manifest(out_dir: Path, command: str, parameters: dict, outputs: list[str]) -> None:
    manifest = {
        "tool": "pilotqec",
        "version": pilotqec.__version__,
        "kernel_backend": backend_name(),
        "command": command,
        "parameters": parameters,
        "outputs": outputs,
    }
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _write_output(out_dir: Path, name: str, text: str) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / name).write_text(text)


def _float_list(text: str) -> list[float]:
    return [float(item) for item in text.split(",") if item.strip() != ""]


def _int_list(text: str) -> list[int]:
    return [int(item) for item in text.split(",") if item.strip() != ""]


def _cmd_table1(args) -> int:
    out_dir = Path(args.output_dir)
    csv_text = capacity.table1_csv(args.max_l)
    _write_output(out_dir, "table1.csv", csv_text)
    _write_manifest(out_dir, "table1", {"max_l": args.max_l}, ["table1.csv"])
    sys.stdout.write(csv_text)
    return EXIT_OK


def _cmd_table2(args) -> int:
    if args.attenuation <= 0:
        sys.stderr.write("error: zero or negative attenuation gives zero throughput\n")
        return EXIT_INFEASIBLE
    rates = _float_list(args.rates)
    rows = capacity.table2_rows(rates, args.t_crit, args.attenuation, args.r)
    for row in rows:
        if row[3] == "":
            sys.stderr.write(
                f"warning: rate {row[0]:g} Hz admits only {row[2]} qubits, "
                f"row infeasible for r={args.r}\n"
            )
    csv_text = capacity.table2_csv(rates, args.t_crit, args.attenuation, args.r)
    out_dir = Path(args.output_dir)
    _write_output(out_dir, "table2.csv", csv_text)
    _write_manifest(
        out_dir,
        "table2",
        {"rates_hz": rates, "t_crit_s": args.t_crit, "attenuation": args.attenuation, "r": args.r},
        ["table2.csv"],
    )
    sys.stdout.write(csv_text)
    return EXIT_OK


def _cmd_capacity(args) -> int:
    p_values = _float_list(args.p_list)
    csv_text = capacity.capacity_curve_csv(p_values, args.t, args.t_crit)
    out_dir = Path(args.output_dir)
    _write_output(out_dir, "capacity_curve.csv", csv_text)
    _write_manifest(
        out_dir,
        "capacity",
        {"p_depol": p_values, "t_s": args.t, "t_crit_s": args.t_crit},
        ["capacity_curve.csv"],
    )
    sys.stdout.write(csv_text)
    return EXIT_OK


def _cmd_rates(args) -> int:
    n_values = _int_list(args.n_list)
    csv_text = capacity.rate_convergence_csv(args.p_depol, args.r, n_values, args.t, args.t_crit)
    out_dir = Path(args.output_dir)
    _write_output(out_dir, "rate_convergence.csv", csv_text)
    _write_manifest(
        out_dir,
        "rates",
        {
            "p_depol": args.p_depol,
            "r": args.r,
            "n_list": n_values,
            "t_s": args.t,
            "t_crit_s": args.t_crit,
        },
        ["rate_convergence.csv"],
    )
    sys.stdout.write(csv_text)
    return EXIT_OK


def _cmd_budget(args) -> int:
    try:
        budget = capacity.link_budget(args.f_source, args.t_crit, args.attenuation, args.r)
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INFEASIBLE
    payload = {
        "f_source_hz": budget.f_source,
        "t_crit_s": budget.t_crit,
        "attenuation": budget.attenuation,
        "sigma": budget.sigma,
        "N": budget.total_n_plus_r,
        "r": budget.pilot_r,
        "n": budget.data_n,
        "redundancy": budget.redundancy,
    }
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    out_dir = Path(args.output_dir)
    _write_output(out_dir, "budget.json", text)
    _write_manifest(
        out_dir,
        "budget",
        {
            "f_source_hz": args.f_source,
            "t_crit_s": args.t_crit,
            "attenuation": args.attenuation,
            "r": args.r,
        },
        ["budget.json"],
    )
    sys.stdout.write(text)
    return EXIT_OK


def _load_config(args) -> harness.ExperimentConfig:
    raw = json.loads(Path(args.config).read_text())
    if "seed" not in raw:
        raw["seed"] = args.seed if args.seed is not None else _default_seed()
    if args.seed is not None:
        raw["seed"] = args.seed
    if getattr(args, "theta", None) is not None:
        theta = math.radians(args.theta) if args.degrees else args.theta
        raw["protocol"]["theta_rad"] = theta
        raw["protocol"]["channel"]["theta_rad"] = theta
    return harness.ExperimentConfig.from_json_dict(raw)


def _cmd_simulate(args) -> int:
    try:
        config = _load_config(args)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG_ERROR
    try:
        config.validate_feasible()
    except harness.InfeasibleConfig as exc:
        sys.stderr.write(f"infeasible: {exc}\n")
        return EXIT_INFEASIBLE
    except ValueError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG_ERROR
    result = harness.run(config)
    run_dir = harness.write_run_directory(config, result, args.output_dir)
    _write_manifest(
        run_dir,
        "simulate",
        {"config": config.to_json_dict()},
        ["summary.json", "trials.csv"],
    )
    sys.stdout.write(f"{run_dir}\n")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    try:
        config = _load_config(args)
        values = _float_list(args.values)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG_ERROR
    try:
        results = harness.sweep(config, args.parameter, values)
    except harness.InfeasibleConfig as exc:
        sys.stderr.write(f"infeasible: {exc}\n")
        return EXIT_INFEASIBLE
    except ValueError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG_ERROR
    header = [args.parameter, "estimate", "stderr", "ci95_low", "ci95_high", "analytic", "trials_run"]
    lines = [",".join(header)]
    for value, summary in results:
        lines.append(
            ",".join(
                str(x)
                for x in [
                    value,
                    summary.estimate,
                    summary.stderr,
                    summary.ci95_low,
                    summary.ci95_high,
                    summary.analytic,
                    summary.trials_run,
                ]
            )
        )
    csv_text = "\n".join(lines) + "\n"
    out_dir = Path(args.output_dir)
    _write_output(out_dir, "sweep.csv", csv_text)
    _write_manifest(
        out_dir,
        "sweep",
        {"config": config.to_json_dict(), "parameter": args.parameter, "values": values},
        ["sweep.csv"],
    )
    sys.stdout.write(csv_text)
    return EXIT_OK


def _cmd_verify(args) -> int:
    results = verify.run_all()
    all_ok = True
    for check in results:
        status = "PASS" if check.passed else "FAIL"
        sys.stdout.write(f"{status}  {check.name}  ({check.detail})\n")
        all_ok = all_ok and check.passed
    sys.stdout.write(f"{'all checks passed' if all_ok else 'VERIFICATION FAILED'}\n")
    return EXIT_OK if all_ok else EXIT_VERIFY_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pilotqec",
        description=(
            "Simulator and calculators for pilot-state polarization error "
            "correction over time-dependent depolarizing links."
        ),
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_output_dir(p, default):
        p.add_argument("--output-dir", default=default, help="directory for outputs + manifest")

    p = sub.add_parser("table1", help="pilot counts and cascade success per string length")
    p.add_argument("--max-l", type=int, default=6)
    add_output_dir(p, "runs/table1")
    p.set_defaults(func=_cmd_table1)

    p = sub.add_parser("table2", help="link budget rows per laser repetition rate")
    p.add_argument("--rates", default=",".join(f"{r:g}" for r in DEFAULT_RATES_HZ))
    p.add_argument("--t-crit", type=float, default=0.5)
    p.add_argument("--attenuation", type=float, default=5e-5)
    p.add_argument("--r", type=int, default=54)
    add_output_dir(p, "runs/table2")
    p.set_defaults(func=_cmd_table2)

    p = sub.add_parser("capacity", help="capacity curve over the depolarization parameter")
    p.add_argument(
        "--p-list",
        default=",".join(f"{0.01 * i:g}" for i in range(26)),
        help="comma-separated depolarization probabilities",
    )
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--t-crit", type=float, default=0.5)
    add_output_dir(p, "runs/capacity")
    p.set_defaults(func=_cmd_capacity)

    p = sub.add_parser("rates", help="code rates converging to capacity as n grows")
    p.add_argument("--p-depol", type=float, default=0.05)
    p.add_argument("--r", type=int, default=54)
    p.add_argument("--n-list", default=",".join(str(n) for n in DEFAULT_N_LIST))
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--t-crit", type=float, default=0.5)
    add_output_dir(p, "runs/rates")
    p.set_defaults(func=_cmd_rates)

    p = sub.add_parser("budget", help="single link-budget evaluation")
    p.add_argument("--f-source", type=float, default=100e6)
    p.add_argument("--t-crit", type=float, default=0.5)
    p.add_argument("--attenuation", type=float, default=5e-5)
    p.add_argument("--r", type=int, default=54)
    add_output_dir(p, "runs/budget")
    p.set_defaults(func=_cmd_budget)

    p = sub.add_parser("simulate", help="run one experiment from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None, help="override config seed")
    p.add_argument("--theta", type=float, default=None, help="override rotation angle")
    p.add_argument("--degrees", action="store_true", help="interpret --theta in degrees")
    add_output_dir(p, "runs")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("sweep", help="re-run an experiment across one parameter")
    p.add_argument("--config", required=True)
    p.add_argument("--parameter", required=True, choices=["l", "k", "p_depol", "n", "t"])
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--degrees", action="store_true")
    add_output_dir(p, "runs/sweep")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("verify", help="run the full invariant suite")
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
