"""Command-line entry point.

Subcommands:
  simulate       measure one grid point and print its record
  sweep          run a config-file grid and write a CSV
  find-n-star    search for the smallest n hitting a target success rate
  separation     compare local and central thresholds across dimensions
  verify-bounds  print the exact divergence report for a channel file
  privacy-audit  print the exact privacy parameter of a channel file

Exit codes: 0 on success, 2 on validation errors, 3 when a threshold search
exhausts its n budget. Grid defaults below are harness choices, not sourced
from anywhere; pick your own with the flags.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .channels import audit_epsilon, read_channel
from .harness import (
    CRITERIA,
    PROTOCOLS,
    ExperimentConfig,
    config_from_mapping,
    find_n_star,
    override_config,
    parse_config_text,
    records_to_table,
    run_point,
    run_sweep,
    separation_report,
)
from .info_engine import DivergenceReport, average_chi_square

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NOT_FOUND = 3


def _write_or_print(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _cmd_simulate(args) -> int:
    ExperimentConfig(
        d_values=(args.d,),
        alpha_values=(args.alpha,),
        epsilon_values=(args.epsilon,),
        protocol=args.protocol,
        n_values=(args.n,),
        trials=args.trials,
        criterion=args.criterion,
        seed=args.seed,
    )
    result = run_point(
        args.d, args.alpha, args.epsilon, args.protocol, args.criterion,
        args.n, args.trials, args.seed,
    )
    sys.stdout.write(records_to_table([result.record], args.format))
    if result.mean_gap is not None:
        sys.stdout.write(f"mean_gap = {result.mean_gap!r}\n")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    mapping = parse_config_text(Path(args.config).read_text())
    cfg = config_from_mapping(mapping)
    cfg = override_config(cfg, seed=args.seed, out=args.out, threads=args.threads)
    records = run_sweep(cfg)
    table = records_to_table(records, args.format)
    _write_or_print(table, cfg.out)
    return EXIT_OK


def _cmd_find_n_star(args) -> int:
    result = find_n_star(
        args.d, args.alpha, args.epsilon, args.protocol, args.criterion,
        args.trials, args.seed, args.target, args.n_max,
    )
    sys.stdout.write(records_to_table(result.trace, args.format))
    if result.warning:
        sys.stdout.write(f"warning = {result.warning}\n")
    if not result.found:
        sys.stdout.write(f"n_star = not-found (n_max = {args.n_max})\n")
        return EXIT_NOT_FOUND
    sys.stdout.write(f"n_star = {result.n_star}\n")
    return EXIT_OK


def _cmd_separation(args) -> int:
    report = separation_report(
        args.d, args.alpha, args.epsilon, args.target, args.trials, args.seed,
        n_max_local=args.n_max_local, n_max_central=args.n_max_central,
    )
    sys.stdout.write(report.to_text() + "\n")
    if args.out:
        Path(args.out).write_text(report.to_csv())
    if any(row.n_local is None or row.n_central is None for row in report.rows):
        return EXIT_NOT_FOUND
    return EXIT_OK


def _cmd_verify_bounds(args) -> int:
    ch = read_channel(args.channel)
    report: DivergenceReport = average_chi_square(ch, args.alpha, n=args.n)
    if args.format == "csv":
        text = DivergenceReport.csv_header() + "\n" + report.to_csv_row() + "\n"
    else:
        text = report.to_text() + "\n"
    _write_or_print(text, args.out)
    return EXIT_OK


def _cmd_privacy_audit(args) -> int:
    ch = read_channel(args.channel)
    audit = audit_epsilon(ch)
    z, x, xp = audit.attained_at
    sys.stdout.write(f"epsilon_exact = {audit.epsilon_exact!r}\n")
    sys.stdout.write(f"attained_at = message {z}, inputs {x} vs {xp}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ldplab",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="measure one grid point")
    sim.add_argument("--d", type=int, required=True)
    sim.add_argument("--alpha", type=float, required=True)
    sim.add_argument("--epsilon", type=float, required=True)
    sim.add_argument("--protocol", choices=PROTOCOLS, required=True)
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--trials", type=int, default=200)
    sim.add_argument("--criterion", choices=CRITERIA, default="identify-bj")
    sim.add_argument("--seed", type=int, default=0, help="master seed (64-bit)")
    sim.add_argument("--format", choices=("csv", "tsv"), default="csv")
    sim.set_defaults(func=_cmd_simulate)

    sw = sub.add_parser("sweep", help="run a config-file grid, emit CSV")
    sw.add_argument("--config", required=True, help="plain-text key = value file")
    sw.add_argument("--out", default=None, help="output path (default: config out, else stdout)")
    sw.add_argument("--threads", type=int, default=None)
    sw.add_argument("--seed", type=int, default=None, help="override the config seed")
    sw.add_argument("--format", choices=("csv", "tsv"), default="csv")
    sw.set_defaults(func=_cmd_sweep)

    ns = sub.add_parser("find-n-star", help="search the sample threshold for a target rate")
    ns.add_argument("--d", type=int, required=True)
    ns.add_argument("--alpha", type=float, required=True)
    ns.add_argument("--epsilon", type=float, required=True)
    ns.add_argument("--protocol", choices=PROTOCOLS, required=True)
    ns.add_argument("--criterion", choices=CRITERIA, default="identify-bj")
    ns.add_argument("--target", type=float, default=2.0 / 3.0)
    ns.add_argument("--trials", type=int, default=200)
    ns.add_argument("--n-max", type=int, default=1 << 17)
    ns.add_argument("--seed", type=int, default=0, help="master seed (64-bit)")
    ns.add_argument("--format", choices=("csv", "tsv"), default="csv")
    ns.set_defaults(func=_cmd_find_n_star)

    sep = sub.add_parser("separation", help="local vs central thresholds per dimension")
    sep.add_argument("--d", type=int, nargs="+", default=[4, 8, 16, 32],
                     help="dimension grid (default 4 8 16 32, a harness choice)")
    sep.add_argument("--alpha", type=float, default=0.5)
    sep.add_argument("--epsilon", type=float, default=1.0)
    sep.add_argument("--target", type=float, default=2.0 / 3.0)
    sep.add_argument("--trials", type=int, default=200)
    sep.add_argument("--n-max-local", type=int, default=1 << 17)
    sep.add_argument("--n-max-central", type=int, default=1 << 14)
    sep.add_argument("--out", default=None, help="also write the table as CSV")
    sep.add_argument("--seed", type=int, default=0, help="master seed (64-bit)")
    sep.set_defaults(func=_cmd_separation)

    vb = sub.add_parser("verify-bounds", help="divergence report for a channel file")
    vb.add_argument("channel", help="channel file ('d m' header plus probability rows)")
    vb.add_argument("--alpha", type=float, required=True)
    vb.add_argument("--n", type=int, default=1, help="sample count for the Fano ceiling")
    vb.add_argument("--out", default=None)
    vb.add_argument("--format", choices=("text", "csv"), default="text")
    vb.set_defaults(func=_cmd_verify_bounds)

    pa = sub.add_parser("privacy-audit", help="exact privacy parameter of a channel file")
    pa.add_argument("channel", help="channel file ('d m' header plus probability rows)")
    pa.set_defaults(func=_cmd_privacy_audit)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    raise SystemExit(main())
