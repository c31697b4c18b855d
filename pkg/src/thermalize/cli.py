"""``thermalize`` command-line entry point.

Exit codes: 0 success, 1 config error, 2 empty or degenerate physics,
3 resource cap exceeded.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import experiments as ex
from .config import ExperimentConfig, TwoLevelConfig, load_config, parse_window
from .counting import CountTable
from .exceptions import (CapExceeded, ConfigError, DegenerateFit, DegenerateGap, EmptyShell,
                         NonPositiveDenominator, NonPositiveEnergy, SpecError)
from .output import metadata, to_csv, to_json, with_log_columns

EXIT_OK, EXIT_CONFIG, EXIT_PHYSICS, EXIT_CAP = 0, 1, 2, 3

COUNT_COLUMNS = CountTable.COLUMNS + ("ln_p_exact", "ln_p_analytic")
TABLE1_COLUMNS = ("kappa", "beta", "r_squared", "beta_theory", "window")
DEFORM_COLUMNS = ("band", "kappa", "n", "bath_lo", "bath_hi")
TWO_LEVEL_COLUMNS = ("F", "P_plus_exact", "P_minus_exact", "S_vn_exact", "beta_eff_exact",
                     "P_plus_approx", "P_minus_approx", "S_vn_approx", "beta_eff_approx",
                     "S_gibbs")


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def _window(text: str):
    try:
        return parse_window(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thermalize",
        description="Shell counting, typicality sampling and temperature analysis.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("count", "level populations from bath-state counting"),
        ("table1", "fitted inverse temperature per kappa"),
        ("deform-map", "bath-energy bands with and without coupling"),
        ("sample", "random pure-state typicality check"),
        ("two-level", "quasi-thermal qubit: exact vs expanded quantities"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", type=Path, required=(name != "two-level"),
                       help="experiment config (strict JSON)")
        p.add_argument("--fit-window", type=_window, metavar="A:B",
                       help="inclusive level range for Gibbs fits")
        p.add_argument("--out", type=Path, help="output file (default: stdout)")
        p.add_argument("--seed", type=_u64, help="override run.seed")
        p.add_argument("--format", choices=("csv", "json"), help="override output.format")
        if name == "two-level":
            p.add_argument("--beta", type=float)
            p.add_argument("--delta", type=float)
            p.add_argument("--F", type=float, nargs="+", dest="F_grid")
    return parser


def _resolve(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    run = cfg.run
    if args.seed is not None:
        run = replace(run, seed=args.seed)
    if args.fit_window is not None:
        run = replace(run, fit_window=args.fit_window)
    output = cfg.output
    if args.format is not None:
        output = replace(output, format=args.format)
    elif args.out is not None and args.out.suffix.lower() in (".json", ".csv"):
        output = replace(output, format=args.out.suffix.lower()[1:])
    if args.out is not None:
        output = replace(output, path=str(args.out))
    two = cfg.two_level
    if getattr(args, "beta", None) is not None or getattr(args, "F_grid", None):
        if args.beta is None or args.delta is None or not args.F_grid:
            raise ConfigError("--beta, --delta and --F must be given together")
        two = TwoLevelConfig(args.beta, args.delta, tuple(args.F_grid))
    return replace(cfg, run=run, output=output, two_level=two)


def _emit(cfg: ExperimentConfig, rows, columns, meta: dict, extra: dict | None = None):
    if cfg.output.format == "json":
        doc = {"metadata": meta, "rows": rows}
        if extra:
            doc.update(extra)
        text = to_json(doc)
    else:
        text = to_csv(rows, columns)
    if cfg.output.path:
        Path(cfg.output.path).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_count(cfg: ExperimentConfig):
    table = ex.run_count(cfg)
    rows = with_log_columns(table.rows(), ("p_exact", "p_analytic"))
    meta = metadata(cfg.digest(), cfg.run.seed, "count", **table.metadata)
    _emit(cfg, rows, COUNT_COLUMNS, meta, {"totals": table.to_dict()["totals"]})


def cmd_table1(cfg: ExperimentConfig):
    rows = ex.run_table1(cfg)
    meta = metadata(cfg.digest(), cfg.run.seed, "table1",
                    window=list(rows[0].window), abscissa=cfg.run.fit_abscissa,
                    monotone_decreasing=ex.is_strictly_decreasing(rows))
    _emit(cfg, [r.as_row() for r in rows], TABLE1_COLUMNS, meta)
    if not meta["monotone_decreasing"]:
        raise DegenerateFit("fitted beta is not strictly decreasing in kappa")


def cmd_deform_map(cfg: ExperimentConfig):
    rows = ex.run_deform_map(cfg)
    _emit(cfg, rows, DEFORM_COLUMNS, metadata(cfg.digest(), cfg.run.seed, "deform-map"))


def cmd_sample(cfg: ExperimentConfig):
    report = ex.run_sample(cfg)
    M = len(report.reference)
    rows = []
    for i, (seed, pops, dev, coh) in enumerate(zip(report.seeds, report.sampled,
                                                   report.deviations, report.coherences)):
        row = {"sample": i, "seed": seed, "deviation": dev, "max_coherence": coh}
        row.update({f"P_{n}": p for n, p in enumerate(pops)})
        rows.append(row)
    columns = ("sample", "seed", "deviation", "max_coherence") + tuple(f"P_{n}" for n in range(M))
    meta = metadata(cfg.digest(), cfg.run.seed, "sample", dimension=report.dimension,
                    median_deviation=report.median_deviation)
    _emit(cfg, rows, columns, meta, {"reference": report.reference})


def cmd_two_level(cfg: ExperimentConfig):
    two = ex.require_two_level(cfg)
    rows, rejected = ex.two_level_sweep(two.beta, two.delta, two.F)
    for F in rejected:
        print(f"thermalize: rejected |F|={F!r}: |F|^2 exceeds p+ p-", file=sys.stderr)
    meta = metadata(cfg.digest(), cfg.run.seed, "two-level", beta=two.beta, delta=two.delta,
                    rejected_F=rejected)
    _emit(cfg, rows, TWO_LEVEL_COLUMNS, meta)


COMMANDS = {
    "count": cmd_count,
    "table1": cmd_table1,
    "deform-map": cmd_deform_map,
    "sample": cmd_sample,
    "two-level": cmd_two_level,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _resolve(args)
        COMMANDS[args.command](cfg)
    except (ConfigError, SpecError, OSError) as exc:
        print(f"thermalize: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CapExceeded as exc:
        print(f"thermalize: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (EmptyShell, DegenerateFit, DegenerateGap, NonPositiveEnergy,
            NonPositiveDenominator) as exc:
        print(f"thermalize: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
