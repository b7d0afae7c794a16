"""Command-line entry point: ``csd run | sweep | tables | info``."""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence

from csd import kernels
from csd.harness import (
    SCHEMES,
    SWEEP_AXES,
    TABLE_TARGETS,
    ConfigError,
    ScenarioSpec,
    bundled_scenario,
    describe,
    estimate_rates,
    load_scenario,
    period_table,
    sweep,
    sweep_to_csv,
    table_to_csv,
    write_zscores,
)

log = logging.getLogger("csd")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NO_EVIDENCE = 3


def _add_overrides(p: argparse.ArgumentParser) -> None:
    p.add_argument("--trials", type=int, help="Monte Carlo trials per hypothesis")
    p.add_argument("--periods", type=int, help="detection periods per trial")
    p.add_argument("--seed", type=int, help="master seed (64-bit unsigned)")
    p.add_argument("--scheme", choices=SCHEMES)
    p.add_argument("--workers", type=int, default=1, help="worker processes (results do not depend on it)")


def _apply_overrides(spec: ScenarioSpec, args: argparse.Namespace) -> ScenarioSpec:
    changes = {}
    if args.trials is not None:
        changes["trials"] = args.trials
    if args.periods is not None:
        changes["max_periods"] = args.periods
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.scheme is not None:
        changes["scheme"] = args.scheme
    return spec.replace(**changes) if changes else spec


def _parse_values(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"--values must be comma-separated numbers, got {text!r}") from None


def _emit(text: str, dest: str | None) -> None:
    if dest:
        with open(dest, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_run(args: argparse.Namespace) -> int:
    spec = _apply_overrides(load_scenario(args.scenario), args)
    log.info("running %s: scheme=%s trials=%d periods=%d backend=%s",
             spec.name, spec.scheme, spec.trials, spec.max_periods, kernels.BACKEND)
    curve = estimate_rates(spec, workers=args.workers)
    _emit(curve.to_csv(), args.out)
    if args.debug_zscores:
        write_zscores(spec, args.debug_zscores, trials=args.debug_trials)
    if all(n == spec.trials for n in curve.no_evidence_final):
        log.error("every trial ended with all reports removed; no verdict was possible")
        return EXIT_NO_EVIDENCE
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    spec = _apply_overrides(load_scenario(args.scenario), args)
    results = sweep(spec, args.axis, _parse_values(args.values), workers=args.workers)
    _emit(sweep_to_csv(args.axis, results), args.out)
    return EXIT_OK


def cmd_tables(args: argparse.Namespace) -> int:
    spec = load_scenario(args.scenario) if args.scenario else bundled_scenario("scenario2")
    spec = _apply_overrides(spec, args)
    rows = period_table(spec, "fap", args.kappas, args.q_primes, TABLE_TARGETS, workers=args.workers)
    rows += period_table(spec, "mdp", args.kappas, args.q_dprimes, TABLE_TARGETS, workers=args.workers)
    _emit(table_to_csv(rows), args.out)
    return EXIT_OK


def cmd_info(args: argparse.Namespace) -> int:
    spec = load_scenario(args.scenario)
    for key, value in describe(spec).items():
        print(f"{key}: {value}")
    print(f"kernel_backend: {kernels.BACKEND}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="csd", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="estimate FAP/MDP per period for one scenario")
    p.add_argument("scenario", help="scenario YAML file or bundled name (scenario1..scenario4)")
    _add_overrides(p)
    p.add_argument("--out", help="curve CSV path (default: stdout)")
    p.add_argument("--debug-zscores", metavar="CSV", help="dump per-period Z-score tables")
    p.add_argument("--debug-trials", type=int, default=10, help="trials per hypothesis in the Z-score dump")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="one rate curve per value of a parameter")
    p.add_argument("scenario")
    p.add_argument("--axis", required=True, choices=SWEEP_AXES)
    p.add_argument("--values", required=True, help="comma-separated values")
    _add_overrides(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("tables", help="periods needed to reach FAP/MDP targets over a strategy grid")
    p.add_argument("--scenario", help="defaults to the bundled scenario2")
    p.add_argument("--kappas", type=_parse_values, default=[2.0, 20.0])
    p.add_argument("--q-primes", type=_parse_values, default=[0.2, 0.4, 0.8])
    p.add_argument("--q-dprimes", type=_parse_values, default=[0.05, 0.1, 0.15])
    _add_overrides(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("info", help="closed-form summary of a scenario")
    p.add_argument("scenario")
    p.set_defaults(func=cmd_info)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    # argparse itself exits with status 2 on malformed arguments
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"csd: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
