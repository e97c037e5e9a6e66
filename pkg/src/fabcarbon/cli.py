"""Command-line front end.

Subcommands::

    fabcarbon run <scenario.toml> [--seed N] [--samples N] [--grid N]
                  [--out DIR] [--quantiles 0.5,0.95] [--format json|csv]
                  [--workers N]
    fabcarbon validate <bundle-dir>
    fabcarbon list-nodes <bundle-dir>

Exit codes: 0 ok, 2 scenario parse error, 3 bundle validation error,
4 numeric or infeasibility error.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .errors import FabCarbonError, IngestError, ScenarioError, UnknownNodeError
from .ingest import load_bundle
from .scenario import parse_scenario, run_scenario

EXIT_OK = 0
EXIT_SCENARIO = 2
EXIT_BUNDLE = 3
EXIT_NUMERIC = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fabcarbon", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"fabcarbon {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario file and write artifacts")
    run.add_argument("scenario", help="path to the scenario TOML file")
    run.add_argument("--seed", type=int, help="override the Monte Carlo seed")
    run.add_argument("--samples", type=int, help="override the Monte Carlo trial count")
    run.add_argument("--grid", type=int, help="override the grid resolution (default 4096)")
    run.add_argument("--out", help="override the output directory")
    run.add_argument("--quantiles", help="comma-separated quantiles (default 0.5,0.95)")
    run.add_argument("--format", choices=("json", "csv"), help="distribution file format (default csv)")
    run.add_argument("--workers", type=int, help="Monte Carlo worker threads (results are identical)")

    validate = sub.add_parser("validate", help="validate a dataset bundle")
    validate.add_argument("bundle", help="path to the bundle directory")

    nodes = sub.add_parser("list-nodes", help="list the technology nodes in a bundle")
    nodes.add_argument("bundle", help="path to the bundle directory")
    return parser


def _overrides_from_args(args: argparse.Namespace) -> dict:
    overrides = {}
    for key in ("seed", "samples", "grid", "out", "format", "workers"):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    if getattr(args, "quantiles", None):
        try:
            overrides["quantiles"] = tuple(float(q) for q in args.quantiles.split(","))
        except ValueError:
            raise ScenarioError(f"--quantiles must be a comma-separated list, got {args.quantiles!r}") from None
    return overrides


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "run":
        try:
            scenario = parse_scenario(args.scenario, _overrides_from_args(args))
        except ScenarioError as exc:
            print(f"scenario error: {exc}", file=sys.stderr)
            return EXIT_SCENARIO
        try:
            run_scenario(scenario)
        except IngestError as exc:
            print(f"bundle error: {exc}", file=sys.stderr)
            return EXIT_BUNDLE
        except (ScenarioError, UnknownNodeError) as exc:
            print(f"scenario error: {exc}", file=sys.stderr)
            return EXIT_SCENARIO
        except FabCarbonError as exc:
            print(f"numeric error: {exc}", file=sys.stderr)
            return EXIT_NUMERIC
        print(f"wrote artifacts to {scenario.output_dir}")
        return EXIT_OK

    if args.command == "validate":
        try:
            bundle = load_bundle(args.bundle)
        except IngestError as exc:
            print(f"bundle error: {exc}", file=sys.stderr)
            return EXIT_BUNDLE
        print(f"ok: bundle {bundle.name!r} version {bundle.version} "
              f"({len(bundle.nodes)} nodes, {len(bundle.ci_histories)} CI regions, "
              f"{len(bundle.utilization_sets)} utilization sets)")
        return EXIT_OK

    if args.command == "list-nodes":
        try:
            bundle = load_bundle(args.bundle)
        except IngestError as exc:
            print(f"bundle error: {exc}", file=sys.stderr)
            return EXIT_BUNDLE
        for name in sorted(bundle.nodes):
            node = bundle.nodes[name]
            print(f"{name}: mass production {node.mass_production_year}, "
                  f"epa_base {node.epa_base} kWh/cm2 (anchor {node.epa_anchor_year}), "
                  f"mpa {node.mpa} kgCO2e/cm2")
        return EXIT_OK

    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
