"""Command-line entry point.

    viscowave kernel-decay   [--config F] [--outdir D] [--set k=v ...]
    viscowave highfreq       ...
    viscowave linear-box     ...
    viscowave nonlinear-box  ...
    viscowave fit            --set csv=... --set ycol=... [--set where=kind=A]
    viscowave reproduce      [all|NAME ...] [--slow]

Experiment subcommands resolve defaults < config file < ``--set``
overrides, run one job, and write artifacts into the output directory.
``reproduce`` runs acceptance checks and exits nonzero if any ran and
failed.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError, EXPERIMENT_KINDS, load_spec
from .experiments import RUNNERS

__all__ = ["build_parser", "main"]

_KIND_HELP = {
    "kernel-decay": "radial kernel norms over a time ladder, with slope fits",
    "highfreq": "high-band sup decay rate vs the dissipation scale",
    "linear-box": "exact linear evolution of localized box data",
    "nonlinear-box": "full nonlinear run with structural diagnostics",
    "fit": "re-fit a column of an emitted CSV over a chosen window",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="viscowave",
        description="spectral decay diagnostics for incompressible viscoelastic flow",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for kind in EXPERIMENT_KINDS:
        p = sub.add_parser(kind, help=_KIND_HELP[kind])
        p.add_argument("--config", type=Path, default=None, help="INI config file")
        p.add_argument("--outdir", type=Path, default=None, help="output directory")
        p.add_argument("--name", default=None, help="run name (default: the subcommand)")
        p.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override one parameter; repeatable",
        )
        p.add_argument("--no-figures", action="store_true", help="skip figure rendering")
    rep = sub.add_parser("reproduce", help="run acceptance checks and report pass/fail")
    rep.add_argument(
        "names",
        nargs="*",
        default=["all"],
        help="criterion names, or 'all' (default); see --list",
    )
    rep.add_argument("--slow", action="store_true", help="include optional slow criteria")
    rep.add_argument("--list", action="store_true", help="list criterion names and exit")
    rep.add_argument("--report", type=Path, default=None, help="also write the report as JSON")
    return parser


def _parse_overrides(parser: argparse.ArgumentParser, pairs: list[str]) -> dict[str, str]:
    overrides = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key.strip():
            parser.error(f"--set expects KEY=VALUE, got {pair!r}")
        overrides[key.strip()] = value.strip()
    return overrides


def _cmd_experiment(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    overrides = _parse_overrides(parser, args.overrides)
    try:
        spec = load_spec(
            args.command,
            config_path=args.config,
            overrides=overrides,
            outdir=args.outdir,
            name=args.name,
            figures=False if args.no_figures else None,
        )
        summary = RUNNERS[spec.kind](spec)
    except ConfigError as exc:
        parser.error(str(exc))
    print(f"{spec.kind}: wrote {spec.outdir}")
    for fit in summary.get("fits", []):
        print(
            f"  {fit.get('column', fit.get('kind', '?'))}"
            f"{' p=' + str(fit['p']) if 'p' in fit else ''}:"
            f" slope {fit['slope']:+.4f}"
            f" (theoretical {fit['theoretical']:+.3f},"
            f" deviation {fit['deviation']:.3f})"
        )
    for rate in summary.get("rates", []):
        print(
            f"  mu={rate['mu']:g}: rate {rate['rate']:.5f}"
            f" (target {rate['target']:.5f}, ratio {rate['ratio']:.4f})"
        )
    if "slope" in summary:
        line = f"  {summary['parameters']['ycol']}: slope {summary['slope']:+.4f}"
        if "deviation" in summary:
            line += f" (theoretical {summary['theoretical']:+.3f}, deviation {summary['deviation']:.3f})"
        print(line)
    if summary.get("ok") is False:
        print("diagnostics failed; see the summary JSON", file=sys.stderr)
        return 1
    return 0


def _cmd_reproduce(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    # imported lazily: the registry pulls in every module
    from .acceptance import REGISTRY, format_report, run_criteria
    from .reporting import write_json

    if args.list:
        for check in REGISTRY:
            slow = "  [slow]" if check.slow else ""
            print(f"{check.name:<24} {check.summary}{slow}")
        return 0
    names = list(args.names)
    if names == ["all"] or not names:
        names = None
    else:
        known = {check.name for check in REGISTRY}
        unknown = [n for n in names if n not in known]
        if unknown:
            parser.error(
                f"unknown criterion name(s): {', '.join(unknown)}; valid names: {', '.join(sorted(known))}"
            )
    results = run_criteria(names, include_slow=args.slow)
    print(format_report(results))
    if args.report is not None:
        write_json(
            args.report,
            [
                {
                    "name": r.name,
                    "passed": r.passed,
                    "skipped": r.skipped,
                    "runtime": r.runtime,
                    "measured": r.measured,
                    "notes": r.notes,
                }
                for r in results
            ],
        )
    failed = [r for r in results if not r.skipped and not r.passed]
    return 1 if failed else 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "reproduce":
        return _cmd_reproduce(parser, args)
    return _cmd_experiment(parser, args)


if __name__ == "__main__":
    raise SystemExit(main())
