"""Command line front end: run config-described experiments.

Subcommands mirror the experiment kinds: ``fidelity``, ``ldos``,
``ensemble-stats``, ``sector-info``.  Each takes a config file and optional
overrides for the output directory, thread count and master seed.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .runner import override, parse_config, run_experiment


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symfid",
        description="Fidelity decay experiments for kicked tops and random ensembles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {
        "fidelity": "average echo curves and fit/classify their decay",
        "ldos": "local density of states between a map and its perturbed twin",
        "ensemble-stats": "eigenangle spacing statistics of ensemble samples",
        "sector-info": "dimensions and checks of a parity sector",
    }
    for name, help_text in commands.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, type=Path, help="config file (INI)")
        p.add_argument("--output", type=Path, default=None, help="override output_dir")
        p.add_argument("--threads", type=int, default=1, help="worker threads (default 1)")
        p.add_argument("--seed", type=int, default=None, help="override master_seed")
        p.add_argument("--verbose", action="store_true", help="report progress per combo")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    experiment = args.command.replace("-", "_")
    try:
        text = args.config.read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        config = parse_config(text, experiment=experiment)
        if args.output is not None:
            config = override(config, output_dir=str(args.output))
        if args.seed is not None:
            config = override(config, master_seed=args.seed)
        if args.threads < 1:
            raise ValueError("--threads must be >= 1")
        manifest = run_experiment(config, threads=args.threads, verbose=args.verbose)
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {len(manifest.outputs)} file(s) to {config.output_dir}")
    print(f"manifest: {manifest.path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
