"""Command line entry point: ``toeplitz-lab <subcommand> [options]``."""

from __future__ import annotations

import argparse
import json
import sys

from . import experiments
from .errors import ConfigError

SUBCOMMANDS = tuple(experiments.EXPERIMENTS) + ("all",)
HELP = {
    "counterexample": "non-inverse witness T T* pi pi* vs pi pi* T T* on e_p",
    "dichotomy": "Taylor partial-sum sup errors for Blaschke and singular symbols",
    "wold": "wandering subspaces and symbol recovery",
    "extension": "interleaved extension with T^2 = pi(1) and the normal-form search",
    "regular": "exact inverse-semigroup laws for regular representations",
    "factorize": "Euclid factorization of T_{Phi_{1/n}}",
    "tower": "the tower T_{Phi_{1/2^k}} and its generator relations",
    "gamma": "operators for m + n t in Gamma+",
    "all": "run every experiment and summarise",
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=512, help="truncation size N (16..8192)")
    common.add_argument("--eps", type=float, default=1e-8, help="tolerance budget (0, 1e-2]")
    common.add_argument("--t", type=float, default=1.0, help="singular mass of the symbol")
    common.add_argument("--order", type=int, default=0, help="monomial order of the symbol")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled words")
    common.add_argument("--out", default=None, help="write the JSON report to this path")
    common.add_argument("--json", action="store_true", help="print JSON instead of a table")

    parser = argparse.ArgumentParser(
        prog="toeplitz-lab",
        description="Numerical checks for semigroups of Toeplitz operators with inner symbols.",
    )
    sub = parser.add_subparsers(dest="experiment", required=True, metavar="SUBCOMMAND")
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common], help=HELP[name])
    return parser


def dumps(report):
    return json.dumps(report, indent=2, sort_keys=True)


def _flat(results, prefix=""):
    for key, value in results.items():
        if isinstance(value, dict):
            yield from _flat(value, f"{prefix}{key}.")
        elif not isinstance(value, list):
            yield f"{prefix}{key}", value


def format_table(report):
    lines = []
    if report["experiment"] == "all":
        lines.append(f"{'experiment':<16}{'claim':<28}status")
        for name, sub in report["results"]["reports"].items():
            lines.append(f"{name:<16}{sub['claim']:<28}{sub['results']['status']}")
    else:
        lines.append(f"{report['experiment']} [{report['claim']}]")
        for key, value in _flat(report["results"]):
            if isinstance(value, float):
                value = f"{value:.6g}"
            lines.append(f"  {key:<44}{value}")
    if report["experiment"] != "all" and report["results"]["status"] == "skipped":
        lines.append("overall: skipped")
    else:
        lines.append(f"overall: {'pass' if report['pass'] else 'FAIL'}")
    return "\n".join(lines)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = experiments.ExperimentConfig(
            experiment=args.experiment, n=args.n, eps=args.eps, t=args.t, order=args.order,
            seed=args.seed, out=args.out,
        )
        if args.experiment == "all":
            report = experiments.run_all(cfg)
        else:
            report = experiments.run_one(args.experiment, cfg)
    except ConfigError as exc:
        print(f"toeplitz-lab: config error: {exc}", file=sys.stderr)
        return 2
    text = dumps(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(text if args.json else format_table(report))
    return experiments.exit_code(report)


if __name__ == "__main__":
    sys.exit(main())
