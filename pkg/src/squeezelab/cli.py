"""Command-line entry point for the experiment suite."""

from __future__ import annotations

import argparse
import sys

from .domains import build_omega_prime, preset
from .conformal import canonical_annulus_map
from .experiments import (
    ExperimentConfig,
    emit,
    run_counterexample,
    run_lemma22,
    run_lemma24_25,
    run_pipeline,
)
from .squeezing import squeeze_lower_planar

_RUNNERS = {
    "lemma22": run_lemma22,
    "lemma24-25": run_lemma24_25,
    "pipeline": run_pipeline,
    "counterexample": run_counterexample,
}


def _add_common(sub):
    sub.add_argument("--preset", default="all", help="domain preset (default: all)")
    sub.add_argument("--scales", type=int, default=20, help="number of dyadic scales")
    sub.add_argument("--seed", type=int, default=0, help="random seed")
    sub.add_argument("--out", default="", help="write the report to this path")
    sub.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="squeezelab",
        description="Numerical checks of distance bounds and squeezing estimates.",
    )
    subs = parser.add_subparsers(dest="command", required=True)
    for name in _RUNNERS:
        sub = subs.add_parser(name, help=f"run the {name} experiment")
        _add_common(sub)

    sq = subs.add_parser("squeeze", help="squeezing lower bound at one point")
    sq.add_argument("--preset", default="omega_prime")
    sq.add_argument("--at", required=True, help="evaluation point, e.g. 0.05 or 0.1+0.2j")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "squeeze":
        dom = build_omega_prime() if args.preset == "omega_prime" else preset(args.preset)
        z = complex(args.at)
        amap = canonical_annulus_map(dom) if dom.connectivity == 2 else None
        bound = squeeze_lower_planar(dom, z, amap=amap)
        print(f"squeeze_lower({args.preset}, {z}) = {bound.lower!r}")
        print(f"one_minus_lower = {bound.one_minus_lower!r}  witness = {bound.witness}")
        return 0

    config = ExperimentConfig(
        experiment=args.command.replace("-", "_"),
        domain_preset=args.preset,
        scales=args.scales,
        seed=args.seed,
        output_path=args.out,
    )
    report = _RUNNERS[args.command](config)
    text = emit(report, args.format, args.out or None)
    if args.out:
        print(f"wrote {args.out}")
    else:
        print(text)
    for v in report.verdicts:
        status = "PASS" if v["passed"] else "FAIL"
        print(f"[{status}] {v['name']} (margin {v['margin']:.3e})", file=sys.stderr)
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
