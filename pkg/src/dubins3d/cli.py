"""Command line: ``dubins3d plan`` and ``dubins3d bench``."""

from __future__ import annotations

import argparse
import sys

from .io import InstanceError, format_table, run_benchmark, run_instance

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 2:
        raise argparse.ArgumentTypeError("must be an integer >= 2")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dubins3d", description="Shortest bounded pitch/yaw rate paths between 3D configurations.")
    sub = p.add_subparsers(dest="command", required=True)

    pl = sub.add_parser("plan", help="solve one instance file")
    pl.add_argument("--instance", required=True)
    pl.add_argument("--rpitch", type=float)
    pl.add_argument("--ryaw", type=float)
    pl.add_argument("--theta-disc", type=_positive_int)
    pl.add_argument("--phi-disc", type=_positive_int)
    pl.add_argument("--step", type=float)
    pl.add_argument("--out", help="result JSON path")
    pl.add_argument("--csv", help="trajectory CSV path")
    pl.add_argument("--refine", action="store_true", help="golden-section polish of the best grid point")

    b = sub.add_parser("bench", help="run a manifest of instances")
    b.add_argument("--manifest", required=True)
    b.add_argument("--out", help="summary JSON path")
    b.add_argument("--workers", type=int, help="parallel worker processes")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "plan":
        try:
            res = run_instance(
                args.instance, args.rpitch, args.ryaw, args.theta_disc, args.phi_disc,
                args.step, args.refine, args.out, args.csv,
            )
        except InstanceError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
        if res.status != "ok":
            print(f"infeasible: {res.error}", file=sys.stderr)
            return EXIT_INFEASIBLE
        print(f"{res.best_class} {res.total_length:.4f} m in {res.wall_time:.2f} s")
        return EXIT_OK
    try:
        table = run_benchmark(args.manifest, args.out, workers=args.workers)
    except InstanceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(format_table(table))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
