#!/usr/bin/env python3
"""Sweep asymptotics against the independent references for every shipped
problem and print a relative-error table.

Example:
    python scripts/convergence_sweep.py --lambdas 20,40,80 --out /tmp/sweep
"""

import argparse
import sys

from oscint3 import cli

SWEEPS = {
    "gaussian-sp": "20,40,80",
    "pole-sp": "20,40,80",
    "double-cross": "20,40,80",
    "triple-cross": "20,40,80",
    "cone": "30,60",
    "kelvin": "40,80",
}


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--problems", default=",".join(SWEEPS),
                    help="comma-separated subset of the registry")
    ap.add_argument("--lambdas", default="",
                    help="override the per-problem frequency lists")
    ap.add_argument("--out", default="/tmp/oscint3-sweep",
                    help="output file prefix")
    args = ap.parse_args()

    print(f"{'problem':<14}{'lambda':>8}{'rel_error':>12}{'runtime_s':>11}")
    for name in args.problems.split(","):
        lams = args.lambdas or SWEEPS[name]
        cfg = cli.parse_config(f"mode = compare\nproblem = {name}\n"
                               f"lambda = {lams}\nout = {args.out}-{name}\n")
        (path,) = cli.run(cfg)
        with open(path, newline="") as fh:
            rows = [l for l in fh.read().split("\r\n") if l][1:]
        for row in rows:
            c = row.split(",")
            print(f"{name:<14}{float(c[0]):>8.0f}{float(c[5]):>12.4f}"
                  f"{float(c[6]):>11.2f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
