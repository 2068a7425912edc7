#!/usr/bin/env python3
"""Render the ship-wake field and the two wavefront families as PGM images.

Example:
    python scripts/render_wake.py --tau 10 --Lambda 80 --grid 300x200 \
        --out /tmp/wake
"""

import argparse
import sys

from oscint3 import cli


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--tau", type=float, default=10.0)
    ap.add_argument("--Lambda", type=float, default=80.0)
    ap.add_argument("--grid", default="300x200")
    ap.add_argument("--z1-range", default="0:14")
    ap.add_argument("--z2-range", default="-5:5")
    ap.add_argument("--out", default="/tmp/wake")
    args = ap.parse_args()

    base = (f"problem = kelvin\nlambda = {args.Lambda}\ntau = {args.tau}\n"
            f"grid = {args.grid}\nz1-range = {args.z1_range}\n"
            f"z2-range = {args.z2_range}\nout = {args.out}\n")
    files = []
    for mode in ("field", "fronts"):
        files += cli.run(cli.parse_config(f"mode = {mode}\n" + base))
    for f in files:
        print(f)
    return 0


if __name__ == "__main__":
    sys.exit(main())
