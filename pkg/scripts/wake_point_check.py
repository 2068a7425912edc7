#!/usr/bin/env python3
"""Check one wake observation point three independent ways: the closed-form
term sum, the generic detect/classify/expand pipeline, and the residue
oracle.

Example:
    python scripts/wake_point_check.py --z1 3 --z2 1.5 --tau 10 --Lambda 40
"""

import argparse
import sys

import numpy as np

from oscint3 import kelvin, oracle
from oscint3.asym import sum_asymptotics


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--z1", type=float, default=3.0)
    ap.add_argument("--z2", type=float, default=1.5)
    ap.add_argument("--tau", type=float, default=10.0)
    ap.add_argument("--Lambda", type=float, default=40.0)
    args = ap.parse_args()
    z1, z2, tau, lam = args.z1, args.z2, args.tau, args.Lambda

    closed = kelvin.field_point(z1, z2, tau, lam)
    total, terms = sum_asymptotics(kelvin.kelvin_problem(z1, z2, tau), lam)
    generic = float(np.real(total))
    ref = float(np.real(oracle.kelvin_oracle(z1, z2, tau, lam)))

    print(f"closed-form terms : {closed:+.10f}")
    print(f"generic pipeline  : {generic:+.10f}  ({len(terms)} terms)")
    for t in terms:
        loc = ", ".join(f"{v:+.4f}" for v in t.source.location)
        print(f"  {t.source.kind.value:<16} at ({loc})  power {t.power:+.1f}")
    print(f"residue oracle    : {ref:+.10f}")
    if ref:
        print(f"relative error vs oracle: {abs(closed - ref) / abs(ref):.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
