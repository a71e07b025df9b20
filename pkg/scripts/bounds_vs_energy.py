#!/usr/bin/env python3
"""Sweep the security bounds of a symmetric ring over pulse energy.

Writes one CSV row per (N, S) point with the minimum-error and unambiguous
figures plus the binary keyed/unkeyed receivers, the raw material for the
usual security-vs-energy curves.

Usage: python scripts/bounds_vs_energy.py [--n 2047] [--out bounds.csv]
"""
import argparse
import csv
import math
import sys

from alphaeta.detection import (
    helstrom_binary_pure,
    quadrature_binary,
    srm_symmetric,
    usd_symmetric,
)


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, nargs="+", default=[2047])
    ap.add_argument("--s", type=float, nargs="+",
                    default=[0.1, 1.0, 10.0, 100.0, 1e3, 1e4])
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    out = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(out)
    w.writerow(["n", "s", "ring_error", "usd_success",
                "keyed_binary_error", "unkeyed_homodyne_error"])
    for n in args.n:
        for s in args.s:
            a = math.sqrt(s)
            w.writerow([
                n, f"{s:.17g}",
                f"{srm_symmetric(n, s).value:.17g}",
                f"{usd_symmetric(n, s).value:.17g}",
                f"{helstrom_binary_pure(a, -a).value:.17g}",
                f"{quadrature_binary(a, -a, 'homodyne').value:.17g}",
            ])
    if args.out:
        out.close()
        print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
