"""Relative deviation of kappa_alpha from C_{d,alpha} |x|^{-d-2 alpha} along a coordinate axis.

    python scripts/riesz_asymptotics.py --configs "1:-0.25,2:-0.5,3:0.5,3:-1" --rmax 200
"""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from lattice_hardy.riesz import riesz_asymptotic_constant, riesz_many


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--configs", default="1:-0.25,2:-0.5,3:0.5,3:-1")
    ap.add_argument("--rmin", type=int, default=20)
    ap.add_argument("--rmax", type=int, default=200)
    ap.add_argument("--step", type=int, default=10)
    args = ap.parse_args(argv)

    rs = np.arange(args.rmin, args.rmax + 1, args.step)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["d", "alpha", "r", "kappa", "deviation"])
    for item in args.configs.split(","):
        d_text, a_text = item.split(":")
        d, alpha = int(d_text), float(a_text)
        pts = np.zeros((rs.size, d), dtype=np.int64)
        pts[:, 0] = rs
        vals = riesz_many(alpha, pts)
        dev = np.abs(vals * rs ** (d + 2 * alpha) / riesz_asymptotic_constant(alpha, d) - 1)
        for r, v, e in zip(rs, vals, dev):
            writer.writerow([d, alpha, int(r), repr(float(v)), repr(float(e))])
        slope = np.polyfit(np.log(rs), np.log(dev), 1)[0]
        print(f"# d={d} alpha={alpha}: log-log slope {slope:.4f}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
