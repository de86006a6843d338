"""Shell exponents, verdicts and classes for a list of alphas; writes the ScanReport JSON.

    python scripts/trichotomy_scan.py --d 3 --sigma 0.5 --alphas 0.75,1.0,1.25 --radii 10,20,40,80
"""

from __future__ import annotations

import argparse
import sys

from lattice_hardy.criticality import scan


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--d", type=int, default=3)
    ap.add_argument("--sigma", type=float, default=0.5)
    ap.add_argument("--alphas", default="0.75,1.0,1.25")
    ap.add_argument("--radii", default="10,20,40,80")
    ap.add_argument("--output")
    args = ap.parse_args(argv)

    alphas = [float(a) for a in args.alphas.split(",")]
    radii = [int(r) for r in args.radii.split(",")]
    report = scan(args.sigma, args.d, alphas, radii)
    for s in report.scans:
        expected = 4 * s.alpha - 2 * args.sigma - args.d - 1
        print(
            f"alpha={s.alpha}: exponent {s.shell_exponent:+.4f} (expected {expected:+.2f}), "
            f"{s.verdict}, {s.classification}",
            file=sys.stderr,
        )
    text = report.to_json() + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
