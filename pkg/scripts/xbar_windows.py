"""Literal and coordinate-aligned x-bar inclusions over a grid of horizons.

    python scripts/xbar_windows.py [--horizons 200,500,1000,2000]

One row per claim; columns give pass/fail per horizon plus the first
missing iterate at the largest horizon.
"""

import argparse
from fractions import Fraction

from expanselab.constructions import ex1_claims


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--horizons", default="200,500,1000,2000")
    ap.add_argument("--delta", type=Fraction, default=Fraction(1, 4))
    args = ap.parse_args(argv)
    horizons = [int(h) for h in args.horizons.split(",")]
    table = {}
    for H in horizons:
        for c in ex1_claims(args.delta, H, literal=True, corrected=True):
            table.setdefault(c.claim_id, {})[H] = c
    width = max(map(len, table))
    print(f"{'claim':<{width}}  " + "  ".join(f"H={H:<5}" for H in horizons) + "  detail")
    for cid, row in table.items():
        cells = "  ".join(f"{'pass' if row[H].passed else 'FAIL':<7}" for H in horizons)
        last = row[horizons[-1]].detail
        print(f"{cid:<{width}}  {cells}  {last}")


if __name__ == "__main__":
    main()
