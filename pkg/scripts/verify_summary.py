"""Run every verification suite and print pass/fail counts per suite.

    python scripts/verify_summary.py [--horizon H]

Exit status is 0 iff every claim passed.
"""

import argparse
import sys
from collections import Counter

from expanselab.cli import SUITES, RunConfig, run


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--horizon", type=int)
    ap.add_argument("--literal", action="store_true")
    args = ap.parse_args(argv)
    bad = 0
    for suite in SUITES:
        reports, _ = run(RunConfig("verify", suite, horizon=args.horizon, literal=args.literal))
        n = Counter(r.passed for r in reports)
        secs = sum(r.runtime for r in reports)
        print(f"{suite:<20} pass {n[True]:>4}  fail {n[False]:>3}  {secs:7.2f}s")
        for r in reports:
            if not r.passed:
                print(f"    {r.claim}: {r.witness}")
        bad += n[False]
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
