"""Generator verdicts for eg1 ball covers along {1..H} and along {0..H}.

    python scripts/generator_index_sets.py [--N 6] [--horizon 12]

Small ball covers of eg1 keep 1/2 and 1/3 apart at every iterate n >= 1
but place them together at n = 0, so the two index sets disagree.
"""

import argparse
from fractions import Fraction

from expanselab.constructions import eg1_system
from expanselab.generators import (ball_cover, f_star_generator_verdict, generator_verdict,
                                   positive_index_family)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--N", type=int, default=6)
    ap.add_argument("--horizon", type=int, default=12)
    args = ap.parse_args(argv)
    sys = eg1_system(args.N)
    H = args.horizon
    radii = sorted({sys.dist[i][j] / 2 for i, j in sys.pairs()} | {Fraction(1, 24), Fraction(1, 1000)})
    pos = positive_index_family(H)
    print(f"{'radius':>8}  {'sets':>4}  {'n >= 1':<18}  {'n >= 0':<18}")
    for r in radii:
        if r > Fraction(1, 4):
            continue
        cover = ball_cover(sys, r)
        a = f_star_generator_verdict(sys, cover, pos, H).kind.value
        b = generator_verdict(sys, cover, H).kind.value
        print(f"{str(r):>8}  {len(cover.distinct):>4}  {a:<18}  {b:<18}")


if __name__ == "__main__":
    main()
