"""Seeded corpus of small finite systems for the theorem checks.

Two kinds of random tables are produced:

* ``table``: off-diagonal distances drawn from {1, 5/4, 3/2, 7/4, 2}, so the
  triangle inequality holds automatically (a <= 2 <= b + c);
* ``line``: distinct dyadic points of [0, 1] with the usual metric.

Maps are arbitrary tables or, for invertible members, permutations.
The default seed is read from ``EXPANSELAB_SEED``.
"""

from __future__ import annotations

import os
import random
from fractions import Fraction

from .finite_systems import FiniteMetricSystem, four_cycle, identity_two, line_system

TABLE_VALUES = tuple(Fraction(k, 4) for k in range(4, 9))


def default_seed() -> int:
    return int(os.environ.get("EXPANSELAB_SEED", "0"))


def _map(rng: random.Random, n: int, invertible: bool) -> list[int]:
    if invertible:
        perm = list(range(n))
        rng.shuffle(perm)
        return perm
    return [rng.randrange(n) for _ in range(n)]


def random_table_system(rng: random.Random, n: int, invertible: bool = False,
                        name: str = "table") -> FiniteMetricSystem:
    dist = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            dist[i][j] = dist[j][i] = rng.choice(TABLE_VALUES)
    return FiniteMetricSystem.build([f"p{i}" for i in range(n)], dist,
                                    _map(rng, n, invertible), name)


def random_line_system(rng: random.Random, n: int, invertible: bool = False,
                       name: str = "line") -> FiniteMetricSystem:
    xs = sorted(rng.sample(range(33), n))
    values = [Fraction(x, 32) for x in xs]
    return line_system(values, _map(rng, n, invertible), name=name)


def random_system(rng: random.Random, n: int, invertible: bool = False) -> FiniteMetricSystem:
    kind = rng.choice(("table", "line"))
    maker = random_table_system if kind == "table" else random_line_system
    return maker(rng, n, invertible, name=f"{kind}{n}{'-inv' if invertible else ''}")


def corpus(seed: int | None = None, count: int = 12, n_max: int = 8, n_min: int = 2,
           invertible: bool | None = None) -> list[FiniteMetricSystem]:
    """``count`` random systems plus, unless restricted to non-invertible maps,
    the 4-cycle and the identity on two points.

    ``invertible=None`` alternates between arbitrary maps and permutations.
    """
    rng = random.Random(default_seed() if seed is None else seed)
    out = []
    if invertible is not False:
        out += [four_cycle(), identity_two()]
    for k in range(count):
        inv = (k % 2 == 1) if invertible is None else invertible
        n = rng.randint(n_min, n_max)
        sys = random_system(rng, n, inv)
        out.append(FiniteMetricSystem.build(sys.points, sys.dist, sys.map,
                                            f"{sys.name}#{k}", check_metric=False))
    return out
