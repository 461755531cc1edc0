"""Finite metric systems as exact tables.

Everything here is decidable: a pair orbit ``n -> (f^n x, f^n y)`` on an
``n``-point system enters a cycle within ``n**2`` steps, and the boolean
powers of a chain graph's adjacency matrix are eventually periodic.  The
"horizon" arguments therefore only matter when they are shorter than those
bounds.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .families import FamilyVerdict, Verdict, WindowSet, classify, longest_block
from .sequences import as_fraction

DYADIC_GRID = tuple(Fraction(1, 1 << j) for j in range(13))


class SystemError_(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FiniteMetricSystem:
    points: tuple
    dist: tuple[tuple[Fraction, ...], ...]
    map: tuple[int, ...]
    name: str = "finite"
    check_metric: bool = field(default=True, repr=False)

    def __post_init__(self):
        n = len(self.points)
        if n == 0:
            raise SystemError_("a system needs at least one point")
        if len(self.dist) != n or any(len(row) != n for row in self.dist):
            raise SystemError_("distance table must be n x n")
        if len(self.map) != n or any(not 0 <= j < n for j in self.map):
            raise SystemError_("map must be a total table on point indices")
        if len(set(self.points)) != n:
            raise SystemError_("point labels must be distinct")
        d = self.dist
        for i in range(n):
            if d[i][i] != 0:
                raise SystemError_(f"nonzero self-distance at {self.points[i]!r}")
            for j in range(i + 1, n):
                if d[i][j] != d[j][i]:
                    raise SystemError_("distance table is not symmetric")
                if d[i][j] <= 0:
                    raise SystemError_("distinct points need positive distance")
        if self.check_metric:
            for i, j, k in itertools.product(range(n), repeat=3):
                if d[i][k] > d[i][j] + d[j][k]:
                    raise SystemError_(f"triangle inequality fails at {i}, {j}, {k}")

    @classmethod
    def build(cls, points, dist, fmap, name="finite", check_metric=True) -> "FiniteMetricSystem":
        table = tuple(tuple(as_fraction(v) for v in row) for row in dist)
        return cls(tuple(points), table, tuple(int(j) for j in fmap), name, check_metric)

    @property
    def n(self) -> int:
        return len(self.points)

    @cached_property
    def invertible(self) -> bool:
        return sorted(self.map) == list(range(self.n))

    @cached_property
    def inverse_map(self) -> tuple[int, ...]:
        if not self.invertible:
            raise SystemError_("map is not a bijection")
        inv = [0] * self.n
        for i, j in enumerate(self.map):
            inv[j] = i
        return tuple(inv)

    @cached_property
    def diameter(self) -> Fraction:
        return max((v for row in self.dist for v in row), default=Fraction(0))

    @cached_property
    def distance_values(self) -> tuple[Fraction, ...]:
        return tuple(sorted({v for row in self.dist for v in row if v > 0}))

    def index(self, label) -> int:
        try:
            return self.points.index(label)
        except ValueError:
            raise SystemError_(f"unknown point {label!r}") from None

    def iterate(self, p: int, n: int) -> int:
        if n < 0:
            table = self.inverse_map
            n = -n
        else:
            table = self.map
        for _ in range(n):
            p = table[p]
        return p

    def distance(self, p: int, q: int, budget: int = 0) -> Fraction:
        return self.dist[p][q]

    def pairs(self, indices: Iterable[int] | None = None):
        idx = range(self.n) if indices is None else sorted(indices)
        return itertools.combinations(idx, 2)

    def to_json(self) -> dict:
        return {"points": [str(p) for p in self.points],
                "dist": [[str(v) for v in row] for row in self.dist],
                "map": list(self.map), "invertible": self.invertible}

    @classmethod
    def from_json(cls, data: dict | str, name: str = "finite") -> "FiniteMetricSystem":
        if isinstance(data, str):
            data = json.loads(data)
        sys = cls.build(data["points"], data["dist"], data["map"], name)
        if "invertible" in data and bool(data["invertible"]) != sys.invertible:
            raise SystemError_("invertible flag disagrees with the map table")
        return sys


def line_system(values: Sequence, fmap: Sequence[int], labels=None, name="line") -> FiniteMetricSystem:
    """Points on the real line with the usual metric."""
    vals = [as_fraction(v) for v in values]
    labels = labels if labels is not None else [str(v) for v in vals]
    dist = [[abs(a - b) for b in vals] for a in vals]
    return FiniteMetricSystem.build(labels, dist, fmap, name, check_metric=False)


def uniform_system(n: int, fmap: Sequence[int], scale=1, name="uniform") -> FiniteMetricSystem:
    """``n`` points at mutual distance ``scale``."""
    s = as_fraction(scale)
    dist = [[Fraction(0) if i == j else s for j in range(n)] for i in range(n)]
    return FiniteMetricSystem.build([f"p{i}" for i in range(n)], dist, fmap, name)


def four_cycle(scale=1) -> FiniteMetricSystem:
    return uniform_system(4, [1, 2, 3, 0], scale, "four_cycle")


def identity_two() -> FiniteMetricSystem:
    return uniform_system(2, [0, 1], 1, "identity_two")


def one_point() -> FiniteMetricSystem:
    return uniform_system(1, [0], 1, "one_point")


# -- pair orbits and eventually periodic index sets ---------------------------

@dataclass(frozen=True)
class PairOrbit:
    """States ``(f^n x, f^n y)`` for ``n = 0 .. tail + period - 1``; periodic from ``tail``."""

    states: tuple[tuple[int, int], ...]
    tail: int
    period: int

    def state(self, n: int) -> tuple[int, int]:
        if n < len(self.states):
            return self.states[n]
        return self.states[self.tail + (n - self.tail) % self.period]


def pair_orbit(sys: FiniteMetricSystem, x: int, y: int) -> PairOrbit:
    seen = {}
    states = []
    s = (x, y)
    while s not in seen:
        seen[s] = len(states)
        states.append(s)
        s = (sys.map[s[0]], sys.map[s[1]])
    tail = seen[s]
    orbit = PairOrbit(tuple(states), tail, len(states) - tail)
    assert len(states) <= sys.n ** 2
    return orbit


@dataclass(frozen=True)
class PeriodicIndexSet:
    """An eventually periodic subset of the positive integers.

    ``head`` holds members below ``start``; from ``start`` on, membership of
    ``n`` is ``cycle[(n - start) % len(cycle)]``.
    """

    head: frozenset[int]
    start: int
    cycle: tuple[bool, ...]

    def __contains__(self, n: int) -> bool:
        if n < self.start:
            return n in self.head
        return self.cycle[(n - self.start) % len(self.cycle)]

    def window(self, horizon: int) -> WindowSet:
        return WindowSet(1, horizon, tuple(n for n in range(1, horizon + 1) if n in self))

    @property
    def is_empty(self) -> bool:
        return not self.head and not any(self.cycle)

    @property
    def is_finite(self) -> bool:
        return not any(self.cycle)

    @property
    def is_cofinite(self) -> bool:
        return all(self.cycle)

    # a periodic set with one gap has bounded blocks, so thick == cofinite here
    is_thick = is_cofinite

    @property
    def is_syndetic(self) -> bool:
        return any(self.cycle)

    def verdict(self, kind: str) -> FamilyVerdict:
        ok = {"thick": self.is_thick, "syndetic": self.is_syndetic,
              "cofinite": self.is_cofinite, "nonempty": not self.is_empty}[kind]
        witness = {"start": self.start, "period": len(self.cycle),
                   "cycle": "".join("1" if c else "0" for c in self.cycle), "exact": True}
        return FamilyVerdict(Verdict.CONSISTENT if ok else Verdict.REFUTED, witness, None)


def separation_profile(sys: FiniteMetricSystem, x: int, y: int, delta) -> PeriodicIndexSet:
    """Exact description of ``N(x, y, delta)`` over all n >= 1."""
    delta = as_fraction(delta)
    orb = pair_orbit(sys, x, y)
    start = max(orb.tail, 1)
    head = frozenset(n for n in range(1, start) if sys.dist[orb.states[n][0]][orb.states[n][1]] > delta)
    cycle = []
    for n in range(start, start + orb.period):
        a, b = orb.state(n)
        cycle.append(sys.dist[a][b] > delta)
    return PeriodicIndexSet(head, start, tuple(cycle))


def separation_sup(sys: FiniteMetricSystem, x: int, y: int, horizon: int | None = None) -> Fraction:
    """``max_{1 <= n <= H} d(f^n x, f^n y)``; exact over all n >= 1 when H is omitted."""
    orb = pair_orbit(sys, x, y)
    # n = 1 .. tail + period visits every state reachable at some n >= 1
    upper = orb.tail + orb.period
    if horizon is not None:
        upper = min(upper, horizon)
    best = Fraction(0)
    for n in range(1, upper + 1):
        a, b = orb.state(n)
        best = max(best, sys.dist[a][b])
    return best


# -- chains ---------------------------------------------------------------

def _resolve(sys: FiniteMetricSystem, p) -> int:
    if p in sys.points:
        return sys.points.index(p)
    if isinstance(p, (int, np.integer)) and not isinstance(p, bool) and 0 <= p < sys.n:
        return int(p)
    raise SystemError_(f"unknown point {p!r}")


def is_pseudo_orbit(sys: FiniteMetricSystem, seq: Sequence, delta) -> bool:
    """True iff ``d(f(x_i), x_{i+1}) < delta`` for every consecutive pair."""
    if len(seq) < 2:
        raise SystemError_("a pseudo orbit needs at least two points")
    delta = as_fraction(delta)
    idx = [_resolve(sys, p) for p in seq]
    return all(sys.dist[sys.map[a]][b] < delta for a, b in zip(idx, idx[1:]))


@dataclass(frozen=True, eq=False)
class ChainGraph:
    system: FiniteMetricSystem
    delta: Fraction

    @cached_property
    def adjacency(self) -> np.ndarray:
        s = self.system
        adj = np.zeros((s.n, s.n), dtype=bool)
        for i in range(s.n):
            row = s.dist[s.map[i]]
            for j in range(s.n):
                adj[i, j] = row[j] < self.delta
        adj.setflags(write=False)
        return adj

    def edges(self) -> set[tuple[int, int]]:
        return {(int(i), int(j)) for i, j in zip(*np.nonzero(self.adjacency))}


def chain_graph(sys: FiniteMetricSystem, delta) -> ChainGraph:
    delta = as_fraction(delta)
    if delta <= 0:
        raise SystemError_("delta must be positive")
    return ChainGraph(sys, delta)


def _bool_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (a.astype(np.int64) @ b.astype(np.int64)) > 0


def reachability_power(adj: np.ndarray, length: int) -> np.ndarray:
    result = np.eye(adj.shape[0], dtype=bool)
    base = adj
    while length:
        if length & 1:
            result = _bool_matmul(result, base)
        base = _bool_matmul(base, base)
        length >>= 1
    return result


def delta_chain_exists(sys: FiniteMetricSystem, x, y, delta, length: int) -> bool:
    """Is there a delta-chain with exactly ``length`` steps from ``x`` to ``y``?"""
    if length < 1:
        raise SystemError_("length must be >= 1")
    g = chain_graph(sys, delta)
    return bool(reachability_power(g.adjacency, length)[_resolve(sys, x), _resolve(sys, y)])


@dataclass(frozen=True)
class PowerSequence:
    """Boolean powers A^1, A^2, ...; ``powers[k]`` is A^(k+1), periodic from index ``tail``."""

    powers: tuple[np.ndarray, ...]
    tail: int
    period: int

    def power(self, n: int) -> np.ndarray:
        k = n - 1
        if k < len(self.powers):
            return self.powers[k]
        return self.powers[self.tail + (k - self.tail) % self.period]


def power_sequence(adj: np.ndarray) -> PowerSequence:
    seen = {}
    powers = []
    cur = adj.copy()
    while True:
        key = cur.tobytes()
        if key in seen:
            tail = seen[key]
            return PowerSequence(tuple(powers), tail, len(powers) - tail)
        seen[key] = len(powers)
        powers.append(cur)
        cur = _bool_matmul(cur, adj)


def chain_mixing_verdict(sys: FiniteMetricSystem, delta, N_max: int = 1000, run_length: int | None = None) -> FamilyVerdict:
    """Do delta-chains of every length n >= N exist between all ordered pairs?

    Decided exactly from the eventually periodic sequence of reachability
    matrices; ``run_length`` lengths from N on are re-checked as witness.
    """
    if N_max < 1:
        raise SystemError_("N_max must be >= 1")
    g = chain_graph(sys, delta)
    seq = power_sequence(g.adjacency)
    run_length = run_length if run_length is not None else sys.n ** 2
    cycle = seq.powers[seq.tail:]
    if not all(m.all() for m in cycle):
        # some pair lacks chains at infinitely many lengths
        for k, m in enumerate(cycle):
            if not m.all():
                i, j = map(int, np.argwhere(~m)[0])
                n = seq.tail + k + 1
                return FamilyVerdict(Verdict.REFUTED, {
                    "pair": [sys.points[i], sys.points[j]], "missing_length": n,
                    "period": seq.period, "delta": str(g.delta)}, (1, n))
    # every cycle power is full, so N is one past the last non-full length
    first_full = 1 + max((k + 1 for k, m in enumerate(seq.powers) if not m.all()), default=0)
    if first_full > N_max:
        return FamilyVerdict(Verdict.INCONCLUSIVE, {"N": first_full, "N_max": N_max}, (1, N_max))
    for n in range(first_full, first_full + run_length + 1):
        assert seq.power(n).all()
    return FamilyVerdict(Verdict.CONSISTENT, {"N": first_full, "run_length": run_length,
                                              "delta": str(g.delta)},
                         (first_full, first_full + run_length))


def is_chain_mixing(sys: FiniteMetricSystem) -> bool:
    """Chain mixing for every delta > 0.

    Chain graphs only shrink as delta decreases, and below the least positive
    distance they coincide with the graph of the map itself, so that single
    delta decides the universal statement.
    """
    smallest = sys.distance_values[0] if sys.distance_values else Fraction(1)
    return chain_mixing_verdict(sys, smallest, N_max=sys.n ** 2 + 1).consistent


# -- Chen's tracking lemma --------------------------------------------------

class NoDeltaFound(RuntimeError):
    pass


def delta_candidates(sys: FiniteMetricSystem) -> list[Fraction]:
    """Dyadic grid values plus every table distance, largest first."""
    return sorted(set(DYADIC_GRID) | set(sys.distance_values), reverse=True)


def chen_segment_check(sys: FiniteMetricSystem, delta, epsilon, M: int) -> tuple[bool, tuple | None]:
    """Does every delta-pseudo-orbit segment x_0..x_M satisfy d(f^M x_0, x_M) <= epsilon?

    Returns the verdict and, on failure, a violating (x_0, x_M) pair.
    """
    epsilon = as_fraction(epsilon)
    g = chain_graph(sys, delta)
    reach = reachability_power(g.adjacency, M)
    for x0 in range(sys.n):
        target = sys.iterate(x0, M)
        for xm in np.flatnonzero(reach[x0]):
            if sys.dist[target][int(xm)] > epsilon:
                return False, (x0, int(xm))
    return True, None


def chen_delta_search(sys: FiniteMetricSystem, epsilon, M: int) -> Fraction:
    """Largest candidate delta for which the tracking conclusion holds at step M.

    Shifting a pseudo orbit is again a pseudo orbit, so checking segments
    that start at x_0 covers every offset k.
    """
    epsilon = as_fraction(epsilon)
    if epsilon <= 0 or M < 1:
        raise SystemError_("need epsilon > 0 and M >= 1")
    for delta in delta_candidates(sys):
        ok, _ = chen_segment_check(sys, delta, epsilon, M)
        if ok:
            return delta
    raise NoDeltaFound(f"no candidate delta tracks within {epsilon} at M={M}")


# -- expansivity --------------------------------------------------------------

@dataclass(frozen=True)
class ExpansivityResult:
    verdict: FamilyVerdict
    delta: Fraction | None
    pair: tuple | None = None
    min_sup: Fraction | None = None
    failing_pairs: tuple = ()

    @property
    def expansive(self) -> bool:
        return self.verdict.consistent


def _largest_below(values: Iterable[Fraction], bound: Fraction) -> Fraction:
    below = [v for v in values if v < bound]
    return max(below) if below else bound / 2


def positive_expansivity_search(sys: FiniteMetricSystem, horizon: int | None = None,
                                points: Iterable[int] | None = None) -> ExpansivityResult:
    """Largest candidate delta with every distinct pair separated at some n in [1, H].

    With H >= n**2 the answer is exact.  ``points`` restricts the pairs (used for
    expansivity on a subset).
    """
    horizon = sys.n ** 2 if horizon is None else horizon
    if horizon < sys.n ** 2:
        raise SystemError_(f"horizon must be >= n**2 = {sys.n ** 2} for an exact verdict")
    sups = {(x, y): separation_sup(sys, x, y, horizon) for x, y in sys.pairs(points)}
    hz = (1, horizon)
    if not sups:
        return ExpansivityResult(FamilyVerdict(Verdict.CONSISTENT, {"vacuous": True}, hz),
                                 Fraction(1), None, None)
    failing = tuple((sys.points[x], sys.points[y]) for (x, y), s in sups.items() if s == 0)
    if failing:
        return ExpansivityResult(FamilyVerdict(Verdict.REFUTED, {"pair": list(failing[0])}, hz),
                                 None, failing[0], Fraction(0), failing)
    min_sup = min(sups.values())
    delta = _largest_below(delta_candidates(sys), min_sup)
    return ExpansivityResult(FamilyVerdict(Verdict.CONSISTENT, {"delta": str(delta),
                                                                "min_sup": str(min_sup)}, hz),
                             delta, None, min_sup)


@dataclass(frozen=True)
class CofiniteCheck:
    delta: Fraction
    expansive: bool
    chain_mixing: bool
    verdicts: dict
    all_cofinite: bool

    @property
    def hypothesis_met(self) -> bool:
        return self.expansive and self.chain_mixing

    @property
    def passed(self) -> bool:
        """The theorem's claim, checked only when its hypotheses hold."""
        return not self.hypothesis_met or self.all_cofinite

    @property
    def status(self) -> str:
        if not self.hypothesis_met:
            return "hypothesis-not-met"
        return "pass" if self.all_cofinite else "FAIL"


def cofinite_expansivity_check(sys: FiniteMetricSystem, delta, horizon: int | None = None) -> CofiniteCheck:
    """Classify every pair's window at delta/2 against cofiniteness, exactly.

    Also records whether the hypotheses of the chain-mixing theorem hold, so
    the claim is only cross-checked where it applies.
    """
    delta = as_fraction(delta)
    horizon = sys.n ** 2 if horizon is None else horizon
    verdicts = {}
    all_cf = True
    half = delta / 2
    for x, y in sys.pairs():
        prof = separation_profile(sys, x, y, half)
        v = prof.verdict("cofinite")
        window_v = classify(prof.window(horizon), "cofinite", max(1, len(prof.cycle)))
        verdicts[(sys.points[x], sys.points[y])] = (v, window_v)
        all_cf &= prof.is_cofinite
    expansive = all(separation_sup(sys, x, y) > delta for x, y in sys.pairs())
    return CofiniteCheck(delta, expansive, is_chain_mixing(sys), verdicts, all_cf)
