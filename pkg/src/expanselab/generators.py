"""Finite covers, (weak) generators, F*-generators and the expansivity/generator
equivalence on finite systems.

On a finite metric table every set is closed, so a generator and a weak
generator are the same thing; ``weak`` is accepted and reported but does
not change the search.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .families import (MAX_UNIVERSE, ExplicitFamily, FamilyVerdict, Verdict, dual,
                       elements_of, mask_of, upward_close)
from .finite_systems import FiniteMetricSystem, positive_expansivity_search
from .sequences import as_fraction


class CoverError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Cover:
    system: FiniteMetricSystem
    sets: tuple[frozenset, ...]

    def __post_init__(self):
        union = frozenset().union(*self.sets) if self.sets else frozenset()
        if union != frozenset(range(self.system.n)):
            missing = sorted(set(range(self.system.n)) - union)
            raise CoverError(f"cover misses points {[self.system.points[i] for i in missing]}")

    @classmethod
    def of(cls, system: FiniteMetricSystem, sets: Iterable[Iterable]) -> "Cover":
        resolved = []
        for s in sets:
            resolved.append(frozenset(system.index(p) if not isinstance(p, int) else p for p in s))
        return cls(system, tuple(resolved))

    @property
    def distinct(self) -> tuple[frozenset, ...]:
        return tuple(dict.fromkeys(self.sets))

    def refines(self, other: "Cover") -> bool:
        return all(any(s <= t for t in other.sets) for s in self.sets)

    def co_covered(self, a: int, b: int) -> bool:
        return any(a in s and b in s for s in self.sets)

    def to_json(self) -> list:
        return [[self.system.points[i] for i in sorted(s)] for s in self.sets]

    @classmethod
    def from_json(cls, system: FiniteMetricSystem, data) -> "Cover":
        if isinstance(data, str):
            data = json.loads(data)
        return cls.of(system, data)


def ball_cover(sys: FiniteMetricSystem, r) -> Cover:
    """Open balls {y : d(x, y) < r} around every point."""
    r = as_fraction(r)
    if r <= 0:
        raise CoverError("radius must be positive")
    return Cover(sys, tuple(frozenset(j for j in range(sys.n) if sys.dist[i][j] < r)
                            for i in range(sys.n)))


def _preimages(sys: FiniteMetricSystem, index_set: Sequence[int]) -> dict[int, list[int]]:
    """Position of each point after n steps, for the requested n."""
    need = max(index_set, default=0)
    table = {}
    pos = list(range(sys.n))
    for n in range(need + 1):
        if n in index_set:
            table[n] = list(pos)
        pos = [sys.map[p] for p in pos]
    return table


def _search(sys: FiniteMetricSystem, cover: Cover, index_set: Sequence[int]):
    """Depth-first over cover choices along ``index_set``, keeping only distinct
    intersections with at least two points.  Returns a surviving (sets, points)
    witness or None."""
    order = sorted(set(index_set))
    pos = _preimages(sys, order)
    sets = cover.distinct
    start = frozenset(range(sys.n))
    frontier = {start: ()} if len(start) >= 2 else {}
    if not frontier:
        return None
    for n in order:
        nxt = {}
        for current, path in frontier.items():
            for k, s in enumerate(sets):
                inter = frozenset(p for p in current if pos[n][p] in s)
                if len(inter) >= 2 and inter not in nxt:
                    nxt[inter] = path + (k,)
        frontier = nxt
        if not frontier:
            return None
    current, path = next(iter(sorted(frontier.items(), key=lambda kv: sorted(kv[0]))))
    return path, current


def _witness(sys, cover, order, found) -> dict:
    path, points = found
    return {"indices": list(order),
            "sets": [[sys.points[i] for i in sorted(cover.distinct[k])] for k in path],
            "points": [sys.points[i] for i in sorted(points)]}


def generator_verdict(sys: FiniteMetricSystem, cover: Cover, horizon: int,
                      weak: bool = False) -> FamilyVerdict:
    """Does every choice A_0, ..., A_H of cover sets give an intersection of
    f^-n(A_n) with at most one point?  With H >= n**2 the answer is exact."""
    if horizon < 1:
        raise CoverError("horizon must be >= 1")
    if cover.system is not sys:
        raise CoverError("cover belongs to a different system")
    order = list(range(horizon + 1))
    found = _search(sys, cover, order)
    exact = horizon >= sys.n ** 2
    hz = (0, horizon)
    if found is None:
        return FamilyVerdict(Verdict.CONSISTENT, {"weak": weak, "exact": exact}, hz)
    return FamilyVerdict(Verdict.REFUTED, {"weak": weak, **_witness(sys, cover, order, found)}, hz)


def f_star_generator_verdict(sys: FiniteMetricSystem, cover: Cover, family: ExplicitFamily,
                             horizon: int) -> FamilyVerdict:
    """The intersection condition along every S in ``family`` (a family over {0..H}).

    Intersections only shrink as S grows, so minimal members suffice.
    """
    if family.universe_size != horizon + 1:
        raise CoverError(f"family universe {family.universe_size} does not match horizon {horizon}")
    hz = (0, horizon)
    minimal = family.minimal_elements
    for mask in minimal:
        order = elements_of(mask)
        found = _search(sys, cover, order)
        if found is not None:
            return FamilyVerdict(Verdict.REFUTED, _witness(sys, cover, order, found), hz)
    return FamilyVerdict(Verdict.CONSISTENT, {"minimal_checked": len(minimal)}, hz)


def co_covered_pairs(sys: FiniteMetricSystem, cover: Cover, index_set: Iterable[int]) -> list[tuple[int, int]]:
    """Pairs whose n-th images share a cover set for every n in ``index_set``.

    A cover fails along an index set exactly when such a pair exists, which
    makes this an independent check on the set search.
    """
    idx = sorted(set(index_set))
    out = []
    for a, b in sys.pairs():
        if all(cover.co_covered(sys.iterate(a, n), sys.iterate(b, n)) for n in idx):
            out.append((a, b))
    return out


def lebesgue_number(cover: Cover) -> Fraction | None:
    """Least diameter of a point set not contained in any cover set.

    Every set of smaller diameter lies in a cover set.  ``None`` when some
    cover set is the whole space.
    """
    sys = cover.system
    if sys.n > 16:
        raise CoverError("exhaustive Lebesgue number limited to 16 points")
    best = None
    for size in range(2, sys.n + 1):
        for subset in itertools.combinations(range(sys.n), size):
            s = frozenset(subset)
            if any(s <= c for c in cover.sets):
                continue
            diam = max(sys.dist[a][b] for a, b in itertools.combinations(subset, 2))
            if best is None or diam < best:
                best = diam
    return best


def realized_family(sys: FiniteMetricSystem, delta, horizon: int) -> ExplicitFamily:
    """Upward closure over {0..H} of the separation windows N(x, y, delta) cut to [1, H]."""
    if horizon + 1 > MAX_UNIVERSE:
        raise CoverError(f"horizon must be <= {MAX_UNIVERSE - 1}")
    delta = as_fraction(delta)
    masks = []
    for x, y in sys.pairs():
        members = []
        a, b = x, y
        for n in range(1, horizon + 1):
            a, b = sys.map[a], sys.map[b]
            if sys.dist[a][b] > delta:
                members.append(n)
        masks.append(mask_of(members))
    return upward_close(masks, horizon + 1)


def positive_index_family(horizon: int) -> ExplicitFamily:
    """Upward closure of {1..H}: the weakest requirement that skips index 0."""
    return upward_close([range(1, horizon + 1)], horizon + 1)


def block_family(horizon: int, length: int) -> ExplicitFamily:
    """Upward closure of every block of ``length`` consecutive indices inside [1, H]."""
    gens = [range(s, s + length) for s in range(1, horizon - length + 2)]
    return upward_close(gens, horizon + 1)


@dataclass
class Implication:
    name: str
    status: str
    constants: dict = field(default_factory=dict)
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "status": self.status,
                "constants": {k: str(v) for k, v in self.constants.items()}, "detail": self.detail}


@dataclass
class EquivalenceReport:
    system: str
    horizon: int
    implications: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(i.status in ("pass", "vacuous") for i in self.implications)

    def to_json(self) -> dict:
        return {"system": self.system, "horizon": self.horizon, "passed": self.passed,
                "implications": [i.to_json() for i in self.implications]}


def _window_mask(sys: FiniteMetricSystem, x: int, y: int, delta: Fraction, horizon: int) -> int:
    members = []
    a, b = x, y
    for n in range(1, horizon + 1):
        a, b = sys.map[a], sys.map[b]
        if sys.dist[a][b] > delta:
            members.append(n)
    return mask_of(members)


def equivalence_suite(sys: FiniteMetricSystem, horizon: int = 12,
                      radii: Sequence | None = None) -> EquivalenceReport:
    """Run both implications between expansivity and generators on one system.

    (i)   expansive with delta  =>  ball_cover(delta / 2) is an F*-generator,
          F the family realized by the windows at delta; for non-expansive
          systems the contrapositive: every small ball cover fails along [1, H].
    (ii)  a cover that is a weak F-generator, F from a fixed candidate list,
          has every window at delta = lambda / 2 in F*, lambda its Lebesgue number.
    Generator and weak-generator verdicts are also asserted to coincide.
    """
    report = EquivalenceReport(sys.name, horizon)
    res = positive_expansivity_search(sys)
    covers = []
    if res.expansive:
        delta = res.delta
        fam = realized_family(sys, delta, horizon)
        cover = ball_cover(sys, delta / 2)
        covers.append(cover)
        v = f_star_generator_verdict(sys, cover, dual(fam), horizon)
        report.implications.append(Implication(
            "expansive=>F*-generator", "pass" if v.consistent else "FAIL",
            {"delta": delta, "radius": delta / 2}, v.witness))
    else:
        radii = radii if radii is not None else _small_radii(sys)
        fails = []
        pos = positive_index_family(horizon)
        for r in radii:
            cover = ball_cover(sys, r)
            covers.append(cover)
            v = f_star_generator_verdict(sys, cover, pos, horizon)
            if v.consistent:
                fails.append(str(r))
        report.implications.append(Implication(
            "not-expansive=>ball-covers-fail", "FAIL" if fails else "pass",
            {"radii": len(radii)}, {"pair": [str(p) for p in res.pair or ()], "passing_radii": fails}))
    candidates = {"positive_index": positive_index_family(horizon),
                  "blocks(2)": block_family(horizon, 2)}
    if res.expansive:
        candidates["realized"] = realized_family(sys, res.delta, horizon)
    for cover in covers or [ball_cover(sys, min(sys.distance_values, default=Fraction(1)) / 2)]:
        g = generator_verdict(sys, cover, horizon)
        gw = generator_verdict(sys, cover, horizon, weak=True)
        report.implications.append(Implication(
            "generator==weak-generator", "pass" if g.kind == gw.kind else "FAIL",
            {}, {"verdict": g.kind.value}))
        lam = lebesgue_number(cover)
        for name, fam in candidates.items():
            v = f_star_generator_verdict(sys, cover, fam, horizon)
            if not v.consistent:
                continue
            if lam is None:
                report.implications.append(Implication(
                    f"weak-{name}-generator=>expansive", "vacuous", {}, {"reason": "no Lebesgue number"}))
                continue
            d = lam / 2
            star = dual(fam)
            bad = [(sys.points[x], sys.points[y]) for x, y in sys.pairs()
                   if _window_mask(sys, x, y, d, horizon) not in star]
            report.implications.append(Implication(
                f"weak-{name}-generator=>expansive", "FAIL" if bad else "pass",
                {"lebesgue": lam, "delta": d}, {"bad_pairs": bad[:5]}))
    return report


def _small_radii(sys: FiniteMetricSystem, cap=Fraction(1, 24)) -> list[Fraction]:
    grid = {Fraction(1, 1 << j) for j in range(13)} | set(sys.distance_values)
    return sorted((r for r in grid if 0 < r <= cap), reverse=True)
