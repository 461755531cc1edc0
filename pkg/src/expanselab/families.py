"""Finite windows of integer sets, horizon-relative family verdicts, and
explicit finite families with exact duals.

A :class:`WindowSet` is the computable stand-in for an infinite subset of
the naturals (or of the nonzero integers): the set is only known on the
closed interval ``[lo, hi]``.  Every classification made here is relative
to that interval and never claims the infinite-set property.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

MAX_UNIVERSE = 20


class WindowError(ValueError):
    pass


@dataclass(frozen=True)
class WindowSet:
    lo: int
    hi: int
    members: tuple[int, ...] = ()
    excludes_zero: bool = False

    def __post_init__(self):
        if self.lo > self.hi:
            raise WindowError(f"empty window [{self.lo}, {self.hi}]")
        prev = None
        for m in self.members:
            if not self.lo <= m <= self.hi:
                raise WindowError(f"member {m} outside [{self.lo}, {self.hi}]")
            if prev is not None and m <= prev:
                raise WindowError("members must be strictly increasing")
            prev = m
        if self.excludes_zero and 0 in self.as_set:
            raise WindowError("0 is not allowed in a Z\\{0} window")

    @cached_property
    def as_set(self) -> frozenset[int]:
        return frozenset(self.members)

    def __contains__(self, n) -> bool:
        return n in self.as_set

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def positions(self) -> range | list[int]:
        """All admissible indices of the window, in increasing order."""
        if self.excludes_zero and self.lo <= 0 <= self.hi:
            return [i for i in range(self.lo, self.hi + 1) if i != 0]
        return range(self.lo, self.hi + 1)

    @property
    def size(self) -> int:
        return len(self.positions())

    def issubset(self, other: "WindowSet") -> bool:
        return self.as_set <= other.as_set

    def __le__(self, other: "WindowSet") -> bool:
        return self.issubset(other)

    def missing_from(self, other: "WindowSet") -> list[int]:
        """Members of ``self`` that ``other`` lacks (inclusion counterexamples)."""
        return sorted(self.as_set - other.as_set)

    def clip(self, lo: int, hi: int) -> "WindowSet":
        return WindowSet(lo, hi, tuple(m for m in self.members if lo <= m <= hi), self.excludes_zero)

    def to_json(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "members": list(self.members),
                "excludes_zero": self.excludes_zero}

    @classmethod
    def from_json(cls, data: dict | str) -> "WindowSet":
        if isinstance(data, str):
            data = json.loads(data)
        return make_window(data["members"], data["lo"], data["hi"], data.get("excludes_zero", False))


def make_window(members: Iterable[int], lo: int = 1, hi: int | None = None,
                excludes_zero: bool = False) -> WindowSet:
    """Validate and normalise ``members`` into a window on ``[lo, hi]``.

    Duplicates and out-of-range members are errors rather than being dropped.
    """
    ms = [int(m) for m in members]
    if hi is None:
        hi = max(ms, default=lo)
    if len(set(ms)) != len(ms):
        raise WindowError("duplicate member")
    return WindowSet(lo, hi, tuple(sorted(ms)), excludes_zero)


def full_window(lo: int, hi: int, excludes_zero: bool = False) -> WindowSet:
    w = WindowSet(lo, hi, (), excludes_zero)
    return WindowSet(lo, hi, tuple(w.positions()), excludes_zero)


def _rank(w: WindowSet, m: int) -> int:
    # in Z\{0} windows -1 and 1 are adjacent
    if w.excludes_zero and m > 0:
        return m - 1
    return m


def _runs(w: WindowSet, values: Sequence[int]) -> list[tuple[int, int]]:
    """Maximal runs of consecutive admissible indices as (start, length)."""
    runs = []
    start = prev = None
    for m in values:
        if prev is not None and _rank(w, m) == _rank(w, prev) + 1:
            prev = m
            continue
        if start is not None:
            runs.append((start, _rank(w, prev) - _rank(w, start) + 1))
        start = prev = m
    if start is not None:
        runs.append((start, _rank(w, prev) - _rank(w, start) + 1))
    return runs


def blocks(w: WindowSet) -> list[tuple[int, int]]:
    """Maximal blocks of consecutive members, as (start, length)."""
    return _runs(w, w.members)


def max_block_length(w: WindowSet) -> int:
    return max((length for _, length in blocks(w)), default=0)


def longest_block(w: WindowSet) -> tuple[int, int] | None:
    bs = blocks(w)
    if not bs:
        return None
    return max(bs, key=lambda b: (b[1], -b[0]))


@dataclass(frozen=True)
class GapReport:
    internal: int
    leading: int
    trailing: int

    @property
    def worst(self) -> int:
        return max(self.internal, self.leading, self.trailing)


def _boundary_gaps(w: WindowSet) -> tuple[int, int]:
    first, last = w.members[0], w.members[-1]
    return _rank(w, first) - _rank(w, w.lo), _rank(w, w.hi) - _rank(w, last)


def max_gap(w: WindowSet) -> GapReport:
    """Largest difference between consecutive members, plus the two boundary gaps."""
    if len(w) < 2:
        raise WindowError("max_gap needs at least two members")
    ranks = [_rank(w, m) for m in w.members]
    internal = max(b - a for a, b in zip(ranks, ranks[1:]))
    leading, trailing = _boundary_gaps(w)
    return GapReport(internal, leading, trailing)


class Verdict(enum.Enum):
    CONSISTENT = "ConsistentWitness"
    REFUTED = "Refuted"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class FamilyVerdict:
    kind: Verdict
    witness: dict = field(default_factory=dict)
    horizon: tuple[int, int] | None = None

    @property
    def consistent(self) -> bool:
        return self.kind is Verdict.CONSISTENT

    @property
    def refuted(self) -> bool:
        return self.kind is Verdict.REFUTED

    def to_json(self) -> dict:
        return {"kind": self.kind.value, "witness": self.witness,
                "horizon": list(self.horizon) if self.horizon else None}


def complement_in_window(w: WindowSet) -> WindowSet:
    return WindowSet(w.lo, w.hi, tuple(i for i in w.positions() if i not in w.as_set),
                     w.excludes_zero)


def classify(w: WindowSet, kind: str, requirement: int) -> FamilyVerdict:
    """Horizon-relative verdict of ``w`` against the thick, syndetic or cofinite family.

    thick: a block of at least ``requirement`` consecutive members.
    syndetic: every gap, the two boundary gaps included, at most ``requirement``.
    cofinite: refuted when the complement inside the window has a block of
    ``requirement`` or more; otherwise consistent.
    """
    if requirement < 1:
        raise WindowError("requirement must be >= 1")
    horizon = (w.lo, w.hi)
    if kind == "thick":
        best = longest_block(w)
        if best is not None and best[1] >= requirement:
            return FamilyVerdict(Verdict.CONSISTENT, {"block_start": best[0], "block_length": best[1]}, horizon)
        if w.size < requirement:
            return FamilyVerdict(Verdict.INCONCLUSIVE, {"window_size": w.size}, horizon)
        return FamilyVerdict(Verdict.REFUTED, {"max_block_length": best[1] if best else 0}, horizon)
    if kind == "syndetic":
        if not w.members:
            return FamilyVerdict(Verdict.REFUTED, {"empty_block": [w.lo, w.hi], "gap": w.size}, horizon)
        leading, trailing = _boundary_gaps(w)
        internal = max_gap(w).internal if len(w) >= 2 else 0
        gaps = GapReport(internal, leading, trailing)
        witness = {"internal_gap": internal, "leading_gap": leading, "trailing_gap": trailing}
        if gaps.worst <= requirement:
            return FamilyVerdict(Verdict.CONSISTENT, witness, horizon)
        comp = complement_in_window(w)
        start, length = longest_block(comp)
        witness.update(empty_block=[start, length])
        return FamilyVerdict(Verdict.REFUTED, witness, horizon)
    if kind == "cofinite":
        comp = complement_in_window(w)
        best = longest_block(comp)
        if best is not None and best[1] >= requirement:
            return FamilyVerdict(Verdict.REFUTED, {"complement_block_start": best[0],
                                                   "complement_block_length": best[1]}, horizon)
        return FamilyVerdict(Verdict.CONSISTENT, {"complement_max_block": best[1] if best else 0}, horizon)
    raise WindowError(f"unknown family kind {kind!r}")


def _check_compatible(*ws: WindowSet):
    if len({w.excludes_zero for w in ws}) > 1:
        raise WindowError("incompatible zero-exclusion flags")


def _build(values: Iterable[int], lo: int, hi: int, excludes_zero: bool) -> WindowSet:
    keep = sorted({v for v in values if lo <= v <= hi and not (excludes_zero and v == 0)})
    return WindowSet(lo, hi, tuple(keep), excludes_zero)


def union(a: WindowSet, b: WindowSet) -> WindowSet:
    _check_compatible(a, b)
    lo, hi = min(a.lo, b.lo), max(a.hi, b.hi)
    return _build(a.as_set | b.as_set, lo, hi, a.excludes_zero)


def intersect(a: WindowSet, b: WindowSet) -> WindowSet:
    _check_compatible(a, b)
    lo, hi = max(a.lo, b.lo), min(a.hi, b.hi)
    if lo > hi:
        lo = hi = max(a.lo, b.lo)
    return _build(a.as_set & b.as_set, lo, hi, a.excludes_zero)


def translate(w: WindowSet, k: int, lo: int | None = None, hi: int | None = None) -> WindowSet:
    """Shift every member by ``k``; the output window defaults to the input's."""
    lo = w.lo if lo is None else lo
    hi = w.hi if hi is None else hi
    return _build((m + k for m in w.members), lo, hi, w.excludes_zero)


def dilate_preimage(a: WindowSet, m: int, lo: int | None = None, hi: int | None = None) -> WindowSet:
    """The set  U_{q=0}^{m-1} (m*A - q)."""
    if m < 1:
        raise WindowError("m must be >= 1")
    lo = a.lo if lo is None else lo
    hi = m * a.hi if hi is None else hi
    return _build((m * s - q for s in a.members for q in range(m)), lo, hi, a.excludes_zero)


def block_quotient(a: WindowSet, m: int, lo: int = 1, hi: int | None = None) -> WindowSet:
    """The set {r : 0 < n - r*m <= m for some n in A}, i.e. {ceil(n/m) - 1}."""
    if m < 1:
        raise WindowError("m must be >= 1")
    hi = max(a.hi // m, lo) if hi is None else hi
    return _build(((n - 1) // m for n in a.members), lo, hi, a.excludes_zero)


_OPS = {
    "union": union,
    "intersect": intersect,
    "complement_in_window": complement_in_window,
    "translate": translate,
    "dilate_preimage": dilate_preimage,
    "block_quotient": block_quotient,
}


def set_algebra(op: str, *args, **kwargs) -> WindowSet:
    try:
        fn = _OPS[op]
    except KeyError:
        raise WindowError(f"unknown set operation {op!r}") from None
    return fn(*args, **kwargs)


# -- explicit families over {0, ..., n-1} ------------------------------------

def _all_masks(n: int) -> np.ndarray:
    return np.arange(1 << n, dtype=np.int64)


def _halves(table: np.ndarray, bit: int) -> tuple[np.ndarray, np.ndarray]:
    """Views of the entries without and with ``bit``, aligned so that
    ``upper[k]`` is ``lower[k]`` plus that bit."""
    v = table.reshape(-1, 2, 1 << bit)
    return v[:, 0, :], v[:, 1, :]


def _is_upward_closed(n: int, table: np.ndarray) -> bool:
    for bit in range(n):
        lower, upper = _halves(table, bit)
        if np.any(lower & ~upper):
            return False
    return True


def _upward_sweep(n: int, table: np.ndarray) -> np.ndarray:
    table = table.copy()
    for bit in range(n):
        lower, upper = _halves(table, bit)
        upper |= lower
    return table


def _minimal(n: int, table: np.ndarray) -> tuple[int, ...]:
    minimal = table.copy()
    for bit in range(n):
        lower, _ = _halves(table, bit)
        _, m_upper = _halves(minimal, bit)
        m_upper &= ~lower
    return tuple(int(s) for s in np.flatnonzero(minimal))


class FamilyError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ExplicitFamily:
    """An upward-hereditary family of subsets of {0, ..., n-1}, as bitmasks.

    Membership is held as a boolean table of length 2**n.
    """

    universe_size: int
    table: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not 0 <= self.universe_size <= MAX_UNIVERSE:
            raise FamilyError(f"universe size must be in [0, {MAX_UNIVERSE}]")
        if self.table.shape != (1 << self.universe_size,) or self.table.dtype != bool:
            raise FamilyError("membership table has the wrong shape")
        if not _is_upward_closed(self.universe_size, self.table):
            raise FamilyError("family is not upward hereditary")
        self.table.setflags(write=False)

    @classmethod
    def from_subsets(cls, n: int, subsets: Iterable[int | Iterable[int]]) -> "ExplicitFamily":
        """Members given as bit masks or as element lists; the result must be upward closed."""
        if not 0 <= n <= MAX_UNIVERSE:
            raise FamilyError(f"universe size must be in [0, {MAX_UNIVERSE}]")
        table = np.zeros(1 << n, dtype=bool)
        for s in subsets:
            if not isinstance(s, (int, np.integer)):
                elems = list(s)
                if any(not 0 <= e < n for e in elems):
                    raise FamilyError(f"subset {elems} outside universe of size {n}")
                s = mask_of(elems)
            if not 0 <= s < (1 << n):
                raise FamilyError(f"subset {s} outside universe of size {n}")
            table[s] = True
        return cls(n, table)

    @property
    def full_mask(self) -> int:
        return (1 << self.universe_size) - 1

    @property
    def subsets(self) -> list[int]:
        return [int(s) for s in np.flatnonzero(self.table)]

    @cached_property
    def minimal_elements(self) -> tuple[int, ...]:
        return _minimal(self.universe_size, self.table)

    def __contains__(self, subset: int) -> bool:
        return bool(self.table[subset])

    def __len__(self) -> int:
        return int(self.table.sum())

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExplicitFamily):
            return NotImplemented
        return self.universe_size == other.universe_size and bool(np.array_equal(self.table, other.table))

    def __le__(self, other: "ExplicitFamily") -> bool:
        return self.universe_size == other.universe_size and not np.any(self.table & ~other.table)

    def __hash__(self):
        return hash((self.universe_size, self.table.tobytes()))

    def to_json(self) -> dict:
        return {"n": self.universe_size, "subsets": self.subsets}

    @classmethod
    def from_json(cls, data: dict | str) -> "ExplicitFamily":
        if isinstance(data, str):
            data = json.loads(data)
        return cls.from_subsets(data["n"], data["subsets"])


def mask_of(elements: Iterable[int]) -> int:
    m = 0
    for e in elements:
        m |= 1 << e
    return m


def elements_of(mask: int) -> list[int]:
    out, i = [], 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def upward_close(generators: Iterable[int | Iterable[int]], n: int) -> ExplicitFamily:
    """Smallest upward-hereditary family on {0..n-1} containing ``generators``.

    Generators may be bitmasks or iterables of elements.
    """
    if not 0 <= n <= MAX_UNIVERSE:
        raise FamilyError(f"universe size must be in [0, {MAX_UNIVERSE}]")
    table = np.zeros(1 << n, dtype=bool)
    for g in generators:
        g = g if isinstance(g, (int, np.integer)) else mask_of(g)
        if not 0 <= g < (1 << n):
            raise FamilyError(f"generator {g} outside universe of size {n}")
        table[g] = True
    return ExplicitFamily(n, _upward_sweep(n, table))


def dual(family: ExplicitFamily) -> ExplicitFamily:
    """All A with A & B nonempty for every B in the family.

    Checking against the minimal elements suffices because the family is
    upward hereditary.
    """
    n = family.universe_size
    masks = _all_masks(n)
    table = np.ones(1 << n, dtype=bool)
    for b in family.minimal_elements:
        table &= (masks & b) != 0
    return ExplicitFamily(n, table)
