"""Shift-space points, exact dyadic metrics and separation sets.

Points of the one-sided full 2-shift are indexed from 1 and weighted by
``2**-i``.  Two-sided points are indexed by all integers and weighted by
``2**-|i|``, so coordinate 0 carries weight 1.

Membership ``n in N(x, y, delta)`` is the strict inequality
``d(f^n x, f^n y) > delta`` and is always decided exactly: either from a
closed-form rational distance or from a rigorous enclosing interval that is
refined until it clears ``delta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Any, Callable, Protocol, Union

from .families import WindowSet

Number = Union[int, Fraction]

DEFAULT_PRECISION = 2048


class Dyadic(Fraction):
    """Exact nonnegative rational ``numerator / 2**exponent``.

    Canonical form comes from :class:`fractions.Fraction`; sums, differences
    and products of dyadics stay dyadic.
    """

    __slots__ = ()

    def __new__(cls, numerator: int | str | Fraction = 0, exponent: int = 0):
        if isinstance(numerator, (str, Fraction)):
            if exponent:
                raise TypeError("exponent only combines with an integer numerator")
            value = Fraction(numerator)
        else:
            if exponent < 0:
                raise ValueError("exponent must be >= 0")
            value = Fraction(numerator, 1 << exponent)
        den = value.denominator
        if den & (den - 1):
            raise ValueError(f"{value} is not dyadic")
        if value < 0:
            raise ValueError("dyadic values are nonnegative")
        return super().__new__(cls, value.numerator, den)

    @property
    def exponent(self) -> int:
        return self.denominator.bit_length() - 1

    @classmethod
    def pow2(cls, k: int) -> "Dyadic":
        """``2**-k``"""
        return cls(1, k)

    def _wrap(self, value):
        if isinstance(value, Fraction) and not value.denominator & (value.denominator - 1) and value >= 0:
            return Dyadic(value)
        return value

    def __add__(self, other):
        return self._wrap(Fraction.__add__(self, other))

    __radd__ = __add__

    def __sub__(self, other):
        return self._wrap(Fraction.__sub__(self, other))

    def __rsub__(self, other):
        return self._wrap(Fraction.__rsub__(self, other))

    def __mul__(self, other):
        return self._wrap(Fraction.__mul__(self, other))

    __rmul__ = __mul__

    def __repr__(self):
        return f"Dyadic({self.numerator}, {self.exponent})"

    def __str__(self):
        return str(Fraction(self))


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


@dataclass(frozen=True)
class Interval:
    """A rigorous enclosure ``low <= d <= high`` of a distance."""

    low: Fraction
    high: Fraction

    def __post_init__(self):
        if self.low > self.high:
            raise ValueError("interval bounds out of order")

    def contains(self, value) -> bool:
        return self.low <= value <= self.high

    @property
    def width(self) -> Fraction:
        return self.high - self.low


Distance = Union[Fraction, Interval]


class PrecisionExhausted(RuntimeError):
    """Raised when some indices stay undecided at the maximum precision budget."""

    def __init__(self, indices, delta, budget):
        self.indices = list(indices)
        self.delta = delta
        self.budget = budget
        super().__init__(f"cannot decide d > {delta} at indices {self.indices[:10]} "
                         f"within precision budget {budget}")


def exceeds(dist: Distance, delta) -> bool | None:
    """``dist > delta`` exactly, or None when an interval straddles ``delta``."""
    if isinstance(dist, Interval):
        if dist.low > delta:
            return True
        if dist.high <= delta:
            return False
        return None
    return dist > delta


# -- symbol sources -------------------------------------------------------

@dataclass(frozen=True)
class Word:
    """An eventually periodic one-sided word ``preperiod + period**inf`` indexed from 1."""

    preperiod: str
    period: str

    def __post_init__(self):
        if not self.period:
            raise ValueError("period must be nonempty")
        if set(self.preperiod + self.period) - {"0", "1"}:
            raise ValueError("binary alphabet only")

    def bit(self, i: int) -> int:
        if i < 1:
            raise IndexError(i)
        k = len(self.preperiod)
        if i <= k:
            return int(self.preperiod[i - 1])
        return int(self.period[(i - k - 1) % len(self.period)])

    def drop(self, k: int) -> "Word":
        pre = self.preperiod
        if k <= len(pre):
            return Word(pre[k:], self.period)
        r = (k - len(pre)) % len(self.period)
        return Word("", self.period[r:] + self.period[:r])

    def prepend(self, bits: str) -> "Word":
        return Word(bits + self.preperiod, self.period)


RULES: dict[str, Callable[[int], int]] = {}


def register_rule(rule_id: str, fn: Callable[[int], int]) -> None:
    """Register a deterministic symbol rule ``i -> bit`` (i >= 1) for named sources."""
    RULES[rule_id] = fn


@dataclass(frozen=True)
class Named:
    """A generator-backed one-sided sequence ``i -> rule(i + shift)``."""

    rule_id: str
    shift: int = 0

    def bit(self, i: int) -> int:
        if i < 1:
            raise IndexError(i)
        return RULES[self.rule_id](i + self.shift)

    def drop(self, k: int) -> "Named":
        return Named(self.rule_id, self.shift + k)


@dataclass(frozen=True)
class SequenceSource:
    """A point of the one- or two-sided full 2-shift.

    One-sided: ``bit_at(i)`` for ``i >= 1`` reads ``right``.  Two-sided:
    ``i >= 0`` reads ``right`` at position ``i + 1`` and ``i <= -1`` reads
    ``left`` at position ``-i``.
    """

    right: Word | Named
    left: Word | None = None
    two_sided: bool = False

    def __post_init__(self):
        if self.two_sided != (self.left is not None):
            raise ValueError("two-sided sources need a left word, one-sided ones must not have one")
        if self.two_sided and not isinstance(self.right, Word):
            raise ValueError("two-sided sources must be eventually periodic on both sides")

    @property
    def sidedness(self) -> str:
        return "two_sided" if self.two_sided else "one_sided"

    @property
    def periodic(self) -> bool:
        return isinstance(self.right, Word)

    def bit_at(self, i: int) -> int:
        if self.two_sided:
            return self.right.bit(i + 1) if i >= 0 else self.left.bit(-i)
        return self.right.bit(i)

    def prefix(self, length: int) -> str:
        return "".join(str(self.bit_at(i)) for i in range(1, length + 1))

    def to_json(self) -> dict:
        if isinstance(self.right, Named):
            return {"kind": "named", "id": self.right.rule_id, "shift": self.right.shift}
        out = {"kind": "periodic", "preperiod": self.right.preperiod, "period": self.right.period}
        if self.two_sided:
            out["left"] = {"preperiod": self.left.preperiod, "period": self.left.period}
        return out

    @classmethod
    def from_json(cls, data: dict) -> "SequenceSource":
        if data["kind"] == "named":
            return cls(Named(data["id"], data.get("shift", 0)))
        if data["kind"] == "periodic":
            right = Word(data.get("preperiod", ""), data["period"])
            if "left" in data:
                left = Word(data["left"].get("preperiod", ""), data["left"]["period"])
                return cls(right, left, True)
            return cls(right)
        raise ValueError(f"unknown point kind {data['kind']!r}")


def periodic(period: str, preperiod: str = "") -> SequenceSource:
    return SequenceSource(Word(preperiod, period))


def two_sided(right: Word, left: Word) -> SequenceSource:
    return SequenceSource(right, left, True)


def named(rule_id: str, shift: int = 0) -> SequenceSource:
    return SequenceSource(Named(rule_id, shift))


def shift_point(x: SequenceSource, k: int) -> SequenceSource:
    """``sigma^k x``: the result reads ``x`` at ``i + k``."""
    if k == 0:
        return x
    if not x.two_sided:
        if k < 0:
            raise ValueError("negative shift of a one-sided sequence")
        return replace(x, right=x.right.drop(k))
    right, left = x.right, x.left
    if k > 0:
        moved = "".join(str(right.bit(j)) for j in range(k, 0, -1))
        return SequenceSource(right.drop(k), left.prepend(moved), True)
    k = -k
    moved = "".join(str(left.bit(j)) for j in range(k, 0, -1))
    return SequenceSource(right.prepend(moved), left.drop(k), True)


def _word_distance(a: Word, b: Word) -> Fraction:
    """Exact  sum_{i>=1} |a_i - b_i| / 2**i  for eventually periodic words."""
    pre = max(len(a.preperiod), len(b.preperiod))
    per = math.lcm(len(a.period), len(b.period))
    head = _partial(a, b, 1, pre)
    # cycle bits as one integer, scaled by 2**-pre and summed geometrically
    num = 0
    for i in range(pre + 1, pre + per + 1):
        num = (num << 1) | (a.bit(i) ^ b.bit(i))
    return head + Fraction(num, ((1 << per) - 1) << pre)


def _partial(a, b, start: int, stop: int) -> Fraction:
    num = 0
    for i in range(start, stop + 1):
        num = (num << 1) | (a.bit(i) ^ b.bit(i))
    return Fraction(num, 1 << stop) if stop >= start else Fraction(0)


def metric_distance(x: SequenceSource, y: SequenceSource,
                    precision_budget: int = 64) -> Distance:
    """Distance between two shift points.

    Exact when both are eventually periodic; otherwise an :class:`Interval`
    of width at most ``2 * 2**-precision_budget``.
    """
    if x.two_sided != y.two_sided:
        raise ValueError("mismatched sidedness")
    if x.periodic and y.periodic:
        d = _word_distance(x.right, y.right)
        if x.two_sided:
            d = 2 * d + _word_distance(x.left, y.left)
        return d
    if precision_budget < 1:
        raise ValueError("precision budget must be >= 1")
    low = _partial(x.right, y.right, 1, precision_budget)
    return Interval(low, low + Fraction(1, 1 << precision_budget))


# -- systems --------------------------------------------------------------

class SystemHandle(Protocol):
    invertible: bool

    def iterate(self, point: Any, n: int) -> Any: ...

    def distance(self, p: Any, q: Any, budget: int = 64) -> Distance: ...


@dataclass(frozen=True)
class SequenceSystem:
    """The shift map acting on a collection of sequence points."""

    two_sided: bool = False
    name: str = "shift"

    @property
    def invertible(self) -> bool:
        return self.two_sided

    def iterate(self, point: SequenceSource, n: int) -> SequenceSource:
        return shift_point(point, n)

    def distance(self, p: SequenceSource, q: SequenceSource, budget: int = 64) -> Distance:
        return metric_distance(p, q, budget)


def _decide(sys, p, q, delta, start_budget: int, max_budget: int) -> bool | None:
    budget = start_budget
    while True:
        verdict = exceeds(sys.distance(p, q, budget), delta)
        if verdict is not None or budget >= max_budget:
            return verdict
        budget = min(2 * budget, max_budget)


def orbit_distances_exceed(sys, x, y, delta, indices, *, max_budget=DEFAULT_PRECISION):
    """Map each iterate index in ``indices`` (sorted, same sign) to ``d > delta``."""
    out, undecided = {}, []
    step = 1 if not indices or indices[0] > 0 else -1
    px, py, at = x, y, 0
    for n in indices:
        px, py = sys.iterate(px, n - at), sys.iterate(py, n - at)
        at = n
        v = _decide(sys, px, py, delta, 32, max_budget)
        if v is None:
            undecided.append(n)
        else:
            out[n] = v
    if undecided:
        raise PrecisionExhausted(undecided, delta, max_budget)
    return out


def separation_window(sys, x, y, delta, horizon: int, *, integers: bool = False,
                      max_budget: int = DEFAULT_PRECISION) -> WindowSet:
    """``N(x, y, delta)`` restricted to ``[1, H]`` or, with ``integers``, ``[-H, H] minus 0``."""
    delta = as_fraction(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if integers and not sys.invertible:
        raise ValueError("Z-windows need an invertible system")
    members = []
    undecided = []
    sides = [range(1, horizon + 1)]
    if integers:
        sides.insert(0, range(-1, -horizon - 1, -1))
    for side in sides:
        try:
            hits = orbit_distances_exceed(sys, x, y, delta, list(side), max_budget=max_budget)
        except PrecisionExhausted as exc:
            undecided.extend(exc.indices)
            continue
        members.extend(n for n, v in hits.items() if v)
    if undecided:
        raise PrecisionExhausted(sorted(undecided), delta, max_budget)
    lo = -horizon if integers else 1
    return WindowSet(lo, horizon, tuple(sorted(members)), integers)


def separation_compose_check(sys, x, y, delta, n: int, k: int, horizon: int | None = None) -> bool:
    """Given n in N(x, y) and k in N(f^n x, f^n y), confirm n + k in N(x, y)."""
    delta = as_fraction(delta)
    if n < 1 or k < 1:
        raise ValueError("n and k must be positive")
    if not exceeds_at(sys, x, y, delta, n):
        raise ValueError(f"precondition: {n} is not in N(x, y, {delta})")
    fx, fy = sys.iterate(x, n), sys.iterate(y, n)
    if not exceeds_at(sys, fx, fy, delta, k):
        raise ValueError(f"precondition: {k} is not in N(f^n x, f^n y, {delta})")
    return exceeds_at(sys, x, y, delta, n + k)


def exceeds_at(sys, x, y, delta, n: int, max_budget: int = DEFAULT_PRECISION) -> bool:
    v = _decide(sys, sys.iterate(x, n), sys.iterate(y, n), as_fraction(delta), 32, max_budget)
    if v is None:
        raise PrecisionExhausted([n], delta, max_budget)
    return v
