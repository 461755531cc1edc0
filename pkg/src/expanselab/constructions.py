"""Exact reconstructions of the concrete systems and sets used as examples.

* ``build_P`` and friends: the set P of alternating even blocks, its
  complement blocks B_m / C_m and the block-count ledger d_{2l}^m.
* ``build_xbar``: the point x-bar of the one-sided 2-shift whose orbit
  closure, together with the two period-2 points, is positively thick
  expansive but not cofinite expansive.
* ``eg1_system``: the non-expansive map on {1/n, 1 - 1/n}.
* ``periodic_closure_system``: orbit closures of periodic points.
* ``asymptotic_pair``: positively / negatively asymptotic points of the
  two-sided shift, used to refute syndetic expansivity.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction

from .families import (FamilyVerdict, Verdict, WindowSet, classify, complement_in_window,
                       max_block_length)
from .finite_systems import FiniteMetricSystem, line_system
from .sequences import (DEFAULT_PRECISION, SequenceSource, SequenceSystem, Word, as_fraction, metric_distance,
                        named, periodic, register_rule, separation_window, shift_point,
                        two_sided)

# the x-bar prefix as printed alongside its construction
GOLDEN_XBAR = ("10011010011010101000110110101010000111011010101010000110010"
               "110101010101")


# -- the set P and its complement -------------------------------------------

def p_blocks(hi: int):
    """Yield (start, length, included) for the alternating blocks 2,2,4,4,6,6,... up to ``hi``."""
    start, length = 1, 2
    while start <= hi:
        yield start, length, True
        yield start + length, length, False
        start += 2 * length
        length += 2


def build_P(hi: int) -> WindowSet:
    if hi < 2:
        raise ValueError("hi must be >= 2")
    members = [i for s, length, inc in p_blocks(hi) if inc
               for i in range(s, min(s + length, hi + 1))]
    return WindowSet(1, hi, tuple(members))


def build_P_complement(hi: int) -> WindowSet:
    return complement_in_window(build_P(hi))


def in_P(i: int) -> bool:
    # block k (k >= 1) of P starts at 2(k-1)k + 1 ... solve directly by scanning
    for s, length, inc in p_blocks(i):
        if s <= i < s + length:
            return inc
    return False


def b_seq(n: int) -> int:
    """b_1 = 2 and b_n = b_{n-1} + n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    b = 2
    for k in range(2, n + 1):
        b += k
    return b


@dataclass(frozen=True)
class Block:
    start: int
    length: int

    @property
    def stop(self) -> int:
        return self.start + self.length - 1

    def indices(self) -> range:
        return range(self.start, self.start + self.length)


def block_B_C(m: int) -> tuple[Block, Block]:
    """B_m: the first maximal run of length exactly 2m in P^c; C_m: its first m + 1 terms."""
    if m < 1:
        raise ValueError("m must be >= 1")
    hi = 64
    while True:
        comp = build_P_complement(hi)
        # skip a run that may be cut by the horizon
        for s, length in _runs(comp.members):
            if length == 2 * m and s + length - 1 < hi:
                return Block(s, 2 * m), Block(s, m + 1)
        hi *= 2


def _runs(members):
    out = []
    start = prev = None
    for x in members:
        if prev is not None and x == prev + 1:
            prev = x
            continue
        if start is not None:
            out.append((start, prev - start + 1))
        start = prev = x
    if start is not None:
        out.append((start, prev - start + 1))
    return out


def block_start(m: int) -> int:
    """Start t of B_m, in closed form."""
    return 2 * m * m + 1


@dataclass(frozen=True)
class BlockLedger:
    """d_counts[l] is the number of blocks of length 2l + 1 used inside C_m."""

    m: int
    B: Block
    C: Block
    d_counts: dict = field(default_factory=dict)

    @property
    def top(self) -> int:
        return max(self.d_counts, default=0)

    def chain_pairs(self) -> list[tuple[int, int, int]]:
        """(l, a, b) with a, b = a + 2l the endpoints of each counted block, in layout order."""
        out = []
        a = self.C.start
        for l in sorted(self.d_counts, reverse=True):
            for _ in range(self.d_counts[l]):
                out.append((l, a, a + 2 * l))
                a += 1
        return out


def _ledger_counts(m: int) -> dict[int, int]:
    d = {1: 1}
    for step in range(2, m):
        nxt = step + 1
        k = 1
        while b_seq(k + 1) <= nxt:
            k += 1
        if b_seq(k) == nxt:
            d[k] = 1
        else:
            r = nxt - b_seq(k)
            d[r] = d.get(r, 0) + 1
    return d


def d_counts(m: int) -> BlockLedger:
    """The inductive block counts for C_m: start from d_2 = 1 at m = 2; stepping to
    m + 1 = b_k + r (1 <= r <= k) adds one to d_{2r}, and m + 1 = b_{k+1} opens
    d_{2(k+1)} = 1."""
    if m < 2:
        raise ValueError("m must be >= 2")
    B, C = Block(block_start(m), 2 * m), Block(block_start(m), m + 1)
    return BlockLedger(m, B, C, _ledger_counts(m))


def ledger_table(m_max: int) -> str:
    """Plain-text table of the block counts d_{2l}^m for m = 2..m_max."""
    ledgers = [d_counts(m) for m in range(2, m_max + 1)]
    top = max(l.top for l in ledgers)
    head = ["m", "t", "C_m"] + [f"d_{2 * l}" for l in range(1, top + 1)] + ["sum"]
    rows = [head]
    for led in ledgers:
        rows.append([str(led.m), str(led.B.start), f"{led.C.start}..{led.C.stop}"]
                    + [str(led.d_counts.get(l, 0)) for l in range(1, top + 1)]
                    + [str(sum(led.d_counts.values()))])
    widths = [max(len(r[c]) for r in rows) for c in range(len(head))]
    return "\n".join("  ".join(cell.rjust(w) for cell, w in zip(r, widths)) for r in rows)


# -- x-bar ------------------------------------------------------------------

class XBarContradiction(RuntimeError):
    pass


@dataclass(frozen=True)
class XBarPrefix:
    length: int
    bits: str
    constraint_log: tuple

    def bit(self, i: int) -> int:
        return int(self.bits[i - 1])


def _assign_upper_half(x: dict, log: list, m: int, t: int):
    for i in range(t + m + 1, t + 2 * m):
        x[i] = 0 if i % 2 else 1
        log.append(("upper", m, i, x[i]))


def _assign_chain(x: dict, log: list, m: int):
    """Two-colour the inequality constraints of C_m; each component's least position gets 0."""
    ledger = d_counts(m)
    adj: dict[int, list[int]] = {}
    for _, a, b in ledger.chain_pairs():
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
        log.append(("neq", m, a, b))
    for root in sorted(adj):
        if root in x:
            continue
        x[root] = 0
        stack = [root]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in x:
                    x[w] = 1 - x[u]
                    stack.append(w)
                elif x[w] == x[u]:
                    raise XBarContradiction(f"positions {u} and {w} in C_{m} forced equal")


def build_xbar(length: int) -> XBarPrefix:
    """The first ``length`` symbols of x-bar, indexed from 1.

    Assignment order:
      1. i in P gets 1 when i is odd and 0 when even;
      2. for m >= 3, positions t+m+1 .. t+2m-1 of B_m get 0 when odd and 1 when even;
      3. the inequalities x_a != x_{a+2l} from the block layout of C_m, solved as a
         two-colouring with the least position of each component set to 0;
      4. any position still free copies the complement of the symbol two places back.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    x: dict[int, int] = {}
    log: list = []
    for s, blen, inc in p_blocks(length):
        if inc:
            for i in range(s, min(s + blen, length + 1)):
                x[i] = 1 if i % 2 else 0
                log.append(("parity", i, x[i]))
    m = 1
    while block_start(m) <= length:
        t = block_start(m)
        if m >= 3:
            _assign_upper_half(x, log, m, t)
        if m >= 2:
            _assign_chain(x, log, m)
        m += 1
    bits = []
    for i in range(1, length + 1):
        if i not in x:
            x[i] = 1 - x[i - 2] if i > 2 else 0
            log.append(("filler", i, x[i]))
        bits.append(str(x[i]))
    return XBarPrefix(length, "".join(bits), tuple(log))


class _XBarRule:
    """Thread-safe growable cache behind the named rule ``"xbar"``."""

    def __init__(self):
        self._lock = threading.Lock()
        self._bits = ""

    def __call__(self, i: int) -> int:
        bits = self._bits
        if i > len(bits):
            with self._lock:
                if i > len(self._bits):
                    self._bits = build_xbar(max(2 * len(self._bits), i + 256, 1024)).bits
                bits = self._bits
        return int(bits[i - 1])


register_rule("xbar", _XBarRule())

ZERO_ONE = periodic("01")
ONE_ZERO = periodic("10")


def xbar_point(r: int = 0) -> SequenceSource:
    """sigma^r(x-bar)."""
    return named("xbar", r)


@dataclass(frozen=True)
class Ex1System(SequenceSystem):
    """Shift on the orbit of x-bar together with the two period-2 points."""

    name: str = "ex1"

    def point(self, name: str, shift: int = 0) -> SequenceSource:
        if name == "xbar":
            return xbar_point(shift)
        if name in ("01", "10"):
            base = ZERO_ONE if name == "01" else ONE_ZERO
            return shift_point(base, shift)
        raise KeyError(name)


def ex1_system() -> Ex1System:
    return Ex1System(two_sided=False)


def p_prime(s: int, hi: int) -> WindowSet:
    """P with the last ``s`` elements of every block removed."""
    members = [i for st, length, inc in p_blocks(hi) if inc
               for i in range(st, st + max(length - s, 0)) if i <= hi]
    return WindowSet(1, hi, tuple(members))


def build_F(hi: int, m_min: int = 2) -> WindowSet:
    """Union over m >= m_min of the upper halves t+m+1 .. t+2m-1 of B_m."""
    members = set()
    m = m_min
    while block_start(m) <= hi:
        t = block_start(m)
        members.update(i for i in range(t + m + 1, t + 2 * m) if i <= hi)
        m += 1
    return WindowSet(1, hi, tuple(sorted(members)))


# -- the non-expansive map on {1/n, 1 - 1/n} ----------------------------------

EG1_EXCEPTIONAL = (Fraction(0), Fraction(1, 2), Fraction(1, 3), Fraction(2, 3), Fraction(1))


def eg1_points(N: int) -> list[Fraction]:
    pts = {Fraction(0), Fraction(1)}
    for n in range(2, N + 1):
        pts.add(Fraction(1, n))
        pts.add(1 - Fraction(1, n))
    return sorted(pts)


def eg1_system(N: int) -> FiniteMetricSystem:
    """Points 1/n and 1 - 1/n for n <= N (plus 0 and 1); f fixes 0, 1/2, 1 and moves
    every other point one step towards 1/2."""
    if N < 3:
        raise ValueError("N must be >= 3")
    pts = eg1_points(N)
    half = Fraction(1, 2)
    fmap = []
    for k, p in enumerate(pts):
        if p in (0, half, 1):
            fmap.append(k)
        elif p < half:
            fmap.append(k + 1)
        else:
            fmap.append(k - 1)
    return line_system(pts, fmap, labels=[str(p) for p in pts], name=f"eg1(N={N})")


# -- periodic orbit closures ------------------------------------------------

def periodic_closure_system(pattern: str) -> FiniteMetricSystem:
    """Shift on the orbit of ``pattern**inf`` (a finite set), with exact distances."""
    if not pattern or set(pattern) - {"0", "1"}:
        raise ValueError("pattern must be a nonempty binary string")
    rotations = []
    for j in range(len(pattern)):
        r = pattern[j:] + pattern[:j]
        if r not in rotations:
            rotations.append(r)
    pts = [periodic(r) for r in rotations]
    dist = [[metric_distance(p, q) for q in pts] for p in pts]
    fmap = [rotations.index(r[1:] + r[:1]) for r in rotations]
    return FiniteMetricSystem.build(rotations, dist, fmap, name=f"periodic({pattern})")


def closure_point(pattern: str, shift: int = 0) -> SequenceSource:
    return shift_point(periodic(pattern), shift)


# -- asymptotic pairs --------------------------------------------------------

def asymptotic_pair(kind: str = "positively") -> tuple[SequenceSource, SequenceSource]:
    """``positively``: 0-bar and the point that is 1 exactly on coordinates <= 0.
    ``negatively``: 0-bar and the point that is 1 exactly on coordinates >= 0."""
    zero = two_sided(Word("", "0"), Word("", "0"))
    if kind == "positively":
        return zero, two_sided(Word("1", "0"), Word("", "1"))
    if kind == "negatively":
        return zero, two_sided(Word("", "1"), Word("", "0"))
    raise ValueError(f"unknown kind {kind!r}")


def asymptotic_cutoff(epsilon) -> int:
    """Least N with 2**N >= 2/epsilon, i.e. ceil(log2(2/epsilon))."""
    eps = as_fraction(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    target = Fraction(2) / eps
    N = 0
    while (1 << N) < target:
        N += 1
    return N


@dataclass(frozen=True)
class TailRefutation:
    epsilon: Fraction
    window: WindowSet
    cutoff: int
    verdict: FamilyVerdict


def syndetic_refutation_check(pair=None, epsilon_grid=(), horizon: int = 1000,
                              kind: str = "positively") -> list[TailRefutation]:
    """For each epsilon, exhibit an empty tail of N(x, y, epsilon) on [-H, H] minus 0.

    A syndetic subset of Z is unbounded in both directions, so a thick empty
    tail refutes syndeticity.
    """
    x, y = pair if pair is not None else asymptotic_pair(kind)
    sys = SequenceSystem(two_sided=True)
    out = []
    for eps in epsilon_grid:
        eps = as_fraction(eps)
        w = separation_window(sys, x, y, eps, horizon, integers=True)
        N = asymptotic_cutoff(eps)
        if kind == "positively":
            tail = (N + 1, horizon)
            hits = [n for n in w if n > N]
        else:
            tail = (-horizon, -N - 1)
            hits = [n for n in w if n < -N]
        witness = {"epsilon": str(eps), "tail": list(tail), "tail_members": hits[:10]}
        kind_v = Verdict.REFUTED if not hits and tail[0] <= tail[1] else Verdict.INCONCLUSIVE
        out.append(TailRefutation(eps, w, N, FamilyVerdict(kind_v, witness, (-horizon, horizon))))
    return out


# -- the thick-expansivity claims for x-bar ------------------------------------

@dataclass(frozen=True)
class Claim:
    claim_id: str
    passed: bool
    detail: dict


def _cut(w: WindowSet, r: int, hi: int) -> WindowSet:
    return WindowSet(1, hi, tuple(m for m in w.members if r < m <= hi))


def _shift_down(w: WindowSet, k: int, hi: int) -> WindowSet:
    return WindowSet(1, hi, tuple(m - k for m in w.members if 1 <= m - k <= hi))


def _inclusion(claim_id: str, claimed: WindowSet, window: WindowSet) -> Claim:
    missing = claimed.missing_from(window)
    return Claim(claim_id, not missing, {"claimed": len(claimed), "missing": missing[:10]})


def ex1_claims(delta=Fraction(1, 4), horizon: int = 2000, literal: bool = True,
               corrected: bool = True, precision: int = DEFAULT_PRECISION) -> list[Claim]:
    """Window inclusions for the orbit closure of x-bar.

    Literal forms, exactly as stated for the construction:
      case1: N(01, 10) is everything;
      case2: N(01, sigma^r x) contains P minus {1..r} (r even) or F minus {1..r} (r odd);
      case3: N(x, sigma^s x) contains P'_s (s odd), and blocks of length d_{2p}^k (s = 2p);
      noncofinite: the complement of some even-s window has a block of length >= 20.
    Coordinate-aligned forms: the separation at iterate n reads coordinate n + 1,
    so the claimed sets are moved down by r + 1 (case2, F built from m >= 3)
    and by 1 (case3).
    """
    delta = as_fraction(delta)
    H = horizon
    sys = ex1_system()
    xb = xbar_point(0)
    P = build_P(H + 8)
    out = []
    w = separation_window(sys, ZERO_ONE, ONE_ZERO, delta, H, max_budget=precision)
    out.append(Claim("ex1.case1", len(w) == H, {"size": len(w)}))
    windows2 = {r: separation_window(sys, ZERO_ONE, xbar_point(r), delta, H, max_budget=precision) for r in range(5)}
    for r, w in windows2.items():
        if literal:
            claimed = _cut(P, r, H) if r % 2 == 0 else _cut(build_F(H + 8, 2), r, H)
            out.append(_inclusion(f"ex1.case2.r={r}", claimed, w))
        if corrected:
            src = P if r % 2 == 0 else build_F(H + 8, 3)
            out.append(_inclusion(f"ex1.case2.r={r}.aligned", _shift_down(src, r + 1, H), w))
    for s in (1, 3, 5):
        w = separation_window(sys, xb, xbar_point(s), delta, H, max_budget=precision)
        pp = p_prime(s, H + 8)
        if literal:
            out.append(_inclusion(f"ex1.case3.s={s}", _cut(pp, 0, H), w))
        if corrected:
            out.append(_inclusion(f"ex1.case3.s={s}.aligned", _shift_down(pp, 1, H), w))
    for s in (2, 4, 6):
        w = separation_window(sys, xb, xbar_point(s), delta, H, max_budget=precision)
        p = s // 2
        short = []
        k = 2
        while block_start(k) + 2 * k <= H:
            led = d_counts(k)
            need = led.d_counts.get(p, 0)
            lo = led.C.start - 1
            region = [n for n in w.members if lo <= n <= led.C.stop]
            got = max_block_length(WindowSet(1, H, tuple(region))) if region else 0
            if got < need:
                short.append((k, need, got))
            k += 1
        out.append(Claim(f"ex1.case3.s={s}.blocks", not short, {"ledgers": k - 2, "short": short[:10]}))
    best = max(((s, max_block_length(complement_in_window(
        separation_window(sys, xb, xbar_point(s), delta, H, max_budget=precision)))) for s in (2, 4, 6)), key=lambda t: t[1])
    cf = classify(separation_window(sys, xb, xbar_point(best[0]), delta, H, max_budget=precision), "cofinite", 20)
    out.append(Claim("ex1.noncofinite", cf.refuted, {"s": best[0], "complement_block": best[1]}))
    return out
