"""Derived systems (products, powers, conjugates, inverse limits) and the
set-inclusion skeletons of the structural theorems about them.

Every derived system is again a ``FiniteMetricSystem``, so separation
windows, pair orbits and expansivity searches apply unchanged.  Each check
returns a ``CheckReport`` that names the constants it computed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .families import WindowSet, set_algebra, translate
from .finite_systems import (FiniteMetricSystem, SystemError_, pair_orbit,
                             positive_expansivity_search)
from .sequences import as_fraction


@dataclass
class CheckReport:
    claim: str
    passed: bool = True
    constants: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    checked: int = 0

    def fail(self, **info):
        self.passed = False
        if len(self.failures) < 20:
            self.failures.append(info)

    def to_json(self) -> dict:
        return {"claim": self.claim, "passed": self.passed, "checked": self.checked,
                "constants": {k: str(v) for k, v in self.constants.items()},
                "failures": [{k: _jsonable(v) for k, v in f.items()} for f in self.failures]}


def _jsonable(v):
    if isinstance(v, WindowSet):
        return list(v.members)
    if isinstance(v, (list, tuple)):
        return [_jsonable(u) for u in v]
    if isinstance(v, Fraction):
        return str(v)
    return v


def finite_window(sys: FiniteMetricSystem, x: int, y: int, delta, horizon: int,
                  integers: bool = False) -> WindowSet:
    """``N(x, y, delta)`` on [1, H], or on [-H, H] minus 0 for invertible maps."""
    delta = as_fraction(delta)
    members = []
    a, b = x, y
    for n in range(1, horizon + 1):
        a, b = sys.map[a], sys.map[b]
        if sys.dist[a][b] > delta:
            members.append(n)
    if integers:
        if not sys.invertible:
            raise SystemError_("Z-windows need an invertible map")
        inv = sys.inverse_map
        a, b = x, y
        for n in range(1, horizon + 1):
            a, b = inv[a], inv[b]
            if sys.dist[a][b] > delta:
                members.append(-n)
        return WindowSet(-horizon, horizon, tuple(sorted(members)), True)
    return WindowSet(1, horizon, tuple(members))


def _default_delta(sys: FiniteMetricSystem) -> Fraction:
    res = positive_expansivity_search(sys)
    if res.expansive and res.delta is not None:
        return res.delta
    positive = [v for v in sys.distance_values if v > 0]
    return min(positive) / 2 if positive else Fraction(1)


# -- products -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ProductSystem:
    left: FiniteMetricSystem
    right: FiniteMetricSystem
    system: FiniteMetricSystem

    def index(self, i: int, j: int) -> int:
        return i * self.right.n + j

    def split(self, k: int) -> tuple[int, int]:
        return divmod(k, self.right.n)

    def to_json(self) -> dict:
        return {"combinator": "product", "left": self.left.name, "right": self.right.name}


def product(a: FiniteMetricSystem, b: FiniteMetricSystem) -> ProductSystem:
    """Max-metric product with the componentwise map."""
    labels, fmap = [], []
    for i in range(a.n):
        for j in range(b.n):
            labels.append(f"({a.points[i]},{b.points[j]})")
            fmap.append(a.map[i] * b.n + b.map[j])
    dist = [[max(a.dist[i1][i2], b.dist[j1][j2]) for i2 in range(a.n) for j2 in range(b.n)]
            for i1 in range(a.n) for j1 in range(b.n)]
    sys = FiniteMetricSystem.build(labels, dist, fmap, f"{a.name}x{b.name}", check_metric=False)
    return ProductSystem(a, b, sys)


def product_check(a: FiniteMetricSystem, b: FiniteMetricSystem, delta=None, eta=None,
                  horizon: int = 64) -> CheckReport:
    """For distinct pairs with x1 != y1: N_f(x1, y1, delta) is inside N_h(x, y, beta),
    beta = min(delta, eta) / 2, and N_h(x, y, delta) = N_f(x1, y1, delta) when x2 = y2."""
    delta = _default_delta(a) if delta is None else as_fraction(delta)
    eta = _default_delta(b) if eta is None else as_fraction(eta)
    beta = min(delta, eta) / 2
    p = product(a, b)
    rep = CheckReport("product", constants={"delta": delta, "eta": eta, "beta": beta})
    h = p.system
    for x, y in h.pairs():
        (x1, x2), (y1, y2) = p.split(x), p.split(y)
        wh = finite_window(h, x, y, beta, horizon)
        rep.checked += 1
        if x1 != y1:
            wf = finite_window(a, x1, y1, delta, horizon)
            if not wf <= wh:
                rep.fail(pair=[h.points[x], h.points[y]], kind="left", missing=wf.missing_from(wh))
        if x2 != y2:
            wg = finite_window(b, x2, y2, eta, horizon)
            if not wg <= wh:
                rep.fail(pair=[h.points[x], h.points[y]], kind="right", missing=wg.missing_from(wh))
        if x2 == y2 and finite_window(h, x, y, delta, horizon) != finite_window(a, x1, y1, delta, horizon):
            rep.fail(pair=[h.points[x], h.points[y]], kind="projection")
        if x1 == y1 and finite_window(h, x, y, eta, horizon) != finite_window(b, x2, y2, eta, horizon):
            rep.fail(pair=[h.points[x], h.points[y]], kind="projection")
    return rep


# -- powers -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PowerSystem:
    base: FiniteMetricSystem
    m: int
    system: FiniteMetricSystem

    def to_json(self) -> dict:
        return {"combinator": "power", "base": self.base.name, "m": self.m}


def power(sys: FiniteMetricSystem, m: int) -> PowerSystem:
    if m < 1:
        raise SystemError_("m must be >= 1")
    fmap = [sys.iterate(i, m) for i in range(sys.n)]
    derived = FiniteMetricSystem.build(sys.points, sys.dist, fmap, f"{sys.name}^{m}", check_metric=False)
    return PowerSystem(sys, m, derived)


def B_forward(A: WindowSet, m: int, hi: int | None = None) -> WindowSet:
    """{r >= 1 : 0 < n - r m <= m for some n in A}; r = 0 is not an iterate index."""
    return set_algebra("block_quotient", A, m, 1, hi)


def B_backward(A: WindowSet, m: int, hi: int | None = None) -> WindowSet:
    """U_{q=0}^{m-1} (m A - q)."""
    return set_algebra("dilate_preimage", A, m, 1, hi)


def _pairs_exceeding(sys: FiniteMetricSystem, delta: Fraction, steps: Sequence[int]) -> list[Fraction]:
    out = []
    for t, w in sys.pairs():
        if any(sys.dist[sys.iterate(t, i)][sys.iterate(w, i)] > delta for i in steps):
            out.append(sys.dist[t][w])
    return out


def power_eta(sys: FiniteMetricSystem, delta, steps: Sequence[int]) -> Fraction:
    """Half the least d(t, w) over pairs with d(f^i t, f^i w) > delta for some i in ``steps``.

    Any eta below that minimum satisfies the uniform-continuity implication
    "d(f^i t, f^i w) > delta implies d(t, w) > eta"; half of it is a safe choice.
    """
    vals = _pairs_exceeding(sys, as_fraction(delta), steps)
    return min(vals) / 2 if vals else as_fraction(delta)


def power_check(sys: FiniteMetricSystem, m: int, delta=None, horizon: int = 40) -> CheckReport:
    """Both directions of the power theorem as window inclusions.

    forward:  B_forward(N_f(x, y, delta)) is inside N_{f^m}(x, y, eta)
    backward: B_backward(N_{f^m}(x, y, delta)) is inside N_f(x, y, eta')
    """
    delta = _default_delta(sys) if delta is None else as_fraction(delta)
    p = power(sys, m)
    eta_f = power_eta(sys, delta, range(1, m + 1))
    eta_b = power_eta(sys, delta, range(0, m))
    rep = CheckReport(f"power(m={m})", constants={"delta": delta, "eta_forward": eta_f,
                                                  "eta_backward": eta_b})
    for x, y in sys.pairs():
        rep.checked += 1
        A = finite_window(sys, x, y, delta, m * horizon + m)
        B = B_forward(A, m, horizon)
        W = finite_window(p.system, x, y, eta_f, horizon)
        if not B <= W:
            rep.fail(pair=[sys.points[x], sys.points[y]], kind="forward", missing=B.missing_from(W))
        Am = finite_window(p.system, x, y, delta, horizon)
        Bb = B_backward(Am, m, m * horizon)
        Wf = finite_window(sys, x, y, eta_b, m * horizon)
        if not Bb <= Wf:
            rep.fail(pair=[sys.points[x], sys.points[y]], kind="backward", missing=Bb.missing_from(Wf))
    return rep


# -- conjugacy ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ConjugateSystem:
    base: FiniteMetricSystem
    g: tuple[int, ...]
    g_inverse: tuple[int, ...]
    system: FiniteMetricSystem

    def to_json(self) -> dict:
        return {"combinator": "conjugate", "base": self.base.name, "g": list(self.g)}


def conjugate(sys: FiniteMetricSystem, g: Sequence[int], target_dist, target_labels=None,
              name: str | None = None) -> ConjugateSystem:
    """h = g f g^-1 on the target metric; ``g`` maps base index i to target index g[i]."""
    g = tuple(int(v) for v in g)
    if sorted(g) != list(range(sys.n)):
        raise SystemError_("g must be a bijection onto the target points")
    ginv = [0] * sys.n
    for i, v in enumerate(g):
        ginv[v] = i
    fmap = [g[sys.map[ginv[j]]] for j in range(sys.n)]
    labels = target_labels or [f"g({sys.points[ginv[j]]})" for j in range(sys.n)]
    target = FiniteMetricSystem.build(labels, target_dist, fmap, name or f"conj({sys.name})")
    return ConjugateSystem(sys, g, tuple(ginv), target)


def conjugacy_epsilon(c: ConjugateSystem, delta) -> Fraction | None:
    """min rho(g w, g t) over base pairs with d(w, t) >= delta (None if no such pair)."""
    delta = as_fraction(delta)
    base, tgt = c.base, c.system
    vals = [tgt.dist[c.g[w]][c.g[t]] for w, t in base.pairs() if base.dist[w][t] >= delta]
    return min(vals) if vals else None


def conjugacy_check(c: ConjugateSystem, delta=None, horizon: int = 64) -> CheckReport:
    """N_f(g^-1 x, g^-1 y, delta) is inside N_h(x, y, eta) for eta = epsilon / 2."""
    delta = _default_delta(c.base) if delta is None else as_fraction(delta)
    eps = conjugacy_epsilon(c, delta)
    eta = eps / 2 if eps is not None else delta
    rep = CheckReport("conjugacy", constants={"delta": delta, "epsilon": eps, "eta": eta})
    for x, y in c.system.pairs():
        rep.checked += 1
        wf = finite_window(c.base, c.g_inverse[x], c.g_inverse[y], delta, horizon)
        wh = finite_window(c.system, x, y, eta, horizon)
        if not wf <= wh:
            rep.fail(pair=[c.system.points[x], c.system.points[y]], missing=wf.missing_from(wh))
    return rep


# -- inverse limits --------------------------------------------------------

@dataclass(frozen=True, eq=False)
class InverseLimitSystem:
    """Orbit sequences of a bijection, each represented by its coordinate 0.

    ``system`` carries the exact bi-infinite metric sum d(x_i, y_i) / 2^|i|
    and the shift, which acts on coordinate 0 as the base map.
    """

    base: FiniteMetricSystem
    system: FiniteMetricSystem

    def coordinate(self, p: int, i: int) -> int:
        return self.base.iterate(p, i)

    def orbit(self, p: int, lo: int, hi: int) -> list[int]:
        return [self.coordinate(p, i) for i in range(lo, hi + 1)]

    def to_json(self) -> dict:
        return {"combinator": "inverse_limit", "base": self.base.name}


def inverse_limit_distance(base: FiniteMetricSystem, x: int, y: int) -> Fraction:
    """Closed form of sum_{i in Z} d(f^i x, f^i y) / 2^|i| for a bijection f.

    The pair orbit is purely periodic with some period L, so each side is a
    finite sum over one period scaled by 1 / (1 - 2^-L).
    """
    orb = pair_orbit(base, x, y)
    if orb.tail:
        raise SystemError_("pair orbits of a bijection must be purely periodic")
    L = orb.period
    g = [base.dist[a][b] for a, b in orb.states]
    scale = Fraction(1 << L, (1 << L) - 1)
    forward = sum(g[i] / (1 << i) for i in range(L))
    backward = sum(g[(-i) % L] / (1 << i) for i in range(1, L + 1))
    return (forward + backward) * scale


def inverse_limit(base: FiniteMetricSystem) -> InverseLimitSystem:
    if not base.invertible:
        raise SystemError_("the inverse limit needs an invertible base map")
    n = base.n
    dist = [[inverse_limit_distance(base, i, j) if i != j else Fraction(0) for j in range(n)]
            for i in range(n)]
    sys = FiniteMetricSystem.build([f"[{p}]" for p in base.points], dist, base.map,
                                   f"inverse_limit({base.name})")
    return InverseLimitSystem(base, sys)


def inverse_limit_eta(il: InverseLimitSystem, delta) -> dict:
    """Two admissible constants for the converse direction.

    ``eta``: half the least d(x0, y0) over pairs whose orbit distance exceeds
    delta (exact).  ``eta_sweep``: the route through a cut-off k with
    diam / 2^k < delta / 3 and the requirement d(f^i t, f^i w) < delta / 9 for
    |i| <= k.
    """
    delta = as_fraction(delta)
    base, tot = il.base, il.system
    over = [base.dist[t][w] for t, w in base.pairs() if tot.dist[t][w] > delta]
    eta = min(over) / 2 if over else delta
    alpha = base.diameter
    k = 0
    while alpha / (1 << k) >= delta / 3:
        k += 1
    bad = [base.dist[t][w] for t, w in base.pairs()
           if any(base.dist[base.iterate(t, i)][base.iterate(w, i)] >= delta / 9
                  for i in range(-k, k + 1))]
    eta_sweep = min(bad) / 2 if bad else delta
    return {"k": k, "eta": eta, "eta_sweep": eta_sweep}


def inverse_limit_check(base: FiniteMetricSystem, delta, horizon: int = 40,
                        shifts: Sequence[int] = range(-3, 4)) -> CheckReport:
    """Inclusion skeletons for the inverse-limit theorem, on Z-windows.

    forward: N_f(x_j, y_j, delta) is inside N_s(s^j x, s^j y, delta), and
             (N_s(s^j x, s^j y, delta) + j) minus {0} is inside N_s(x, y, delta);
    converse: N_s(x, y, delta) is inside N_f(x_0, y_0, eta) for both etas.
    """
    delta = as_fraction(delta)
    il = inverse_limit(base)
    tot = il.system
    consts = inverse_limit_eta(il, delta)
    rep = CheckReport("inverse_limit", constants={"delta": delta, **consts})
    for x, y in base.pairs():
        rep.checked += 1
        ws = finite_window(tot, x, y, delta, horizon, integers=True)
        for j in shifts:
            xj, yj = base.iterate(x, j), base.iterate(y, j)
            wf_j = finite_window(base, xj, yj, delta, horizon, integers=True)
            ws_j = finite_window(tot, xj, yj, delta, horizon, integers=True)
            if not wf_j <= ws_j:
                rep.fail(pair=[x, y], j=j, kind="coordinate", missing=wf_j.missing_from(ws_j))
            moved = translate(ws_j, j)
            if not moved <= ws:
                rep.fail(pair=[x, y], j=j, kind="shift", missing=moved.missing_from(ws))
        for key in ("eta", "eta_sweep"):
            wf = finite_window(base, x, y, consts[key], horizon, integers=True)
            if not ws <= wf:
                rep.fail(pair=[x, y], kind=f"converse[{key}]", missing=ws.missing_from(wf))
    return rep


# -- finite-complement extension ---------------------------------------------

@dataclass
class ExtendReport(CheckReport):
    close_points: list = field(default_factory=list)
    literal_branch: str = "n/a"


def _lcm_horizon(sys: FiniteMetricSystem, *pairs) -> int:
    orbs = [pair_orbit(sys, a, b) for a, b in pairs]
    return max(o.tail for o in orbs) + math.lcm(*(o.period for o in orbs)) + 1


def extend_check(sys: FiniteMetricSystem, A: Sequence[int], x: int, delta) -> ExtendReport:
    """Adjoin one point ``x`` to a set ``A`` on which delta works as an expansivity constant.

    Checks, exactly via eventual periodicity:
      * at most one y in A has d(f^m x, f^m y) <= delta / 2 for all m >= 0;
      * with eta = delta / 4 (below delta / 2, and below d(x, y) when y exists),
        N_f(p, y, delta) is inside N_f(p, x, eta) for every p in A other than y.
    ``literal_branch`` records whether N_f(p, x, eta) is all of N when no such
    y exists, a claim that does not follow in general.
    """
    delta = as_fraction(delta)
    A = sorted(set(A))
    if x in A:
        raise SystemError_("x must lie outside A")
    half = delta / 2
    close = []
    for y in A:
        orb = pair_orbit(sys, x, y)
        if all(sys.dist[a][b] <= half for a, b in orb.states):
            close.append(y)
    eta = delta / 4
    if close:
        eta = min(eta, sys.dist[x][close[0]] / 2)
    rep = ExtendReport("extend", constants={"delta": delta, "eta": eta},
                       close_points=[sys.points[c] for c in close])
    if len(close) > 1:
        rep.fail(kind="at-most-one", close=[sys.points[c] for c in close])
    if close:
        y = close[0]
        for p in A:
            if p == y:
                continue
            rep.checked += 1
            H = _lcm_horizon(sys, (p, y), (p, x))
            wy = finite_window(sys, p, y, delta, H)
            wx = finite_window(sys, p, x, eta, H)
            if not wy <= wx:
                rep.fail(kind="inclusion", p=sys.points[p], missing=wy.missing_from(wx))
    else:
        full = True
        for p in A:
            H = _lcm_horizon(sys, (p, x))
            w = finite_window(sys, p, x, eta, H)
            full &= len(w) == H
        rep.literal_branch = "holds" if full else "fails"
    return rep
