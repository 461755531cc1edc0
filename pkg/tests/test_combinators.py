import itertools
import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import any_systems, table_systems
from expanselab.combinators import (B_backward, B_forward, conjugacy_check, conjugacy_epsilon,
                                    conjugate, extend_check, finite_window, inverse_limit,
                                    inverse_limit_check, inverse_limit_distance,
                                    inverse_limit_eta, power, power_check, power_eta, product,
                                    product_check)
from expanselab.families import make_window
from expanselab.finite_systems import (SystemError_, four_cycle, identity_two, line_system,
                                       uniform_system)


def brute_window(sys, x, y, delta, lo, hi):
    return [n for n in range(lo, hi + 1) if n != 0
            and sys.dist[sys.iterate(x, n)][sys.iterate(y, n)] > delta]


small_deltas = st.sampled_from([Fraction(1, 16), Fraction(1, 4), Fraction(1, 2), Fraction(1),
                                Fraction(5, 4), Fraction(3, 2)])


# -- windows --------------------------------------------------------------------

@given(any_systems(invertible=True), small_deltas, st.data())
def test_finite_window_matches_iteration(sys, delta, data):
    x, y = data.draw(st.integers(0, sys.n - 1)), data.draw(st.integers(0, sys.n - 1))
    w = finite_window(sys, x, y, delta, 15, integers=True)
    assert list(w.members) == brute_window(sys, x, y, delta, -15, 15)
    assert 0 not in w


def test_z_window_needs_bijection():
    with pytest.raises(SystemError_):
        finite_window(uniform_system(2, [0, 0]), 0, 1, Fraction(1, 2), 5, integers=True)


# -- products ----------------------------------------------------------------------

@given(any_systems(n_max=4), any_systems(n_max=4))
def test_product_is_max_metric_with_componentwise_map(a, b):
    p = product(a, b)
    h = p.system
    assert h.n == a.n * b.n
    for k, l in itertools.product(range(h.n), repeat=2):
        (i1, j1), (i2, j2) = p.split(k), p.split(l)
        assert h.dist[k][l] == max(a.dist[i1][i2], b.dist[j1][j2])
    for k in range(h.n):
        i, j = p.split(k)
        assert h.map[k] == p.index(a.map[i], b.map[j])


@given(any_systems(n_max=4), any_systems(n_max=4), small_deltas, small_deltas)
def test_product_inclusions(a, b, delta, eta):
    rep = product_check(a, b, delta, eta, horizon=30)
    assert rep.passed, rep.failures
    assert rep.constants["beta"] == min(delta, eta) / 2
    assert rep.checked == a.n * b.n * (a.n * b.n - 1) // 2


def test_product_default_constants():
    rep = product_check(four_cycle(), identity_two())
    assert rep.passed
    assert rep.constants["beta"] == min(rep.constants["delta"], rep.constants["eta"]) / 2
    json.dumps(rep.to_json())


# -- powers ---------------------------------------------------------------------------

@given(any_systems(n_max=6), st.integers(1, 4))
def test_power_map_iterates(sys, m):
    p = power(sys, m)
    assert all(p.system.map[i] == sys.iterate(i, m) for i in range(sys.n))
    assert p.system.dist == sys.dist


def test_power_rejects_zero():
    with pytest.raises(SystemError_):
        power(four_cycle(), 0)


def test_block_maps_examples():
    A = make_window([3, 7], 1, 12)
    # n = 3 lies in block (2, 4] -> r = 1; n = 7 in (6, 8] -> r = 3
    assert B_forward(A, 2, 6).members == (1, 3)
    assert B_backward(make_window([2], 1, 4), 3, 12).members == (4, 5, 6)


@given(st.lists(st.integers(1, 60), unique=True, max_size=15), st.integers(1, 5))
def test_block_maps_match_definition(members, m):
    A = make_window(sorted(members), 1, 60)
    fwd = B_forward(A, m, 20).members
    assert fwd == tuple(r for r in range(1, 21) if any(0 < n - r * m <= m for n in members))
    bwd = B_backward(A, m, 300).members
    assert bwd == tuple(sorted({m * a - q for a in members for q in range(m) if 1 <= m * a - q <= 300}))


@given(any_systems(n_max=6), st.integers(1, 4), small_deltas)
def test_power_inclusions(sys, m, delta):
    rep = power_check(sys, m, delta, horizon=25)
    assert rep.passed, rep.failures


@given(any_systems(n_max=5), small_deltas, st.integers(1, 3))
def test_power_eta_is_admissible(sys, delta, m):
    eta = power_eta(sys, delta, range(1, m + 1))
    for t, w in sys.pairs():
        if any(sys.dist[sys.iterate(t, i)][sys.iterate(w, i)] > delta for i in range(1, m + 1)):
            assert sys.dist[t][w] > eta


# -- conjugacy -------------------------------------------------------------------------------

@given(any_systems(n_max=6), st.data())
def test_conjugacy_inclusion(sys, data):
    g = data.draw(st.permutations(range(sys.n)))
    target = [[Fraction(0) if i == j else 2 * sys.dist[i][j] for j in range(sys.n)]
              for i in range(sys.n)]
    c = conjugate(sys, g, target)
    for j in range(sys.n):
        assert c.system.map[j] == g[sys.map[c.g_inverse[j]]]
    rep = conjugacy_check(c, horizon=30)
    assert rep.passed, rep.failures


def test_conjugacy_epsilon_values():
    base = four_cycle()
    c = conjugate(base, [0, 1, 2, 3], [[0 if i == j else 2 for j in range(4)] for i in range(4)])
    assert conjugacy_epsilon(c, Fraction(1, 2)) == 2
    assert conjugacy_epsilon(c, 5) is None
    with pytest.raises(SystemError_):
        conjugate(base, [0, 0, 1, 2], base.dist)


# -- inverse limits --------------------------------------------------------------------------

def test_inverse_limit_constant_distance_is_three():
    il = inverse_limit(four_cycle())
    for x, y in il.system.pairs():
        assert il.system.dist[x][y] == 3
    assert inverse_limit_distance(four_cycle(), 0, 1) == 3


@given(any_systems(n_max=6, invertible=True), st.data())
def test_inverse_limit_distance_matches_series(sys, data):
    x, y = data.draw(st.integers(0, sys.n - 1)), data.draw(st.integers(0, sys.n - 1))
    terms = 80
    partial = sum(sys.dist[sys.iterate(x, i)][sys.iterate(y, i)] / Fraction(2) ** abs(i)
                  for i in range(-terms, terms + 1))
    exact = inverse_limit_distance(sys, x, y)
    assert partial <= exact <= partial + 4 * sys.diameter / Fraction(2) ** terms


def test_inverse_limit_needs_bijection():
    with pytest.raises(SystemError_):
        inverse_limit(uniform_system(3, [0, 0, 1]))


@given(any_systems(n_max=6, invertible=True), small_deltas)
def test_inverse_limit_inclusions(sys, delta):
    rep = inverse_limit_check(sys, delta, horizon=20)
    assert rep.passed, rep.failures


@given(any_systems(n_max=5, invertible=True), small_deltas)
def test_inverse_limit_etas_are_admissible(sys, delta):
    il = inverse_limit(sys)
    c = inverse_limit_eta(il, delta)
    assert sys.diameter / Fraction(2) ** c["k"] < delta / 3
    for t, w in sys.pairs():
        if il.system.dist[t][w] > delta:
            assert sys.dist[t][w] > c["eta"]
            assert sys.dist[t][w] > c["eta_sweep"]


# -- finite-complement extension ----------------------------------------------------------------

def _constant_on(sys, A):
    """Half the least sup over n >= 0 of the pair distances inside A."""
    sups = [max(sys.dist[sys.iterate(a, n)][sys.iterate(b, n)] for n in range(sys.n ** 2 + 1))
            for a, b in itertools.combinations(A, 2)]
    return min(sups) / 2 if sups else Fraction(1)


@given(table_systems(n_min=3, n_max=6), st.data())
def test_extension_inclusions(sys, data):
    x = data.draw(st.integers(0, sys.n - 1))
    A = [p for p in range(sys.n) if p != x]
    delta = _constant_on(sys, A)
    rep = extend_check(sys, A, x, delta)
    assert rep.passed, rep.failures
    assert len(rep.close_points) <= 1
    assert rep.literal_branch in ("holds", "fails", "n/a")


def test_extension_close_point_example():
    line = line_system([0, Fraction(1, 32), 1], [0, 1, 2])
    rep = extend_check(line, [0, 2], 1, Fraction(1, 2))
    assert rep.close_points == ["0"] and rep.passed
    assert rep.constants["eta"] == Fraction(1, 64)
    with pytest.raises(SystemError_):
        extend_check(line, [0, 1], 1, Fraction(1, 2))


def test_extension_literal_branch_can_fail():
    # x is never close to A, yet N(p, x, eta) misses some iterates
    # 0 and 1 are fixed; x = 1/16 swaps with 15/16, so it visits both ends
    line = line_system([0, Fraction(1, 16), Fraction(15, 16), 1], [0, 2, 1, 3])
    rep = extend_check(line, [0, 3], 1, Fraction(1, 2))
    assert not rep.close_points
    assert rep.literal_branch == "fails"
