from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from expanselab.constructions import eg1_system, periodic_closure_system
from expanselab.finite_systems import FiniteMetricSystem
from expanselab.sequences import (Dyadic, Interval, PrecisionExhausted, SequenceSource,
                                  SequenceSystem, Word, exceeds, metric_distance, named,
                                  periodic, register_rule, separation_compose_check,
                                  separation_window, shift_point, two_sided)

register_rule("test-alt", lambda i: i % 2)          # 1010... == periodic("10")
register_rule("test-sq", lambda i: int(int(i ** 0.5) ** 2 == i))


def truncated(x, y, terms=400):
    """Partial sum of the defining series, bracketed by its tail bound."""
    if x.two_sided:
        s = sum(Fraction(x.bit_at(i) ^ y.bit_at(i), 1 << abs(i)) for i in range(-terms, terms + 1))
        return s, s + Fraction(2, 1 << terms)
    s = sum(Fraction(x.bit_at(i) ^ y.bit_at(i), 1 << i) for i in range(1, terms + 1))
    return s, s + Fraction(1, 1 << terms)


bits = st.text(alphabet="01", max_size=5)
periods = st.text(alphabet="01", min_size=1, max_size=5)
one_sided = st.builds(periodic, periods, bits)
two_sided_pts = st.builds(lambda rp, rpp, lp, lpp: two_sided(Word(rpp, rp), Word(lpp, lp)),
                          periods, bits, periods, bits)


# -- Dyadic ---------------------------------------------------------------

def test_dyadic_basics():
    assert Dyadic(3, 2) == Fraction(3, 4)
    assert Dyadic(4, 3).exponent == 1          # canonical 1/2
    assert Dyadic.pow2(5) == Fraction(1, 32)
    assert isinstance(Dyadic(1, 1) + Dyadic(1, 2), Dyadic)
    assert isinstance(Dyadic(1, 1) - Dyadic(1, 2), Dyadic)
    with pytest.raises(ValueError):
        Dyadic("1/3")
    with pytest.raises(ValueError):
        Dyadic(-1, 0)
    assert Dyadic(1, 2) < Dyadic(1, 1)


@given(st.integers(0, 10 ** 6), st.integers(0, 40), st.integers(0, 10 ** 6), st.integers(0, 40))
def test_dyadic_arithmetic_is_exact(a, e, b, f):
    x, y = Dyadic(a, e), Dyadic(b, f)
    assert x + y == Fraction(a, 2 ** e) + Fraction(b, 2 ** f)
    assert x * y == Fraction(a * b, 2 ** (e + f))
    assert (x + y).denominator & ((x + y).denominator - 1) == 0


# -- distances ---------------------------------------------------------------

def test_metric_examples():
    assert metric_distance(periodic("01"), periodic("10")) == 1
    x = periodic("0110", "1")
    assert metric_distance(x, x) == 0
    assert metric_distance(periodic("0"), periodic("0", "1")) == Fraction(1, 2)
    with pytest.raises(ValueError):
        metric_distance(periodic("0"), two_sided(Word("", "0"), Word("", "0")))


def test_distances_need_not_be_dyadic():
    assert metric_distance(periodic("10"), periodic("0")) == Fraction(2, 3)


@given(one_sided, one_sided)
def test_closed_form_matches_series_one_sided(x, y):
    lo, hi = truncated(x, y)
    assert lo <= metric_distance(x, y) <= hi


@given(two_sided_pts, two_sided_pts)
def test_closed_form_matches_series_two_sided(x, y):
    lo, hi = truncated(x, y, 200)
    assert lo <= metric_distance(x, y) <= hi


@given(one_sided, one_sided, one_sided)
def test_triangle_and_symmetry(x, y, z):
    dxy, dyz, dxz = metric_distance(x, y), metric_distance(y, z), metric_distance(x, z)
    assert dxy == metric_distance(y, x)
    assert dxz <= dxy + dyz


@given(st.integers(1, 80))
def test_interval_contains_exact_value(budget):
    exact = metric_distance(periodic("10"), periodic("0"))
    iv = metric_distance(named("test-alt"), periodic("0"), budget)
    assert isinstance(iv, Interval)
    assert iv.contains(exact)
    assert iv.width <= 2 * Fraction(1, 1 << budget)


def test_exceeds_three_way():
    iv = Interval(Fraction(1, 4), Fraction(1, 2))
    assert exceeds(iv, Fraction(1, 8)) is True
    assert exceeds(iv, Fraction(1, 2)) is False
    assert exceeds(iv, Fraction(1, 3)) is None
    assert exceeds(Fraction(1, 2), Fraction(1, 2)) is False


# -- shifts --------------------------------------------------------------------

def test_shift_examples():
    assert shift_point(periodic("01"), 1).prefix(10) == periodic("10").prefix(10)
    x = periodic("0110", "101")
    assert shift_point(x, 0) is x
    with pytest.raises(ValueError):
        shift_point(x, -1)


@given(one_sided, st.integers(0, 12), st.integers(0, 12))
def test_shift_composes(x, a, b):
    assert shift_point(shift_point(x, a), b).prefix(30) == shift_point(x, a + b).prefix(30)


@given(two_sided_pts, st.integers(-10, 10), st.integers(-10, 10))
def test_two_sided_shift_reads_offset(x, k, j):
    y = shift_point(x, k)
    for i in range(-15, 16):
        assert y.bit_at(i) == x.bit_at(i + k)
    z = shift_point(y, j)
    assert all(z.bit_at(i) == x.bit_at(i + k + j) for i in range(-15, 16))


def test_named_shift_and_json():
    x = named("test-sq", 3)
    assert x.prefix(6) == "".join(str(int(int(i ** 0.5) ** 2 == i)) for i in range(4, 10))
    assert SequenceSource.from_json(x.to_json()) == x
    y = two_sided(Word("1", "0"), Word("", "1"))
    assert SequenceSource.from_json(y.to_json()) == y
    assert x.to_json() == {"kind": "named", "id": "test-sq", "shift": 3}


# -- separation windows ----------------------------------------------------------

def test_separation_examples():
    shift = SequenceSystem()
    w = separation_window(shift, periodic("0"), periodic("0", "1"), Fraction(1, 4), 50)
    assert len(w) == 0
    w = separation_window(shift, periodic("01"), periodic("10"), Fraction(1, 2), 20)
    assert w.members == tuple(range(1, 21))
    assert len(separation_window(shift, periodic("01"), periodic("01"), Fraction(1, 8), 20)) == 0
    with pytest.raises(ValueError):
        separation_window(shift, periodic("0"), periodic("1"), 0, 5)
    with pytest.raises(ValueError):
        separation_window(shift, periodic("0"), periodic("1"), Fraction(1, 2), 5, integers=True)


def test_precision_exhaustion_is_reported():
    shift = SequenceSystem()
    with pytest.raises(PrecisionExhausted) as exc:
        separation_window(shift, named("test-alt"), periodic("0"), Fraction(1, 3), 1,
                          max_budget=128)
    assert exc.value.indices == [1]


def test_interval_path_agrees_with_closed_form():
    shift = SequenceSystem()
    for d in (Fraction(1, 5), Fraction(1, 2), Fraction(3, 4)):
        exact = separation_window(shift, periodic("10"), periodic("0"), d, 30)
        approx = separation_window(shift, named("test-alt"), periodic("0"), d, 30)
        assert exact == approx


@given(one_sided, one_sided, st.integers(1, 16), st.integers(1, 16))
def test_window_monotone_in_delta_and_symmetric(x, y, a, b):
    shift = SequenceSystem()
    d1, d2 = sorted([Fraction(a, 16), Fraction(b, 16)])
    w1 = separation_window(shift, x, y, d1, 20)
    w2 = separation_window(shift, x, y, d2, 20)
    assert w2 <= w1
    assert w1 == separation_window(shift, y, x, d1, 20)


@given(two_sided_pts, two_sided_pts, st.integers(1, 8))
def test_z_window_excludes_zero(x, y, k):
    w = separation_window(SequenceSystem(two_sided=True), x, y, Fraction(1, k), 12, integers=True)
    assert 0 not in w and w.excludes_zero and (w.lo, w.hi) == (-12, 12)


def test_compose_examples():
    sys = periodic_closure_system("01")
    a, b = sys.index("01"), sys.index("10")
    assert separation_compose_check(sys, a, b, Fraction(1, 2), 1, 1)
    eg = eg1_system(10)
    assert separation_compose_check(eg, eg.index("0"), eg.index("1/2"), Fraction(1, 4), 1, 3)
    with pytest.raises(ValueError):
        separation_compose_check(eg, eg.index("1/2"), eg.index("1/3"), Fraction(1, 8), 1, 1)


@given(one_sided, one_sided, st.integers(1, 8), st.integers(1, 10), st.integers(1, 10))
def test_compose_holds_whenever_preconditions_do(x, y, k, n, m):
    shift = SequenceSystem()
    d = Fraction(1, k)
    w = separation_window(shift, x, y, d, 25)
    if n in w:
        wn = separation_window(shift, shift_point(x, n), shift_point(y, n), d, 12)
        if m in wn:
            assert separation_compose_check(shift, x, y, d, n, m)


def test_finite_tables_satisfy_the_handle_contract():
    eg = eg1_system(6)
    assert isinstance(eg, FiniteMetricSystem)
    w = separation_window(eg, eg.index("0"), eg.index("1"), Fraction(1, 2), 10)
    assert w.members == tuple(range(1, 11))
