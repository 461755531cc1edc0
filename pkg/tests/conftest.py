import os
from contextlib import contextmanager
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from expanselab.finite_systems import FiniteMetricSystem

settings.register_profile(
    "default", max_examples=60, deadline=None, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

SEED = int(os.environ.get("EXPANSELAB_SEED", "0"))

TABLE_VALUES = [Fraction(k, 4) for k in range(4, 9)]


@st.composite
def table_systems(draw, n_min=1, n_max=6, invertible=None):
    """Random finite systems whose off-diagonal distances lie in [1, 2]."""
    n = draw(st.integers(n_min, n_max))
    dist = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            dist[i][j] = dist[j][i] = draw(st.sampled_from(TABLE_VALUES))
    inv = draw(st.booleans()) if invertible is None else invertible
    if inv:
        fmap = draw(st.permutations(range(n)))
    else:
        fmap = draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n))
    return FiniteMetricSystem.build([f"p{i}" for i in range(n)], dist, list(fmap))


@st.composite
def line_systems(draw, n_min=2, n_max=6, invertible=None):
    """Random dyadic points of [0, 1] with the usual metric."""
    xs = draw(st.lists(st.integers(0, 32), min_size=n_min, max_size=n_max, unique=True))
    xs.sort()
    n = len(xs)
    inv = draw(st.booleans()) if invertible is None else invertible
    if inv:
        fmap = draw(st.permutations(range(n)))
    else:
        fmap = draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n))
    dist = [[abs(Fraction(a - b, 32)) for b in xs] for a in xs]
    return FiniteMetricSystem.build([str(Fraction(x, 32)) for x in xs], dist, list(fmap),
                                    check_metric=False)


def any_systems(**kw):
    return st.one_of(table_systems(**kw), line_systems(**{k: v for k, v in kw.items() if k != "n_min"}))


@pytest.fixture(scope="session")
def seed():
    return SEED


# -- acceptance reporting --------------------------------------------------------

ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


@contextmanager
def criterion(number: int, title: str):
    """Record PASS/FAIL for one acceptance criterion; notes added via the yielded list.

    A criterion split over several tests is PASS only if every part passed.
    """
    notes: list[str] = []
    prev_ok, prev_detail = ACCEPTANCE.get(number, (title, True, ""))[1:]
    try:
        yield notes
    except BaseException as exc:
        msg = str(exc).splitlines()[0] if str(exc) else ""
        ACCEPTANCE[number] = (title, False, f"{type(exc).__name__}: {msg}")
        print(f"[acceptance {number:2d}] FAIL  {title}")
        raise
    detail = "; ".join(x for x in (prev_detail, *notes) if x)
    ACCEPTANCE[number] = (title, prev_ok, detail)
    print(f"[acceptance {number:2d}] {'PASS' if prev_ok else 'FAIL'}  {title}  {'; '.join(notes)}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[number]
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title}"
        terminalreporter.write_line(f"{line}  [{detail}]" if detail else line)
