"""Exact, desk-scale checks of positive expansivity relative to families of
integer sets: separation windows, family classifiers, symbolic and finite
systems, derived systems and generators."""

from .families import (ExplicitFamily, FamilyVerdict, Verdict, WindowSet, classify, dual,
                       make_window, set_algebra, upward_close)
from .finite_systems import FiniteMetricSystem
from .sequences import Dyadic, SequenceSource, SequenceSystem, metric_distance, separation_window

__all__ = [
    "Dyadic", "ExplicitFamily", "FamilyVerdict", "FiniteMetricSystem", "SequenceSource",
    "SequenceSystem", "Verdict", "WindowSet", "classify", "dual", "make_window",
    "metric_distance", "separation_window", "set_algebra", "upward_close",
]
__version__ = "0.1.0"
