"""Generalized proximal point iterations for zeros of maximal monotone operators."""

from .algorithms import GENERAL, PPA, SIMPLE, XU, XU2, RunConfig, Trace, run, simulate_observed, step
from .operators import evaluate, graph_contains, resolvent, zero_projection
from .schedules import ScheduleSet, default_schedules, validate

__version__ = "0.1.0"

__all__ = [
    "GENERAL", "PPA", "SIMPLE", "XU", "XU2",
    "RunConfig", "Trace", "run", "simulate_observed", "step",
    "evaluate", "graph_contains", "resolvent", "zero_projection",
    "ScheduleSet", "default_schedules", "validate",
]
