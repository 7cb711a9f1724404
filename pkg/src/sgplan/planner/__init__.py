"""Optimal planning over ground tasks."""

from .heuristics import INF, blind, hmax, lmcut
from .plan import PlanStep, format_plan, parse_plan
from .search import (
    DEFAULT_TIMEOUT,
    HEURISTIC_NAMES,
    SearchConfig,
    SearchResult,
    Status,
    breadth_first_search,
    reachable_states,
    solve,
)

__all__ = [
    "INF",
    "blind",
    "hmax",
    "lmcut",
    "PlanStep",
    "format_plan",
    "parse_plan",
    "DEFAULT_TIMEOUT",
    "HEURISTIC_NAMES",
    "SearchConfig",
    "SearchResult",
    "Status",
    "breadth_first_search",
    "reachable_states",
    "solve",
]
