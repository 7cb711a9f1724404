"""Optimal forward state-space search over a ground task.

States are Python ints used as bitsets over fact ids. Open-list entries are
ordered by f, then h, then insertion order, so expansion counts are
reproducible run to run.
"""

from __future__ import annotations

import heapq
import time
from collections import deque
from dataclasses import dataclass, field
from enum import Enum

from ..grounder import GroundAction, GroundTask
from .heuristics import INF, lmcut_value, relaxed

HEURISTIC_NAMES = ("blind", "hmax", "lmcut")
DEFAULT_TIMEOUT = 60.0


class Status(str, Enum):
    SOLVED = "Solved"
    UNSOLVABLE = "Unsolvable"
    TIMEOUT = "Timeout"


@dataclass(frozen=True)
class SearchConfig:
    heuristic: str = "lmcut"
    timeout: float = DEFAULT_TIMEOUT
    tie_break: str = "low-h-fifo"

    def __post_init__(self):
        if self.heuristic not in HEURISTIC_NAMES:
            raise ValueError(f"unknown heuristic {self.heuristic!r}; choose from {HEURISTIC_NAMES}")
        if not self.timeout > 0:
            raise ValueError("timeout must be positive")
        if self.tie_break != "low-h-fifo":
            raise ValueError(f"unknown tie-breaking policy {self.tie_break!r}")


@dataclass
class SearchResult:
    status: Status
    plan: list[GroundAction] | None = None
    expanded: int = 0
    generated: int = 0
    time: float = 0.0
    initial_h: float = INF

    @property
    def solved(self) -> bool:
        return self.status is Status.SOLVED

    @property
    def plan_length(self) -> int | None:
        return None if self.plan is None else len(self.plan)


class _Compiled:
    def __init__(self, task: GroundTask):
        def mask(ids):
            m = 0
            for i in ids:
                m |= 1 << i
            return m

        self.actions = task.actions
        self.ops = [(mask(a.pre), mask(a.pre_neg), mask(a.add), ~mask(a.delete)) for a in task.actions]
        self.init = mask(task.init)
        self.goal = mask(task.goal)
        self.goal_neg = mask(task.goal_neg)

    def is_goal(self, s: int) -> bool:
        return s & self.goal == self.goal and not s & self.goal_neg

    def successors(self, s: int):
        for i, (pre, neg, add, keep) in enumerate(self.ops):
            if s & pre == pre and not s & neg:
                yield i, (s & keep) | add


def compiled(task: GroundTask) -> _Compiled:
    c = task.__dict__.get("_compiled")
    if c is None:
        c = _Compiled(task)
        task.__dict__["_compiled"] = c
    return c


def _evaluator(task: GroundTask, name: str):
    comp = compiled(task)
    if name == "blind":
        return lambda s: 0 if comp.is_goal(s) else 1
    rt = relaxed(task)
    if name == "hmax":
        goal_fact = rt.goal_fact
        base = rt.base_cost
        return lambda s: rt.hmax_pass(rt.state_facts(s), base)[0][goal_fact]
    return lambda s: lmcut_value(rt, rt.state_facts(s))


def solve(task: GroundTask, cfg: SearchConfig | None = None) -> SearchResult:
    """A* with reopening; returns a length-optimal plan when one exists."""
    cfg = cfg or SearchConfig()
    start = time.perf_counter()
    deadline = start + cfg.timeout
    comp = compiled(task)
    h_of = _evaluator(task, cfg.heuristic)

    init = comp.init
    h0 = h_of(init)
    result = SearchResult(Status.UNSOLVABLE, initial_h=h0)
    if h0 == INF:
        result.time = time.perf_counter() - start
        return result

    g_best = {init: 0}
    h_cache = {init: h0}
    parent: dict[int, tuple[int, int]] = {}
    counter = 0
    open_list = [(h0, h0, counter, init)]
    expanded = generated = 0
    clock = time.perf_counter

    while open_list:
        f, h, _, s = heapq.heappop(open_list)
        g = f - h
        if g > g_best[s]:
            continue
        if clock() >= deadline:
            return _timeout(result, expanded, generated, start)
        expanded += 1
        if comp.is_goal(s):
            result.status = Status.SOLVED
            result.plan = _extract(comp, parent, s)
            break
        g2 = g + 1
        for idx, t in comp.successors(s):
            generated += 1
            old = g_best.get(t)
            if old is not None and old <= g2:
                continue
            ht = h_cache.get(t)
            if ht is None:
                ht = h_of(t)
                h_cache[t] = ht
                if clock() >= deadline:
                    return _timeout(result, expanded, generated, start)
            if ht == INF:
                continue
            g_best[t] = g2
            parent[t] = (s, idx)
            counter += 1
            heapq.heappush(open_list, (g2 + ht, ht, counter, t))

    result.expanded = expanded
    result.generated = generated
    result.time = time.perf_counter() - start
    return result


def _timeout(result: SearchResult, expanded: int, generated: int, start: float) -> SearchResult:
    result.status = Status.TIMEOUT
    result.expanded = expanded
    result.generated = generated
    result.time = time.perf_counter() - start
    return result


def _extract(comp: _Compiled, parent, s: int) -> list[GroundAction]:
    steps = []
    while s in parent:
        s, idx = parent[s]
        steps.append(comp.actions[idx])
    steps.reverse()
    return steps


def breadth_first_search(task: GroundTask, max_states: int = 1_000_000) -> int | None:
    """Length of a shortest plan by exhaustive breadth-first search.

    Returns None when the goal is unreachable; raises RuntimeError when the
    reachable state space exceeds ``max_states``.
    """
    comp = compiled(task)
    if comp.is_goal(comp.init):
        return 0
    depth = {comp.init: 0}
    frontier = deque([comp.init])
    while frontier:
        s = frontier.popleft()
        d = depth[s] + 1
        for _, t in comp.successors(s):
            if t in depth:
                continue
            if comp.is_goal(t):
                return d
            depth[t] = d
            if len(depth) > max_states:
                raise RuntimeError(f"state space exceeds {max_states} states")
            frontier.append(t)
    return None


def reachable_states(task: GroundTask, max_states: int = 1_000_000) -> int:
    comp = compiled(task)
    seen = {comp.init}
    frontier = deque(seen)
    while frontier:
        s = frontier.popleft()
        for _, t in comp.successors(s):
            if t not in seen:
                seen.add(t)
                if len(seen) > max_states:
                    raise RuntimeError(f"state space exceeds {max_states} states")
                frontier.append(t)
    return len(seen)
