"""Admissible delete-relaxation heuristics: blind, h-max and LM-cut.

All of them work on a :class:`RelaxedTask`, a flattened view of a ground
task with two artificial facts: one true in every state (precondition of
actions without preconditions) and one reached by an artificial goal action
whose preconditions are the positive goal facts. Negative preconditions and
negative goals are ignored by the relaxation, which keeps the estimates
admissible.

Action costs are unit, so the cost-partitioning inside LM-cut only ever
produces costs 0 and 1 and the h-max fixpoint can run on two buckets per
level instead of a priority queue.
"""

from __future__ import annotations

import math

from ..grounder import GroundTask

INF = math.inf


class RelaxedTask:
    def __init__(self, task: GroundTask):
        n_facts = len(task.facts)
        self.n_facts = n_facts
        self.goal_fact = n_facts
        self.true_fact = n_facts + 1
        pre = []
        add = []
        for a in task.actions:
            if a.cost != 1:
                raise ValueError("relaxed heuristics assume unit action costs")
            pre.append(tuple(sorted(a.pre)) or (self.true_fact,))
            add.append(tuple(sorted(a.add)))
        self.goal_action = len(pre)
        pre.append(tuple(sorted(task.goal)) or (self.true_fact,))
        add.append((self.goal_fact,))
        self.pre = pre
        self.add = add
        self.base_cost = [1] * len(task.actions) + [0]
        self.pre_count = [len(p) for p in pre]
        total = n_facts + 2
        self.pre_of: list[list[int]] = [[] for _ in range(total)]
        self.achievers: list[list[int]] = [[] for _ in range(total)]
        for i, (p, e) in enumerate(zip(pre, add)):
            for f in p:
                self.pre_of[f].append(i)
            for f in e:
                self.achievers[f].append(i)
        self.goal = frozenset(task.goal)
        self.goal_mask = sum(1 << f for f in task.goal)

    def state_facts(self, state) -> list[int]:
        if isinstance(state, int):
            out = []
            while state:
                low = state & -state
                out.append(low.bit_length() - 1)
                state ^= low
            return out
        return list(state)

    def hmax_pass(self, facts: list[int], cost: list[int]):
        """Return (value, supporter) arrays for the given action costs.

        ``supporter[a]`` is the precondition of ``a`` with the largest value
        (the one settled last), or -1 when ``a`` is unreachable.
        """
        total = self.n_facts + 2
        value = [INF] * total
        closed = [False] * total
        unsat = self.pre_count[:]
        supporter = [-1] * len(unsat)
        pre_of = self.pre_of
        add = self.add
        cur = facts + [self.true_fact]
        for f in cur:
            value[f] = 0
        level = 0
        while cur:
            nxt = []
            i = 0
            while i < len(cur):
                f = cur[i]
                i += 1
                if closed[f]:
                    continue
                closed[f] = True
                for a in pre_of[f]:
                    unsat[a] -= 1
                    if unsat[a] == 0:
                        supporter[a] = f
                        if cost[a] == 0:
                            for e in add[a]:
                                if value[e] > level:
                                    value[e] = level
                                    cur.append(e)
                        else:
                            nl = level + 1
                            for e in add[a]:
                                if value[e] > nl:
                                    value[e] = nl
                                    nxt.append(e)
            cur = nxt
            level += 1
        return value, supporter


def relaxed(task: GroundTask) -> RelaxedTask:
    """The relaxed view of ``task``, built once and memoised on the task."""
    rt = task.__dict__.get("_relaxed")
    if rt is None:
        rt = RelaxedTask(task)
        task.__dict__["_relaxed"] = rt
    return rt


def _is_goal(rt: RelaxedTask, task: GroundTask, state) -> bool:
    if isinstance(state, int):
        return state & rt.goal_mask == rt.goal_mask
    return rt.goal <= frozenset(state)


def blind(task: GroundTask, state) -> float:
    rt = relaxed(task)
    return 0 if _is_goal(rt, task, state) else 1


def hmax(task: GroundTask, state) -> float:
    rt = relaxed(task)
    value, _ = rt.hmax_pass(rt.state_facts(state), rt.base_cost)
    return value[rt.goal_fact]


def lmcut(task: GroundTask, state) -> float:
    rt = relaxed(task)
    return lmcut_value(rt, rt.state_facts(state))


def lmcut_value(rt: RelaxedTask, facts: list[int]) -> float:
    cost = rt.base_cost[:]
    goal_fact = rt.goal_fact
    add = rt.add
    pre_of = rt.pre_of
    achievers = rt.achievers
    total = rt.n_facts + 2
    h = 0
    while True:
        value, supporter = rt.hmax_pass(facts, cost)
        if value[goal_fact] == INF:
            return INF
        if value[goal_fact] == 0:
            return h
        # Goal zone: facts that reach the goal through zero-cost justification edges.
        in_zone = [False] * total
        in_zone[goal_fact] = True
        stack = [goal_fact]
        while stack:
            f = stack.pop()
            for a in achievers[f]:
                s = supporter[a]
                if s >= 0 and cost[a] == 0 and not in_zone[s]:
                    in_zone[s] = True
                    stack.append(s)
        # Forward from the state without entering the zone; edges into it form the cut.
        seen = [False] * total
        stack = facts + [rt.true_fact]
        for f in stack:
            seen[f] = True
        in_cut = set()
        while stack:
            f = stack.pop()
            for a in pre_of[f]:
                if supporter[a] != f:
                    continue
                for e in add[a]:
                    if in_zone[e]:
                        in_cut.add(a)
                    elif not seen[e]:
                        seen[e] = True
                        stack.append(e)
        m = min(cost[a] for a in in_cut)
        h += m
        for a in in_cut:
            cost[a] -= m


HEURISTICS = {"blind": blind, "hmax": hmax, "lmcut": lmcut}
