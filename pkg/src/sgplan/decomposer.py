"""Autoregressive sub-task planning over a sequence of sub-goals.

Each sub-problem keeps the objects of the original problem but starts from
the state the previous sub-plan left behind. The final plan is the
concatenation of the sub-plans.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .executor import ValidationReport, final_state, validate
from .failures import FailureClass
from .grounder import ground
from .pddl import DomainAst, GoalFormula, ProblemAst, print_goal, print_problem, replace_init_goal
from .planner import SearchConfig, SearchResult, Status, format_plan, solve
from .planner.plan import PlanStep


@dataclass(frozen=True)
class SubGoalSequence:
    goals: tuple[GoalFormula, ...]

    def __post_init__(self):
        object.__setattr__(self, "goals", tuple(self.goals))
        if not self.goals:
            raise ValueError("a sub-goal sequence needs at least one sub-goal")

    def __len__(self) -> int:
        return len(self.goals)

    def __iter__(self):
        return iter(self.goals)

    def __getitem__(self, i):
        return self.goals[i]

    @property
    def has_negative(self) -> bool:
        return any(g.has_negative for g in self.goals)

    def check(self, d: DomainAst, p0: ProblemAst) -> None:
        """Raise if some literal is ill-typed against ``p0``'s objects."""
        for g in self.goals:
            replace_init_goal(p0, (), g, d)


@dataclass(frozen=True)
class SubProblem:
    index: int
    goal: GoalFormula
    problem: ProblemAst
    result: SearchResult
    ground_time: float
    plan: tuple[PlanStep, ...] = ()
    final_state: frozenset | None = None

    @property
    def expanded(self) -> int:
        return self.result.expanded

    @property
    def time(self) -> float:
        return self.ground_time + self.result.time


@dataclass
class DecompositionRun:
    subproblems: list[SubProblem] = field(default_factory=list)
    concat_plan: list[PlanStep] = field(default_factory=list)
    status: Status = Status.SOLVED
    failed_index: int | None = None
    failure: FailureClass | None = None

    @property
    def solved(self) -> bool:
        return self.status is Status.SOLVED

    @property
    def sub_results(self) -> list[SearchResult]:
        return [sp.result for sp in self.subproblems]

    @property
    def expanded(self) -> int:
        return sum(sp.expanded for sp in self.subproblems)

    @property
    def time(self) -> float:
        return sum(sp.time for sp in self.subproblems)

    @property
    def plan_length(self) -> int:
        return len(self.concat_plan)


def autoregressive_solve(
    planner,
    d: DomainAst,
    p0: ProblemAst,
    subgoals,
    cfg: SearchConfig | None = None,
) -> DecompositionRun:
    """Solve the sub-goals one after another, chaining final states.

    ``planner`` is any callable ``(GroundTask, SearchConfig) -> SearchResult``;
    each sub-problem gets the full ``cfg.timeout`` budget. The run stops at
    the first sub-problem that is not solved.
    """
    cfg = cfg or SearchConfig()
    planner = planner or solve
    G = subgoals if isinstance(subgoals, SubGoalSequence) else SubGoalSequence(tuple(subgoals))
    run = DecompositionRun()
    state = frozenset(p0.init)
    for i, g in enumerate(G):
        p = replace_init_goal(p0, state, g, d)
        t0 = time.perf_counter()
        task = ground(d, p)
        t_ground = time.perf_counter() - t0
        result = planner(task, cfg)
        if not result.solved:
            run.subproblems.append(SubProblem(i, g, p, result, t_ground))
            run.status = result.status
            run.failed_index = i
            # An unsolvable sub-goal means the sequence asks for something the
            # state left by earlier sub-plans cannot provide.
            run.failure = (
                FailureClass.PLANNER_TIMEOUT if result.status is Status.TIMEOUT else FailureClass.DECOMPOSITION_ERROR
            )
            return run
        steps = tuple(PlanStep(a.name, a.args) for a in result.plan)
        state = final_state(d, p, steps)
        run.subproblems.append(SubProblem(i, g, p, result, t_ground, steps, state))
        run.concat_plan.extend(steps)
    return run


def verify_against_original(d: DomainAst, p0: ProblemAst, run: DecompositionRun) -> ValidationReport:
    """Validate the concatenated plan against the original goal."""
    return validate(d, p0, run.concat_plan)


def run_manifest(d: DomainAst, p0: ProblemAst, run: DecompositionRun, include_times: bool = False) -> dict:
    """Structured record of every sub-problem, sub-plan and metric."""
    subs = []
    for sp in run.subproblems:
        entry = {
            "index": sp.index,
            "goal": print_goal(sp.goal, 0),
            "negative_literals": sp.goal.has_negative,
            "problem": print_problem(sp.problem),
            "status": sp.result.status.value,
            "plan": format_plan(sp.plan),
            "plan_length": len(sp.plan) if sp.result.solved else None,
            "expanded": sp.result.expanded,
            "generated": sp.result.generated,
        }
        if include_times:
            entry["time"] = sp.time
        subs.append(entry)
    doc = {
        "domain": d.name,
        "problem": p0.name,
        "status": run.status.value,
        "failed_index": run.failed_index,
        "failure": run.failure.value if run.failure else None,
        "negative_subgoals": any(sp.goal.has_negative for sp in run.subproblems),
        "subproblems": subs,
        "plan": format_plan(run.concat_plan),
        "plan_length": run.plan_length,
        "expanded": run.expanded,
    }
    if include_times:
        doc["time"] = run.time
    return doc
