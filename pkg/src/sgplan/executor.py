"""State-transition semantics and plan validation.

Plans are checked by instantiating each step directly from the domain's
action schemas and executing it on a closed-world set of ground atoms. This
path deliberately shares nothing with the grounder, so it can serve as an
independent check of the planner's output.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .grounder import GroundTask
from .pddl import Atom, DomainAst, ProblemAst
from .planner.plan import PlanStep, as_steps

State = frozenset  # frozenset[Atom]


class Verdict(str, Enum):
    VALID = "Valid"
    INVALID = "Invalid"


class Reason(str, Enum):
    PRECONDITION_VIOLATED = "PreconditionViolated"
    GOAL_UNSATISFIED = "GoalUnsatisfied"
    UNKNOWN_ACTION = "UnknownAction"


class ExecutionError(Exception):
    def __init__(self, reason: Reason, message: str, step: int | None = None, literal: str | None = None):
        self.reason = reason
        self.step = step
        self.literal = literal
        where = f"step {step}: " if step is not None else ""
        super().__init__(f"{where}{message}")


@dataclass(frozen=True)
class Operator:
    """A ground action over atoms."""

    name: str
    args: tuple[str, ...]
    pre: tuple[Atom, ...]
    pre_neg: tuple[Atom, ...]
    add: frozenset[Atom]
    delete: frozenset[Atom]

    def __str__(self) -> str:
        return str(PlanStep(self.name, self.args))


@dataclass(frozen=True)
class ValidationReport:
    verdict: Verdict
    failing_step: int | None = None
    reason: Reason | None = None
    detail: str = ""
    final_state: frozenset | None = None

    def __post_init__(self):
        if self.verdict is Verdict.VALID and self.failing_step is not None:
            raise ValueError("a valid plan has no failing step")

    @property
    def valid(self) -> bool:
        return self.verdict is Verdict.VALID


def instantiate(domain: DomainAst, problem: ProblemAst, step) -> Operator:
    schema = domain.action_map.get(step.name)
    if schema is None:
        raise ExecutionError(Reason.UNKNOWN_ACTION, f"no action named {step.name!r}")
    args = tuple(step.args)
    if len(args) != len(schema.params):
        raise ExecutionError(
            Reason.UNKNOWN_ACTION, f"{step.name} takes {len(schema.params)} argument(s), got {len(args)}"
        )
    objects = {c.name: c.type for c in domain.constants}
    objects.update(problem.object_types)
    for arg, param in zip(args, schema.params):
        if arg not in objects:
            raise ExecutionError(Reason.UNKNOWN_ACTION, f"unknown object {arg!r} in {PlanStep(step.name, args)}")
        if not domain.is_subtype(objects[arg], param.type):
            raise ExecutionError(
                Reason.UNKNOWN_ACTION, f"object {arg!r} is not of type {param.type!r} in {PlanStep(step.name, args)}"
            )
    binding = {p.name: a for p, a in zip(schema.params, args)}
    add = frozenset(a.substitute(binding) for a in schema.add_effects)
    return Operator(
        name=schema.name,
        args=args,
        pre=tuple(a.substitute(binding) for a in schema.positive_pre),
        pre_neg=tuple(a.substitute(binding) for a in schema.negative_pre),
        add=add,
        # A ground atom that is both added and deleted ends up true.
        delete=frozenset(a.substitute(binding) for a in schema.del_effects) - add,
    )


def apply(state: frozenset, op: Operator) -> frozenset:
    """Successor of ``state`` under ``op``; raises on the first unmet precondition."""
    for atom in op.pre:
        if atom not in state:
            raise ExecutionError(Reason.PRECONDITION_VIOLATED, f"{op}: {atom} does not hold", literal=str(atom))
    for atom in op.pre_neg:
        if atom in state:
            raise ExecutionError(
                Reason.PRECONDITION_VIOLATED, f"{op}: (not {atom}) does not hold", literal=f"(not {atom})"
            )
    return (state - op.delete) | op.add


def simulate(domain: DomainAst, problem: ProblemAst, plan) -> frozenset:
    """Execute ``plan`` from the problem's initial state and return the final state."""
    state = frozenset(problem.init)
    for i, step in enumerate(as_steps(plan)):
        try:
            state = apply(state, instantiate(domain, problem, step))
        except ExecutionError as exc:
            raise ExecutionError(exc.reason, str(exc), step=i, literal=exc.literal) from None
    return state


def simulate_task(task: GroundTask, plan) -> frozenset:
    """Same as :func:`simulate` but over a ground task; returns atoms."""
    state = set(task.init)
    for i, step in enumerate(as_steps(plan)):
        action = task.action_lookup.get((step.name, step.args))
        if action is None:
            raise ExecutionError(Reason.UNKNOWN_ACTION, f"{step} is not an action of the task", step=i)
        missing = [f for f in sorted(action.pre) if f not in state]
        present = [f for f in sorted(action.pre_neg) if f in state]
        if missing or present:
            lit = str(task.facts.atom(missing[0])) if missing else f"(not {task.facts.atom(present[0])})"
            raise ExecutionError(Reason.PRECONDITION_VIOLATED, f"{step}: {lit} does not hold", step=i, literal=lit)
        state -= action.delete
        state |= action.add
    return task.facts.atoms(state)


def final_state(domain: DomainAst, problem: ProblemAst, plan) -> frozenset:
    return simulate(domain, problem, plan)


def validate(domain: DomainAst, problem: ProblemAst, plan) -> ValidationReport:
    try:
        state = simulate(domain, problem, plan)
    except ExecutionError as exc:
        return ValidationReport(Verdict.INVALID, exc.step, exc.reason, str(exc))
    unmet = [str(l) for l in problem.goal.literals if (l.atom in state) != l.positive]
    if unmet:
        return ValidationReport(
            Verdict.INVALID, None, Reason.GOAL_UNSATISFIED, "unsatisfied goal: " + " ".join(unmet), state
        )
    return ValidationReport(Verdict.VALID, final_state=state)
