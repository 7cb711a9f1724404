"""Instantiate action schemas over problem objects.

The result is a fact-indexed task: atoms are mapped to dense integer ids and
every ground action carries id sets for its preconditions and effects.
Instantiations whose static preconditions fail, or whose fluent
preconditions are unreachable under the delete relaxation, are dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

from .pddl import Atom, DomainAst, ProblemAst
from .pddl.errors import PddlError

DEFAULT_INSTANTIATION_CAP = 5_000_000


class GroundingError(PddlError):
    code = "GROUNDING_ERROR"


class FactIndex:
    """Bijection between ground atoms and dense ids."""

    def __init__(self, atoms):
        self._atoms: tuple[Atom, ...] = tuple(atoms)
        self._ids = {a: i for i, a in enumerate(self._atoms)}
        if len(self._ids) != len(self._atoms):
            raise ValueError("duplicate atoms in fact index")

    def __len__(self) -> int:
        return len(self._atoms)

    def __contains__(self, atom) -> bool:
        return atom in self._ids

    def __iter__(self):
        return iter(self._atoms)

    def id(self, atom: Atom) -> int:
        return self._ids[atom]

    def get(self, atom: Atom, default=None):
        return self._ids.get(atom, default)

    def atom(self, fact_id: int) -> Atom:
        return self._atoms[fact_id]

    def atoms(self, ids) -> frozenset[Atom]:
        return frozenset(self._atoms[i] for i in ids)

    def ids(self, atoms) -> frozenset[int]:
        return frozenset(self._ids[a] for a in atoms)


@dataclass(frozen=True)
class GroundAction:
    name: str
    args: tuple[str, ...]
    pre: frozenset[int]
    pre_neg: frozenset[int]
    add: frozenset[int]
    delete: frozenset[int]
    cost: int = 1

    def __post_init__(self):
        if self.add & self.delete:
            raise ValueError(f"ground action {self} adds and deletes the same fact")

    def __str__(self) -> str:
        return f"({' '.join((self.name,) + self.args)})"


@dataclass(frozen=True)
class GroundTask:
    facts: FactIndex
    actions: tuple[GroundAction, ...]
    init: frozenset[int]
    goal: frozenset[int]
    goal_neg: frozenset[int] = frozenset()
    # Atoms true in init whose predicate no action changes.
    static: frozenset[Atom] = field(default=frozenset(), compare=False)

    def __post_init__(self):
        n = len(self.facts)
        for f in self.goal | self.goal_neg:
            if not 0 <= f < n:
                raise ValueError(f"goal fact id {f} out of range")

    @cached_property
    def action_lookup(self) -> dict[tuple[str, tuple[str, ...]], GroundAction]:
        return {(a.name, a.args): a for a in self.actions}

    def goal_reached(self, state) -> bool:
        return self.goal <= state and not (self.goal_neg & state)

    def dump(self) -> str:
        """Text listing of the grounded task, one action per line."""
        fmt = lambda ids: " ".join(str(self.facts.atom(i)) for i in sorted(ids))
        lines = [f"; {len(self.facts)} facts, {len(self.actions)} actions"]
        for a in self.actions:
            parts = [str(a), f"pre: {fmt(a.pre)}"]
            if a.pre_neg:
                parts.append(f"pre_neg: {fmt(a.pre_neg)}")
            parts.append(f"add: {fmt(a.add)}")
            if a.delete:
                parts.append(f"del: {fmt(a.delete)}")
            lines.append(" | ".join(parts))
        return "\n".join(lines) + "\n"


def objects_by_type(domain: DomainAst, problem: ProblemAst) -> dict[str, list[str]]:
    """Objects (and domain constants) per type, including inherited types."""
    by_type: dict[str, set[str]] = {}
    typed = [(c.name, c.type) for c in domain.constants] + [(o.name, o.type) for o in problem.objects]
    for name, tname in typed:
        for anc in domain.ancestors(tname):
            by_type.setdefault(anc, set()).add(name)
    return {t: sorted(names) for t, names in by_type.items()}


def static_predicates(domain: DomainAst) -> set[str]:
    changed = {a.predicate for act in domain.actions for a in act.add_effects + act.del_effects}
    return {p.name for p in domain.predicates} - changed


def count_instantiations(domain: DomainAst, problem: ProblemAst) -> int:
    """Number of type-consistent bindings over all schemas."""
    by_type = objects_by_type(domain, problem)
    return sum(math.prod(len(by_type.get(p.type, ())) for p in act.params) for act in domain.actions)


def _bindings(schema, by_type, static_true, static_preds):
    """Yield parameter bindings whose static preconditions hold."""
    params = [p.name for p in schema.params]
    domains = [by_type.get(p.type, []) for p in schema.params]
    # Attach each static literal to the position where its last variable is bound.
    checks: list[list] = [[] for _ in params]
    ground_static = []
    for lit in schema.precondition:
        if lit.atom.predicate not in static_preds:
            continue
        positions = [params.index(a) for a in lit.atom.args if a in params]
        if positions:
            checks[max(positions)].append(lit)
        else:
            ground_static.append(lit)
    for lit in ground_static:
        if (lit.atom in static_true) != lit.positive:
            return
    binding: dict[str, str] = {}

    def rec(k):
        if k == len(params):
            yield dict(binding)
            return
        for obj in domains[k]:
            binding[params[k]] = obj
            if all((lit.atom.substitute(binding) in static_true) == lit.positive for lit in checks[k]):
                yield from rec(k + 1)
        binding.pop(params[k], None)

    yield from rec(0)


def ground(domain: DomainAst, problem: ProblemAst, cap: int = DEFAULT_INSTANTIATION_CAP) -> GroundTask:
    total = count_instantiations(domain, problem)
    if total > cap:
        raise GroundingError(f"{total} candidate instantiations exceed the cap of {cap}")

    static_preds = static_predicates(domain)
    init = set(problem.init)
    static_true = {a for a in init if a.predicate in static_preds}
    by_type = objects_by_type(domain, problem)

    # Candidate ground actions as (name, args, pre, pre_neg, add, del) over atoms.
    candidates = []
    for schema in domain.actions:
        fluent_pre = [l for l in schema.precondition if l.atom.predicate not in static_preds]
        for binding in _bindings(schema, by_type, static_true, static_preds):
            args = tuple(binding[p.name] for p in schema.params)
            pre = [l.atom.substitute(binding) for l in fluent_pre if l.positive]
            neg = [l.atom.substitute(binding) for l in fluent_pre if not l.positive]
            add = [a.substitute(binding) for a in schema.add_effects]
            dele = [a.substitute(binding) for a in schema.del_effects]
            candidates.append((schema.name, args, pre, neg, add, dele))

    # Delete-relaxed reachability, counter based.
    reached = set(init)
    waiting: dict[Atom, list[int]] = {}
    remaining = []
    queue = []
    for idx, (_, _, pre, _, _, _) in enumerate(candidates):
        missing = {a for a in pre if a not in reached}
        remaining.append(len(missing))
        for a in missing:
            waiting.setdefault(a, []).append(idx)
        if not missing:
            queue.append(idx)
    live = []
    while queue:
        idx = queue.pop()
        live.append(idx)
        for atom in candidates[idx][4]:
            if atom in reached:
                continue
            reached.add(atom)
            for j in waiting.pop(atom, ()):
                remaining[j] -= 1
                if remaining[j] == 0:
                    queue.append(j)

    goal_atoms = {l.atom for l in problem.goal.literals}
    facts = FactIndex(sorted(reached | goal_atoms))
    actions = []
    for idx in live:
        name, args, pre, neg, add, dele = candidates[idx]
        add_ids = frozenset(facts.id(a) for a in add)
        # Negated facts that can never hold are trivially satisfied.
        neg_ids = frozenset(facts.id(a) for a in neg if a in reached)
        del_ids = frozenset(facts.id(a) for a in dele if a in reached) - add_ids
        actions.append(GroundAction(name, args, frozenset(facts.id(a) for a in pre), neg_ids, add_ids, del_ids))
    actions.sort(key=lambda a: (a.name, a.args))

    return GroundTask(
        facts=facts,
        actions=tuple(actions),
        init=frozenset(facts.id(a) for a in init),
        goal=frozenset(facts.id(a) for a in problem.goal.positive),
        goal_neg=frozenset(facts.id(a) for a in problem.goal.negative),
        static=frozenset(static_true),
    )
