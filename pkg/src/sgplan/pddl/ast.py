"""Immutable syntax tree for the typed STRIPS fragment.

Sequences are tuples in source order so printing is stable and structural
equality is plain dataclass equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property

ROOT_TYPE = "object"
SUPPORTED_REQUIREMENTS = (":strips", ":typing", ":negative-preconditions")


@dataclass(frozen=True, order=True)
class Atom:
    predicate: str
    args: tuple[str, ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return f"({self.predicate})"
        return f"({self.predicate} {' '.join(self.args)})"

    @property
    def is_ground(self) -> bool:
        return not any(a.startswith("?") for a in self.args)

    def substitute(self, binding: dict[str, str]) -> Atom:
        return Atom(self.predicate, tuple(binding.get(a, a) for a in self.args))


@dataclass(frozen=True, order=True)
class Literal:
    atom: Atom
    positive: bool = True

    def __str__(self) -> str:
        return str(self.atom) if self.positive else f"(not {self.atom})"

    def negate(self) -> Literal:
        return Literal(self.atom, not self.positive)


@dataclass(frozen=True)
class TypedName:
    name: str
    type: str = ROOT_TYPE


@dataclass(frozen=True)
class PredicateDecl:
    name: str
    params: tuple[TypedName, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.params)


@dataclass(frozen=True)
class ActionSchema:
    name: str
    params: tuple[TypedName, ...] = ()
    precondition: tuple[Literal, ...] = ()
    add_effects: tuple[Atom, ...] = ()
    del_effects: tuple[Atom, ...] = ()

    def __post_init__(self):
        overlap = set(self.add_effects) & set(self.del_effects)
        if overlap:
            raise ValueError(f"action {self.name}: atoms both added and deleted: {sorted(map(str, overlap))}")

    @property
    def positive_pre(self) -> tuple[Atom, ...]:
        return tuple(l.atom for l in self.precondition if l.positive)

    @property
    def negative_pre(self) -> tuple[Atom, ...]:
        return tuple(l.atom for l in self.precondition if not l.positive)


@dataclass(frozen=True)
class GoalFormula:
    """Conjunction of ground literals."""

    literals: tuple[Literal, ...] = ()

    def __post_init__(self):
        for lit in self.literals:
            if not lit.atom.is_ground:
                raise ValueError(f"goal literal {lit} has free variables")

    def __iter__(self):
        return iter(self.literals)

    def __len__(self) -> int:
        return len(self.literals)

    @property
    def positive(self) -> tuple[Atom, ...]:
        return tuple(l.atom for l in self.literals if l.positive)

    @property
    def negative(self) -> tuple[Atom, ...]:
        return tuple(l.atom for l in self.literals if not l.positive)

    @property
    def has_negative(self) -> bool:
        return any(not l.positive for l in self.literals)

    def holds_in(self, state) -> bool:
        return all((l.atom in state) == l.positive for l in self.literals)

    def objects(self) -> set[str]:
        return {a for l in self.literals for a in l.atom.args}


@dataclass(frozen=True)
class DomainAst:
    name: str
    requirements: tuple[str, ...] = ()
    # (type, supertype) pairs in declaration order
    types: tuple[TypedName, ...] = ()
    constants: tuple[TypedName, ...] = ()
    predicates: tuple[PredicateDecl, ...] = ()
    actions: tuple[ActionSchema, ...] = ()

    @cached_property
    def predicate_map(self) -> dict[str, PredicateDecl]:
        return {p.name: p for p in self.predicates}

    @cached_property
    def action_map(self) -> dict[str, ActionSchema]:
        return {a.name: a for a in self.actions}

    @cached_property
    def type_names(self) -> set[str]:
        return {ROOT_TYPE} | {t.name for t in self.types} | {t.type for t in self.types}

    @cached_property
    def _parents(self) -> dict[str, str]:
        return {t.name: t.type for t in self.types if t.name != ROOT_TYPE}

    def ancestors(self, type_name: str) -> tuple[str, ...]:
        """``type_name`` followed by its supertypes up to ``object``."""
        chain = [type_name]
        seen = {type_name}
        while chain[-1] != ROOT_TYPE:
            parent = self._parents.get(chain[-1], ROOT_TYPE)
            if parent in seen:
                break
            chain.append(parent)
            seen.add(parent)
        return tuple(chain)

    def is_subtype(self, sub: str, sup: str) -> bool:
        return sup in self.ancestors(sub)

    def compatible(self, a: str, b: str) -> bool:
        return self.is_subtype(a, b) or self.is_subtype(b, a)


@dataclass(frozen=True)
class ProblemAst:
    name: str
    domain_name: str
    objects: tuple[TypedName, ...] = ()
    init: tuple[Atom, ...] = ()
    goal: GoalFormula = field(default_factory=GoalFormula)

    @cached_property
    def object_types(self) -> dict[str, str]:
        return {o.name: o.type for o in self.objects}

    def with_init_goal(self, init, goal: GoalFormula) -> ProblemAst:
        return replace(self, init=tuple(init), goal=goal)
