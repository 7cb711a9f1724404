"""Typed STRIPS planning files: syntax tree, parser and printer."""

from dataclasses import replace

from .ast import (
    ActionSchema,
    Atom,
    DomainAst,
    GoalFormula,
    Literal,
    PredicateDecl,
    ProblemAst,
    TypedName,
)
from .errors import (
    PddlError,
    PddlSemanticError,
    PddlSyntaxError,
    UndeclaredItemError,
    UndeclaredPredicateError,
    UnsupportedFeatureError,
)
from .parser import parse_domain, parse_goal, parse_problem
from .printer import goal_sexpr, print_declarations, print_domain, print_goal, print_problem


def replace_init_goal(p0: ProblemAst, init, goal: GoalFormula, domain: DomainAst | None = None) -> ProblemAst:
    """Return a copy of ``p0`` whose initial state and goal are swapped out.

    Every atom must mention only objects of ``p0``; with ``domain`` given,
    predicates and argument types are checked as well.
    """
    objects = dict(p0.object_types)
    if domain is not None:
        objects.update({c.name: c.type for c in domain.constants})
    atoms = sorted(set(init))
    for atom in atoms + [l.atom for l in goal.literals]:
        unknown = [a for a in atom.args if a not in objects]
        if unknown:
            raise UndeclaredItemError(unknown)
        if domain is not None:
            decl = domain.predicate_map.get(atom.predicate)
            if decl is None:
                raise UndeclaredPredicateError(atom.predicate)
            if decl.arity != len(atom.args):
                raise PddlSemanticError(f"ill-typed atom {atom}: wrong arity")
            for arg, param in zip(atom.args, decl.params):
                if not domain.compatible(objects[arg], param.type):
                    raise PddlSemanticError(f"ill-typed atom {atom}: {arg!r} is not a {param.type}")
    # Keep p0's atom order where possible so identity replacement is exact.
    wanted = set(atoms)
    ordered = [a for a in p0.init if a in wanted]
    kept = set(ordered)
    ordered += [a for a in atoms if a not in kept]
    return replace(p0, init=tuple(ordered), goal=goal)


__all__ = [
    "ActionSchema",
    "Atom",
    "DomainAst",
    "GoalFormula",
    "Literal",
    "PredicateDecl",
    "ProblemAst",
    "TypedName",
    "PddlError",
    "PddlSemanticError",
    "PddlSyntaxError",
    "UndeclaredItemError",
    "UndeclaredPredicateError",
    "UnsupportedFeatureError",
    "parse_domain",
    "parse_problem",
    "parse_goal",
    "print_domain",
    "print_problem",
    "print_goal",
    "print_declarations",
    "goal_sexpr",
    "replace_init_goal",
]
