"""Canonical text output for domain and problem ASTs.

Layout is fixed (4-space indent, one literal per line inside conjunctions) so
printed files are usable as golden fixtures.
"""

from __future__ import annotations

from itertools import groupby

from .ast import ROOT_TYPE, DomainAst, GoalFormula, Literal, ProblemAst, TypedName

INDENT = "    "


def _typed(names) -> str:
    parts = []
    for tname, group in groupby(names, key=lambda n: n.type):
        group = [n.name for n in group]
        parts.append(" ".join(group) + f" - {tname}")
    return " ".join(parts)


def _typed_lines(names: tuple[TypedName, ...]) -> list[str]:
    return [" ".join(n.name for n in group) + f" - {tname}" for tname, group in groupby(names, key=lambda n: n.type)]


def _conjunction(lits, depth: int) -> list[str]:
    pad = INDENT * depth
    lines = ["(and"]
    lines += [pad + INDENT + str(lit) for lit in lits]
    lines.append(pad + ")")
    return lines


def print_domain(d: DomainAst) -> str:
    out = [f"(define (domain {d.name})"]
    if d.requirements:
        out.append(f"{INDENT}(:requirements {' '.join(d.requirements)})")
    if d.types:
        out.append(f"{INDENT}(:types")
        out += [INDENT * 2 + line for line in _typed_lines(d.types)]
        out.append(f"{INDENT})")
    if d.constants:
        out.append(f"{INDENT}(:constants")
        out += [INDENT * 2 + line for line in _typed_lines(d.constants)]
        out.append(f"{INDENT})")
    out.append(f"{INDENT}(:predicates")
    for p in d.predicates:
        params = f" {_typed(p.params)}" if p.params else ""
        out.append(f"{INDENT * 2}({p.name}{params})")
    out.append(f"{INDENT})")
    for a in d.actions:
        out.append(f"{INDENT}(:action {a.name}")
        out.append(f"{INDENT * 2}:parameters ({_typed(a.params)})")
        pre = _conjunction(a.precondition, 2)
        out.append(f"{INDENT * 2}:precondition {pre[0]}")
        out += pre[1:]
        effects = [Literal(x) for x in a.add_effects] + [Literal(x, False) for x in a.del_effects]
        eff = _conjunction(effects, 2)
        out.append(f"{INDENT * 2}:effect {eff[0]}")
        out += eff[1:]
        out.append(f"{INDENT})")
    out.append(")")
    return "\n".join(out) + "\n"


def print_declarations(d: DomainAst) -> str:
    """The ``:types`` and ``:predicates`` blocks of ``d``."""
    lines = print_domain(d).splitlines()
    start = next(i for i, line in enumerate(lines) if line.strip() in ("(:types", "(:predicates"))
    end = next(i for i in range(start, len(lines)) if lines[i].strip() == "(:predicates")
    end = next(i for i in range(end, len(lines)) if lines[i] == f"{INDENT})")
    return "\n".join(line[len(INDENT):] for line in lines[start : end + 1]) + "\n"


def goal_sexpr(goal: GoalFormula) -> str:
    """One-line ``(and ...)`` form of a goal."""
    return "(and " + " ".join(str(lit) for lit in goal.literals) + ")" if goal.literals else "(and)"


def print_goal(goal: GoalFormula, depth: int = 1) -> str:
    pad = INDENT * depth
    lines = [f"{pad}(:goal", f"{pad}{INDENT}(and"]
    lines += [f"{pad}{INDENT * 2}{lit}" for lit in goal.literals]
    lines += [f"{pad}{INDENT})", f"{pad})"]
    return "\n".join(lines)


def print_problem(p: ProblemAst) -> str:
    out = [f"(define (problem {p.name})", f"{INDENT}(:domain {p.domain_name})"]
    out.append(f"{INDENT}(:objects")
    out += [INDENT * 2 + line for line in _typed_lines(p.objects)]
    out.append(f"{INDENT})")
    out.append(f"{INDENT}(:init")
    out += [INDENT * 2 + str(a) for a in p.init]
    out.append(f"{INDENT})")
    out.append(print_goal(p.goal))
    out.append(")")
    return "\n".join(out) + "\n"


__all__ = ["print_domain", "print_problem", "print_goal", "ROOT_TYPE"]
