"""Plan text format: one ``(name arg ...)`` per line, lower case.

Lines starting with ``;`` are comments (external planners append a cost
line that way).
"""

from __future__ import annotations

from dataclasses import dataclass

from ..pddl.errors import PddlSyntaxError


@dataclass(frozen=True)
class PlanStep:
    name: str
    args: tuple[str, ...] = ()

    def __str__(self) -> str:
        return f"({' '.join((self.name,) + self.args)})"


def as_steps(plan) -> list[PlanStep]:
    return [p if isinstance(p, PlanStep) else PlanStep(p.name, tuple(p.args)) for p in plan]


def format_plan(plan) -> str:
    return "".join(f"{PlanStep(p.name, tuple(p.args))}\n" for p in plan)


def parse_plan(text: str) -> list[PlanStep]:
    steps = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split(";", 1)[0].strip()
        if not line:
            continue
        if not (line.startswith("(") and line.endswith(")")):
            raise PddlSyntaxError(f"malformed plan step {raw.strip()!r}", lineno, 1)
        body = line[1:-1].split()
        if not body or "(" in line[1:-1] or ")" in line[1:-1]:
            raise PddlSyntaxError(f"malformed plan step {raw.strip()!r}", lineno, 1)
        body = [w.lower() for w in body]
        steps.append(PlanStep(body[0], tuple(body[1:])))
    return steps
