"""Prompt templates for the four generation steps.

Every prompt has three parts: a role, one worked example and the
instruction for the actual query. Rendering is pure string assembly, so
identical inputs give identical bytes (and identical fixture digests).
"""

from __future__ import annotations

from dataclasses import dataclass

from ..pddl import DomainAst, ProblemAst, print_declarations, print_domain, print_problem
from ..scene_graph import SceneGraph, dumps, list_items


DOMAIN_ROLE = (
    "You write PDDL domain files. Given object types and actions described in plain "
    "language, you produce one complete PDDL domain file that encodes them."
)
PRUNING_ROLE = (
    "You select the items of a scene that matter for a household task. Given the items of "
    "a scene graph and a task, you return the ids of the relevant items."
)
PROBLEM_ROLE = (
    "You write PDDL problem files. Given a scene graph and a task description, you produce "
    "one complete PDDL problem file for a given domain."
)
DECOMPOSITION_ROLE = (
    "You break long-horizon goals into steps. Given a PDDL problem file, you split its goal "
    "into an ordered sequence of smaller PDDL sub-goals."
)
ROLES = {
    DOMAIN_ROLE: "domain_generation",
    PRUNING_ROLE: "pruning",
    PROBLEM_ROLE: "problem_generation",
    DECOMPOSITION_ROLE: "decomposition",
}


class PromptError(ValueError):
    pass


@dataclass(frozen=True)
class PromptTemplate:
    role_text: str
    example_text: str
    instruction_text: str

    def __post_init__(self):
        for part in ("role_text", "example_text", "instruction_text"):
            if not getattr(self, part).strip():
                raise PromptError(f"{part} must not be empty")

    def render(self) -> str:
        return f"{self.role_text}\n\n{self.example_text}\n\n{self.instruction_text}\n"

    def messages(self) -> tuple[tuple[str, str], ...]:
        """Chat form: the role as system message, example and instruction as user message."""
        return (("system", self.role_text), ("user", f"{self.example_text}\n\n{self.instruction_text}\n"))


def _fence(text: str, lang: str = "") -> str:
    return f"```{lang}\n{text.rstrip()}\n```"


def _nonempty(value: str, what: str) -> str:
    if not value or not value.strip():
        raise PromptError(f"{what} must not be empty")
    return value.strip()


@dataclass(frozen=True)
class DomainExample:
    actions_nl: str
    domain_text: str


def build_domain_prompt(example: DomainExample, query_nl: str) -> PromptTemplate:
    ex_nl = _nonempty(example.actions_nl, "example action description")
    ex_domain = _nonempty(example.domain_text, "example domain file")
    query = _nonempty(query_nl, "query action description")
    return PromptTemplate(
        DOMAIN_ROLE,
        "Example. A household robot knows the following object types and actions, each with "
        f"its parameters, preconditions and effects:\n\n{ex_nl}\n\n"
        f"Encoded as a PDDL domain file:\n\n{_fence(ex_domain, 'pddl')}",
        f"Query. A new domain has these object types and actions:\n\n{query}\n\n"
        "Write the PDDL domain file for the new domain. Use only the :strips, :typing and "
        ":negative-preconditions requirements, keep the predicate naming style of the example, "
        "and answer with the file in a single fenced code block.",
    )


def _item_lines(items) -> str:
    return "\n".join(f"- {iid} (room: {room})" for iid, room, _ in items)


@dataclass(frozen=True)
class PruningExample:
    items: tuple  # list_items() entries
    goal_nl: str
    kept: frozenset


def build_pruning_prompt(items, goal_nl: str, example: PruningExample) -> PromptTemplate:
    items = list(items)
    if not items:
        raise PromptError("the query item list is empty")
    if not example.items:
        raise PromptError("the example item list is empty")
    known = {iid for iid, _, _ in example.items}
    extra = sorted(set(example.kept) - known)
    if extra:
        raise PromptError(f"example keeps items that are not in its list: {', '.join(extra)}")
    goal = _nonempty(goal_nl, "goal description")
    kept = "\n".join(sorted(example.kept))
    return PromptTemplate(
        PRUNING_ROLE,
        f"Example. Items of a scene:\n{_item_lines(example.items)}\n\n"
        f"Task: {_nonempty(example.goal_nl, 'example goal description')}\n\n"
        f"Relevant items:\n\n{_fence(kept)}",
        f"Query. Items of a new scene:\n{_item_lines(items)}\n\nTask: {goal}\n\n"
        "List every item that the robot has to handle or use for this task, one id per line, "
        "in a single fenced code block.",
    )


@dataclass(frozen=True)
class ProblemExample:
    scene: SceneGraph
    goal_nl: str
    domain: DomainAst
    problem_text: str


def build_problem_prompt(sg: SceneGraph, goal_nl: str, d: DomainAst, example: ProblemExample) -> PromptTemplate:
    if not d.predicates:
        raise PromptError(f"domain {d.name!r} declares no predicates")
    goal = _nonempty(goal_nl, "goal description")
    return PromptTemplate(
        PROBLEM_ROLE,
        "Example. A scene graph lists floors, the rooms on each floor with their neighboring "
        "rooms, and the items in each room with their attributes. It is stored as a nested "
        f"JSON document:\n\n{_fence(dumps(example.scene), 'json')}\n\n"
        f"Task: {_nonempty(example.goal_nl, 'example goal description')}\n\n"
        f"Types and predicates of the domain:\n\n{_fence(print_declarations(example.domain), 'pddl')}\n\n"
        f"The resulting PDDL problem file:\n\n{_fence(example.problem_text, 'pddl')}",
        f"Query. A new scene graph:\n\n{_fence(dumps(sg), 'json')}\n\nTask: {goal}\n\n"
        f"Types and predicates of the domain {d.name}:\n\n{_fence(print_declarations(d), 'pddl')}\n\n"
        "Write the PDDL problem file for this scene and task. State room adjacency in both "
        "directions and answer with the file in a single fenced code block.",
    )


@dataclass(frozen=True)
class DecompositionExample:
    problem_text: str
    domain_text: str
    subgoals_nl: tuple[str, ...]
    subgoals: tuple[str, ...]


def build_decomposition_prompt(p: ProblemAst, d: DomainAst, example: DecompositionExample) -> PromptTemplate:
    if not p.goal.literals:
        raise PromptError(f"problem {p.name!r} has an empty goal")
    if not example.subgoals or len(example.subgoals) != len(example.subgoals_nl):
        raise PromptError("example sub-goals and their descriptions must be nonempty and aligned")
    steps = "\n".join(f"{i}. {s}" for i, s in enumerate(example.subgoals_nl, 1))
    return PromptTemplate(
        DECOMPOSITION_ROLE,
        f"Example. A PDDL domain file:\n\n{_fence(example.domain_text, 'pddl')}\n\n"
        f"A PDDL problem file in that domain:\n\n{_fence(example.problem_text, 'pddl')}\n\n"
        f"Its goal is easier to plan for as these steps:\n{steps}\n\n"
        "With the predicates of the domain, one sub-goal per line:\n\n"
        f"{_fence(chr(10).join(example.subgoals), 'pddl')}",
        f"Query. The PDDL domain file:\n\n{_fence(print_domain(d), 'pddl')}\n\n"
        f"The PDDL problem file:\n\n{_fence(print_problem(p), 'pddl')}\n\n"
        "Split the goal of this problem into an ordered sequence of sub-goals. Take the "
        "preconditions and effects of the actions into account, since a later step can undo "
        "what an earlier one achieved. Write each sub-goal as one (and ...) conjunction per "
        "line, in a single fenced code block.",
    )


def scene_items(sg: SceneGraph) -> tuple:
    return tuple(list_items(sg))
