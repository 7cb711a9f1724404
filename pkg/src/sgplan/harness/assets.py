"""Bundled domains, scenes and golden goal decompositions."""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from ..pddl import Atom, DomainAst, GoalFormula, ProblemAst, parse_domain, parse_goal, replace_init_goal
from ..pddl.sexpr import read
from ..scene_graph import SceneEncoding, SceneGraph, load_scene_graph, prune, relevance_prune, scene_problem

EXAMPLE_DOMAIN = "laundry"
DOMAINS = ("laundry", "pc_assembly", "dining_table_setup", "house_cleaning")
SCENES = ("kemblesville", "parole", "allensville", "shelbiana")


def _data():
    return resources.files("sgplan") / "data"


def read_text(*parts: str) -> str:
    node = _data()
    for p in parts:
        node = node / p
    return node.read_text(encoding="utf-8")


def _json(*parts: str):
    return json.loads(read_text(*parts))


@dataclass(frozen=True)
class DomainConfig:
    name: str
    agent_facts: tuple[str, ...]
    situation_nl: str
    goal: str
    goal_nl: str
    subgoals: tuple[str, ...]
    subgoals_nl: tuple[str, ...]
    actions_nl: str


def _check_domain(domain_id: str) -> None:
    if domain_id not in DOMAINS:
        raise KeyError(f"unknown domain {domain_id!r}; bundled: {', '.join(DOMAINS)}")


def _check_scene(scene_id: str) -> None:
    if scene_id not in SCENES:
        raise KeyError(f"unknown scene {scene_id!r}; bundled: {', '.join(SCENES)}")


def domain_text(domain_id: str) -> str:
    _check_domain(domain_id)
    return read_text("domains", domain_id, "domain.pddl")


@lru_cache(maxsize=None)
def load_domain(domain_id: str) -> DomainAst:
    return parse_domain(domain_text(domain_id))


@lru_cache(maxsize=None)
def domain_config(domain_id: str) -> DomainConfig:
    _check_domain(domain_id)
    doc = _json("domains", domain_id, "config.json")
    return DomainConfig(
        name=domain_id,
        agent_facts=tuple(doc["agent_facts"]),
        situation_nl=doc["situation_nl"],
        goal=doc["goal"],
        goal_nl=doc["goal_nl"],
        subgoals=tuple(doc["subgoals"]),
        subgoals_nl=tuple(doc["subgoals_nl"]),
        actions_nl=read_text("domains", domain_id, "actions.txt"),
    )


def scene_text(scene_id: str) -> str:
    _check_scene(scene_id)
    return read_text("scenes", f"{scene_id}.json")


@lru_cache(maxsize=None)
def load_scene(scene_id: str) -> SceneGraph:
    return load_scene_graph(scene_text(scene_id))


@lru_cache(maxsize=None)
def encoding() -> SceneEncoding:
    return SceneEncoding.from_dict(_json("encoding.json"))


@lru_cache(maxsize=None)
def instances() -> dict:
    return _json("instances.json")


def evaluation_pairs() -> list[tuple[str, str]]:
    inst = instances()
    return [(d, s) for d in inst["evaluation_domains"] for s in inst["evaluation_scenes"]]


def all_pairs() -> list[tuple[str, str]]:
    ex = instances()["example"]
    return [(ex["domain"], ex["scene"])] + evaluation_pairs()


def agent_facts(domain_id: str, scene_id: str) -> list[Atom]:
    start = instances()["start_room"][scene_id]
    atoms = []
    for text in domain_config(domain_id).agent_facts:
        node = read(text.format(start=start))
        atoms.append(Atom(node[0].text, tuple(t.text for t in node.items[1:])))
    return atoms


def task_nl(domain_id: str, scene_id: str) -> str:
    """Natural-language task statement: starting situation plus goal."""
    cfg = domain_config(domain_id)
    start = instances()["start_room"][scene_id].replace("_", " ")
    return cfg.situation_nl.format(start=start) + " " + cfg.goal_nl


def _base_problem(domain_id: str, sg: SceneGraph) -> ProblemAst:
    d = load_domain(domain_id)
    agents = {instances()["agent"]: "agent"}
    return scene_problem(
        sg, d, GoalFormula(()), encoding(), agents, agent_facts(domain_id, sg.name), name=f"{domain_id}_{sg.name}"
    )


def goal_of(domain_id: str, problem: ProblemAst) -> GoalFormula:
    return parse_goal(domain_config(domain_id).goal, load_domain(domain_id), problem)


def build_problem(domain_id: str, scene_id: str, scene: SceneGraph | None = None) -> ProblemAst:
    """Reference problem over ``scene`` (the full bundled scene by default)."""
    base = _base_problem(domain_id, scene or load_scene(scene_id))
    return replace_init_goal(base, base.init, goal_of(domain_id, base))


def relevant_items(domain_id: str, scene_id: str) -> set[str]:
    full = build_problem(domain_id, scene_id)
    return relevance_prune(
        load_scene(scene_id),
        load_domain(domain_id),
        full.goal,
        encoding(),
        {instances()["agent"]: "agent"},
        agent_facts(domain_id, scene_id),
    )


def pruned_scene(domain_id: str, scene_id: str) -> SceneGraph:
    return prune(load_scene(scene_id), relevant_items(domain_id, scene_id))


def build_pruned_problem(domain_id: str, scene_id: str) -> ProblemAst:
    return build_problem(domain_id, scene_id, pruned_scene(domain_id, scene_id))


def golden_subgoals(domain_id: str, problem: ProblemAst) -> list[GoalFormula]:
    d = load_domain(domain_id)
    return [parse_goal(g, d, problem) for g in domain_config(domain_id).subgoals]
