"""Hierarchical scene graphs (floor / room / item layers).

Scene graphs are loaded from a nested JSON document::

    {"name": str,
     "floors": [{"id": str,
                 "rooms": [{"id": str, "name": str, "neighbors": [room ids],
                            "items": [{"id": str, "name": str, "accessible": bool,
                                       "states": {...}, "affordances": [...]}]}]}]}

Room adjacency is closed under symmetry on load. Values are immutable once
built and safe to share between workers.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field, replace
from types import MappingProxyType

from .grounder import ground
from .pddl import Atom, DomainAst, GoalFormula, Literal, ProblemAst, TypedName
from .pddl.errors import UndeclaredPredicateError


class SceneGraphError(ValueError):
    pass


class DisconnectedSceneWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Floor:
    id: str
    name: str = ""


@dataclass(frozen=True)
class Room:
    id: str
    name: str
    floor: str
    neighbors: frozenset[str] = frozenset()

    def __post_init__(self):
        if self.id in self.neighbors:
            raise SceneGraphError(f"room {self.id!r} lists itself as a neighbor")


@dataclass(frozen=True)
class Item:
    id: str
    name: str
    room: str
    accessible: bool = True
    states: MappingProxyType = field(default_factory=lambda: MappingProxyType({}))
    affordances: frozenset[str] = frozenset()

    def __post_init__(self):
        if not isinstance(self.states, MappingProxyType):
            object.__setattr__(self, "states", MappingProxyType(dict(self.states)))
        for a in self.affordances:
            if not isinstance(a, str) or not a:
                raise SceneGraphError(f"item {self.id!r} has an empty affordance label")

    def attributes(self) -> dict:
        return {
            "name": self.name,
            "accessible": self.accessible,
            "states": dict(self.states),
            "affordances": sorted(self.affordances),
        }


@dataclass(frozen=True)
class SceneGraph:
    name: str
    floors: tuple[Floor, ...]
    rooms: tuple[Room, ...]
    items: tuple[Item, ...]

    def __post_init__(self):
        for layer, nodes in (("floor", self.floors), ("room", self.rooms), ("item", self.items)):
            ids = [n.id for n in nodes]
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            if dupes:
                raise SceneGraphError(f"duplicate {layer} id(s): {', '.join(dupes)}")
        floor_ids = {f.id for f in self.floors}
        room_ids = {r.id for r in self.rooms}
        for r in self.rooms:
            if r.floor not in floor_ids:
                raise SceneGraphError(f"room {r.id!r} references unknown floor {r.floor!r}")
            unknown = r.neighbors - room_ids
            if unknown:
                raise SceneGraphError(f"room {r.id!r} lists unknown neighbor(s) {sorted(unknown)}")
        for i in self.items:
            if i.room not in room_ids:
                raise SceneGraphError(f"item {i.id!r} references unknown room {i.room!r}")
        by_id = {r.id: r for r in self.rooms}
        for r in self.rooms:
            for n in r.neighbors:
                if r.id not in by_id[n].neighbors:
                    raise SceneGraphError(f"adjacency {r.id}-{n} is not symmetric")

    def room(self, room_id: str) -> Room:
        for r in self.rooms:
            if r.id == room_id:
                return r
        raise KeyError(room_id)

    def item(self, item_id: str) -> Item:
        for i in self.items:
            if i.id == item_id:
                return i
        raise KeyError(item_id)

    @property
    def item_ids(self) -> set[str]:
        return {i.id for i in self.items}

    def adjacent_pairs(self) -> list[tuple[str, str]]:
        """Unordered adjacent room pairs, each once, sorted."""
        return sorted({tuple(sorted((r.id, n))) for r in self.rooms for n in r.neighbors})

    def adjacency(self) -> dict[str, frozenset[str]]:
        return {r.id: r.neighbors for r in self.rooms}

    def is_connected(self) -> bool:
        if not self.rooms:
            return True
        adj = self.adjacency()
        seen = {self.rooms[0].id}
        stack = [self.rooms[0].id]
        while stack:
            for n in adj[stack.pop()]:
                if n not in seen:
                    seen.add(n)
                    stack.append(n)
        return len(seen) == len(self.rooms)


def _require(obj: dict, key: str, where: str, kind=str):
    if not isinstance(obj, dict) or key not in obj:
        raise SceneGraphError(f"{where}: missing {key!r}")
    value = obj[key]
    if not isinstance(value, kind):
        raise SceneGraphError(f"{where}: {key!r} must be {getattr(kind, '__name__', kind)}")
    return value


def from_document(doc: dict) -> SceneGraph:
    if not isinstance(doc, dict):
        raise SceneGraphError("scene document must be an object")
    name = _require(doc, "name", "scene")
    floors, rooms, items = [], [], []
    neighbor_lists: dict[str, set[str]] = {}
    for floor in _require(doc, "floors", "scene", list):
        fid = _require(floor, "id", "floor")
        floors.append(Floor(fid, floor.get("name", fid)))
        for room in _require(floor, "rooms", f"floor {fid}", list):
            rid = _require(room, "id", f"room on floor {fid}")
            neighbors = room.get("neighbors", [])
            if not isinstance(neighbors, list) or not all(isinstance(n, str) for n in neighbors):
                raise SceneGraphError(f"room {rid}: 'neighbors' must be a list of room ids")
            if rid in neighbor_lists:
                raise SceneGraphError(f"duplicate room id(s): {rid}")
            neighbor_lists[rid] = set(neighbors)
            rooms.append((rid, room.get("name", rid), fid))
            for item in room.get("items", []):
                iid = _require(item, "id", f"item in room {rid}")
                accessible = item.get("accessible", True)
                states = item.get("states", {})
                affordances = item.get("affordances", [])
                if not isinstance(accessible, bool):
                    raise SceneGraphError(f"item {iid}: 'accessible' must be a boolean")
                if not isinstance(states, dict):
                    raise SceneGraphError(f"item {iid}: 'states' must be an object")
                if not isinstance(affordances, list):
                    raise SceneGraphError(f"item {iid}: 'affordances' must be a list")
                items.append(Item(iid, item.get("name", iid), rid, accessible, states, frozenset(affordances)))
    room_ids = set(neighbor_lists)
    for rid, ns in neighbor_lists.items():
        unknown = ns - room_ids
        if unknown:
            raise SceneGraphError(f"room {rid!r} lists unknown neighbor(s) {sorted(unknown)}")
        if rid in ns:
            raise SceneGraphError(f"room {rid!r} lists itself as a neighbor")
    closed = {rid: set(ns) for rid, ns in neighbor_lists.items()}
    for rid, ns in neighbor_lists.items():
        for n in ns:
            closed[n].add(rid)
    sg = SceneGraph(
        name=name,
        floors=tuple(floors),
        rooms=tuple(Room(rid, rname, fid, frozenset(closed[rid])) for rid, rname, fid in rooms),
        items=tuple(items),
    )
    if not sg.is_connected():
        warnings.warn(f"scene {name!r} has disconnected rooms", DisconnectedSceneWarning, stacklevel=2)
    return sg


def load_scene_graph(text: str) -> SceneGraph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneGraphError(f"malformed scene document: {exc}") from None
    return from_document(doc)


def to_document(sg: SceneGraph) -> dict:
    floors = []
    for f in sg.floors:
        rooms = []
        for r in sg.rooms:
            if r.floor != f.id:
                continue
            items = [
                {
                    "id": i.id,
                    "name": i.name,
                    "accessible": i.accessible,
                    "states": dict(sorted(i.states.items())),
                    "affordances": sorted(i.affordances),
                }
                for i in sg.items
                if i.room == r.id
            ]
            rooms.append({"id": r.id, "name": r.name, "neighbors": sorted(r.neighbors), "items": items})
        floors.append({"id": f.id, "rooms": rooms})
    return {"name": sg.name, "floors": floors}


def dumps(sg: SceneGraph) -> str:
    return json.dumps(to_document(sg), indent=2) + "\n"


def list_items(sg: SceneGraph) -> list[tuple[str, str, dict]]:
    return [(i.id, i.room, i.attributes()) for i in sorted(sg.items, key=lambda i: i.id)]


def prune(sg: SceneGraph, keep) -> SceneGraph:
    keep = set(keep)
    unknown = keep - sg.item_ids
    if unknown:
        raise SceneGraphError(f"unknown item id(s) in keep set: {', '.join(sorted(unknown))}")
    return replace(sg, items=tuple(i for i in sg.items if i.id in keep))


# -- translation into planning facts -------------------------------------------------


@dataclass(frozen=True)
class SceneEncoding:
    """How scene content maps onto a domain's predicates.

    ``categories`` maps an item's ``name`` label to unary predicates,
    ``affordances`` and ``states`` map labels to unary predicates (a state
    produces its atom when its value is ``True``).
    """

    neighbor: str = "neighbor"
    item_at: str = "item_at"
    item_accessible: str = "item_accessible"
    categories: dict = field(default_factory=dict)
    affordances: dict = field(default_factory=dict)
    states: dict = field(default_factory=dict)
    agent_type: str = "agent"
    room_type: str = "room"
    item_type: str = "item"

    @classmethod
    def from_dict(cls, doc: dict) -> SceneEncoding:
        return cls(**doc)


DEFAULT_ENCODING = SceneEncoding()


def _check_predicates(d: DomainAst, names) -> None:
    for name in names:
        if name not in d.predicate_map:
            raise UndeclaredPredicateError(name)


def encode_scene_facts(sg: SceneGraph, d: DomainAst, encoding: SceneEncoding = DEFAULT_ENCODING) -> list[Atom]:
    """Room adjacency (both directions) and location/accessibility of accessible items."""
    _check_predicates(d, (encoding.neighbor, encoding.item_at, encoding.item_accessible))
    atoms = []
    for a, b in sg.adjacent_pairs():
        atoms.append(Atom(encoding.neighbor, (a, b)))
        atoms.append(Atom(encoding.neighbor, (b, a)))
    for item in sorted(sg.items, key=lambda i: i.id):
        if item.accessible:
            atoms.append(Atom(encoding.item_at, (item.id, item.room)))
            atoms.append(Atom(encoding.item_accessible, (item.id,)))
    return atoms


def encode_item_attributes(sg: SceneGraph, d: DomainAst, encoding: SceneEncoding) -> list[Atom]:
    """Unary facts from item categories, affordances and states that ``d`` declares."""
    declared = d.predicate_map
    atoms = []
    for item in sorted(sg.items, key=lambda i: i.id):
        preds = list(encoding.categories.get(item.name, ()))
        preds += [encoding.affordances[a] for a in sorted(item.affordances) if a in encoding.affordances]
        preds += [encoding.states[s] for s, v in sorted(item.states.items()) if v is True and s in encoding.states]
        for p in dict.fromkeys(preds):
            if p in declared:
                atoms.append(Atom(p, (item.id,)))
    return atoms


def scene_problem(
    sg: SceneGraph,
    d: DomainAst,
    goal: GoalFormula,
    encoding: SceneEncoding = DEFAULT_ENCODING,
    agents: dict | None = None,
    agent_facts=(),
    name: str | None = None,
) -> ProblemAst:
    """Deterministic problem construction from a scene graph."""
    agents = agents or {}
    objects = [TypedName(a, t) for a, t in agents.items()]
    objects += [TypedName(r.id, encoding.room_type) for r in sg.rooms]
    objects += [TypedName(i.id, encoding.item_type) for i in sorted(sg.items, key=lambda i: i.id)]
    init = list(agent_facts) + encode_scene_facts(sg, d, encoding) + encode_item_attributes(sg, d, encoding)
    return ProblemAst(name or f"{d.name}_{sg.name}", d.name, tuple(objects), tuple(dict.fromkeys(init)), goal)


def relevance_analysis(task) -> tuple[set[Literal], list]:
    """Backward relevance fixpoint over the reachable ground actions of ``task``.

    Goal literals are relevant; an action adding a relevant positive atom or
    deleting an atom whose negation is relevant is relevant, and so are all
    of its preconditions (positive and negative). Returns the relevant
    literals and the relevant actions.
    """
    facts = task.facts
    relevant_pos = set(task.goal)
    relevant_neg = set(task.goal_neg)
    achievers: dict[int, list[int]] = {}
    deleters: dict[int, list[int]] = {}
    for idx, a in enumerate(task.actions):
        for f in a.add:
            achievers.setdefault(f, []).append(idx)
        for f in a.delete:
            deleters.setdefault(f, []).append(idx)
    stack = [(f, True) for f in relevant_pos] + [(f, False) for f in relevant_neg]
    used: set[int] = set()
    while stack:
        f, positive = stack.pop()
        for idx in (achievers if positive else deleters).get(f, ()):
            if idx in used:
                continue
            used.add(idx)
            a = task.actions[idx]
            for p in a.pre:
                if p not in relevant_pos:
                    relevant_pos.add(p)
                    stack.append((p, True))
            for p in a.pre_neg:
                if p not in relevant_neg:
                    relevant_neg.add(p)
                    stack.append((p, False))
    literals = {Literal(facts.atom(f), True) for f in relevant_pos}
    literals |= {Literal(facts.atom(f), False) for f in relevant_neg}
    return literals, [task.actions[i] for i in sorted(used)]


def relevance_prune(
    sg: SceneGraph,
    d: DomainAst,
    goal: GoalFormula,
    encoding: SceneEncoding = DEFAULT_ENCODING,
    agents: dict | None = None,
    agent_facts=(),
) -> set[str]:
    """Items that take part in any fact relevant to ``goal``.

    Static facts of relevant actions are compiled away during grounding, so
    the arguments of relevant actions count as well.
    """
    for lit in goal.literals:
        if lit.atom.predicate not in d.predicate_map:
            raise UndeclaredPredicateError(lit.atom.predicate)
    if not goal.literals:
        return set()
    problem = scene_problem(sg, d, goal, encoding, agents, agent_facts)
    literals, actions = relevance_analysis(ground(d, problem))
    items = sg.item_ids
    found = {arg for lit in literals for arg in lit.atom.args if arg in items}
    found |= {arg for a in actions for arg in a.args if arg in items}
    return found
