import json
import warnings

import pytest

from sgplan.harness import assets
from sgplan.pddl import GoalFormula, parse_goal
from sgplan.scene_graph import (
    DisconnectedSceneWarning,
    SceneGraphError,
    dumps,
    encode_item_attributes,
    encode_scene_facts,
    from_document,
    list_items,
    load_scene_graph,
    prune,
    relevance_prune,
    scene_problem,
)


def item(iid, accessible=True, states=None, affordances=()):
    return {"id": iid, "name": iid, "accessible": accessible, "states": states or {}, "affordances": list(affordances)}


def toy_doc():
    """Five items over four rooms: kitchen - corridor - bathroom, corridor - bedroom."""
    return {
        "name": "toy",
        "floors": [
            {
                "id": "f1",
                "rooms": [
                    {"id": "kitchen", "name": "kitchen", "neighbors": ["corridor"],
                     "items": [item("rubbish_bin"), item("cola_can", affordances=["pick"])]},
                    {"id": "corridor", "name": "corridor", "neighbors": ["bathroom", "bedroom"], "items": []},
                    {"id": "bathroom", "name": "bathroom", "neighbors": [],
                     "items": [item("mop", states={"clean": True}, affordances=["pick"]), item("sink")]},
                    {"id": "bedroom", "name": "bedroom", "neighbors": [], "items": [item("bed")]},
                ],
            }
        ],
    }


@pytest.fixture
def toy():
    return from_document(toy_doc())


def test_bundled_scene_sizes():
    sizes = {s: (len(assets.load_scene(s).rooms), len(assets.load_scene(s).items)) for s in assets.SCENES}
    assert sizes == {"parole": (7, 31), "kemblesville": (9, 16), "allensville": (11, 42), "shelbiana": (12, 34)}


def test_bundled_scenes_are_connected_and_symmetric():
    for s in assets.SCENES:
        sg = assets.load_scene(s)
        assert sg.is_connected()
        adj = sg.adjacency()
        assert all(a in adj[b] for a in adj for b in adj[a])


def test_minimal_scene():
    sg = load_scene_graph(json.dumps({"name": "m", "floors": [{"id": "f", "rooms": [{"id": "r", "name": "r"}]}]}))
    assert [r.id for r in sg.rooms] == ["r"] and sg.items == ()
    assert list_items(sg) == []


def test_neighbor_symmetry_closure(toy):
    assert "kitchen" in toy.room("corridor").neighbors
    assert "corridor" in toy.room("kitchen").neighbors
    assert toy.room("bedroom").neighbors == {"corridor"}


@pytest.mark.parametrize(
    "mutate, message",
    [
        (lambda d: d["floors"][0]["rooms"][0]["neighbors"].append("attic"), "unknown neighbor"),
        (lambda d: d["floors"][0]["rooms"][0]["neighbors"].append("kitchen"), "itself"),
        (lambda d: d["floors"][0]["rooms"][1].update(id="kitchen"), "duplicate room"),
        (lambda d: d["floors"][0]["rooms"][1]["items"].append(item("mop")), "duplicate item"),
        (lambda d: d.pop("name"), "missing 'name'"),
        (lambda d: d["floors"][0]["rooms"][3]["items"][0].update(accessible="yes"), "boolean"),
        (lambda d: d["floors"][0]["rooms"][3]["items"][0].update(affordances=[""]), "empty affordance"),
    ],
)
def test_malformed_documents(mutate, message):
    doc = toy_doc()
    mutate(doc)
    with pytest.raises(SceneGraphError, match=message):
        from_document(doc)


def test_not_json():
    with pytest.raises(SceneGraphError, match="malformed"):
        load_scene_graph("{floors: ")


def test_disconnected_scene_warns():
    doc = toy_doc()
    doc["floors"][0]["rooms"][3]["neighbors"] = []
    doc["floors"][0]["rooms"][1]["neighbors"] = ["bathroom"]
    with pytest.warns(DisconnectedSceneWarning):
        from_document(doc)


def test_document_roundtrip(toy):
    assert load_scene_graph(dumps(toy)) == toy


def test_list_items_order():
    doc = toy_doc()
    doc["floors"][0]["rooms"][0]["items"] = [item("cola_can"), item("banana_peel")]
    ids = [i for i, _, _ in list_items(from_document(doc))]
    assert ids == sorted(ids)
    assert ids[:2] == ["banana_peel", "bed"]
    assert len(list_items(assets.load_scene("shelbiana"))) == 34


def test_prune_identity_and_empty(toy):
    assert prune(toy, toy.item_ids) == toy
    empty = prune(toy, set())
    assert empty.items == () and empty.rooms == toy.rooms and empty.floors == toy.floors


def test_prune_rejects_unknown(toy):
    with pytest.raises(SceneGraphError, match="unknown item"):
        prune(toy, {"piano"})


def test_prune_leaves_input_alone(toy):
    before = dumps(toy)
    prune(toy, {"mop"})
    assert dumps(toy) == before


def test_prune_house_cleaning_keep_set():
    sg = assets.load_scene("shelbiana")
    keep = {"cola_can", "banana_peel", "rotting_apple", "mop", "rubbish_bin", "sink", "charging_hub"}
    pruned = prune(sg, keep)
    assert len(pruned.items) == len(keep) == 7
    assert len(pruned.rooms) == 12
    assert pruned.adjacency() == sg.adjacency()


def test_encode_scene_facts(toy):
    d = assets.load_domain("house_cleaning")
    atoms = {str(a) for a in encode_scene_facts(toy, d)}
    assert {"(neighbor kitchen corridor)", "(neighbor corridor kitchen)"} <= atoms
    assert "(item_at mop bathroom)" in atoms and "(item_accessible mop)" in atoms
    assert len(atoms) == 2 * len(toy.adjacent_pairs()) + 2 * len(toy.items)


def test_encode_skips_inaccessible_items():
    doc = toy_doc()
    doc["floors"][0]["rooms"][2]["items"][0]["accessible"] = False
    atoms = {str(a) for a in encode_scene_facts(from_document(doc), assets.load_domain("house_cleaning"))}
    assert not any("mop" in a for a in atoms)


def test_encode_empty_scene():
    sg = load_scene_graph('{"name": "m", "floors": [{"id": "f", "rooms": [{"id": "r", "name": "r"}]}]}')
    assert encode_scene_facts(sg, assets.load_domain("laundry")) == []


def test_encode_needs_predicates(toy):
    from sgplan.pddl import UndeclaredPredicateError, parse_domain

    d = parse_domain("(define (domain bare) (:predicates (p)))")
    with pytest.raises(UndeclaredPredicateError, match="neighbor"):
        encode_scene_facts(toy, d)


def test_item_attributes_follow_encoding(toy):
    atoms = {str(a) for a in encode_item_attributes(toy, assets.load_domain("house_cleaning"), assets.encoding())}
    assert {"(item_is_mop mop)", "(mop_clean mop)", "(item_pickable mop)", "(item_is_sink sink)"} <= atoms
    assert "(item_pickable sink)" not in atoms


def _relevant(sg, goal_text):
    d = assets.load_domain("house_cleaning")
    base = scene_problem(sg, d, GoalFormula(()), assets.encoding(), {"robot": "agent"})
    goal = parse_goal(goal_text, d, base)
    facts = assets.agent_facts("house_cleaning", "parole")
    facts = [f for f in facts if f.predicate != "agent_at"]
    from sgplan.pddl import Atom

    return relevance_prune(sg, d, goal, assets.encoding(), {"robot": "agent"}, facts + [Atom("agent_at", ("robot", "kitchen"))])


def test_relevance_mopping(toy):
    # mop_floor needs the mop; clean_mop achieves mop_clean and needs the sink;
    # dispose is the only way to empty the hand, which pulls in the can and the bin.
    assert _relevant(toy, "(and (floor_clean kitchen))") == {"mop", "sink", "cola_can", "rubbish_bin"}


def test_relevance_disposal(toy):
    assert _relevant(toy, "(and (item_disposed cola_can))") == {"cola_can", "rubbish_bin"}


def test_relevance_empty_goal(toy):
    assert relevance_prune(toy, assets.load_domain("house_cleaning"), GoalFormula(())) == set()


def test_relevance_undeclared_predicate(toy):
    from sgplan.pddl import Atom, Literal, UndeclaredPredicateError

    goal = GoalFormula((Literal(Atom("sparkling", ("kitchen",))),))
    with pytest.raises(UndeclaredPredicateError):
        relevance_prune(toy, assets.load_domain("house_cleaning"), goal)


def test_bundled_relevant_sets_shrink_scenes():
    for d, s in assets.evaluation_pairs():
        keep = assets.relevant_items(d, s)
        assert keep <= assets.load_scene(s).item_ids
        assert len(keep) < len(assets.load_scene(s).items)


def test_scene_values_are_frozen(toy):
    with pytest.raises(Exception):
        toy.rooms[0].neighbors.add("bedroom")
    with pytest.raises(TypeError):
        toy.items[0].states["clean"] = False
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        from_document(toy_doc())
