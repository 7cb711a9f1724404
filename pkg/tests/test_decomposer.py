import json

import pytest

from sgplan.decomposer import SubGoalSequence, autoregressive_solve, run_manifest, verify_against_original
from sgplan.executor import Reason, simulate
from sgplan.failures import FailureClass
from sgplan.grounder import ground
from sgplan.harness import assets
from sgplan.pddl import PddlSemanticError, UndeclaredItemError, parse_goal, print_problem
from sgplan.planner import SearchConfig, Status, solve

GT = json.loads(assets.read_text("gt.json"))


def instance(dom, scene):
    d = assets.load_domain(dom)
    p = assets.build_pruned_problem(dom, scene)
    return d, p, assets.golden_subgoals(dom, p)


@pytest.fixture(scope="module")
def house():
    d, p, G = instance("house_cleaning", "shelbiana")
    return d, p, G, autoregressive_solve(solve, d, p, G)


def test_sequence_must_be_nonempty():
    with pytest.raises(ValueError):
        SubGoalSequence(())


def test_sequence_check_rejects_unknown_objects():
    d, p, G = instance("dining_table_setup", "parole")
    from sgplan.pddl import Atom, GoalFormula, Literal

    bad = SubGoalSequence((GoalFormula((Literal(Atom("item_on", ("napkin", "dining_table"))),)),))
    with pytest.raises(UndeclaredItemError):
        bad.check(d, p)
    SubGoalSequence(G).check(d, p)


def test_single_subgoal_matches_direct_solve():
    d, p, _ = instance("pc_assembly", "allensville")
    run = autoregressive_solve(solve, d, p, [p.goal])
    direct = solve(ground(d, p))
    assert run.solved and run.plan_length == direct.plan_length


def test_house_sequence_solves_and_validates(house):
    d, p, G, run = house
    assert run.solved and len(run.subproblems) == len(G) == 8
    assert verify_against_original(d, p, run).valid


def test_chaining(house):
    d, p, G, run = house
    subs = run.subproblems
    assert set(subs[0].problem.init) == set(p.init)
    for a, b in zip(subs, subs[1:]):
        assert simulate(d, a.problem, a.plan) == a.final_state == frozenset(b.problem.init)
    assert run.concat_plan == [s for sp in subs for s in sp.plan]


def test_subproblems_keep_objects(house):
    d, p, G, run = house
    for sp, g in zip(run.subproblems, G):
        assert sp.problem.objects == p.objects and sp.problem.goal == g


def test_house_expansions_shrink_tenfold(house):
    d, p, G, run = house
    direct = solve(ground(d, p))
    assert run.expanded * 10 <= direct.expanded
    assert run.plan_length >= direct.plan_length


def test_omitting_final_mop_clean_is_invalid():
    d, p, G = instance("house_cleaning", "shelbiana")
    run = autoregressive_solve(solve, d, p, G[:6] + G[7:])
    assert run.solved
    report = verify_against_original(d, p, run)
    assert report.reason is Reason.GOAL_UNSATISFIED and "(mop_clean mop)" in report.detail


def test_reordered_sequence_is_still_valid():
    d, p, G = instance("house_cleaning", "parole")
    # Rubbish in a different order, living room mopped before the kitchen.
    order = [G[2], G[0], G[1], G[5], G[4], G[3], G[6], G[7]]
    run = autoregressive_solve(solve, d, p, order)
    assert run.solved and verify_against_original(d, p, run).valid


def test_mopping_first_strands_the_rubbish():
    d, p, G = instance("house_cleaning", "parole")
    # Nothing in this domain puts the mop down, so the hand never frees up for disposal.
    run = autoregressive_solve(solve, d, p, [G[3], G[4], G[5], G[6], G[0], G[1], G[2], G[7]])
    assert run.failed_index == 4 and run.failure is FailureClass.DECOMPOSITION_ERROR


def test_unsolvable_subgoal_is_a_decomposition_error():
    d, p, G = instance("house_cleaning", "parole")
    back = parse_goal("(and (item_at cola_can living_room))", d, p)
    run = autoregressive_solve(solve, d, p, [G[0], back] + G[1:])
    assert run.status is Status.UNSOLVABLE and run.failed_index == 1
    assert run.failure is FailureClass.DECOMPOSITION_ERROR
    assert len(run.concat_plan) == len(run.subproblems[0].plan)


def test_subproblem_timeout():
    d, p, G = instance("pc_assembly", "parole")
    run = autoregressive_solve(solve, d, p, G, SearchConfig(timeout=1e-6))
    assert run.status is Status.TIMEOUT and run.failed_index == 0
    assert run.failure is FailureClass.PLANNER_TIMEOUT


def test_planner_is_pluggable():
    d, p, G = instance("dining_table_setup", "parole")
    calls = []

    def spy(task, cfg):
        calls.append(cfg.heuristic)
        return solve(task, cfg)

    run = autoregressive_solve(spy, d, p, G, SearchConfig(heuristic="hmax"))
    assert run.solved and calls == ["hmax"] * len(G)


@pytest.mark.parametrize("dom, scene", assets.evaluation_pairs())
def test_bundled_sequences(dom, scene):
    d, p, G = instance(dom, scene)
    run = autoregressive_solve(solve, d, p, G)
    assert run.solved
    assert verify_against_original(d, p, run).valid
    opt = GT[f"{dom}/{scene}"]
    assert opt <= run.plan_length <= 1.1 * opt


def test_manifest(house):
    d, p, G, run = house
    doc = run_manifest(d, p, run)
    assert json.loads(json.dumps(doc)) == doc
    assert doc["status"] == "Solved" and doc["plan_length"] == run.plan_length
    assert len(doc["subproblems"]) == 8
    first = doc["subproblems"][0]
    assert first["problem"] == print_problem(run.subproblems[0].problem)
    assert "(and" in first["goal"] and first["negative_literals"] is False
    assert doc["expanded"] == sum(s["expanded"] for s in doc["subproblems"])
    assert "time" not in doc and "time" in run_manifest(d, p, run, include_times=True)


def test_manifest_flags_negative_subgoals():
    d, p, G = instance("house_cleaning", "parole")
    neg = parse_goal("(and (item_disposed cola_can) (not (agent_hand_empty robot)))", d, p)
    run = autoregressive_solve(solve, d, p, [neg] + G)
    doc = run_manifest(d, p, run)
    assert doc["negative_subgoals"] is True and doc["subproblems"][0]["negative_literals"] is True


def test_ill_typed_subgoal_is_rejected():
    d, p, _ = instance("house_cleaning", "parole")
    with pytest.raises(PddlSemanticError):
        parse_goal("(and (floor_clean mop))", d, p)
