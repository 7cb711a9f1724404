"""Authoring of replay fixtures, seeded-fault fixture sets and ground truth.

A scripted responder stands in for the model: it recognises the pipeline
step from the system message and answers with the reference artifact for
the (domain, scene) pair, optionally passed through a mutation. Running the
pipeline with the record backend against this responder stores exactly the
requests a replay run will make.

Regenerate everything with ``python -m sgplan.harness.golden``, or parts of it
with ``--gt``, ``--golden`` and ``--fixtures``.
"""

from __future__ import annotations

import json
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

from ..failures import FailureClass
from ..executor import validate
from ..grounder import ground
from ..llm import DEFAULT_MODEL, Backend, TransportError
from ..llm.prompts import ROLES
from ..pddl import goal_sexpr, print_problem
from ..planner import SearchConfig, breadth_first_search, format_plan, solve
from ..planner.plan import as_steps
from . import assets
from .pipeline import TrialConfig, bundled_fixtures, run_pipeline

ORACLE_MAX_STATES = 5_000_000


def _fenced(text: str, lang: str = "pddl") -> str:
    return f"```{lang}\n{text.rstrip()}\n```\n"


def reference_responses(domain_id: str, scene_id: str) -> dict[str, str]:
    """What a perfect model would answer at each step."""
    problem = assets.build_pruned_problem(domain_id, scene_id)
    subgoals = assets.golden_subgoals(domain_id, problem)
    return {
        "domain_generation": _fenced(assets.domain_text(domain_id)),
        "pruning": _fenced("\n".join(sorted(assets.relevant_items(domain_id, scene_id))), ""),
        "problem_generation": _fenced(print_problem(problem)),
        "decomposition": _fenced("\n".join(goal_sexpr(g) for g in subgoals)),
    }


def scripted_transport(responses: dict[str, str], fail_steps=()):
    def transport(req, config):
        step = ROLES.get(req.messages[0][1])
        if step is None:
            raise TransportError("scripted responder got an unknown prompt")
        if step in fail_steps:
            raise TransportError(f"scripted responder refuses step {step}")
        return responses[step]

    return transport


# Mutations on reference responses, one per seeded fault.


def _sub(pattern: str, repl: str, count: int = 1):
    def f(text: str) -> str:
        out, n = re.subn(pattern, repl, text, count=count)
        if n == 0:
            raise ValueError(f"mutation pattern {pattern!r} did not match")
        return out

    return f


def _drop_lines(*needles: str):
    def f(text: str) -> str:
        lines = text.splitlines(keepends=True)
        out = [l for l in lines if not any(n == l.strip() for n in needles)]
        if len(out) == len(lines):
            raise ValueError(f"none of {needles} found")
        return "".join(out)

    return f


def _drop_nth_line(needle: str, n: int):
    def f(text: str) -> str:
        lines = text.splitlines(keepends=True)
        hits = [i for i, l in enumerate(lines) if l.strip() == needle]
        del lines[hits[n]]
        return "".join(lines)

    return f


def _insert_after(needle: str, new: str):
    def f(text: str) -> str:
        lines = text.splitlines(keepends=True)
        i = next(i for i, l in enumerate(lines) if l.strip() == needle)
        lines.insert(i + 1, new + "\n")
        return "".join(lines)

    return f


def _truncate_problem(text: str) -> str:
    # Lose the closing parenthesis and the fence: the file is unbalanced.
    body = text.replace("```pddl\n", "").replace("```\n", "").rstrip()
    return "Here is the problem file:\n\n" + body[:-1] + "\n"


@dataclass(frozen=True)
class SeededCase:
    name: str
    domain: str
    scene: str
    expected: FailureClass
    expected_orig: FailureClass | None
    step: str
    mutations: dict = field(default_factory=dict)
    fail_steps: tuple = ()
    orig_timeout: float | None = None
    timeout: float | None = None

    @property
    def model(self) -> str:
        return f"seeded-{self.name}"

    def trial_config(self, fixtures: Path | None = None) -> TrialConfig:
        planner = SearchConfig(timeout=self.timeout) if self.timeout else SearchConfig()
        orig = SearchConfig(timeout=self.orig_timeout) if self.orig_timeout else None
        return TrialConfig(
            self.domain, self.scene, Backend.REPLAY, 1, planner, orig, self.model, fixtures or bundled_fixtures()
        )


HC, SH = "house_cleaning", "shelbiana"

SEEDED_CASES = (
    SeededCase(
        "domain-syntax", HC, SH, FailureClass.SYNTAX_ERROR, FailureClass.SYNTAX_ERROR, "domain_generation",
        {"domain_generation": _sub(r":precondition", ":precondtion")},
    ),
    SeededCase(
        "problem-unbalanced", "pc_assembly", "parole", FailureClass.SYNTAX_ERROR, FailureClass.SYNTAX_ERROR,
        "problem_generation", {"problem_generation": _truncate_problem},
    ),
    SeededCase(
        "missing-response", "dining_table_setup", "allensville", FailureClass.LLM_ERROR, FailureClass.LLM_ERROR,
        "pruning", fail_steps=("pruning",),
    ),
    SeededCase(
        "pruning-drops-mop", HC, SH, FailureClass.PRUNING_ERROR, FailureClass.PRUNING_ERROR, "pruning",
        {"pruning": _drop_lines("mop")},
    ),
    SeededCase(
        "pruning-unknown-item", "pc_assembly", "allensville", FailureClass.PRUNING_ERROR, FailureClass.PRUNING_ERROR,
        "pruning", {"pruning": _insert_after("cpu", "graphics_tablet")},
    ),
    SeededCase(
        "problem-undeclared-object", HC, SH, FailureClass.UNDECLARED_ITEM, FailureClass.UNDECLARED_ITEM,
        "problem_generation", {"problem_generation": _sub(r" mop ", " ")},
    ),
    SeededCase(
        "subgoal-undeclared-object", "dining_table_setup", "parole", FailureClass.UNDECLARED_ITEM,
        FailureClass.UNDECLARED_ITEM, "decomposition",
        {"decomposition": _sub(r"\(item_on fork dining_table\)", "(item_on napkin dining_table)")},
    ),
    SeededCase(
        "subgoals-omit-mop-clean", HC, SH, FailureClass.DECOMPOSITION_ERROR, None, "planning",
        {"decomposition": _drop_nth_line("(and (mop_clean mop))", 1)},
    ),
    SeededCase(
        "subgoal-conflict", HC, "parole", FailureClass.DECOMPOSITION_ERROR, None, "planning",
        {"decomposition": _insert_after("(and (item_disposed cola_can))", "(and (item_at cola_can living_room))")},
    ),
    SeededCase(
        "domain-loose-dispose", HC, "allensville", FailureClass.INCORRECT_ACTION, FailureClass.INCORRECT_ACTION,
        "planning", {"domain_generation": _drop_lines("(item_at ?b ?r)")},
    ),
    SeededCase(
        "problem-inaccessible-mop", HC, SH, FailureClass.INVALID_PLAN, FailureClass.INVALID_PLAN, "planning",
        {"problem_generation": _drop_lines("(item_accessible mop)")},
    ),
    SeededCase(
        "problem-wrong-goal", HC, "parole", FailureClass.INVALID_PLAN, FailureClass.INVALID_PLAN, "planning",
        {
            "problem_generation": _drop_lines("(floor_clean kitchen)"),
            "decomposition": lambda t: _drop_nth_line("(and (mop_clean mop))", 0)(
                _drop_lines("(and (floor_clean kitchen))")(t)
            ),
        },
    ),
    SeededCase(
        "forced-timeout-original", HC, SH, FailureClass.PLANNER_TIMEOUT, FailureClass.PLANNER_TIMEOUT, "planning",
        orig_timeout=1e-6, timeout=1e-6,
    ),
    SeededCase(
        "forced-timeout-original-only", "pc_assembly", SH, None, FailureClass.PLANNER_TIMEOUT, "planning",
        orig_timeout=1e-6,
    ),
)


def seeded_case(name: str) -> SeededCase:
    for case in SEEDED_CASES:
        if case.name == name:
            return case
    raise KeyError(name)


def record_pair(domain_id: str, scene_id: str, root: Path, model: str, mutations=None, fail_steps=()):
    responses = reference_responses(domain_id, scene_id)
    for step, mutate in (mutations or {}).items():
        responses[step] = mutate(responses[step])
    cfg = TrialConfig(
        domain_id,
        scene_id,
        Backend.RECORD,
        model=model,
        fixtures=root,
        transport=scripted_transport(responses, fail_steps),
        planner=SearchConfig(timeout=60.0),
    )
    return run_pipeline(cfg)


def author_fixtures(root: Path | None = None, log=print) -> None:
    root = Path(root or bundled_fixtures())
    for domain_id, scene_id in assets.evaluation_pairs():
        report = record_pair(domain_id, scene_id, root, DEFAULT_MODEL)
        log(f"{DEFAULT_MODEL} {domain_id} {scene_id}: {'ok' if report.success else report.failure_class}")
    for case in SEEDED_CASES:
        # Timeouts are forced through the planner budget; the responses are the reference ones.
        report = record_pair(case.domain, case.scene, root, case.model, case.mutations, case.fail_steps)
        log(f"{case.model}: {report.failure_class.value if report.failure_class else 'ok'}")


def ground_truth() -> dict[str, int]:
    """Optimal plan length of every bundled reference problem, by breadth-first search."""
    out = {}
    for domain_id, scene_id in assets.all_pairs():
        task = ground(assets.load_domain(domain_id), assets.build_problem(domain_id, scene_id))
        out[f"{domain_id}/{scene_id}"] = breadth_first_search(task, ORACLE_MAX_STATES)
    return out


def write_ground_truth(path: Path | None = None) -> dict[str, int]:
    gt = ground_truth()
    path = Path(path or Path(str(assets._data() / "gt.json")))
    path.write_text(json.dumps(gt, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return gt


def write_golden_files(root: Path | None = None, log=print) -> None:
    """Reference problem and an optimal plan for every bundled instance."""
    root = Path(root or Path(str(assets._data() / "golden")))
    for domain_id, scene_id in assets.all_pairs():
        d = assets.load_domain(domain_id)
        p = assets.build_problem(domain_id, scene_id)
        result = solve(ground(d, p), SearchConfig(timeout=600.0))
        if not result.solved or not validate(d, p, as_steps(result.plan)).valid:
            raise RuntimeError(f"no valid reference plan for {domain_id}/{scene_id}")
        out = root / domain_id
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{scene_id}.problem.pddl").write_text(print_problem(p), encoding="utf-8")
        (out / f"{scene_id}.plan").write_text(format_plan(result.plan), encoding="utf-8")
        log(f"golden {domain_id}/{scene_id}: {result.plan_length} steps, {result.expanded} expanded")


def main(argv=None) -> int:
    args = argv if argv is not None else sys.argv[1:]
    if "--gt" in args or not args:
        for k, v in write_ground_truth().items():
            print(f"gt {k}: {v}")
    if "--golden" in args or not args:
        write_golden_files()
    if "--fixtures" in args or not args:
        author_fixtures()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
