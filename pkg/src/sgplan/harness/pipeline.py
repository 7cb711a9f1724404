"""End-to-end pipeline: domain generation, scene pruning, problem generation,
goal decomposition and autoregressive planning, with failure attribution.

Both the original problem and the decomposed sequence are planned. Success
on either side means the resulting plan is valid for the reference domain
and problem built from the full bundled scene.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from pathlib import Path

from ..decomposer import autoregressive_solve, verify_against_original
from ..executor import Reason, validate
from ..failures import FailureClass
from ..grounder import GroundingError, ground
from ..llm import (
    DEFAULT_MODEL,
    Backend,
    ClientConfig,
    DecompositionExample,
    DomainExample,
    FixtureStore,
    LLMError,
    NoPlanningFileFound,
    ProblemExample,
    PruningExample,
    build_decomposition_prompt,
    build_domain_prompt,
    build_problem_prompt,
    build_pruning_prompt,
    complete,
    extract_item_ids,
    extract_one,
    extract_subgoals,
)
from ..llm.prompts import PromptTemplate, scene_items
from ..pddl import (
    DomainAst,
    PddlError,
    ProblemAst,
    UndeclaredItemError,
    goal_sexpr,
    parse_domain,
    parse_problem,
    print_problem,
)
from ..planner import INF, SearchConfig, Status, solve
from ..planner.heuristics import hmax
from ..planner.plan import PlanStep
from ..scene_graph import SceneGraph, list_items, prune
from . import assets

STEPS = ("domain_generation", "pruning", "problem_generation", "decomposition", "planning")


def bundled_fixtures() -> Path:
    return Path(str(assets._data() / "fixtures"))


@dataclass(frozen=True)
class TrialConfig:
    domain: str
    scene: str
    backend: Backend = Backend.REPLAY
    trials: int = 1
    planner: SearchConfig = field(default_factory=SearchConfig)
    orig_planner: SearchConfig | None = None
    model: str = DEFAULT_MODEL
    fixtures: Path | None = None
    client: ClientConfig | None = None
    transport: object = None

    def __post_init__(self):
        object.__setattr__(self, "backend", Backend(self.backend))
        if self.domain == assets.EXAMPLE_DOMAIN:
            raise ValueError(f"{self.domain} is the one-shot example and cannot be evaluated")
        if self.domain not in assets.DOMAINS:
            raise ValueError(f"unknown domain {self.domain!r}")
        if self.scene not in assets.SCENES:
            raise ValueError(f"unknown scene {self.scene!r}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")

    @property
    def search_orig(self) -> SearchConfig:
        return self.orig_planner or self.planner

    def store(self) -> FixtureStore:
        return FixtureStore(self.fixtures or bundled_fixtures())


@dataclass(frozen=True)
class TrialReport:
    domain: str
    scene: str
    model: str
    trial: int
    success: bool
    failure_class: FailureClass | None = None
    success_orig: bool = False
    failure_orig: FailureClass | None = None
    plan_len_orig: int | None = None
    plan_len_decomp: int | None = None
    time_orig: float | None = None
    time_decomp: float | None = None
    expanded_orig: int | None = None
    expanded_decomp: int | None = None
    failed_step: str | None = None
    detail: str = ""

    def __post_init__(self):
        if self.success and self.failure_class is not None:
            raise ValueError("a successful trial has no failure class")
        if self.success_orig and self.failure_orig is not None:
            raise ValueError("a successful trial has no failure class")
        if not self.success and self.failure_class is None:
            raise ValueError("a failed trial needs a failure class")
        if not self.success_orig and self.failure_orig is None:
            raise ValueError("a failed trial needs a failure class")


class StepFailure(Exception):
    def __init__(self, failure: FailureClass, step: str, detail: str):
        self.failure = failure
        self.step = step
        self.detail = detail
        super().__init__(f"{step}: {failure.value}: {detail}")


# Example material for one-shot prompting, all taken from the laundry domain.


def example_keep() -> frozenset:
    return frozenset(assets.instances()["example_keep"])


def example_scene() -> SceneGraph:
    ex = assets.instances()["example"]
    return prune(assets.load_scene(ex["scene"]), example_keep())


def example_problem() -> ProblemAst:
    ex = assets.instances()["example"]
    return assets.build_problem(ex["domain"], ex["scene"], example_scene())


def domain_prompt(domain_id: str) -> PromptTemplate:
    ex = assets.EXAMPLE_DOMAIN
    example = DomainExample(assets.domain_config(ex).actions_nl, assets.domain_text(ex))
    return build_domain_prompt(example, assets.domain_config(domain_id).actions_nl)


def pruning_prompt(domain_id: str, scene_id: str) -> PromptTemplate:
    ex = assets.instances()["example"]
    example = PruningExample(
        scene_items(assets.load_scene(ex["scene"])), assets.task_nl(ex["domain"], ex["scene"]), example_keep()
    )
    return build_pruning_prompt(list_items(assets.load_scene(scene_id)), assets.task_nl(domain_id, scene_id), example)


def problem_prompt(domain_id: str, scene_id: str, d: DomainAst, sg: SceneGraph) -> PromptTemplate:
    ex = assets.instances()["example"]
    example = ProblemExample(
        example_scene(),
        assets.task_nl(ex["domain"], ex["scene"]),
        assets.load_domain(ex["domain"]),
        print_problem(example_problem()),
    )
    return build_problem_prompt(sg, assets.task_nl(domain_id, scene_id), d, example)


def decomposition_prompt(p: ProblemAst, d: DomainAst) -> PromptTemplate:
    ex = assets.instances()["example"]
    cfg = assets.domain_config(ex["domain"])
    p_ex = example_problem()
    subgoals = tuple(goal_sexpr(g) for g in assets.golden_subgoals(ex["domain"], p_ex))
    example = DecompositionExample(print_problem(p_ex), assets.domain_text(ex["domain"]), cfg.subgoals_nl, subgoals)
    return build_decomposition_prompt(p, d, example)


@dataclass
class PipelineArtifacts:
    """Everything the LLM steps produced, for audit and the CLI."""

    responses: dict = field(default_factory=dict)
    domain: DomainAst | None = None
    keep: list | None = None
    problem: ProblemAst | None = None
    subgoals: list | None = None
    plan_orig: list | None = None
    plan_decomp: list | None = None
    decomposition: object = None


class _Context:
    def __init__(self, cfg: TrialConfig, trial: int):
        self.cfg = cfg
        self.trial = trial
        self.store = cfg.store()
        self.client = replace(cfg.client or ClientConfig(), model=cfg.model)
        self.art = PipelineArtifacts()

    def ask(self, step: str, prompt: PromptTemplate) -> str:
        req = self.client.request(prompt.messages())
        try:
            text = complete(req, self.cfg.backend, self.store, self.client, self.cfg.transport, self.trial)
        except LLMError as exc:
            raise StepFailure(FailureClass.LLM_ERROR, step, str(exc)) from None
        self.art.responses[step] = text
        return text


def _generate(ctx: _Context, upto: str = "decomposition") -> tuple[DomainAst, ProblemAst, list]:
    """Steps 1 to 4 (or up to ``upto``). Failures raise StepFailure for the first failing step."""
    cfg = ctx.cfg
    step = "domain_generation"
    text = ctx.ask(step, domain_prompt(cfg.domain))
    try:
        d = parse_domain(extract_one(text, "domain"))
    except (NoPlanningFileFound, PddlError) as exc:
        raise StepFailure(FailureClass.SYNTAX_ERROR, step, str(exc)) from None
    ctx.art.domain = d
    if upto == step:
        return d, None, None

    step = "pruning"
    full = assets.load_scene(cfg.scene)
    keep = extract_item_ids(ctx.ask(step, pruning_prompt(cfg.domain, cfg.scene)))
    unknown = sorted(set(keep) - full.item_ids)
    if unknown:
        raise StepFailure(FailureClass.PRUNING_ERROR, step, "unknown items: " + " ".join(unknown))
    missing = sorted(assets.relevant_items(cfg.domain, cfg.scene) - set(keep))
    if missing:
        raise StepFailure(FailureClass.PRUNING_ERROR, step, "relevant items dropped: " + " ".join(missing))
    ctx.art.keep = keep
    sg = prune(full, keep)
    if upto == step:
        return d, None, None

    step = "problem_generation"
    text = ctx.ask(step, problem_prompt(cfg.domain, cfg.scene, d, sg))
    try:
        p = parse_problem(extract_one(text, "problem"), d)
    except UndeclaredItemError as exc:
        raise StepFailure(FailureClass.UNDECLARED_ITEM, step, str(exc)) from None
    except (NoPlanningFileFound, PddlError) as exc:
        raise StepFailure(FailureClass.SYNTAX_ERROR, step, str(exc)) from None
    ctx.art.problem = p
    if upto == step:
        return d, p, None

    step = "decomposition"
    text = ctx.ask(step, decomposition_prompt(p, d))
    try:
        subgoals = extract_subgoals(text, d, p)
    except UndeclaredItemError as exc:
        raise StepFailure(FailureClass.UNDECLARED_ITEM, step, str(exc)) from None
    except PddlError as exc:
        raise StepFailure(FailureClass.SYNTAX_ERROR, step, str(exc)) from None
    ctx.art.subgoals = subgoals
    return d, p, subgoals


def generate(cfg: TrialConfig, upto: str = "decomposition", trial: int = 0) -> PipelineArtifacts:
    """Run the LLM steps only; raises StepFailure on the first failing step."""
    if upto not in STEPS[:4]:
        raise ValueError(f"upto must be one of {STEPS[:4]}")
    ctx = _Context(cfg, trial)
    _generate(ctx, upto)
    return ctx.art


def _check_reference(cfg: TrialConfig, plan: list[PlanStep]) -> None:
    ref_d = assets.load_domain(cfg.domain)
    ref_p = assets.build_problem(cfg.domain, cfg.scene)
    report = validate(ref_d, ref_p, plan)
    if report.valid:
        return
    if report.reason is Reason.GOAL_UNSATISFIED:
        raise StepFailure(FailureClass.INVALID_PLAN, "planning", report.detail)
    raise StepFailure(FailureClass.INCORRECT_ACTION, "planning", report.detail)


def _plan_original(cfg: TrialConfig, d: DomainAst, p: ProblemAst, task, t_ground: float) -> tuple[list, int, float]:
    result = solve(task, cfg.search_orig)
    elapsed = t_ground + result.time
    if result.status is Status.TIMEOUT:
        raise StepFailure(FailureClass.PLANNER_TIMEOUT, "planning", f"no plan within {cfg.search_orig.timeout} s")
    if result.status is Status.UNSOLVABLE:
        raise StepFailure(FailureClass.INVALID_PLAN, "planning", "the generated problem has no solution")
    plan = [PlanStep(a.name, a.args) for a in result.plan]
    own = validate(d, p, plan)
    if not own.valid:  # planner and validator disagree: a bug, not an LLM failure
        raise AssertionError(f"planner returned a plan its own problem rejects: {own.detail}")
    _check_reference(cfg, plan)
    return plan, result.expanded, elapsed


def _plan_decomposed(cfg: TrialConfig, d: DomainAst, p: ProblemAst, subgoals, art) -> tuple[list, int, float]:
    run = autoregressive_solve(solve, d, p, subgoals, cfg.planner)
    art.decomposition = run
    if not run.solved:
        raise StepFailure(run.failure, "planning", f"sub-problem {run.failed_index}: {run.status.value}")
    verdict = verify_against_original(d, p, run)
    if not verdict.valid:
        raise StepFailure(FailureClass.DECOMPOSITION_ERROR, "planning", verdict.detail)
    _check_reference(cfg, run.concat_plan)
    return list(run.concat_plan), run.expanded, run.time


def run_pipeline(cfg: TrialConfig, trial: int = 0, artifacts: PipelineArtifacts | None = None) -> TrialReport:
    ctx = _Context(cfg, trial)
    if artifacts is not None:
        ctx.art = artifacts
    base = dict(domain=cfg.domain, scene=cfg.scene, model=cfg.model, trial=trial)
    try:
        d, p, subgoals = _generate(ctx)
        t0 = time.perf_counter()
        task = ground(d, p)
        t_ground = time.perf_counter() - t0
        if hmax(task, task.init) == INF:
            raise StepFailure(FailureClass.INVALID_PLAN, "planning", "goal unreachable in the generated problem")
    except GroundingError as exc:
        f = StepFailure(FailureClass.PLANNER_TIMEOUT, "planning", str(exc))
        return TrialReport(**base, success=False, failure_class=f.failure, failure_orig=f.failure,
                           failed_step=f.step, detail=f.detail)
    except StepFailure as f:
        return TrialReport(**base, success=False, failure_class=f.failure, failure_orig=f.failure,
                           failed_step=f.step, detail=f.detail)

    orig = dict(success_orig=True)
    try:
        plan, expanded, elapsed = _plan_original(cfg, d, p, task, t_ground)
        ctx.art.plan_orig = plan
        orig.update(plan_len_orig=len(plan), expanded_orig=expanded, time_orig=elapsed)
    except StepFailure as f:
        orig = dict(success_orig=False, failure_orig=f.failure)
        detail_orig = f"original: {f.detail}"
    else:
        detail_orig = ""

    try:
        plan, expanded, elapsed = _plan_decomposed(cfg, d, p, subgoals, ctx.art)
        ctx.art.plan_decomp = plan
    except StepFailure as f:
        detail = "; ".join(x for x in (detail_orig, f"decomposed: {f.detail}") if x)
        return TrialReport(**base, **orig, success=False, failure_class=f.failure, failed_step=f.step, detail=detail)
    return TrialReport(
        **base,
        **orig,
        success=True,
        plan_len_decomp=len(plan),
        expanded_decomp=expanded,
        time_decomp=elapsed,
        failed_step="planning" if detail_orig else None,
        detail=detail_orig,
    )
