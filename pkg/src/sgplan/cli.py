"""Command-line interface.

Exit codes: 0 on success, 1 when a plan, validation or trial failed, 2 on
usage or configuration errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .decomposer import autoregressive_solve, run_manifest, verify_against_original
from .executor import validate
from .grounder import GroundingError, ground
from .harness import assets
from .harness.pipeline import StepFailure, TrialConfig, generate
from .harness.trials import FORMATS, emit_report, load_rows, render_rows, report_rows, run_sweep
from .llm import Backend, ClientConfig, LLMError
from .pddl import PddlError, goal_sexpr, parse_domain, parse_problem, print_domain, print_problem
from .planner import HEURISTIC_NAMES, SearchConfig, format_plan, parse_plan, solve
from .scene_graph import dumps

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from None


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _domain_problem(args):
    d = parse_domain(_read(args.domain))
    return d, parse_problem(_read(args.problem), d)


def cmd_parse(args) -> int:
    text = _read(args.file)
    if args.domain:
        _write(print_problem(parse_problem(text, parse_domain(_read(args.domain)))), args.out)
    else:
        _write(print_domain(parse_domain(text)), args.out)
    return EXIT_OK


def cmd_ground(args) -> int:
    d, p = _domain_problem(args)
    task = ground(d, p)
    if args.dump:
        _write(task.dump(), args.out)
    else:
        print(f"facts {len(task.facts)}\nactions {len(task.actions)}\ngoal reached at init {task.goal_reached(task.init)}")
    return EXIT_OK


def _search_config(args) -> SearchConfig:
    return SearchConfig(heuristic=args.heuristic, timeout=args.timeout_s)


def cmd_plan(args) -> int:
    d, p = _domain_problem(args)
    result = solve(ground(d, p), _search_config(args))
    stats = f"; status {result.status.value}, expanded {result.expanded}, generated {result.generated}, time {result.time:.3f} s\n"
    if result.solved:
        _write(format_plan(result.plan) + f"; length {result.plan_length}\n" + stats, args.out)
        return EXIT_OK
    sys.stdout.write(stats)
    return EXIT_FAIL


def cmd_validate(args) -> int:
    d, p = _domain_problem(args)
    report = validate(d, p, parse_plan(_read(args.plan)))
    line = report.verdict.value
    if not report.valid:
        where = f" at step {report.failing_step}" if report.failing_step is not None else ""
        line += f" ({report.reason.value}{where}): {report.detail}"
    print(line)
    return EXIT_OK if report.valid else EXIT_FAIL


def cmd_prune(args) -> int:
    keep = assets.relevant_items(args.domain, args.scene)
    if args.out:
        Path(args.out).write_text(dumps(assets.pruned_scene(args.domain, args.scene)), encoding="utf-8")
    print("\n".join(sorted(keep)))
    return EXIT_OK


def _trial_config(args, domain: str, scene: str) -> TrialConfig:
    client = ClientConfig.load(args.config) if args.config else ClientConfig()
    model = args.model or client.model
    planner = SearchConfig(heuristic=args.heuristic, timeout=args.timeout_s)
    return TrialConfig(
        domain,
        scene,
        Backend(args.backend),
        getattr(args, "trials", 1),
        planner,
        model=model,
        fixtures=Path(args.fixtures) if args.fixtures else None,
        client=client,
    )


def _generate(args, upto: str):
    cfg = _trial_config(args, args.domain, args.scene)
    try:
        return generate(cfg, upto)
    except StepFailure as f:
        print(f"{f.step}: {f.failure.value}: {f.detail}", file=sys.stderr)
        return None


def cmd_gen_domain(args) -> int:
    art = _generate(args, "domain_generation")
    if art is None:
        return EXIT_FAIL
    _write(print_domain(art.domain), args.out)
    return EXIT_OK


def cmd_gen_problem(args) -> int:
    art = _generate(args, "problem_generation")
    if art is None:
        return EXIT_FAIL
    _write(print_problem(art.problem), args.out)
    return EXIT_OK


def cmd_decompose(args) -> int:
    art = _generate(args, "decomposition")
    if art is None:
        return EXIT_FAIL
    run = autoregressive_solve(solve, art.domain, art.problem, art.subgoals, SearchConfig(args.heuristic, args.timeout_s))
    if args.manifest:
        doc = run_manifest(art.domain, art.problem, run)
        Path(args.manifest).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    lines = [f"; sub-goal {i}: {goal_sexpr(g)}" for i, g in enumerate(art.subgoals)]
    if not run.solved:
        lines.append(f"; sub-problem {run.failed_index}: {run.status.value} ({run.failure.value})")
        print("\n".join(lines))
        return EXIT_FAIL
    verdict = verify_against_original(art.domain, art.problem, run)
    lines.append(f"; concatenated plan: {verdict.verdict.value}, length {run.plan_length}, expanded {run.expanded}")
    _write("\n".join(lines) + "\n" + format_plan(run.concat_plan), args.out)
    return EXIT_OK if verdict.valid else EXIT_FAIL


def _pairs(args):
    domains = [d for d in assets.instances()["evaluation_domains"]] if args.domain == "all" else [args.domain]
    scenes = [s for s in assets.instances()["evaluation_scenes"]] if args.scene == "all" else [args.scene]
    return [(d, s) for d in domains for s in scenes]


def _emit(aggregates, args) -> int:
    rows = report_rows(aggregates, args.times)
    _write(render_rows(rows, args.format, args.times), args.out)
    if args.figures:
        from .harness.figures import render_figures

        for path in render_figures(rows, args.figures, args.times):
            print(f"figure: {path}", file=sys.stderr)
    failed = any(r.success is False for a in aggregates for r in a.reports)
    return EXIT_FAIL if failed else EXIT_OK


def _progress(verbose: bool):
    if not verbose:
        return None

    def show(r):
        status = "ok" if r.success else r.failure_class.value
        print(f"{r.model} {r.domain} {r.scene} trial {r.trial}: {status}", file=sys.stderr)

    return show


def cmd_pipeline(args) -> int:
    pairs = _pairs(args)
    base = _trial_config(args, *pairs[0])
    return _emit(run_sweep(base, pairs, None, _progress(args.verbose)), args)


def cmd_bench(args) -> int:
    base = _trial_config(args, *assets.evaluation_pairs()[0])
    models = args.models.split(",") if args.models else None
    return _emit(run_sweep(base, assets.evaluation_pairs(), models, _progress(args.verbose)), args)


def cmd_report(args) -> int:
    try:
        rows, has_times = load_rows(_read(args.input))
    except ValueError as exc:
        raise UsageError(f"{args.input}: {exc}") from None
    _write(render_rows(rows, args.format, has_times), args.out)
    if args.figures:
        from .harness.figures import render_figures

        for path in render_figures(rows, args.figures, has_times):
            print(f"figure: {path}", file=sys.stderr)
    return EXIT_OK


def _add_search(p):
    p.add_argument("--heuristic", choices=HEURISTIC_NAMES, default="lmcut")
    p.add_argument("--timeout-s", type=float, default=60.0, help="search timeout in seconds (default 60)")


def _add_llm(p, pair=True, pair_default=None):
    if pair:
        p.add_argument("--domain", required=pair_default is None, default=pair_default,
                       choices=list(assets.DOMAINS[1:]) + (["all"] if pair_default else []))
        p.add_argument("--scene", required=pair_default is None, default=pair_default,
                       choices=list(assets.SCENES[1:]) + (["all"] if pair_default else []))
    p.add_argument("--backend", choices=[b.value for b in Backend], default="replay")
    p.add_argument("--model", help="model id (selects the fixture set in replay mode)")
    p.add_argument("--fixtures", help="fixture directory (default: bundled fixtures)")
    p.add_argument("--config", help="client config file (JSON: endpoint_url, model, temperature, top_p, request_timeout_s)")
    _add_search(p)


def _add_report(p):
    p.add_argument("--format", choices=FORMATS, default="table")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--figures", metavar="DIR", help="also render PNG figures into DIR")
    p.add_argument("--times", action="store_true", help="include wall-clock planning times")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sgplan", description="Scene-graph task planning with goal decomposition.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse a domain (or, with --domain, a problem) and print it canonically")
    p.add_argument("file")
    p.add_argument("--domain", help="domain file; FILE is then parsed as a problem")
    p.add_argument("--out")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("ground", help="ground a problem")
    p.add_argument("domain")
    p.add_argument("problem")
    p.add_argument("--dump", action="store_true", help="list every ground action")
    p.add_argument("--out")
    p.set_defaults(func=cmd_ground)

    p = sub.add_parser("plan", help="find an optimal plan")
    p.add_argument("domain")
    p.add_argument("problem")
    p.add_argument("--out")
    _add_search(p)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("validate", help="validate a plan")
    p.add_argument("domain")
    p.add_argument("problem")
    p.add_argument("plan")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("prune", help="items relevant to a bundled task in a scene")
    p.add_argument("--domain", required=True, choices=list(assets.DOMAINS))
    p.add_argument("--scene", required=True, choices=list(assets.SCENES))
    p.add_argument("--out", help="write the pruned scene document here")
    p.set_defaults(func=cmd_prune)

    for name, func, what in (
        ("gen-domain", cmd_gen_domain, "generate the domain file"),
        ("gen-problem", cmd_gen_problem, "generate the problem file"),
        ("decompose", cmd_decompose, "decompose the goal and plan the sub-problems"),
    ):
        p = sub.add_parser(name, help=what)
        _add_llm(p)
        p.add_argument("--out")
        if name == "decompose":
            p.add_argument("--manifest", help="write the run manifest (JSON) here")
        p.set_defaults(func=func)

    p = sub.add_parser("pipeline", help="run the full pipeline and report")
    _add_llm(p, pair_default="all")
    p.add_argument("--trials", type=int, default=1)
    _add_report(p)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("bench", help="full sweep over all evaluation domains and scenes")
    _add_llm(p, pair=False)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--models", help="comma-separated model ids to sweep (default: --model)")
    _add_report(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("report", help="render a structured report as table, CSV or JSON, plus figures")
    p.add_argument("--input", required=True, help="structured report from pipeline/bench --format json")
    p.add_argument("--format", choices=FORMATS, default="table")
    p.add_argument("--out")
    p.add_argument("--figures", metavar="DIR")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "trials", 1) < 1:
        parser.error("--trials must be at least 1")
    if getattr(args, "timeout_s", 1.0) <= 0:
        parser.error("--timeout-s must be positive")
    try:
        return args.func(args)
    except (UsageError, LLMError, KeyError) as exc:
        print(f"sgplan: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PddlError, GroundingError) as exc:
        print(f"sgplan: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
