"""Pull planning files, sub-goals and item lists out of free-form model output."""

from __future__ import annotations

import re

from ..pddl import DomainAst, GoalFormula, ProblemAst, parse_goal
from ..pddl.errors import PddlSyntaxError

_FENCE = re.compile(r"```[^\n`]*\n(.*?)```", re.DOTALL)


class NoPlanningFileFound(ValueError):
    pass


def _balanced(text: str) -> bool:
    depth = 0
    for ch in _strip_comments(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                return False
    return depth == 0


def _strip_comments(text: str) -> str:
    return "\n".join(line.split(";", 1)[0] for line in text.splitlines())


def fenced_blocks(text: str) -> list[str]:
    return [m.group(1).strip() for m in _FENCE.finditer(text)]


def top_level_sexprs(text: str) -> list[str]:
    """Balanced top-level parenthesised expressions, in order. Comments are ignored."""
    out = []
    clean = _strip_comments(text)
    depth = 0
    start = None
    for i, ch in enumerate(clean):
        if ch == "(":
            if depth == 0:
                start = i
            depth += 1
        elif ch == ")" and depth:
            depth -= 1
            if depth == 0:
                out.append(clean[start : i + 1])
    return out


def extract_pddl(text: str) -> list[str]:
    """Planning-file sources found in ``text``.

    Fenced code blocks that contain a balanced ``(define ...)`` win; without
    them, the raw text is scanned for balanced expressions starting with
    ``(define``.
    """
    found = [b for b in fenced_blocks(text) if b.lstrip().lower().startswith("(define") and _balanced(b)]
    if found:
        return found
    found = [s for s in top_level_sexprs(text) if re.match(r"\(\s*define\b", s, re.IGNORECASE)]
    if not found:
        raise NoPlanningFileFound("no planning file in model output")
    return found


def extract_one(text: str, kind: str) -> str:
    """The first extracted file that declares ``(domain ...)`` or ``(problem ...)``."""
    files = extract_pddl(text)
    pattern = re.compile(r"\(\s*define\s*\(\s*" + kind + r"\b", re.IGNORECASE)
    for f in files:
        if pattern.match(f):
            return f
    raise NoPlanningFileFound(f"no {kind} file in model output")


def extract_subgoals(text: str, d: DomainAst, p: ProblemAst) -> list[GoalFormula]:
    """Sub-goals, one top-level conjunction or literal each, parsed against ``p``."""
    blocks = fenced_blocks(text)
    source = "\n".join(blocks) if blocks else text
    exprs = top_level_sexprs(source)
    if not exprs:
        raise PddlSyntaxError("no sub-goals in model output")
    return [parse_goal(e if e.lstrip("( ").lower().startswith(("and", ":goal")) else f"(and {e})", d, p) for e in exprs]


_ITEM = re.compile(r"[A-Za-z][A-Za-z0-9_\-]*")


def extract_item_ids(text: str) -> list[str]:
    """Item ids from a pruning answer: one per line, bullets and commas tolerated."""
    blocks = fenced_blocks(text)
    source = "\n".join(blocks) if blocks else text
    ids = []
    for line in source.splitlines():
        for token in re.split(r"[,\s]+", line.strip().lstrip("-*").strip()):
            if _ITEM.fullmatch(token) and token.lower() not in ids:
                ids.append(token.lower())
    return ids
