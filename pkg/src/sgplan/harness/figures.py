"""Figures for a report: expanded nodes, success rates, plan lengths, failures."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from ..failures import FailureClass  # noqa: E402


def _label(row: dict) -> str:
    return f"{row['domain']}\n{row['scene']}\n{row['model']}"


def _bars(ax, rows, series, ylabel, log=False):
    n = len(series)
    width = 0.8 / n
    xs = range(len(rows))
    for k, (key, name) in enumerate(series):
        vals = [row.get(key) or 0 for row in rows]
        ax.bar([x + (k - (n - 1) / 2) * width for x in xs], vals, width, label=name)
    ax.set_xticks(list(xs))
    ax.set_xticklabels([_label(r) for r in rows], fontsize=7)
    ax.set_ylabel(ylabel)
    if log:
        ax.set_yscale("log")
    ax.legend()


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
    return path


def render_figures(rows: list[dict], outdir, include_times: bool = False) -> list[Path]:
    """Write PNG figures for ``rows`` into ``outdir`` and return their paths."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    width = max(6.0, 1.2 * len(rows))
    paths = []

    fig, ax = plt.subplots(figsize=(width, 4))
    _bars(ax, rows, [("expanded_orig", "original"), ("expanded_decomp", "decomposed")], "expanded nodes", log=True)
    ax.set_title("Expanded nodes (mean over successful trials)")
    paths.append(_save(fig, out / "expanded_nodes.png"))

    fig, ax = plt.subplots(figsize=(width, 4))
    _bars(ax, rows, [("success_orig", "original"), ("success_decomp", "decomposed")], "success rate (%)")
    ax.set_ylim(0, 105)
    ax.set_title("Success rate")
    paths.append(_save(fig, out / "success_rate.png"))

    fig, ax = plt.subplots(figsize=(width, 4))
    _bars(
        ax,
        rows,
        [("length_orig", "original"), ("length_decomp", "decomposed"), ("length_gt", "optimal")],
        "plan length",
    )
    ax.set_title("Plan length")
    paths.append(_save(fig, out / "plan_length.png"))

    fig, ax = plt.subplots(figsize=(width, 4))
    bottom = [0] * len(rows)
    for fc in FailureClass:
        counts = [_count(row["failures_decomp"], fc.value) for row in rows]
        if any(counts):
            ax.bar(range(len(rows)), counts, 0.6, bottom=bottom, label=fc.value)
            bottom = [b + c for b, c in zip(bottom, counts)]
    successes = [round(row["success_decomp"] * row["trials"] / 100) for row in rows]
    ax.bar(range(len(rows)), successes, 0.6, bottom=bottom, label="success", color="lightgrey")
    ax.set_xticks(list(range(len(rows))))
    ax.set_xticklabels([_label(r) for r in rows], fontsize=7)
    ax.set_ylabel("trials")
    ax.set_title("Trial outcomes (decomposed pipeline)")
    ax.legend(fontsize=7)
    paths.append(_save(fig, out / "failures.png"))

    if include_times:
        fig, ax = plt.subplots(figsize=(width, 4))
        _bars(ax, rows, [("time_orig", "original"), ("time_decomp", "decomposed")], "planning time (s)", log=True)
        ax.set_title("Planning time (mean over successful trials)")
        paths.append(_save(fig, out / "planning_time.png"))
    return paths


def _count(cell: str, name: str) -> int:
    for part in filter(None, cell.split(";")):
        key, _, value = part.partition("=")
        if key == name:
            return int(value)
    return 0
