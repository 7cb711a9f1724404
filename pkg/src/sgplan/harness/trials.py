"""Repeated trials, aggregation and report rendering."""

from __future__ import annotations

import csv
import io
import json
from collections import Counter
from dataclasses import dataclass, replace
from functools import lru_cache
from statistics import fmean

from ..failures import FailureClass
from . import assets
from .pipeline import TrialConfig, TrialReport, run_pipeline

FORMATS = ("table", "csv", "json")
NOT_APPLICABLE = "×"


@lru_cache(maxsize=None)
def ground_truth() -> dict[str, int]:
    """Cached optimal plan lengths of the bundled reference problems."""
    return json.loads(assets.read_text("gt.json"))


def _mean(values):
    values = [v for v in values if v is not None]
    return fmean(values) if values else None


@dataclass(frozen=True)
class Aggregate:
    domain: str
    scene: str
    model: str
    reports: tuple[TrialReport, ...]

    @property
    def trials(self) -> int:
        return len(self.reports)

    @property
    def gt(self) -> int | None:
        return ground_truth().get(f"{self.domain}/{self.scene}")

    def _ok(self, orig: bool):
        return [r for r in self.reports if (r.success_orig if orig else r.success)]

    @property
    def successes(self) -> int:
        return len(self._ok(False))

    @property
    def successes_orig(self) -> int:
        return len(self._ok(True))

    @property
    def success_rate(self) -> float:
        return self.successes / self.trials if self.trials else 0.0

    @property
    def success_rate_orig(self) -> float:
        return self.successes_orig / self.trials if self.trials else 0.0

    def mean(self, metric: str, orig: bool):
        """Mean of ``metric`` over the trials that succeeded on that side; None if there are none."""
        field = f"{metric}_{'orig' if orig else 'decomp'}"
        return _mean(getattr(r, field) for r in self._ok(orig))

    @property
    def failures(self) -> Counter:
        return Counter(r.failure_class for r in self.reports if not r.success)

    @property
    def failures_orig(self) -> Counter:
        return Counter(r.failure_orig for r in self.reports if not r.success_orig)


def run_trials(cfg: TrialConfig, progress=None) -> Aggregate:
    reports = []
    for k in range(cfg.trials):
        reports.append(run_pipeline(cfg, trial=k))
        if progress:
            progress(reports[-1])
    return Aggregate(cfg.domain, cfg.scene, cfg.model, tuple(reports))


def run_sweep(base: TrialConfig, pairs=None, models=None, progress=None) -> list[Aggregate]:
    out = []
    for model in models or [base.model]:
        for domain, scene in pairs or assets.evaluation_pairs():
            out.append(run_trials(replace(base, domain=domain, scene=scene, model=model), progress))
    return out


# Reports.

COLUMNS = (
    "domain",
    "scene",
    "model",
    "trials",
    "success_orig",
    "success_decomp",
    "length_orig",
    "length_decomp",
    "length_gt",
    "time_orig",
    "time_decomp",
    "expanded_orig",
    "expanded_decomp",
    "failures_orig",
    "failures_decomp",
)
TIME_COLUMNS = ("time_orig", "time_decomp")


def _counts(counter: Counter) -> str:
    return ";".join(f"{k.value}={v}" for k, v in sorted(counter.items(), key=lambda kv: kv[0].value))


def _order(a: Aggregate):
    return (
        a.model,
        assets.DOMAINS.index(a.domain) if a.domain in assets.DOMAINS else len(assets.DOMAINS),
        a.domain,
        assets.SCENES.index(a.scene) if a.scene in assets.SCENES else len(assets.SCENES),
        a.scene,
    )


def report_rows(aggregates, include_times: bool = False) -> list[dict]:
    """One dict per aggregate with raw values (None where not applicable)."""
    rows = []
    for a in sorted(aggregates, key=_order):
        row = {
            "domain": a.domain,
            "scene": a.scene,
            "model": a.model,
            "trials": a.trials,
            "success_orig": 100.0 * a.success_rate_orig,
            "success_decomp": 100.0 * a.success_rate,
            "length_orig": a.mean("plan_len", True),
            "length_decomp": a.mean("plan_len", False),
            "length_gt": a.gt,
            "time_orig": a.mean("time", True),
            "time_decomp": a.mean("time", False),
            "expanded_orig": a.mean("expanded", True),
            "expanded_decomp": a.mean("expanded", False),
            "failures_orig": _counts(a.failures_orig),
            "failures_decomp": _counts(a.failures),
        }
        if not include_times:
            for c in TIME_COLUMNS:
                del row[c]
        rows.append(row)
    return rows


def _cell(value, missing: str) -> str:
    if value is None:
        return missing
    if isinstance(value, float):
        if value.is_integer():
            return str(int(value))
        return f"{value:.4f}" if abs(value) < 10 else f"{value:.2f}"
    return str(value)


def render_rows(rows: list[dict], fmt: str, include_times: bool = False) -> str:
    if fmt not in FORMATS:
        raise ValueError(f"unsupported report format {fmt!r}; choose from {', '.join(FORMATS)}")
    columns = [c for c in COLUMNS if include_times or c not in TIME_COLUMNS]
    if fmt == "json":
        return json.dumps({"columns": columns, "rows": rows}, indent=2, ensure_ascii=False) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row.get(c), "") for c in columns])
        return buf.getvalue()
    cells = [columns] + [[_cell(row.get(c), NOT_APPLICABLE) for c in columns] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(columns))]
    lines = ["  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def emit_report(aggregates, fmt: str = "table", include_times: bool = False) -> str:
    return render_rows(report_rows(aggregates, include_times), fmt, include_times)


def load_rows(text: str) -> tuple[list[dict], bool]:
    """Rows and the include-times flag from a structured report."""
    doc = json.loads(text)
    if not isinstance(doc, dict) or "rows" not in doc or "columns" not in doc:
        raise ValueError("not a structured report")
    return doc["rows"], all(c in doc["columns"] for c in TIME_COLUMNS)


def failure_classes() -> list[str]:
    return [f.value for f in FailureClass]
