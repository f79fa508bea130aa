"""Deterministic report emission: JSON/CSV with provenance headers, plot-data
CSV export, and matplotlib figure rendering for the report path.

Reports never embed timestamps; identical inputs, config and seed produce
byte-identical files regardless of parallelism.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from . import __version__

TOOL_NAME = "rationale-metrics"

PLOT_KINDS = ("alignment", "budget_sweep")


class ReportKindError(ValueError):
    """Plot export requested for a report kind with no exporter."""


def _jsonable(value):
    if isinstance(value, Mapping):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if hasattr(value, "item"):  # numpy scalar
        return _jsonable(value.item())
    return value


def _fmt_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return repr(value)
    return str(value)


class ReportWriter:
    """Writes report files under one directory with a shared provenance header."""

    def __init__(self, out_dir: str | Path, subcommand: str, config_echo: dict) -> None:
        self.out_dir = Path(out_dir)
        self.subcommand = subcommand
        self.config_echo = config_echo
        self.written: list[Path] = []

    def _meta(self) -> dict:
        return {
            "tool": TOOL_NAME,
            "version": __version__,
            "subcommand": self.subcommand,
            "seed": self.config_echo.get("seed"),
            "config": self.config_echo,
        }

    def _header_lines(self) -> list[str]:
        return [
            f"# tool: {TOOL_NAME} {__version__}",
            f"# subcommand: {self.subcommand}",
            f"# seed: {self.config_echo.get('seed')}",
            f"# config: {json.dumps(self.config_echo, sort_keys=True)}",
        ]

    def write_json(self, name: str, kind: str, payload: dict) -> Path:
        doc = {"kind": kind, "meta": self._meta()}
        doc.update(payload)
        path = self.out_dir / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(_jsonable(doc), indent=2) + "\n", encoding="utf-8")
        self.written.append(path)
        return path

    def write_csv(self, name: str, columns: Sequence[str], rows: Sequence[Sequence]) -> Path:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt_cell(v) for v in row])
        path = self.out_dir / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(self._header_lines()) + "\n" + buf.getvalue(), encoding="utf-8")
        self.written.append(path)
        return path

    def write_schema_sidecar(self, csv_path: Path, columns: Mapping[str, str]) -> Path:
        doc = {
            "file": csv_path.name,
            "columns": [{"name": k, "description": v} for k, v in columns.items()],
        }
        path = csv_path.with_suffix(csv_path.suffix + ".schema.json")
        path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
        self.written.append(path)
        return path


def load_report(path: str | Path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise ValueError(f"report file not found: {path}")
    doc = json.loads(path.read_text(encoding="utf-8"))
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ReportKindError(f"{path} is not a report file (missing 'kind')")
    return doc


def _save_figure(fig, path: Path) -> Path:
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
    return path


def export_alignment(report: dict, writer: ReportWriter) -> list[Path]:
    """One scatter CSV + PNG per metric panel: metric delta vs preference rate."""
    out: list[Path] = []
    schema = {
        "pair_id": "model pair identifier 'A|B' (A lexicographically first)",
        "delta_metric": "metric(A) - metric(B)",
        "preference_rate": "fraction of pair judgments preferring A",
    }
    for metric in sorted(report.get("metrics", {})):
        entry = report["metrics"][metric] or {}
        points = entry.get("points", [])
        rows = [(p["pair_id"], p["delta_metric"], p["preference_rate"]) for p in points]
        csv_path = writer.write_csv(f"plot_align_{metric}.csv",
                                    ("pair_id", "delta_metric", "preference_rate"), rows)
        writer.write_schema_sidecar(csv_path, schema)
        out.append(csv_path)

        fig, ax = plt.subplots(figsize=(4.2, 3.4))
        if rows:
            ax.scatter([r[1] for r in rows], [r[2] for r in rows], s=22, alpha=0.85)
        ax.axhline(0.5, color="grey", lw=0.8, ls="--")
        ax.axvline(0.0, color="grey", lw=0.8, ls="--")
        corr = entry.get("correlation") or {}
        title = metric
        if corr.get("pearson_r") is not None:
            title += f"  (r={corr['pearson_r']:.3f}, p={corr['p_value']:.3f})"
        ax.set_title(title, fontsize=10)
        ax.set_xlabel("metric delta (A - B)")
        ax.set_ylabel("preference rate for A")
        fig.tight_layout()
        fig_path = _save_figure(fig, writer.out_dir / f"fig_align_{metric}.png")
        writer.written.append(fig_path)
        out.append(fig_path)
    return out


def export_budget_sweep(report: dict, writer: ReportWriter) -> list[Path]:
    """Long-format coverage-vs-budget CSV plus one two-panel figure."""
    rows = []
    for entry in report.get("rows", []):
        for cell in entry.get("cells", []):
            rows.append((entry["backend"], entry["generator"], cell["budget"],
                         cell["r_avg_mean"], cell["r_max_mean"]))
    csv_path = writer.write_csv("plot_budget_coverage.csv",
                                ("backend", "generator", "B", "r_avg", "r_max"), rows)
    writer.write_schema_sidecar(csv_path, {
        "backend": "embedding backend id",
        "generator": "rationale generator id",
        "B": "selection budget (number of sources or rationales)",
        "r_avg": "mean average coverage radius over inputs",
        "r_max": "mean worst-case coverage radius over inputs",
    })
    out = [csv_path]

    fig, axes = plt.subplots(1, 2, figsize=(8.0, 3.4), sharex=True)
    for entry in report.get("rows", []):
        budgets = [c["budget"] for c in entry["cells"]]
        label = f"{entry['backend']}/{entry['generator']}"
        axes[0].plot(budgets, [c["r_avg_mean"] for c in entry["cells"]], marker="o", label=label)
        axes[1].plot(budgets, [c["r_max_mean"] for c in entry["cells"]], marker="o", label=label)
    axes[0].set_ylabel("r_avg")
    axes[1].set_ylabel("r_max")
    for ax in axes:
        ax.set_xlabel("budget B")
    if report.get("rows"):
        axes[0].legend(fontsize=7)
    fig.tight_layout()
    fig_path = _save_figure(fig, writer.out_dir / "fig_budget_coverage.png")
    writer.written.append(fig_path)
    out.append(fig_path)
    return out


def export_plot_data(report: dict, writer: ReportWriter) -> list[Path]:
    kind = report.get("kind")
    if kind == "alignment":
        return export_alignment(report, writer)
    if kind == "budget_sweep":
        return export_budget_sweep(report, writer)
    raise ReportKindError(f"no plot exporter for report kind {kind!r}; "
                          f"supported kinds: {', '.join(PLOT_KINDS)}")
