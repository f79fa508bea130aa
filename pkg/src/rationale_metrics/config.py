"""Run configuration: defaults, config-file loading, CLI merging."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields
from pathlib import Path

OUTDIR_ENV = "RATIONALE_METRICS_OUTDIR"

DEFAULT_TAU = 0.95
DEFAULT_ALPHA = 1.0
DEFAULT_PERMUTATIONS = 199
DEFAULT_DRAWS = 10
DEFAULT_BUDGETS = (1, 2, 3, 4, 5)


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    alpha: float = DEFAULT_ALPHA
    tau: float = DEFAULT_TAU
    permutations: int = DEFAULT_PERMUTATIONS
    draws: int = DEFAULT_DRAWS
    budgets: tuple[int, ...] = DEFAULT_BUDGETS
    quartile_method: str = "linear"
    min_votes: int = 2
    corr_permutations: int = 9999
    jobs: int = 1
    out_dir: str = ""

    def validate(self) -> None:
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.alpha <= 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if not 0 < self.tau <= 1:
            raise ValueError(f"tau must be in (0, 1], got {self.tau}")
        if self.permutations < 1:
            raise ValueError(f"permutations must be >= 1, got {self.permutations}")
        if self.draws < 1:
            raise ValueError(f"draws must be >= 1, got {self.draws}")
        if not self.budgets or any(b < 1 for b in self.budgets):
            raise ValueError(f"budgets must be a non-empty list of counts >= 1, got {self.budgets}")
        if self.min_votes < 1:
            raise ValueError(f"min_votes must be >= 1, got {self.min_votes}")
        if self.corr_permutations < 1:
            raise ValueError(f"corr_permutations must be >= 1, got {self.corr_permutations}")
        if self.jobs < 1:
            raise ValueError(f"jobs must be >= 1, got {self.jobs}")

    def echo(self) -> dict:
        """Flat dict for report headers; keys sorted for stable output.

        Excludes jobs and out_dir: execution details the results must not
        depend on, so they must not vary report bytes either.
        """
        out = {}
        for f in fields(self):
            if f.name in ("jobs", "out_dir"):
                continue
            value = getattr(self, f.name)
            if isinstance(value, tuple):
                value = list(value)
            out[f.name] = value
        return {k: out[k] for k in sorted(out)}


def load_config_file(path: str | Path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise ValueError(f"config file not found: {path}")
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"config file {path} is not valid JSON: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise ValueError(f"config file {path} must hold a JSON object")
    known = {f.name for f in fields(RunConfig)}
    unknown = set(obj) - known
    if unknown:
        raise ValueError(f"config file {path} has unknown keys: {sorted(unknown)}")
    if "budgets" in obj:
        obj["budgets"] = tuple(int(b) for b in obj["budgets"])
    return obj


def build_config(cli_overrides: dict, config_path: str | Path | None = None) -> RunConfig:
    """Defaults < config file < CLI flags; validates the merged result."""
    values: dict = {}
    if config_path is not None:
        values.update(load_config_file(config_path))
    values.update({k: v for k, v in cli_overrides.items() if v is not None})
    if not values.get("out_dir"):
        values["out_dir"] = os.environ.get(OUTDIR_ENV, "reports")
    if "budgets" in values:
        values["budgets"] = tuple(int(b) for b in values["budgets"])
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg
