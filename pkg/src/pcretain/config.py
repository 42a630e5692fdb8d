"""Run configuration, validation and run manifests."""

from __future__ import annotations

import hashlib
import json
import platform
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__
from .covest import Estimator
from .csvio import ORIENTATIONS
from .simkit import DEFAULT_MASTER_SEED, DEFAULT_ROTATION_SEED, DEFAULT_SAMPLE_SIZES, DEFAULT_SPECTRUM

MANIFEST_NAME = "manifest.json"


class ConfigError(ValueError):
    def __init__(self, problems: list[str]):
        self.problems = problems
        super().__init__("invalid configuration:\n" + "\n".join(f"  - {p}" for p in problems))


@dataclass
class RunConfig:
    command: str = "simulate"
    out_dir: str = "out"
    seed: int = DEFAULT_MASTER_SEED
    n_grid: list[int] = field(default_factory=lambda: list(DEFAULT_SAMPLE_SIZES))
    reps: int = 100
    estimators: list[str] = field(default_factory=lambda: ["MLE"])
    kgc_threshold: float = 1.0
    threshold: float = 0.80
    spdc_shrinkage: float = 0.1
    spectrum: list[float] = field(default_factory=lambda: list(DEFAULT_SPECTRUM))
    rotation_seed: int = DEFAULT_ROTATION_SEED
    workers: int = 1
    input: str | None = None
    orientation: str = "observations"
    header: bool = True
    columns: list[str] | None = None
    alpha: float = 0.05

    def validate(self) -> "RunConfig":
        problems = []
        if self.command not in COMMANDS:
            problems.append(f"command must be one of {COMMANDS}, got {self.command!r}")
        if not self.n_grid:
            problems.append("--n-grid must list at least one sample size")
        elif any(int(n) < 2 for n in self.n_grid):
            problems.append(f"--n-grid values must be >= 2, got {self.n_grid}")
        if self.reps < 1:
            problems.append(f"--reps must be >= 1, got {self.reps}")
        for name in self.estimators:
            try:
                Estimator.parse(name)
            except ValueError as exc:
                problems.append(str(exc))
        if not self.estimators:
            problems.append("at least one --estimator is required")
        if not 0.0 < self.threshold <= 1.0:
            problems.append(f"--threshold must lie in (0, 1], got {self.threshold}")
        if not 0.0 <= self.spdc_shrinkage <= 1.0:
            problems.append(f"--spdc-shrinkage must lie in [0, 1], got {self.spdc_shrinkage}")
        if not 0.0 < self.alpha < 1.0:
            problems.append(f"--alpha must lie in (0, 1), got {self.alpha}")
        if not self.spectrum or any(v < 0 for v in self.spectrum):
            problems.append("--spectrum must be a non-empty list of non-negative values")
        if self.workers < 1:
            problems.append(f"--workers must be >= 1, got {self.workers}")
        if self.orientation not in ORIENTATIONS:
            problems.append(f"--orientation must be one of {ORIENTATIONS}, got {self.orientation!r}")
        if self.command in ("anova", "retain") and not self.input:
            problems.append(f"{self.command} requires an input file")
        if self.input and not Path(self.input).is_file():
            problems.append(f"input file not found: {self.input}")
        if problems:
            raise ConfigError(problems)
        self.estimators = [Estimator.parse(e).value for e in self.estimators]
        return self

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError([f"unknown configuration keys: {unknown}"])
        return cls(**data)

    def config_hash(self) -> str:
        # out_dir does not change results
        payload = {k: v for k, v in self.to_dict().items() if k != "out_dir"}
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()


COMMANDS = ("simulate", "anova", "retain", "pareto", "compare-estimators")


def write_manifest(cfg: RunConfig, out_dir: Path, outputs: list[str], extra: dict | None = None) -> Path:
    record = {
        "tool": "pcretain",
        "version": __version__,
        "config": cfg.to_dict(),
        "config_hash": cfg.config_hash(),
        "outputs": sorted(outputs),
        "environment": {"python": platform.python_version(), "numpy": np.__version__},
    }
    if extra:
        record.update(extra)
    path = Path(out_dir) / MANIFEST_NAME
    path.write_text(json.dumps(record, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def load_manifest(path) -> RunConfig:
    try:
        record = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError([f"cannot read manifest {path}: {exc}"]) from exc
    if "config" not in record:
        raise ConfigError([f"manifest {path} has no 'config' object"])
    return RunConfig.from_dict(record["config"])
