"""Run configuration: defaults, then a JSON file, then command-line flags.

The default output directory comes from $PTQUARTIC_OUTPUT_DIR when set.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
from dataclasses import dataclass
from pathlib import Path

from .nevanlinna import EPS_QES, REAL_TOL
from .spectrum import EIGEN_TOL

OUTPUT_ENV = "PTQUARTIC_OUTPUT_DIR"
DEFAULT_OUTPUT = "ptquartic-out"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    eigen_tol: float = EIGEN_TOL
    ratio_tol: float = REAL_TOL          # |Im c| / |c| below this counts as real
    qes_threshold: float = EPS_QES       # |a| / |c| below this counts as a = 0
    radius: str | float = "auto"         # seeding radius: "auto" or a fixed R
    output_dir: str = DEFAULT_OUTPUT
    workers: int = 1

    def __post_init__(self):
        for name in ("eigen_tol", "ratio_tol", "qes_threshold"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not math.isfinite(v) or v <= 0:
                raise ConfigError(f"{name} must be a positive number, got {v!r}")
        if not isinstance(self.workers, int) or self.workers < 1:
            raise ConfigError(f"workers must be an integer >= 1, got {self.workers!r}")
        if self.radius != "auto":
            if not isinstance(self.radius, (int, float)) or not self.radius > 0:
                raise ConfigError(f"radius must be 'auto' or a positive number, got {self.radius!r}")

    @property
    def fixed_radius(self) -> float | None:
        return None if self.radius == "auto" else float(self.radius)

    @property
    def out(self) -> Path:
        return Path(self.output_dir)

    def replace(self, **changes) -> "RunConfig":
        changes = {k: v for k, v in changes.items() if v is not None}
        return dataclasses.replace(self, **changes)


def load_config(path: str | Path | None = None, env=None) -> RunConfig:
    env = os.environ if env is None else env
    base = {}
    if env.get(OUTPUT_ENV):
        base["output_dir"] = env[OUTPUT_ENV]
    if path is not None:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        known = {f.name for f in dataclasses.fields(RunConfig)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        base.update(data)
    return RunConfig(**base)
