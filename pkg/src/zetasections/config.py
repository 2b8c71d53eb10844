"""Run configuration: JSON file, then ZC_* environment overrides, then flags."""
from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from .special import Tolerance
from .tracker import TrackerConfig


@dataclass(frozen=True)
class RunConfig:
    abs_eps: float = 1e-12
    rel_eps: float = 0.0
    max_iter: int = 60
    collision_eps_factor: float = 0.05
    online_eps: float = 1e-6
    min_interval_len: int = 3
    tau_step: float = 0.125
    min_tau_step: float = 1.0 / 4096
    worker_count: int = 1
    output_dir: str = "out"
    seed: int = 0

    def __post_init__(self):
        for name in ("abs_eps", "collision_eps_factor", "online_eps", "tau_step", "min_tau_step"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.rel_eps < 0:
            raise ValueError("rel_eps must be non-negative")
        if self.max_iter < 1 or self.min_interval_len < 1:
            raise ValueError("max_iter and min_interval_len must be >= 1")
        if self.worker_count < 1:
            raise ValueError("worker_count must be >= 1")

    @property
    def tolerance(self) -> Tolerance:
        return Tolerance(self.abs_eps, self.rel_eps, self.max_iter)

    @property
    def tracker(self) -> TrackerConfig:
        return TrackerConfig(tau_step=self.tau_step, min_tau_step=self.min_tau_step,
                             online_eps=self.online_eps,
                             collision_eps_factor=self.collision_eps_factor,
                             newton_max_iter=self.max_iter)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def load(cls, path=None, env=None, **overrides) -> "RunConfig":
        """Defaults < JSON file < ZC_<FIELD> environment variables < overrides."""
        env = os.environ if env is None else env
        values = {}
        if path is not None:
            data = json.loads(Path(path).read_text())
            unknown = set(data) - {f.name for f in fields(cls)}
            if unknown:
                raise ValueError(f"unknown config keys: {sorted(unknown)}")
            values.update(data)
        for f in fields(cls):
            key = "ZC_" + f.name.upper()
            if key in env:
                values[f.name] = env[key]
        values.update({k: v for k, v in overrides.items() if v is not None})
        types = {f.name: type(f.default) for f in fields(cls)}
        return replace(cls(), **{k: types[k](v) for k, v in values.items()})
