"""Parameter sweeps and scaling-law fits.

Sweeps run scenario configs in a process pool and append one JSON record
per config to a JSONL store, keyed by a hash of the canonical config, so
re-running a sweep resumes instead of recomputing.
"""

from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import diagnostics, profiles, solver

__all__ = [
    "SweepError",
    "SweepRecord",
    "ScalingFit",
    "config_key",
    "run_sweep",
    "fit_scaling",
    "duct_sweep_configs",
    "elastic_sweep_configs",
]


class SweepError(RuntimeError):
    pass


def config_key(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


@dataclass(frozen=True)
class SweepRecord:
    key: str
    config: dict
    t_extrap: float
    x_star: float
    r_squared: float
    status: str
    t_end: float
    s_peak: float

    def as_dict(self) -> dict:
        return {
            "key": self.key,
            "config": self.config,
            "t_extrap": self.t_extrap,
            "x_star": self.x_star,
            "r_squared": self.r_squared,
            "status": self.status,
            "t_end": self.t_end,
            "s_peak": self.s_peak,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SweepRecord":
        return cls(**d)


@dataclass(frozen=True)
class ScalingFit:
    exponent: float
    prefactor: float
    r_squared: float
    n_points: int

    def as_dict(self) -> dict:
        return {
            "exponent": self.exponent,
            "prefactor": self.prefactor,
            "r_squared": self.r_squared,
            "n_points": self.n_points,
        }


def _worker(cfg: dict) -> dict:
    scenario = profiles.scenario_from_dict(cfg)
    result = solver.run(scenario)
    est = diagnostics.estimate_blowup(result)
    return SweepRecord(
        key=config_key(cfg),
        config=cfg,
        t_extrap=est.t_extrap,
        x_star=est.x_star,
        r_squared=est.r_squared,
        status=result.status,
        t_end=result.t_end,
        s_peak=est.s_peak,
    ).as_dict()


def _load_store(path: Path) -> dict:
    records = {}
    if path.exists():
        with open(path) as f:
            for line in f:
                line = line.strip()
                if line:
                    d = json.loads(line)
                    records[d["key"]] = d
    return records


def n_workers() -> int:
    env = os.environ.get("BLOWUPLAB_THREADS")
    if env:
        return max(1, int(env))
    return max(1, (os.cpu_count() or 2) - 1)


def run_sweep(configs: Sequence[dict], store_path, max_workers: Optional[int] = None):
    """Run every config not yet in the JSONL store; return all records."""
    path = Path(store_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    have = _load_store(path)
    todo = [cfg for cfg in configs if config_key(cfg) not in have]

    if todo:
        workers = min(max_workers or n_workers(), len(todo))
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                fresh = list(pool.map(_worker, todo))
        else:
            fresh = [_worker(cfg) for cfg in todo]
        with open(path, "a") as f:
            for rec in fresh:
                f.write(json.dumps(rec, sort_keys=True) + "\n")
                have[rec["key"]] = rec

    keys = [config_key(cfg) for cfg in configs]
    return [SweepRecord.from_dict(have[k]) for k in keys]


def fit_scaling(records, x_getter, y_getter) -> ScalingFit:
    """Fit y = prefactor * x^exponent by least squares in log-log space."""
    xs = np.array([float(x_getter(r)) for r in records])
    ys = np.array([float(y_getter(r)) for r in records])
    if xs.size < 3:
        raise SweepError(f"insufficient_points: need >= 3, got {xs.size}")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise SweepError("scaling fit requires positive x and y")
    lx, ly = np.log(xs), np.log(ys)
    slope, intercept = np.polyfit(lx, ly, 1)
    pred = slope * lx + intercept
    ss_res = float(np.sum((ly - pred) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - ss_res / max(ss_tot, 1e-300)
    return ScalingFit(
        exponent=float(slope),
        prefactor=float(np.exp(intercept)),
        r_squared=r2,
        n_points=int(xs.size),
    )


def duct_sweep_configs(epsilons, alpha: float, n_cells: int = 2000):
    return [
        {
            "profile": {"kind": "duct", "epsilon": float(e), "alpha": float(alpha)},
            "run": {"n_cells": int(n_cells)},
        }
        for e in epsilons
    ]


def elastic_sweep_configs(epsilons, n_cells: int = 8000):
    return [
        {
            "profile": {"kind": "elastic", "epsilon": float(e)},
            "run": {"n_cells": int(n_cells)},
        }
        for e in epsilons
    ]
