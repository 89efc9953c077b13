"""Nonparametric bootstrap and delete-d jackknife replicate generation.

Bootstrap draws n rows with replacement; the jackknife keeps a uniform
random subset of round(fraction * n) rows (round half-up; the experiment
default deletes 10%, though d on the order of sqrt(n) is the classical
guidance for smooth statistics).  Replicate substreams are derived from
(plan seed, replicate id), so generation order and worker count never
affect the indices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .datasets import Dataset
from .rng import substream

__all__ = [
    "ResamplePlan",
    "ReplicateIndex",
    "EmptyReplicate",
    "bootstrap_indices",
    "jackknife_indices",
    "plan_replicates",
    "materialize",
]


class EmptyReplicate(ValueError):
    """The requested jackknife size rounds to zero rows."""


@dataclass(frozen=True)
class ResamplePlan:
    method: str  # "bootstrap" | "jackknife"
    replicates: int = 200
    jackknife_fraction: float = 0.9
    seed: int = 0

    def __post_init__(self):
        if self.method not in ("bootstrap", "jackknife"):
            raise ValueError(f"unknown resampling method {self.method!r}")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if not (0.0 < self.jackknife_fraction <= 1.0):
            raise ValueError("jackknife_fraction must be in (0, 1]")


@dataclass(frozen=True)
class ReplicateIndex:
    replicate_id: int
    rows: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.int64)
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)


def bootstrap_indices(n: int, rng: np.random.Generator) -> np.ndarray:
    """n i.i.d. uniform draws over [0, n)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return rng.integers(0, n, size=n)


def jackknife_indices(n: int, fraction: float, rng: np.random.Generator) -> np.ndarray:
    """Sorted uniform random subset of size round-half-up(fraction * n)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    keep = math.floor(fraction * n + 0.5)
    if keep < 1:
        raise EmptyReplicate(f"fraction {fraction} of {n} rows rounds to zero")
    return np.sort(rng.choice(n, size=keep, replace=False))


def plan_replicates(plan: ResamplePlan, n: int) -> list[ReplicateIndex]:
    """All replicate index sets for the plan, deterministic in the plan seed."""
    out = []
    for rep in range(plan.replicates):
        rng = substream(plan.seed, rep, plan.method)
        if plan.method == "bootstrap":
            rows = bootstrap_indices(n, rng)
        else:
            rows = jackknife_indices(n, plan.jackknife_fraction, rng)
        out.append(ReplicateIndex(rep, rows))
    return out


def materialize(data: Dataset, idx: ReplicateIndex) -> Dataset:
    """Row-multiset copy of `data` at the replicate's indices."""
    return data.take_rows(idx.rows)
