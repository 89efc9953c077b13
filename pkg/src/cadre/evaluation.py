"""Forecast evaluation: Brier score, Murphy decomposition with
bias-corrected reliability, and calibration curves.

A forecast/outcome record is one (pair, relation) cell of a forecast
table scored against the reference graph: the forecast is the vote
proportion, the outcome is 1 iff the reference relation of the pair is
that relation.  By default all four relation cells enter (so "no edge" is
a scored forecast too); positive_only restricts to the three edge-present
relations.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .ensemble import ForecastTable
from .graphs import (
    AnyGraph,
    Cpdag,
    Dag,
    GraphError,
    PairRelation,
    dag_to_cpdag,
    iter_pairs,
    relation_vector,
)

__all__ = [
    "ForecastOutcomeSet",
    "BrierDecomposition",
    "CalibrationCurve",
    "outcomes_from_truth",
    "brier_score",
    "murphy_decomposition",
    "calibration_curve",
    "write_calibration_csv",
]


@dataclass(frozen=True)
class ForecastOutcomeSet:
    forecasts: np.ndarray  # float64 in [0, 1]
    outcomes: np.ndarray  # 0/1

    def __post_init__(self):
        f = np.asarray(self.forecasts, dtype=np.float64)
        o = np.asarray(self.outcomes, dtype=np.float64)
        if f.ndim != 1 or f.shape != o.shape:
            raise ValueError("forecasts and outcomes must be 1-D with equal length")
        if f.size < 1:
            raise ValueError("at least one record required")
        if f.min() < 0.0 or f.max() > 1.0:
            raise ValueError("forecasts must lie in [0, 1]")
        if not np.all((o == 0) | (o == 1)):
            raise ValueError("outcomes must be 0 or 1")
        f.setflags(write=False)
        o.setflags(write=False)
        object.__setattr__(self, "forecasts", f)
        object.__setattr__(self, "outcomes", o)

    @property
    def n(self) -> int:
        return self.forecasts.size

    @staticmethod
    def concatenate(sets: list["ForecastOutcomeSet"]) -> "ForecastOutcomeSet":
        return ForecastOutcomeSet(
            np.concatenate([s.forecasts for s in sets]),
            np.concatenate([s.outcomes for s in sets]),
        )


@dataclass(frozen=True)
class BrierDecomposition:
    brier: float
    reliability: float
    resolution: float
    uncertainty: float
    reliability_corrected: float
    group_forecasts: np.ndarray  # distinct forecast values f_k
    group_sizes: np.ndarray  # n_k
    group_frequencies: np.ndarray  # observed frequency per group


@dataclass(frozen=True)
class CalibrationCurve:
    edges: np.ndarray  # length bins + 1
    mean_forecast: np.ndarray  # NaN for empty bins
    observed_frequency: np.ndarray  # NaN for empty bins
    count: np.ndarray


def outcomes_from_truth(forecasts: ForecastTable, truth: AnyGraph,
                        compare: str = "cpdag",
                        positive_only: bool = False) -> ForecastOutcomeSet:
    """Score every (pair, relation) cell against the reference graph.

    compare="cpdag" (default) references the truth's pattern; "dag"
    references the DAG itself, which treats a correctly adjacent but
    undirected estimate of a reversible edge as wrong.
    """
    if compare not in ("cpdag", "dag"):
        raise ValueError("compare must be 'cpdag' or 'dag'")
    if forecasts.node_labels != truth.node_labels:
        raise GraphError("forecast table and truth cover different node sets")
    reference: AnyGraph = truth
    if compare == "cpdag" and isinstance(truth, Dag):
        reference = dag_to_cpdag(truth)
    true_rel = relation_vector(reference)
    relations = [r for r in PairRelation if not (positive_only and r == PairRelation.ABSENT)]
    f_cols = [forecasts.proportions[:, r] for r in relations]
    o_cols = [(true_rel == r).astype(np.float64) for r in relations]
    return ForecastOutcomeSet(np.concatenate(f_cols), np.concatenate(o_cols))


def brier_score(records: ForecastOutcomeSet) -> float:
    """Mean squared error between forecasts and outcomes; in [0, 1]."""
    return float(np.mean((records.forecasts - records.outcomes) ** 2))


def murphy_decomposition(records: ForecastOutcomeSet) -> BrierDecomposition:
    """Group by exact distinct forecast value and decompose the Brier score
    as reliability - resolution + uncertainty.

    reliability            (1/n) sum_k n_k (f_k - obar_k)^2
    resolution             (1/n) sum_k n_k (obar_k - obar)^2
    uncertainty            obar (1 - obar)
    corrected reliability  reliability - (1/n) sum_k n_k obar_k (1-obar_k)/(n_k-1),
                           with the k-th term taken as 0 when n_k = 1.
    """
    f, o = records.forecasts, records.outcomes
    n = records.n
    values, inverse = np.unique(f, return_inverse=True)
    sizes = np.bincount(inverse).astype(np.float64)
    freq = np.bincount(inverse, weights=o) / sizes
    obar = float(np.mean(o))
    reliability = float(np.sum(sizes * (values - freq) ** 2) / n)
    resolution = float(np.sum(sizes * (freq - obar) ** 2) / n)
    uncertainty = obar * (1.0 - obar)
    with np.errstate(divide="ignore", invalid="ignore"):
        bias_terms = np.where(sizes > 1, sizes * freq * (1 - freq) / (sizes - 1), 0.0)
    corrected = reliability - float(np.sum(bias_terms) / n)
    return BrierDecomposition(
        brier=brier_score(records),
        reliability=reliability,
        resolution=resolution,
        uncertainty=uncertainty,
        reliability_corrected=corrected,
        group_forecasts=values,
        group_sizes=sizes.astype(np.int64),
        group_frequencies=freq,
    )


def calibration_curve(records: ForecastOutcomeSet, bins: int = 10) -> CalibrationCurve:
    """Equal-width bins on [0, 1], right-closed except the first bin.

    Empty bins are reported with count 0 and NaN means."""
    if bins < 1:
        raise ValueError("bins must be >= 1")
    f, o = records.forecasts, records.outcomes
    idx = np.clip(np.ceil(f * bins).astype(np.int64) - 1, 0, bins - 1)
    count = np.bincount(idx, minlength=bins).astype(np.int64)
    sum_f = np.bincount(idx, weights=f, minlength=bins)
    sum_o = np.bincount(idx, weights=o, minlength=bins)
    with np.errstate(divide="ignore", invalid="ignore"):
        mean_f = np.where(count > 0, sum_f / count, np.nan)
        mean_o = np.where(count > 0, sum_o / count, np.nan)
    return CalibrationCurve(
        edges=np.linspace(0.0, 1.0, bins + 1),
        mean_forecast=mean_f,
        observed_frequency=mean_o,
        count=count,
    )


def write_calibration_csv(curve: CalibrationCurve) -> str:
    buf = io.StringIO()
    buf.write("bin_low,bin_high,mean_forecast,observed_frequency,count\n")
    for k in range(curve.count.size):
        mf = "" if np.isnan(curve.mean_forecast[k]) else f"{curve.mean_forecast[k]:.17g}"
        mo = ("" if np.isnan(curve.observed_frequency[k])
              else f"{curve.observed_frequency[k]:.17g}")
        buf.write(f"{curve.edges[k]:.17g},{curve.edges[k + 1]:.17g},"
                  f"{mf},{mo},{curve.count[k]}\n")
    return buf.getvalue()
