"""Configuration-driven simulation campaigns.

A campaign sweeps sample sizes and repetitions for one study kind.  Every
(size, repetition, method) run regenerates its model and data from seeds
derived by key, so outputs are byte-identical across worker counts and
scheduling orders.  Per-run failures are recorded with a failure marker
and the campaign continues.

Outputs in the campaign directory:

  runs.csv         one row per run (metrics + status + wall time)
  summary.csv      per (sample_size, method) means over successful runs
  calibration.csv  pooled calibration-curve bins per (sample_size, method)
"""

from __future__ import annotations

import concurrent.futures
import csv
import io
import os
import time
from dataclasses import dataclass, field, replace

import numpy as np
import yaml

from .bn import parse_bif, sample_bn
from .datasets import Dataset
from .ensemble import ensemble_graph, forecast_table, tally_votes
from .evaluation import (
    ForecastOutcomeSet,
    calibration_curve,
    murphy_decomposition,
    outcomes_from_truth,
)
from .ges import run_ges
from .graphs import Dag, confusion_counts, dag_to_cpdag, shd
from .resampling import ResamplePlan, materialize, plan_replicates
from .rng import key_to_entropy
from .scoring import ScoreConfig
from .sem import RandomDagSpec, draw_sem_parameters, random_forward_dag, simulate_sem

__all__ = ["CampaignConfig", "RunRecord", "run_campaign", "emit_plot_data"]

METRIC_FIELDS = (
    "shd",
    "adjacency_precision",
    "adjacency_recall",
    "arrowhead_precision",
    "arrowhead_recall",
    "brier",
    "reliability",
    "reliability_corrected",
    "resolution",
    "uncertainty",
)

_CONFIG_FIELDS: dict[str, object] = {
    "study": None,
    "out_dir": None,
    "model_path": None,
    "nodes": None,
    "edges": None,
    "sample_sizes": None,
    "repetitions": None,
    "methods": None,
    "replicates": 200,
    "jackknife_fraction": 0.9,
    "penalty_discount": 2.0,
    "seed": 0,
    "workers": 1,
    "calibration_bins": 10,
    "compare": "cpdag",
    "positive_only": False,
    "emit_replicate_indices": False,
}


@dataclass(frozen=True)
class CampaignConfig:
    study: str  # "linear-gaussian" | "expert-bif"
    out_dir: str
    model_path: str | None = None
    nodes: int | None = None
    edges: int | None = None
    sample_sizes: tuple[int, ...] = tuple(range(100, 1001, 100))
    repetitions: int | None = None
    methods: tuple[str, ...] = ("none", "bootstrap", "jackknife")
    replicates: int = 200
    jackknife_fraction: float = 0.9
    penalty_discount: float = 2.0
    seed: int = 0
    workers: int = 1
    calibration_bins: int = 10
    compare: str = "cpdag"
    positive_only: bool = False
    emit_replicate_indices: bool = False

    def __post_init__(self):
        if self.study not in ("linear-gaussian", "expert-bif"):
            raise ValueError(f"unknown study kind {self.study!r}")
        if self.study == "expert-bif" and not self.model_path:
            raise ValueError("expert-bif studies require model_path")
        if self.study == "linear-gaussian" and (self.nodes is None or self.edges is None):
            raise ValueError("linear-gaussian studies require nodes and edges")
        if self.repetitions is None:
            # Experiment defaults: 500 random-model pairs, 100 expert data sets.
            reps = 500 if self.study == "linear-gaussian" else 100
            object.__setattr__(self, "repetitions", reps)
        sizes = tuple(int(s) for s in self.sample_sizes)
        if any(s < 1 for s in sizes) or any(a >= b for a, b in zip(sizes, sizes[1:])):
            raise ValueError("sample_sizes must be positive and strictly increasing")
        object.__setattr__(self, "sample_sizes", sizes)
        object.__setattr__(self, "methods", tuple(self.methods))
        for m in self.methods:
            if m not in ("none", "bootstrap", "jackknife"):
                raise ValueError(f"unknown method {m!r}")
        if self.repetitions < 1 or self.replicates < 1 or self.workers < 1:
            raise ValueError("counts must be positive")

    @classmethod
    def from_yaml(cls, text: str) -> "CampaignConfig":
        raw = yaml.safe_load(text)
        if not isinstance(raw, dict):
            raise ValueError("campaign config must be a mapping")
        unknown = set(raw) - set(_CONFIG_FIELDS)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        kwargs = {}
        for key, value in raw.items():
            if key in ("sample_sizes", "methods"):
                value = tuple(value)
            kwargs[key] = value
        return cls(**kwargs)


@dataclass(frozen=True)
class RunRecord:
    study: str
    sample_size: int
    repetition: int
    method: str
    seed: int
    status: str  # "ok" | "failed: <reason>"
    metrics: dict[str, float]
    wall_time_s: float

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def _derive_seed(*key) -> int:
    return int(np.random.SeedSequence(key_to_entropy(key)).generate_state(1)[0])


_BN_CACHE: dict[str, object] = {}


def _load_bn(path: str):
    bn = _BN_CACHE.get(path)
    if bn is None:
        with open(path, "r", encoding="utf-8") as fh:
            bn = parse_bif(fh.read())
        _BN_CACHE[path] = bn
    return bn


def _generate(config: CampaignConfig, size: int, rep: int) -> tuple[Dag, Dataset]:
    if config.study == "linear-gaussian":
        graph_seed = _derive_seed(config.seed, size, rep, "graph")
        dag = random_forward_dag(RandomDagSpec(config.nodes, config.edges, graph_seed))
        sem = draw_sem_parameters(dag, seed=_derive_seed(config.seed, size, rep, "params"))
        data = simulate_sem(sem, size, seed=_derive_seed(config.seed, size, rep, "data"))
        return dag, data
    bn = _load_bn(config.model_path)
    data = sample_bn(bn, size, seed=_derive_seed(config.seed, size, rep, "data"))
    return bn.dag, data


def _run_one(config: CampaignConfig, size: int, rep: int, method: str) -> tuple:
    """One (size, repetition, method) run; returns (RunRecord, pooled
    forecast/outcome arrays or None)."""
    run_seed = _derive_seed(config.seed, size, rep, method)
    started = time.perf_counter()
    try:
        truth, data = _generate(config, size, rep)
        cfg = ScoreConfig(config.penalty_discount)
        if method == "none":
            graphs = [run_ges(data, cfg)[0]]
        else:
            plan = ResamplePlan(method, config.replicates,
                                config.jackknife_fraction, run_seed)
            indices = plan_replicates(plan, data.n)
            if config.emit_replicate_indices:
                _write_replicate_indices(config, size, rep, method, indices)
            graphs = [run_ges(materialize(data, idx), cfg)[0] for idx in indices]
        votes = tally_votes(graphs, data.labels)
        ensemble = ensemble_graph(votes)
        forecasts = forecast_table(votes)
        reference = dag_to_cpdag(truth) if config.compare == "cpdag" else truth
        conf = confusion_counts(ensemble, reference)
        records = outcomes_from_truth(forecasts, truth, config.compare,
                                      config.positive_only)
        decomp = murphy_decomposition(records)
        metrics = {
            "shd": float(shd(ensemble, reference)),
            "adjacency_precision": conf.adjacency_precision,
            "adjacency_recall": conf.adjacency_recall,
            "arrowhead_precision": conf.arrowhead_precision,
            "arrowhead_recall": conf.arrowhead_recall,
            "brier": decomp.brier,
            "reliability": decomp.reliability,
            "reliability_corrected": decomp.reliability_corrected,
            "resolution": decomp.resolution,
            "uncertainty": decomp.uncertainty,
        }
        record = RunRecord(config.study, size, rep, method, run_seed, "ok",
                           metrics, time.perf_counter() - started)
        return record, (records.forecasts, records.outcomes)
    except Exception as exc:  # per-run failures must not kill the campaign
        metrics = {k: float("nan") for k in METRIC_FIELDS}
        record = RunRecord(config.study, size, rep, method, run_seed,
                           f"failed: {type(exc).__name__}: {exc}",
                           metrics, time.perf_counter() - started)
        return record, None


def _write_replicate_indices(config, size, rep, method, indices) -> None:
    folder = os.path.join(config.out_dir, "replicates",
                          f"size{size}_rep{rep}_{method}")
    os.makedirs(folder, exist_ok=True)
    for idx in indices:
        path = os.path.join(folder, f"replicate_{idx.replicate_id:04d}.csv")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("row\n")
            fh.writelines(f"{r}\n" for r in idx.rows)


def _fmt(value: float) -> str:
    if isinstance(value, float) and np.isnan(value):
        return ""
    return f"{value:.17g}"


def run_campaign(config: CampaignConfig) -> dict:
    """Execute all runs; write runs.csv, summary.csv, calibration.csv.

    Returns {"records": [...], "failures": int}.
    """
    os.makedirs(config.out_dir, exist_ok=True)
    tasks = [(size, rep, method)
             for size in config.sample_sizes
             for rep in range(config.repetitions)
             for method in config.methods]
    results: dict[tuple, tuple] = {}
    if config.workers > 1:
        with concurrent.futures.ProcessPoolExecutor(config.workers) as pool:
            futures = {
                pool.submit(_run_one, config, size, rep, method): (size, rep, method)
                for size, rep, method in tasks
            }
            for fut in concurrent.futures.as_completed(futures):
                results[futures[fut]] = fut.result()
    else:
        for size, rep, method in tasks:
            results[(size, rep, method)] = _run_one(config, size, rep, method)

    # Deterministic order regardless of completion order.
    keys = sorted(results, key=lambda k: (k[0], k[1], config.methods.index(k[2])))
    records = [results[k][0] for k in keys]
    pools: dict[tuple[int, str], list] = {}
    for k in keys:
        rec, fo = results[k]
        if fo is not None:
            pools.setdefault((rec.sample_size, rec.method), []).append(
                ForecastOutcomeSet(fo[0], fo[1]))

    _write_runs_csv(config, records)
    _write_summary_csv(config, records)
    _write_calibration_csv(config, pools)
    failures = sum(1 for r in records if not r.ok)
    return {"records": records, "failures": failures}


def _write_runs_csv(config: CampaignConfig, records: list[RunRecord]) -> None:
    with open(os.path.join(config.out_dir, "runs.csv"), "w", encoding="utf-8",
              newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["study", "sample_size", "repetition", "method", "seed",
                         "status", *METRIC_FIELDS, "wall_time_s"])
        for r in records:
            writer.writerow([r.study, r.sample_size, r.repetition, r.method,
                             r.seed, r.status,
                             *(_fmt(r.metrics[f]) for f in METRIC_FIELDS),
                             f"{r.wall_time_s:.3f}"])


def _write_summary_csv(config: CampaignConfig, records: list[RunRecord]) -> None:
    with open(os.path.join(config.out_dir, "summary.csv"), "w", encoding="utf-8",
              newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample_size", "method", "runs", "failures", *METRIC_FIELDS])
        for size in config.sample_sizes:
            for method in config.methods:
                group = [r for r in records
                         if r.sample_size == size and r.method == method]
                if not group:
                    continue
                ok = [r for r in group if r.ok]
                row = [size, method, len(group), len(group) - len(ok)]
                for name in METRIC_FIELDS:
                    values = np.array([r.metrics[name] for r in ok])
                    values = values[~np.isnan(values)] if values.size else values
                    row.append(_fmt(float(np.mean(values))) if values.size else "")
                writer.writerow(row)


def _write_calibration_csv(config: CampaignConfig,
                           pools: dict[tuple[int, str], list]) -> None:
    with open(os.path.join(config.out_dir, "calibration.csv"), "w",
              encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample_size", "method", "bin_low", "bin_high",
                         "mean_forecast", "observed_frequency", "count"])
        for size in config.sample_sizes:
            for method in config.methods:
                sets = pools.get((size, method))
                if not sets:
                    continue
                pooled = ForecastOutcomeSet.concatenate(sets)
                curve = calibration_curve(pooled, config.calibration_bins)
                for k in range(curve.count.size):
                    mf = curve.mean_forecast[k]
                    mo = curve.observed_frequency[k]
                    writer.writerow([
                        size, method,
                        _fmt(float(curve.edges[k])), _fmt(float(curve.edges[k + 1])),
                        "" if np.isnan(mf) else _fmt(float(mf)),
                        "" if np.isnan(mo) else _fmt(float(mo)),
                        int(curve.count[k]),
                    ])


# ---------------------------------------------------------------------------
# Plot-ready long-format CSVs.

def emit_plot_data(campaign_dir: str) -> list[str]:
    """Write tidy per-figure CSVs from a completed campaign directory.

    Returns the list of files written.  Raises FileNotFoundError or
    ValueError (listing offending run ids) on missing or corrupt records.
    """
    runs_path = os.path.join(campaign_dir, "runs.csv")
    if not os.path.exists(runs_path):
        raise FileNotFoundError(f"no runs.csv in {campaign_dir}; campaign incomplete")
    with open(runs_path, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError(f"{runs_path} contains no run records")
    bad = [f"{r.get('sample_size')}/{r.get('repetition')}/{r.get('method')}"
           for r in rows if r.get("status", "") not in ("ok",)
           and not r.get("status", "").startswith("failed")]
    if bad:
        raise ValueError(f"corrupt run records: {bad}")

    groups: dict[tuple[int, str], list[dict]] = {}
    for r in rows:
        if r["status"] != "ok":
            continue
        groups.setdefault((int(r["sample_size"]), r["method"]), []).append(r)

    written = []

    def tidy(filename: str, metrics: list[str]) -> None:
        path = os.path.join(campaign_dir, filename)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["sample_size", "method", "metric", "value"])
            for (size, method) in sorted(groups):
                for metric in metrics:
                    values = [float(r[metric]) for r in groups[(size, method)]
                              if r[metric] != ""]
                    if values:
                        writer.writerow([size, method, metric,
                                         _fmt(float(np.mean(values)))])
        written.append(path)

    tidy("plot_shd_vs_n.csv", ["shd"])
    tidy("plot_brier_vs_n.csv", ["brier"])
    tidy("plot_reliability_vs_n.csv", ["reliability", "reliability_corrected"])

    cal_path = os.path.join(campaign_dir, "calibration.csv")
    scatter = os.path.join(campaign_dir, "plot_calibration_scatter.csv")
    if os.path.exists(cal_path):
        with open(cal_path, "r", encoding="utf-8", newline="") as fh:
            cal_rows = list(csv.DictReader(fh))
        with open(scatter, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["sample_size", "method", "mean_forecast",
                             "observed_freq", "count"])
            for r in cal_rows:
                if r["count"] != "0" and r["mean_forecast"]:
                    writer.writerow([r["sample_size"], r["method"],
                                     r["mean_forecast"], r["observed_frequency"],
                                     r["count"]])
        written.append(scatter)
    return written
