"""Acceptance gate: eight end-to-end checks with stated tolerances.

Each test prints one PASS line with its measured quantities; run with
`pytest -v -s tests/test_acceptance.py` to see them.
"""

import os
import time
from dataclasses import replace

import numpy as np
import pytest

from cadre.bn import parse_bif, sample_bn
from cadre.campaign import CampaignConfig, run_campaign
from cadre.datasets import Dataset
from cadre.ensemble import forecast_table, tally_votes
from cadre.evaluation import (
    ForecastOutcomeSet,
    murphy_decomposition,
    outcomes_from_truth,
)
from cadre.ges import run_ges
from cadre.graphs import Dag, dag_to_cpdag
from cadre.resampling import ResamplePlan, bootstrap_indices, materialize, plan_replicates
from cadre.rng import substream
from cadre.scoring import ScoreConfig
from cadre.sem import RandomDagSpec, draw_sem_parameters, random_forward_dag, simulate_sem

from conftest import MODELS_DIR
from oracles import (
    all_dag_edge_sets,
    gaussian_total_oracle,
    oracle_pattern,
    relations_of_graph,
    variable_elimination_marginal,
)


def test_01_pattern_agrees_with_class_enumeration_on_all_four_node_dags():
    started = time.perf_counter()
    dags = all_dag_edge_sets(4)
    assert len(dags) == 543
    mismatches = 0
    for edges in dags:
        got = relations_of_graph(dag_to_cpdag(Dag.from_edges(4, edges)))
        if got != oracle_pattern(4, edges):
            mismatches += 1
    elapsed = time.perf_counter() - started
    assert mismatches == 0
    assert elapsed < 60.0
    print(f"PASS 1: 543/543 four-node patterns agree with the brute-force "
          f"oracle in {elapsed:.1f}s")


def test_02_search_attains_exhaustive_three_node_score_maximum():
    attained = 0
    for seed in range(50):
        dag = random_forward_dag(RandomDagSpec(3, seed % 4, seed=seed))
        sem = draw_sem_parameters(dag, seed=seed)
        data = simulate_sem(sem, 500, seed=seed)
        g, _ = run_ges(data, ScoreConfig(2.0))
        best = -np.inf
        got = None
        for edges in all_dag_edge_sets(3):
            total = gaussian_total_oracle(data.values, edges, 2.0)
            best = max(best, total)
            c = dag_to_cpdag(Dag.from_edges(3, edges))
            if got is None and (c.directed, c.undirected) == (g.directed, g.undirected):
                got = total
        assert got is not None
        assert got <= best + 1e-9, "search total exceeded the exhaustive maximum"
        if got >= best - 1e-9:
            attained += 1
    assert attained >= 45
    print(f"PASS 2: search attained the exhaustive score maximum on "
          f"{attained}/50 seeded datasets (required >= 45), never exceeding it")


def test_03_brier_identity_and_correction_bound_on_random_sets():
    rng = np.random.default_rng(123)
    worst_gap = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 120))
        m = int(rng.integers(1, 30))
        f = rng.integers(0, m + 1, size=n) / m
        o = (rng.random(n) < f).astype(np.float64)
        d = murphy_decomposition(ForecastOutcomeSet(f, o))
        gap = abs(d.brier - (d.reliability - d.resolution + d.uncertainty))
        worst_gap = max(worst_gap, gap)
        assert gap <= 1e-12
        assert d.reliability_corrected <= d.reliability + 1e-15
    print(f"PASS 3: decomposition identity held to 1e-12 on 1000 random sets "
          f"(worst gap {worst_gap:.2e}); corrected <= uncorrected throughout")


def test_04_bootstrap_distinct_index_fraction():
    fractions = [
        len(np.unique(bootstrap_indices(10_000, substream(rep, "coverage")))) / 10_000
        for rep in range(200)
    ]
    mean = float(np.mean(fractions))
    assert 0.612 <= mean <= 0.652
    print(f"PASS 4: mean distinct-index fraction {mean:.4f} in [0.612, 0.652] "
          f"(target 1 - 1/e = {1 - 1 / np.e:.4f})")


def test_05_resampled_search_calibration_at_desk_scale():
    started = time.perf_counter()
    cfg = ScoreConfig(2.0)
    pooled = {"bootstrap": [], "jackknife": []}
    for rep in range(50):
        dag = random_forward_dag(RandomDagSpec(20, 20, seed=rep))
        sem = draw_sem_parameters(dag, seed=rep)
        data = simulate_sem(sem, 500, seed=rep)
        for method in ("bootstrap", "jackknife"):
            plan = ResamplePlan(method, replicates=100, seed=rep)
            graphs = [run_ges(materialize(data, idx), cfg)[0]
                      for idx in plan_replicates(plan, data.n)]
            table = forecast_table(tally_votes(graphs, data.labels))
            pooled[method].append(outcomes_from_truth(table, dag))
    elapsed = time.perf_counter() - started
    for method, sets in pooled.items():
        d = murphy_decomposition(ForecastOutcomeSet.concatenate(sets))
        assert d.brier <= 0.08, f"{method} pooled Brier {d.brier:.4f}"
        assert d.reliability_corrected <= 0.02, (
            f"{method} corrected reliability {d.reliability_corrected:.4f}")
        print(f"PASS 5 ({method}): pooled Brier {d.brier:.4f} <= 0.08, "
              f"corrected reliability {d.reliability_corrected:.5f} <= 0.02")
    assert elapsed <= 15 * 60
    print(f"PASS 5: 50 models x 2 methods x 100 replicates in {elapsed:.0f}s "
          f"(limit 900s)")


def _load(name):
    with open(os.path.join(MODELS_DIR, name)) as fh:
        return parse_bif(fh.read())


def test_06_network_dimensions_and_sampling_marginals():
    child = _load("child.bif")
    assert child.node_count == 20 and len(child.dag.edges) == 25
    hepar2 = _load("hepar2.bif")
    assert hepar2.node_count == 70 and len(hepar2.dag.edges) == 123
    data = sample_bn(child, 100_000, seed=17)
    worst = 0.0
    for i in range(child.node_count):
        exact = variable_elimination_marginal(child, i)
        emp = np.bincount(data.values[:, i], minlength=exact.size) / data.n
        worst = max(worst, 0.5 * float(np.abs(emp - exact).sum()))
    assert worst <= 0.01
    print(f"PASS 6: 20/25 and 70/123 network dimensions confirmed; worst "
          f"marginal TV distance {worst:.4f} <= 0.01 at n=100000")


def test_07_expert_model_campaign_direction():
    cfg = CampaignConfig(
        study="expert-bif",
        model_path=os.path.join(MODELS_DIR, "child.bif"),
        out_dir=None, sample_sizes=(500,), repetitions=20,
        methods=("bootstrap", "jackknife"), replicates=100, seed=0)
    import tempfile
    with tempfile.TemporaryDirectory() as tmp:
        cfg = replace(cfg, out_dir=tmp)
        result = run_campaign(cfg)
        assert result["failures"] == 0
        briers = {}
        for method in ("bootstrap", "jackknife"):
            runs = [r for r in result["records"] if r.method == method]
            briers[method] = float(np.mean([r.metrics["brier"] for r in runs]))
    assert briers["bootstrap"] <= briers["jackknife"]
    print(f"PASS 7: 40-run campaign finished with 0 failures; mean Brier "
          f"bootstrap {briers['bootstrap']:.4f} <= jackknife "
          f"{briers['jackknife']:.4f}")


def test_08_campaign_outputs_identical_across_worker_counts(tmp_path):
    base = dict(study="linear-gaussian", nodes=10, edges=10,
                sample_sizes=(200,), repetitions=3,
                methods=("none", "bootstrap", "jackknife"), replicates=20, seed=5)
    blobs = {}
    for workers in (1, 3):
        out = tmp_path / f"w{workers}"
        run_campaign(CampaignConfig(out_dir=str(out), workers=workers, **base))
        for name in ("summary.csv", "calibration.csv"):
            with open(out / name, "rb") as fh:
                blobs.setdefault(name, []).append(fh.read())
    for name, (one, many) in blobs.items():
        assert one == many, f"{name} differs between worker counts"
    print("PASS 8: summary.csv and calibration.csv byte-identical for "
          "1-worker and 3-worker executions")
