"""Command-line interface.

Subcommands: simulate, search, resample, ensemble, evaluate, campaign,
plot-data.  All exits are 0 on success; campaign exits nonzero when any
run fails.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .bn import parse_bif, sample_bn
from .campaign import CampaignConfig, emit_plot_data, run_campaign
from .datasets import read_categorical_csv, read_continuous_csv, write_csv
from .ensemble import (
    VoteTable,
    ensemble_graph,
    forecast_table,
    read_forecast_csv,
    tally_votes,
    write_forecast_csv,
)
from .evaluation import (
    calibration_curve,
    murphy_decomposition,
    outcomes_from_truth,
    write_calibration_csv,
)
from .ges import run_ges
from .graphs import (
    confusion_counts,
    dag_to_cpdag,
    complete_pdag,
    read_graph_text,
    shd,
    write_graph_text,
    Dag,
)
from .resampling import ResamplePlan, materialize, plan_replicates
from .scoring import ScoreConfig
from .sem import RandomDagSpec, draw_sem_parameters, random_forward_dag, simulate_sem

__all__ = ["main"]


def _read_dataset(path: str, kind: str):
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if kind == "continuous":
        return read_continuous_csv(text)
    return read_categorical_csv(text)


def _write(path: str, text: str) -> None:
    folder = os.path.dirname(os.path.abspath(path))
    os.makedirs(folder, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _cmd_simulate(args) -> int:
    if args.model:
        with open(args.model, "r", encoding="utf-8") as fh:
            bn = parse_bif(fh.read())
        data = sample_bn(bn, args.n, seed=args.seed)
        truth = bn.dag
    else:
        if args.nodes is None or args.edges is None:
            raise SystemExit("simulate requires --model or both --nodes and --edges")
        truth = random_forward_dag(RandomDagSpec(args.nodes, args.edges, args.seed))
        sem = draw_sem_parameters(truth, seed=args.seed)
        data = simulate_sem(sem, args.n, seed=args.seed)
    os.makedirs(args.out, exist_ok=True)
    _write(os.path.join(args.out, "data.csv"), write_csv(data))
    _write(os.path.join(args.out, "truth.txt"), write_graph_text(truth))
    print(f"wrote {args.out}/data.csv ({data.n} rows) and {args.out}/truth.txt")
    return 0


def _cmd_search(args) -> int:
    data = _read_dataset(args.data, args.kind)
    graph, trace = run_ges(data, ScoreConfig(args.penalty))
    _write(args.out, write_graph_text(graph))
    if args.trace:
        _write(args.trace, trace.to_csv())
    print(f"wrote {args.out} ({len(graph.directed)} directed, "
          f"{len(graph.undirected)} undirected edges)")
    return 0


def _cmd_resample(args) -> int:
    data = _read_dataset(args.data, args.kind)
    plan = ResamplePlan(args.method, args.m, args.fraction, args.seed)
    os.makedirs(args.out, exist_ok=True)
    for idx in plan_replicates(plan, data.n):
        body = "row\n" + "".join(f"{r}\n" for r in idx.rows)
        _write(os.path.join(args.out, f"replicate_{idx.replicate_id:04d}.csv"), body)
    print(f"wrote {args.m} replicate index files to {args.out}")
    return 0


def _cmd_ensemble(args) -> int:
    data = _read_dataset(args.data, args.kind)
    cfg = ScoreConfig(args.penalty)
    plan = ResamplePlan(args.method, args.m, args.fraction, args.seed)
    graphs = [run_ges(materialize(data, idx), cfg)[0]
              for idx in plan_replicates(plan, data.n)]
    votes = tally_votes(graphs, data.labels)
    os.makedirs(args.out, exist_ok=True)
    _write(os.path.join(args.out, "forecast.csv"),
           write_forecast_csv(forecast_table(votes)))
    _write(os.path.join(args.out, "ensemble.txt"),
           write_graph_text(ensemble_graph(votes)))
    print(f"wrote {args.out}/forecast.csv and {args.out}/ensemble.txt "
          f"from {args.m} {args.method} replicates")
    return 0


def _cmd_evaluate(args) -> int:
    with open(args.forecast, "r", encoding="utf-8") as fh:
        forecasts = read_forecast_csv(fh.read())
    with open(args.truth, "r", encoding="utf-8") as fh:
        truth_pdag = read_graph_text(fh.read())
    truth = truth_pdag
    if not truth_pdag.undirected:
        truth = Dag(truth_pdag.node_labels, truth_pdag.directed)
    counts = np.rint(forecasts.proportions * forecasts.m).astype(np.int64)
    votes = VoteTable(forecasts.node_labels, forecasts.m, counts)
    estimate = ensemble_graph(votes)
    reference = truth
    if args.compare == "cpdag":
        reference = dag_to_cpdag(truth) if isinstance(truth, Dag) else complete_pdag(truth)
    conf = confusion_counts(estimate, reference)
    records = outcomes_from_truth(forecasts, truth, args.compare)
    decomp = murphy_decomposition(records)
    os.makedirs(args.out, exist_ok=True)
    header = ("shd,adjacency_precision,adjacency_recall,arrowhead_precision,"
              "arrowhead_recall,brier,reliability,reliability_corrected,"
              "resolution,uncertainty")
    values = [float(shd(estimate, reference)),
              conf.adjacency_precision, conf.adjacency_recall,
              conf.arrowhead_precision, conf.arrowhead_recall,
              decomp.brier, decomp.reliability, decomp.reliability_corrected,
              decomp.resolution, decomp.uncertainty]
    row = ",".join("" if np.isnan(v) else f"{v:.17g}" for v in values)
    _write(os.path.join(args.out, "metrics.csv"), header + "\n" + row + "\n")
    curve = calibration_curve(records, args.bins)
    _write(os.path.join(args.out, "calibration.csv"), write_calibration_csv(curve))
    print(f"wrote {args.out}/metrics.csv and {args.out}/calibration.csv "
          f"(brier={decomp.brier:.6f})")
    return 0


def _cmd_campaign(args) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        config = CampaignConfig.from_yaml(fh.read())
    overrides = {}
    if args.out is not None:
        overrides["out_dir"] = args.out
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.workers is not None:
        overrides["workers"] = args.workers
    if overrides:
        from dataclasses import replace
        config = replace(config, **overrides)
    result = run_campaign(config)
    total = len(result["records"])
    failures = result["failures"]
    print(f"campaign complete: {total} runs, {failures} failures -> {config.out_dir}")
    return 0 if failures == 0 else 1


def _cmd_plot_data(args) -> int:
    written = emit_plot_data(args.dir)
    for path in written:
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cadre",
        description="Resampled causal discovery: GES over bootstrap/jackknife "
                    "replicates, ensemble forecasts, and calibration evaluation.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=True, out=True):
        if seed:
            p.add_argument("--seed", type=int, default=0)
        if out:
            p.add_argument("--out", required=True)

    p = sub.add_parser("simulate", help="generate data from a random SEM or a BIF model")
    p.add_argument("--nodes", type=int)
    p.add_argument("--edges", type=int)
    p.add_argument("--model", help="BIF file for expert-model sampling")
    p.add_argument("--n", type=int, required=True)
    common(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("search", help="run GES on a dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--kind", choices=["continuous", "categorical"],
                   default="continuous")
    p.add_argument("--penalty", type=float, default=2.0)
    p.add_argument("--trace", help="optional search-trace CSV path")
    common(p, seed=False)
    p.set_defaults(func=_cmd_search)

    p = sub.add_parser("resample", help="emit replicate row-index files")
    p.add_argument("--data", required=True)
    p.add_argument("--kind", choices=["continuous", "categorical"],
                   default="continuous")
    p.add_argument("--method", choices=["bootstrap", "jackknife"], required=True)
    p.add_argument("--m", type=int, default=200)
    p.add_argument("--fraction", type=float, default=0.9)
    common(p)
    p.set_defaults(func=_cmd_resample)

    p = sub.add_parser("ensemble", help="resampled GES ensemble and forecast table")
    p.add_argument("--data", required=True)
    p.add_argument("--kind", choices=["continuous", "categorical"],
                   default="continuous")
    p.add_argument("--method", choices=["bootstrap", "jackknife"], required=True)
    p.add_argument("--m", type=int, default=200)
    p.add_argument("--fraction", type=float, default=0.9)
    p.add_argument("--penalty", type=float, default=2.0)
    common(p)
    p.set_defaults(func=_cmd_ensemble)

    p = sub.add_parser("evaluate", help="score a forecast table against a truth graph")
    p.add_argument("--forecast", required=True)
    p.add_argument("--truth", required=True, help="graph text file")
    p.add_argument("--compare", choices=["cpdag", "dag"], default="cpdag")
    p.add_argument("--bins", type=int, default=10)
    common(p, seed=False)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("campaign", help="run a configured simulation campaign")
    p.add_argument("--config", required=True, help="YAML campaign config")
    p.add_argument("--out", help="override the configured output directory")
    p.add_argument("--seed", type=int, help="override the configured master seed")
    p.add_argument("--workers", type=int, help="override the configured worker count")
    p.set_defaults(func=_cmd_campaign)

    p = sub.add_parser("plot-data", help="emit tidy plot CSVs from a campaign directory")
    p.add_argument("--dir", required=True, help="completed campaign directory")
    p.set_defaults(func=_cmd_plot_data)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
