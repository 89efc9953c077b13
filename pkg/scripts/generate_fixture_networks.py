"""Regenerate the discrete-network model fixtures in models/.

Two networks are written:

* models/child.bif — the well-known 20-node / 25-edge "Child" congenital
  heart disease network.  The structure (nodes, state spaces, edges) follows
  the published network exactly; the conditional probability tables are
  synthetic, drawn from a seeded Dirichlet, because the original parameter
  files are not redistributable from this environment.  Every quantity our
  tests check (structure recovery, sampling-vs-inference agreement,
  calibration) depends only on the network being a fixed, valid ground
  truth, not on the original parameter values.

* models/hepar2.bif — a stand-in with the published Hepar II dimensions
  (70 nodes, 123 edges, state spaces of size 2-4) but synthetic structure
  and parameters, generated from a fixed seed.

Run from the repository root:  python3 scripts/generate_fixture_networks.py
"""

from __future__ import annotations

import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from cadre.bn import DiscreteBn, serialize_bif
from cadre.graphs import Dag
from cadre.rng import substream
from cadre.sem import RandomDagSpec, random_forward_dag

CHILD_VARIABLES = [
    ("BirthAsphyxia", ["yes", "no"]),
    ("Disease", ["PFC", "TGA", "Fallot", "PAIVS", "TAPVD", "Lung"]),
    ("Age", ["0-3_days", "4-10_days", "11-30_days"]),
    ("LVH", ["yes", "no"]),
    ("DuctFlow", ["Lt_to_Rt", "None", "Rt_to_Lt"]),
    ("CardiacMixing", ["None", "Mild", "Complete", "Transp."]),
    ("LungParench", ["Normal", "Congested", "Abnormal"]),
    ("LungFlow", ["Normal", "Low", "High"]),
    ("Sick", ["yes", "no"]),
    ("HypDistrib", ["Equal", "Unequal"]),
    ("HypoxiaInO2", ["Mild", "Moderate", "Severe"]),
    ("CO2", ["Normal", "Low", "High"]),
    ("ChestXray", ["Normal", "Oligaemic", "Plethoric", "Grd_Glass", "Asy/Patch"]),
    ("Grunting", ["yes", "no"]),
    ("LVHreport", ["yes", "no"]),
    ("LowerBodyO2", ["<5", "5-12", "12+"]),
    ("RUQO2", ["<5", "5-12", "12+"]),
    ("CO2Report", ["<7.5", ">=7.5"]),
    ("XrayReport", ["Normal", "Oligaemic", "Plethoric", "Grd_Glass", "Asy/Patchy"]),
    ("GruntingReport", ["yes", "no"]),
]

CHILD_EDGES = [
    ("BirthAsphyxia", "Disease"),
    ("Disease", "Age"),
    ("Disease", "Sick"),
    ("Disease", "DuctFlow"),
    ("Disease", "CardiacMixing"),
    ("Disease", "LungParench"),
    ("Disease", "LungFlow"),
    ("Disease", "LVH"),
    ("Sick", "Age"),
    ("Sick", "Grunting"),
    ("LungParench", "Grunting"),
    ("LungParench", "CO2"),
    ("LungParench", "ChestXray"),
    ("LungParench", "HypoxiaInO2"),
    ("LungFlow", "ChestXray"),
    ("DuctFlow", "HypDistrib"),
    ("CardiacMixing", "HypDistrib"),
    ("CardiacMixing", "HypoxiaInO2"),
    ("LVH", "LVHreport"),
    ("Grunting", "GruntingReport"),
    ("HypDistrib", "LowerBodyO2"),
    ("HypoxiaInO2", "LowerBodyO2"),
    ("HypoxiaInO2", "RUQO2"),
    ("CO2", "CO2Report"),
    ("ChestXray", "XrayReport"),
]


def _rounded_rows(rng: np.random.Generator, q: int, r: int) -> np.ndarray:
    """Dirichlet rows rounded to 6 decimals with the last entry adjusted so
    every row sums to 1 exactly."""
    rows = rng.dirichlet(np.full(r, 2.0), size=q)
    rows = np.round(rows, 6)
    rows[:, -1] = 1.0 - rows[:, :-1].sum(axis=1)
    rows[:, -1] = np.round(rows[:, -1], 6)
    if rows.min() < 0.001:
        # Nudge away from 0/1 extremes so sampled data never starves a state.
        rows = np.clip(rows, 0.001, None)
        rows = np.round(rows / rows.sum(axis=1, keepdims=True), 6)
        rows[:, -1] = np.round(1.0 - rows[:, :-1].sum(axis=1), 6)
    return rows


def _build(name: str, labels: list[str], categories: list[list[str]],
           edges: list[tuple[int, int]], seed: int) -> DiscreteBn:
    dag = Dag(tuple(labels), frozenset(edges))
    rng = substream(seed, name, "cpt")
    cpts = []
    parent_order = []
    for i in range(dag.node_count):
        parents = tuple(sorted(dag.parents(i)))
        q = 1
        for par in parents:
            q *= len(categories[par])
        cpts.append(_rounded_rows(rng, q, len(categories[i])))
        parent_order.append(parents)
    return DiscreteBn(name, dag, tuple(tuple(c) for c in categories),
                      tuple(cpts), tuple(parent_order))


def build_child() -> DiscreteBn:
    labels = [v for v, _ in CHILD_VARIABLES]
    categories = [list(states) for _, states in CHILD_VARIABLES]
    index = {v: i for i, v in enumerate(labels)}
    edges = [(index[a], index[b]) for a, b in CHILD_EDGES]
    assert len(labels) == 20 and len(edges) == 25
    return _build("Child", labels, categories, edges, seed=20250101)


def build_hepar2_standin() -> DiscreteBn:
    num_nodes, num_edges = 70, 123
    dag = random_forward_dag(RandomDagSpec(num_nodes, num_edges, seed=20250102))
    rng = substream(20250102, "hepar2-standin", "cards")
    labels = [f"v{i:02d}" for i in range(num_nodes)]
    categories = []
    for i in range(num_nodes):
        card = int(rng.integers(2, 5))
        categories.append([f"s{k}" for k in range(card)])
    edges = sorted(dag.edges)
    return _build("Hepar2Standin", labels, categories, edges, seed=20250102)


def main() -> None:
    out_dir = os.path.join(os.path.dirname(__file__), "..", "models")
    os.makedirs(out_dir, exist_ok=True)
    for builder, filename in ((build_child, "child.bif"),
                              (build_hepar2_standin, "hepar2.bif")):
        bn = builder()
        path = os.path.join(out_dir, filename)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(serialize_bif(bn))
        print(f"wrote {path}: {bn.node_count} nodes, {len(bn.dag.edges)} edges")


if __name__ == "__main__":
    main()
