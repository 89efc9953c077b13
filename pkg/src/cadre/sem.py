"""Random linear Gaussian structural equation models and data simulation.

Graphs come from a "random forward" construction: fix a uniformly random
node ordering, then draw the requested number of distinct forward pairs
(i before j) uniformly without replacement and orient each i -> j.  The
construction is acyclic by design and unconstrained in degree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .datasets import Dataset
from .graphs import Dag
from .rng import substream

__all__ = [
    "RandomDagSpec",
    "SplitUniform",
    "LinearSem",
    "random_forward_dag",
    "draw_sem_parameters",
    "simulate_sem",
    "implied_covariance",
]

@dataclass(frozen=True)
class RandomDagSpec:
    num_nodes: int
    num_edges: int
    seed: int

    def __post_init__(self):
        if self.num_nodes < 1:
            raise ValueError("num_nodes must be positive")
        max_edges = self.num_nodes * (self.num_nodes - 1) // 2
        if not (0 <= self.num_edges <= max_edges):
            raise ValueError(
                f"num_edges must be in [0, {max_edges}] for {self.num_nodes} nodes")


@dataclass(frozen=True)
class SplitUniform:
    """Uniform over [neg_low, neg_high] ∪ [pos_low, pos_high], equal mass on
    each interval."""

    neg_low: float = -1.5
    neg_high: float = -0.5
    pos_low: float = 0.5
    pos_high: float = 1.5

    def __post_init__(self):
        if not (self.neg_low < self.neg_high <= 0 <= self.pos_low < self.pos_high):
            raise ValueError("intervals must satisfy neg_low < neg_high <= 0 <= pos_low < pos_high")

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        negative = rng.random(size) < 0.5
        lo = np.where(negative, self.neg_low, self.pos_low)
        hi = np.where(negative, self.neg_high, self.pos_high)
        return lo + rng.random(size) * (hi - lo)


@dataclass(frozen=True)
class LinearSem:
    """Each variable is a weighted sum of its parents plus its own
    independent Normal(0, variance) noise term with coefficient 1."""

    dag: Dag
    edge_weights: dict[tuple[int, int], float]
    noise_variances: dict[int, float]

    def __post_init__(self):
        if set(self.edge_weights) != set(self.dag.edges):
            raise ValueError("edge_weights keys must equal the DAG edge set")
        if set(self.noise_variances) != set(range(self.dag.node_count)):
            raise ValueError("noise_variances must cover every node")
        if any(v <= 0 for v in self.noise_variances.values()):
            raise ValueError("noise variances must be positive")

    @property
    def weight_matrix(self) -> np.ndarray:
        p = self.dag.node_count
        w = np.zeros((p, p))
        for (a, b), wt in self.edge_weights.items():
            w[a, b] = wt
        return w


def random_forward_dag(spec: RandomDagSpec) -> Dag:
    """Random DAG with exactly `num_nodes` nodes and `num_edges` edges."""
    rng = substream(spec.seed, "random_forward_dag")
    order = rng.permutation(spec.num_nodes)
    total = spec.num_nodes * (spec.num_nodes - 1) // 2
    chosen = rng.choice(total, size=spec.num_edges, replace=False)
    # Enumerate forward position pairs (i, j), i < j, in lexicographic order.
    pairs = [(i, j) for i in range(spec.num_nodes)
             for j in range(i + 1, spec.num_nodes)]
    edges = frozenset(
        (int(order[pairs[k][0]]), int(order[pairs[k][1]])) for k in np.sort(chosen)
    )
    return Dag.from_edges(spec.num_nodes, edges)


def draw_sem_parameters(dag: Dag,
                        weight_dist: SplitUniform | None = None,
                        var_low: float = 1.0,
                        var_high: float = 3.0,
                        seed: int = 0) -> LinearSem:
    """Independent weight and noise-variance draws, deterministic in `seed`."""
    if not (0 < var_low < var_high):
        raise ValueError("need 0 < var_low < var_high")
    weight_dist = weight_dist or SplitUniform()
    rng = substream(seed, "sem_parameters")
    edges = sorted(dag.edges)
    weights = weight_dist.sample(rng, len(edges))
    variances = var_low + rng.random(dag.node_count) * (var_high - var_low)
    return LinearSem(
        dag,
        {e: float(w) for e, w in zip(edges, weights)},
        {i: float(v) for i, v in enumerate(variances)},
    )


def simulate_sem(sem: LinearSem, n: int, seed: int = 0) -> Dataset:
    """Simulate `n` i.i.d. rows in topological order."""
    if n < 1:
        raise ValueError("n must be >= 1")
    p = sem.dag.node_count
    rng = substream(seed, "sem_data")
    sd = np.sqrt([sem.noise_variances[i] for i in range(p)])
    x = rng.standard_normal((n, p)) * sd
    w = sem.weight_matrix
    for node in sem.dag.topological_order():
        parents = np.flatnonzero(w[:, node])
        if parents.size:
            x[:, node] += x[:, parents] @ w[parents, node]
    return Dataset(x, sem.dag.node_labels, "continuous")


def implied_covariance(sem: LinearSem) -> np.ndarray:
    """Analytic covariance (I - W)^-T D (I - W)^-1 of the SEM."""
    p = sem.dag.node_count
    w = sem.weight_matrix
    d = np.diag([sem.noise_variances[i] for i in range(p)])
    inv = np.linalg.inv(np.eye(p) - w)
    return inv.T @ d @ inv
