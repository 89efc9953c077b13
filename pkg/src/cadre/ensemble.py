"""Vote tables, ensemble graphs, and per-pair relationship forecasts.

Each replicate's search output casts one vote per unordered node pair for
one of the four relations (absent, a->b, b->a, undirected).  Proportions
of votes are the per-pair forecasts; the argmax relation per pair is the
bagged ensemble graph, which need not be a valid pattern or even acyclic.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graphs import (
    RELATION_NAMES,
    RELATIONS_BY_NAME,
    AnyGraph,
    GraphError,
    PairRelation,
    Pdag,
    iter_pairs,
    pair_count,
    relation_vector,
)

__all__ = [
    "VoteTable",
    "ForecastTable",
    "tally_votes",
    "merge_votes",
    "ensemble_graph",
    "forecast_table",
    "write_forecast_csv",
    "read_forecast_csv",
    "DEFAULT_TIE_BREAK",
]

# Ties prefer the sparser, less committal relation.
DEFAULT_TIE_BREAK = (
    PairRelation.ABSENT,
    PairRelation.UNDIRECTED,
    PairRelation.A_TO_B,
    PairRelation.B_TO_A,
)


@dataclass(frozen=True)
class VoteTable:
    """Per-pair counts over the four relations; rows follow iter_pairs order."""

    node_labels: tuple[str, ...]
    m: int
    counts: np.ndarray  # (n_pairs, 4) int64

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        expected = (pair_count(len(self.node_labels)), 4)
        if counts.shape != expected:
            raise ValueError(f"counts must have shape {expected}")
        if not np.all(counts.sum(axis=1) == self.m):
            raise ValueError("every pair's counts must sum to the replicate count")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "node_labels", tuple(self.node_labels))


@dataclass(frozen=True)
class ForecastTable:
    """Per-(pair, relation) vote proportions; each is a multiple of 1/m."""

    node_labels: tuple[str, ...]
    m: int
    proportions: np.ndarray  # (n_pairs, 4) float64

    def __post_init__(self):
        props = np.asarray(self.proportions, dtype=np.float64)
        expected = (pair_count(len(self.node_labels)), 4)
        if props.shape != expected:
            raise ValueError(f"proportions must have shape {expected}")
        if np.any(np.abs(props.sum(axis=1) - 1.0) > 1e-12):
            raise ValueError("per-pair proportions must sum to 1")
        props.setflags(write=False)
        object.__setattr__(self, "proportions", props)
        object.__setattr__(self, "node_labels", tuple(self.node_labels))


def tally_votes(graphs: Sequence[AnyGraph],
                labels: Sequence[str] | None = None) -> VoteTable:
    """Count relation_of over the graph list for every pair."""
    if not graphs:
        raise ValueError("graph list must be nonempty")
    labels = tuple(labels) if labels is not None else graphs[0].node_labels
    n = len(labels)
    counts = np.zeros((pair_count(n), 4), dtype=np.int64)
    rows = np.arange(pair_count(n))
    for g in graphs:
        if g.node_labels != labels:
            raise GraphError("vote tally requires a shared node set")
        counts[rows, relation_vector(g)] += 1
    return VoteTable(labels, len(graphs), counts)


def merge_votes(a: VoteTable, b: VoteTable) -> VoteTable:
    """Combine partial tallies (associative and commutative)."""
    if a.node_labels != b.node_labels:
        raise GraphError("vote tables cover different node sets")
    return VoteTable(a.node_labels, a.m + b.m, a.counts + b.counts)


def ensemble_graph(votes: VoteTable,
                   tie_break: Sequence[PairRelation] = DEFAULT_TIE_BREAK) -> Pdag:
    """Per-pair argmax relation; ties resolved by `tie_break` preference."""
    n = len(votes.node_labels)
    directed: set[tuple[int, int]] = set()
    undirected: set[tuple[int, int]] = set()
    order = list(tie_break)
    if sorted(order) != sorted(PairRelation):
        raise ValueError("tie_break must order all four relations")
    for k, (a, b) in enumerate(iter_pairs(n)):
        row = votes.counts[k]
        winner = max(order, key=lambda rel: (row[rel], -order.index(rel)))
        if winner == PairRelation.A_TO_B:
            directed.add((a, b))
        elif winner == PairRelation.B_TO_A:
            directed.add((b, a))
        elif winner == PairRelation.UNDIRECTED:
            undirected.add((a, b))
    return Pdag(votes.node_labels, frozenset(directed), frozenset(undirected))


def forecast_table(votes: VoteTable) -> ForecastTable:
    """Vote counts divided by the replicate count."""
    return ForecastTable(votes.node_labels, votes.m, votes.counts / votes.m)


def write_forecast_csv(table: ForecastTable) -> str:
    """Columns node_a,node_b,relation,votes,proportion; pairs sorted
    lexicographically by label, relations in fixed enum order."""
    n = len(table.node_labels)
    labels = table.node_labels
    rows = []
    for k, (a, b) in enumerate(iter_pairs(n)):
        for rel in PairRelation:
            votes = int(round(table.proportions[k, rel] * table.m))
            rows.append((labels[a], labels[b], RELATION_NAMES[rel],
                         votes, table.proportions[k, rel]))
    rows.sort(key=lambda r: (r[0], r[1]))
    buf = io.StringIO()
    buf.write("node_a,node_b,relation,votes,proportion\n")
    for la, lb, rel, votes, prop in rows:
        buf.write(f"{la},{lb},{rel},{votes},{prop:.17g}\n")
    return buf.getvalue()


def read_forecast_csv(text: str) -> ForecastTable:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != "node_a,node_b,relation,votes,proportion":
        raise ValueError("not a forecast CSV")
    entries: dict[tuple[str, str], dict] = {}
    label_seen: list[str] = []
    for ln in lines[1:]:
        la, lb, rel, votes, prop = ln.split(",")
        for lab in (la, lb):
            if lab not in label_seen:
                label_seen.append(lab)
        entries.setdefault((la, lb), {})[rel] = (int(votes), float(prop))
    # Node order is reconstructed as sorted labels; directed relations are
    # reinterpreted relative to that order, so semantics are preserved even
    # when the writer's index order differed.
    labels = tuple(sorted(label_seen))
    index = {lab: i for i, lab in enumerate(labels)}
    n = len(labels)
    props = np.zeros((pair_count(n), 4))
    m = None
    _swap = {
        PairRelation.A_TO_B: PairRelation.B_TO_A,
        PairRelation.B_TO_A: PairRelation.A_TO_B,
        PairRelation.ABSENT: PairRelation.ABSENT,
        PairRelation.UNDIRECTED: PairRelation.UNDIRECTED,
    }
    pair_idx = {pair: k for k, pair in enumerate(iter_pairs(n))}
    for (la, lb), rels in entries.items():
        a, b = index[la], index[lb]
        flipped = a > b
        key = (b, a) if flipped else (a, b)
        for rel_name, (votes, prop) in rels.items():
            rel = RELATIONS_BY_NAME[rel_name]
            if flipped:
                rel = _swap[rel]
            props[pair_idx[key], rel] = prop
            if prop > 0 and votes > 0 and m is None:
                m = round(votes / prop)
    if m is None:
        m = 1
    return ForecastTable(labels, m, props)
