"""Graph types (DAG / PDAG / CPDAG), equivalence-class completion, and
graph-vs-graph accuracy metrics.

All graphs are immutable after construction. Nodes are positional integer
indices; labels are carried for I/O only. Every unordered node pair has
exactly one of four relations: absent, a->b, b->a, or undirected (with
a < b by index).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterable, Iterator, Sequence, Union

import numpy as np

__all__ = [
    "PairRelation",
    "Dag",
    "Pdag",
    "Cpdag",
    "ConfusionCounts",
    "GraphError",
    "NoConsistentExtension",
    "relation_of",
    "relation_vector",
    "iter_pairs",
    "pair_count",
    "dag_to_cpdag",
    "complete_pdag",
    "is_valid_cpdag",
    "pattern_report",
    "shd",
    "confusion_counts",
    "read_graph_text",
    "write_graph_text",
]


class GraphError(ValueError):
    """Invalid graph construction or incompatible graph arguments."""


class NoConsistentExtension(GraphError):
    """The PDAG admits no DAG extension with the same skeleton and
    v-structures."""


class PairRelation(IntEnum):
    """Relation of an unordered node pair {a, b} with a < b."""

    ABSENT = 0
    A_TO_B = 1
    B_TO_A = 2
    UNDIRECTED = 3


RELATION_NAMES = {
    PairRelation.ABSENT: "absent",
    PairRelation.A_TO_B: "a_to_b",
    PairRelation.B_TO_A: "b_to_a",
    PairRelation.UNDIRECTED: "undirected",
}
RELATIONS_BY_NAME = {v: k for k, v in RELATION_NAMES.items()}


def _default_labels(n: int) -> tuple[str, ...]:
    return tuple(f"X{i + 1}" for i in range(n))


def _check_nodes(edges: Iterable[tuple[int, int]], n: int) -> None:
    for a, b in edges:
        if not (0 <= a < n and 0 <= b < n):
            raise GraphError(f"edge ({a}, {b}) references a node outside [0, {n})")
        if a == b:
            raise GraphError(f"self-loop at node {a}")


def _topological_order(n: int, edges: frozenset[tuple[int, int]]) -> list[int]:
    """Kahn's algorithm; raises GraphError on a cycle."""
    children: list[list[int]] = [[] for _ in range(n)]
    indeg = [0] * n
    for a, b in edges:
        children[a].append(b)
        indeg[b] += 1
    stack = [i for i in range(n) if indeg[i] == 0]
    order: list[int] = []
    while stack:
        v = stack.pop()
        order.append(v)
        for c in children[v]:
            indeg[c] -= 1
            if indeg[c] == 0:
                stack.append(c)
    if len(order) != n:
        raise GraphError("graph contains a directed cycle")
    return order


@dataclass(frozen=True)
class Dag:
    """Directed acyclic graph over integer node ids."""

    node_labels: tuple[str, ...]
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        object.__setattr__(self, "node_labels", tuple(self.node_labels))
        object.__setattr__(self, "edges", frozenset(tuple(e) for e in self.edges))
        n = len(self.node_labels)
        _check_nodes(self.edges, n)
        for a, b in self.edges:
            if (b, a) in self.edges:
                raise GraphError(f"edges contain both ({a},{b}) and ({b},{a})")
        _topological_order(n, self.edges)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]],
                   labels: Sequence[str] | None = None) -> "Dag":
        return cls(tuple(labels) if labels else _default_labels(n), frozenset(edges))

    @property
    def node_count(self) -> int:
        return len(self.node_labels)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def parents(self, node: int) -> set[int]:
        return {a for a, b in self.edges if b == node}

    def children(self, node: int) -> set[int]:
        return {b for a, b in self.edges if a == node}

    def topological_order(self) -> list[int]:
        return _topological_order(self.node_count, self.edges)


@dataclass(frozen=True)
class Pdag:
    """Partially directed graph: disjoint directed and undirected edge sets.

    Undirected edges are stored as index-ordered pairs (a, b) with a < b.
    """

    node_labels: tuple[str, ...]
    directed: frozenset[tuple[int, int]]
    undirected: frozenset[tuple[int, int]]

    def __post_init__(self):
        object.__setattr__(self, "node_labels", tuple(self.node_labels))
        object.__setattr__(self, "directed", frozenset(tuple(e) for e in self.directed))
        und = frozenset((a, b) if a < b else (b, a) for a, b in self.undirected)
        object.__setattr__(self, "undirected", und)
        n = len(self.node_labels)
        _check_nodes(self.directed, n)
        _check_nodes(und, n)
        seen: set[tuple[int, int]] = set()
        for a, b in self.directed:
            key = (a, b) if a < b else (b, a)
            if key in seen:
                raise GraphError(f"pair {key} has more than one relationship")
            seen.add(key)
        for key in und:
            if key in seen:
                raise GraphError(f"pair {key} is both directed and undirected")
            seen.add(key)

    @classmethod
    def from_edges(cls, n: int, directed: Iterable[tuple[int, int]] = (),
                   undirected: Iterable[tuple[int, int]] = (),
                   labels: Sequence[str] | None = None) -> "Pdag":
        return cls(tuple(labels) if labels else _default_labels(n),
                   frozenset(directed), frozenset(undirected))

    @classmethod
    def from_dag(cls, dag: Dag) -> "Pdag":
        return cls(dag.node_labels, dag.edges, frozenset())

    @property
    def node_count(self) -> int:
        return len(self.node_labels)

    @property
    def edge_count(self) -> int:
        return len(self.directed) + len(self.undirected)


class Cpdag(Pdag):
    """Completed PDAG (pattern): compelled edges directed, reversible edges
    undirected.  Construct via :func:`dag_to_cpdag` or :func:`complete_pdag`."""


AnyGraph = Union[Dag, Pdag]


def iter_pairs(n: int) -> Iterator[tuple[int, int]]:
    """All unordered node pairs (a, b) with a < b, in lexicographic order."""
    return itertools.combinations(range(n), 2)


def pair_count(n: int) -> int:
    return n * (n - 1) // 2


def relation_of(graph: AnyGraph, pair: tuple[int, int]) -> PairRelation:
    """Relation of the unordered pair (a, b), a < b, in `graph`."""
    a, b = pair
    n = graph.node_count
    if not (0 <= a < n and 0 <= b < n) or a >= b:
        raise GraphError(f"invalid node pair ({a}, {b}) for {n} nodes")
    if isinstance(graph, Dag):
        if (a, b) in graph.edges:
            return PairRelation.A_TO_B
        if (b, a) in graph.edges:
            return PairRelation.B_TO_A
        return PairRelation.ABSENT
    if (a, b) in graph.directed:
        return PairRelation.A_TO_B
    if (b, a) in graph.directed:
        return PairRelation.B_TO_A
    if (a, b) in graph.undirected:
        return PairRelation.UNDIRECTED
    return PairRelation.ABSENT


def relation_vector(graph: AnyGraph) -> np.ndarray:
    """Relations of all pairs in iter_pairs order, as a uint8 array."""
    n = graph.node_count
    vec = np.zeros(pair_count(n), dtype=np.uint8)
    if isinstance(graph, Dag):
        directed = graph.edges
        undirected: frozenset[tuple[int, int]] = frozenset()
    else:
        directed, undirected = graph.directed, graph.undirected
    idx = {pair: k for k, pair in enumerate(iter_pairs(n))}
    for a, b in directed:
        if a < b:
            vec[idx[(a, b)]] = PairRelation.A_TO_B
        else:
            vec[idx[(b, a)]] = PairRelation.B_TO_A
    for a, b in undirected:
        vec[idx[(a, b)]] = PairRelation.UNDIRECTED
    return vec


# ---------------------------------------------------------------------------
# Mutable adjacency used by completion algorithms and the search.

class MutablePdag:
    """Working graph with parent/child/neighbor adjacency sets.

    Not part of the public value-type API; search and completion use it
    internally and freeze results back into Pdag/Cpdag.
    """

    __slots__ = ("n", "par", "ch", "nei")

    def __init__(self, n: int):
        self.n = n
        self.par: list[set[int]] = [set() for _ in range(n)]
        self.ch: list[set[int]] = [set() for _ in range(n)]
        self.nei: list[set[int]] = [set() for _ in range(n)]

    @classmethod
    def from_pdag(cls, g: Pdag) -> "MutablePdag":
        m = cls(g.node_count)
        for a, b in g.directed:
            m.par[b].add(a)
            m.ch[a].add(b)
        for a, b in g.undirected:
            m.nei[a].add(b)
            m.nei[b].add(a)
        return m

    @classmethod
    def from_dag(cls, g: Dag) -> "MutablePdag":
        m = cls(g.node_count)
        for a, b in g.edges:
            m.par[b].add(a)
            m.ch[a].add(b)
        return m

    def copy(self) -> "MutablePdag":
        m = MutablePdag(self.n)
        m.par = [set(s) for s in self.par]
        m.ch = [set(s) for s in self.ch]
        m.nei = [set(s) for s in self.nei]
        return m

    def adjacent(self, a: int, b: int) -> bool:
        return b in self.nei[a] or b in self.ch[a] or b in self.par[a]

    def adjacency(self, a: int) -> set[int]:
        return self.nei[a] | self.ch[a] | self.par[a]

    def add_directed(self, a: int, b: int) -> None:
        self.ch[a].add(b)
        self.par[b].add(a)

    def add_undirected(self, a: int, b: int) -> None:
        self.nei[a].add(b)
        self.nei[b].add(a)

    def remove_between(self, a: int, b: int) -> None:
        self.ch[a].discard(b)
        self.par[b].discard(a)
        self.ch[b].discard(a)
        self.par[a].discard(b)
        self.nei[a].discard(b)
        self.nei[b].discard(a)

    def orient(self, a: int, b: int) -> None:
        """Turn undirected a—b into directed a->b."""
        self.nei[a].discard(b)
        self.nei[b].discard(a)
        self.add_directed(a, b)

    def to_pdag(self, labels: Sequence[str], cls=Pdag) -> Pdag:
        directed = frozenset((a, b) for a in range(self.n) for b in self.ch[a])
        undirected = frozenset((a, b) for a in range(self.n) for b in self.nei[a] if a < b)
        return cls(tuple(labels), directed, undirected)


def _consistent_extension_order(g: MutablePdag) -> list[tuple[int, int]]:
    """Dor and Tarsi's extension algorithm.

    Returns orientations (a, b) turning each undirected edge into a->b such
    that the resulting DAG has the same skeleton and v-structures.  Raises
    NoConsistentExtension if none exists.
    """
    work = g.copy()
    remaining = set(range(g.n))
    orientations: list[tuple[int, int]] = []
    while remaining:
        sink = -1
        for x in sorted(remaining):
            if work.ch[x] & remaining:
                continue
            und = work.nei[x] & remaining
            if und:
                adj_x = (work.adjacency(x) & remaining) - {x}
                if not all(adj_x - {y} <= work.adjacency(y) for y in und):
                    continue
            sink = x
            break
        if sink < 0:
            raise NoConsistentExtension("PDAG admits no consistent DAG extension")
        for y in work.nei[sink] & remaining:
            orientations.append((y, sink))
        for y in list(work.nei[sink]):
            work.remove_between(sink, y)
        for y in list(work.par[sink]):
            work.ch[y].discard(sink)
        work.par[sink].clear()
        remaining.discard(sink)
    return orientations


def _compelled_edges(n: int, parents: list[set[int]]) -> set[tuple[int, int]]:
    """Label the compelled edges of a DAG (order-based algorithm).

    Returns the set of compelled (parent, child) edges; all other edges are
    reversible within the equivalence class.
    """
    edges = [(a, b) for b in range(n) for a in parents[b]]
    topo = _topological_order(n, frozenset(edges))
    pos = {v: i for i, v in enumerate(topo)}
    # Total order on edges: head position ascending, tail position descending.
    edges.sort(key=lambda e: (pos[e[1]], -pos[e[0]]))

    UNKNOWN, COMPELLED, REVERSIBLE = 0, 1, 2
    label = {e: UNKNOWN for e in edges}

    for x, y in edges:
        if label[(x, y)] != UNKNOWN:
            continue
        done = False
        for w in sorted(parents[x], key=lambda v: pos[v]):
            if label[(w, x)] != COMPELLED:
                continue
            if w not in parents[y]:
                for p in parents[y]:
                    label[(p, y)] = COMPELLED
                done = True
                break
            label[(w, y)] = COMPELLED
        if done:
            continue
        if any(z != x and z not in parents[x] for z in parents[y]):
            for p in parents[y]:
                if label[(p, y)] == UNKNOWN:
                    label[(p, y)] = COMPELLED
            label[(x, y)] = COMPELLED
        else:
            for p in parents[y]:
                if label[(p, y)] == UNKNOWN:
                    label[(p, y)] = REVERSIBLE
            label[(x, y)] = REVERSIBLE
    return {e for e, lab in label.items() if lab == COMPELLED}


def complete_mutable(g: MutablePdag) -> MutablePdag:
    """Complete a mutable PDAG into pattern form (compelled directed,
    reversible undirected).  Raises NoConsistentExtension when impossible."""
    orientations = _consistent_extension_order(g)
    parents = [set(s) for s in g.par]
    for a, b in orientations:
        parents[b].add(a)
    compelled = _compelled_edges(g.n, parents)
    out = MutablePdag(g.n)
    for b in range(g.n):
        for a in parents[b]:
            if (a, b) in compelled:
                out.add_directed(a, b)
            else:
                out.add_undirected(a, b)
    return out


def dag_to_cpdag(dag: Dag) -> Cpdag:
    """The pattern (CPDAG) of the Markov equivalence class containing `dag`."""
    parents = [set() for _ in range(dag.node_count)]
    for a, b in dag.edges:
        parents[b].add(a)
    compelled = _compelled_edges(dag.node_count, parents)
    directed = frozenset(compelled)
    undirected = frozenset(
        (min(a, b), max(a, b)) for a, b in dag.edges if (a, b) not in compelled
    )
    return Cpdag(dag.node_labels, directed, undirected)


def complete_pdag(pdag: Pdag) -> Cpdag:
    """Complete a PDAG to the pattern of its consistent-extension class."""
    out = complete_mutable(MutablePdag.from_pdag(pdag))
    return out.to_pdag(pdag.node_labels, cls=Cpdag)


def is_valid_cpdag(pdag: Pdag) -> bool:
    """True iff `pdag` is already in pattern form (fixed point of completion)."""
    try:
        completed = complete_pdag(pdag)
    except NoConsistentExtension:
        return False
    return (completed.directed == pdag.directed
            and completed.undirected == pdag.undirected)


def pattern_report(pdag: Pdag) -> dict:
    """Diagnostics for ensemble graphs, which need not be valid patterns."""
    directed_cycle = True
    try:
        _topological_order(pdag.node_count, pdag.directed)
        directed_cycle = False
    except GraphError:
        pass
    return {
        "is_pattern": is_valid_cpdag(pdag),
        "directed_part_acyclic": not directed_cycle,
    }


# ---------------------------------------------------------------------------
# Accuracy metrics.

def _check_comparable(estimate: AnyGraph, truth: AnyGraph) -> None:
    if estimate.node_count != truth.node_count:
        raise GraphError("graphs have different node counts")
    if estimate.node_labels != truth.node_labels:
        raise GraphError("graphs have different node label orders")


def shd(estimate: AnyGraph, truth: AnyGraph) -> int:
    """Structural Hamming distance: one point per pair whose relation differs
    (missing, extra, or wrongly oriented edges all cost exactly 1)."""
    _check_comparable(estimate, truth)
    return int(np.sum(relation_vector(estimate) != relation_vector(truth)))


@dataclass(frozen=True)
class ConfusionCounts:
    """Adjacency (skeleton) and arrowhead confusion counts."""

    adjacency_tp: int
    adjacency_fp: int
    adjacency_fn: int
    arrowhead_tp: int
    arrowhead_fp: int
    arrowhead_fn: int

    @staticmethod
    def _ratio(num: int, den: int) -> float:
        return num / den if den else float("nan")

    @property
    def adjacency_precision(self) -> float:
        return self._ratio(self.adjacency_tp, self.adjacency_tp + self.adjacency_fp)

    @property
    def adjacency_recall(self) -> float:
        return self._ratio(self.adjacency_tp, self.adjacency_tp + self.adjacency_fn)

    @property
    def arrowhead_precision(self) -> float:
        return self._ratio(self.arrowhead_tp, self.arrowhead_tp + self.arrowhead_fp)

    @property
    def arrowhead_recall(self) -> float:
        return self._ratio(self.arrowhead_tp, self.arrowhead_tp + self.arrowhead_fn)


def _arrowheads(rel: PairRelation) -> set[str]:
    if rel == PairRelation.A_TO_B:
        return {"at_b"}
    if rel == PairRelation.B_TO_A:
        return {"at_a"}
    return set()


def confusion_counts(estimate: AnyGraph, truth: AnyGraph) -> ConfusionCounts:
    """Skeleton and arrowhead confusion counts of `estimate` vs `truth`.

    An arrowhead at one endpoint of a pair is one unit of comparison."""
    _check_comparable(estimate, truth)
    adj_tp = adj_fp = adj_fn = 0
    arr_tp = arr_fp = arr_fn = 0
    for pair in iter_pairs(truth.node_count):
        er = relation_of(estimate, pair)
        tr = relation_of(truth, pair)
        e_adj = er != PairRelation.ABSENT
        t_adj = tr != PairRelation.ABSENT
        adj_tp += e_adj and t_adj
        adj_fp += e_adj and not t_adj
        adj_fn += t_adj and not e_adj
        ea, ta = _arrowheads(er), _arrowheads(tr)
        arr_tp += len(ea & ta)
        arr_fp += len(ea - ta)
        arr_fn += len(ta - ea)
    return ConfusionCounts(adj_tp, adj_fp, adj_fn, arr_tp, arr_fp, arr_fn)


# ---------------------------------------------------------------------------
# Graph text format.
#
#   nodes: <comma-separated labels>
#   A --> B      directed edge
#   A --- B      undirected edge

def write_graph_text(graph: AnyGraph) -> str:
    lines = ["nodes: " + ",".join(graph.node_labels)]
    labels = graph.node_labels
    if isinstance(graph, Dag):
        directed = sorted(graph.edges)
        undirected: list[tuple[int, int]] = []
    else:
        directed = sorted(graph.directed)
        undirected = sorted(graph.undirected)
    for a, b in directed:
        lines.append(f"{labels[a]} --> {labels[b]}")
    for a, b in undirected:
        lines.append(f"{labels[a]} --- {labels[b]}")
    return "\n".join(lines) + "\n"


def read_graph_text(text: str) -> Pdag:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("nodes:"):
        raise GraphError("graph text must start with a 'nodes:' header line")
    labels = tuple(s.strip() for s in lines[0][len("nodes:"):].split(",") if s.strip())
    index = {lab: i for i, lab in enumerate(labels)}
    if len(index) != len(labels):
        raise GraphError("duplicate node labels in header")
    directed: set[tuple[int, int]] = set()
    undirected: set[tuple[int, int]] = set()
    for ln in lines[1:]:
        if " --> " in ln:
            a, b = ln.split(" --> ")
            target = directed
        elif " --- " in ln:
            a, b = ln.split(" --- ")
            target = undirected
        else:
            raise GraphError(f"unrecognized edge line: {ln!r}")
        a, b = a.strip(), b.strip()
        if a not in index or b not in index:
            raise GraphError(f"edge references undeclared node in line: {ln!r}")
        target.add((index[a], index[b]))
    return Pdag(labels, frozenset(directed), frozenset(undirected))
