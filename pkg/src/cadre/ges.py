"""Greedy equivalence search over CPDAGs.

Two greedy phases starting from the empty graph: a forward phase applying
the best valid insert operator while any has positive score delta, then a
backward phase applying the best valid delete.  After every operator the
graph is re-completed to pattern form.

Operator definitions and validity conditions:

  Insert(x, y, T): x, y non-adjacent; T a subset of the undirected
  neighbors of y that are not adjacent to x.  Valid iff NA(y, x) | T is a
  clique and every semi-directed path from y to x passes through
  NA(y, x) | T, where NA(y, x) is the set of undirected neighbors of y
  adjacent to x.  Delta = s(y, Pa(y) | NA | T | {x}) - s(y, Pa(y) | NA | T).
  Application adds x -> y and orients t -> y for each t in T.

  Delete(x, y, H): x -> y or x -- y; H a subset of NA(y, x).  Valid iff
  NA(y, x) \\ H is a clique.  Delta = s(y, (NA \\ H) | Pa(y) \\ {x})
  - s(y, (NA \\ H) | Pa(y) | {x}).  Application removes the x, y edge and
  orients y -> h for each h in H (and x -> h where x -- h was undirected).

Ties between equal-delta candidates break lexicographically: smallest
(x, y) first, then the earliest subset in (size, lexicographic) order,
making the search deterministic.

Candidate proposals are cached per ordered pair and recomputed only when
an endpoint or a neighbor of the target changed in the last completion;
the path-blocking condition is global, so the winning insert is
revalidated in the current graph before application.  On small graphs
(p <= 12) the caches are cleared after every operator, giving an exact
greedy argmax at each step.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np

from .datasets import Dataset
from .graphs import Cpdag, MutablePdag, complete_mutable
from .scoring import ScoreConfig, make_scorer

__all__ = ["run_ges", "forward_phase", "backward_phase", "SearchTrace", "TraceStep"]

DELTA_TOLERANCE = 1e-10
DEFAULT_NEIGHBOR_CAP = 10


@dataclass(frozen=True)
class TraceStep:
    phase: str  # "forward" | "backward"
    op: str  # "insert" | "delete"
    x: int
    y: int
    subset: tuple[int, ...]
    delta: float
    total_score: float


@dataclass
class SearchTrace:
    """Applied operators in order, with deltas and running total score."""

    steps: list[TraceStep] = field(default_factory=list)
    cache_hits: int = 0
    cache_misses: int = 0

    def to_csv(self) -> str:
        lines = ["phase,op,x,y,subset,delta,total_score"]
        for s in self.steps:
            subset = ";".join(str(t) for t in s.subset)
            lines.append(f"{s.phase},{s.op},{s.x},{s.y},{subset},"
                         f"{s.delta:.17g},{s.total_score:.17g}")
        return "\n".join(lines) + "\n"


def _subsets(items: list[int]):
    """All subsets in (size, lexicographic) order; items assumed sorted."""
    for size in range(len(items) + 1):
        yield from itertools.combinations(items, size)


def _is_clique(g: MutablePdag, nodes) -> bool:
    nodes = list(nodes)
    for i in range(len(nodes)):
        for j in range(i + 1, len(nodes)):
            if not g.adjacent(nodes[i], nodes[j]):
                return False
    return True


def _blocks_semidirected(g: MutablePdag, source: int, target: int,
                         blocked: frozenset[int]) -> bool:
    """True iff every semi-directed path source ~> target hits `blocked`."""
    if source in blocked:
        return True
    stack = [source]
    seen = {source} | blocked
    while stack:
        v = stack.pop()
        if v == target:
            return False
        for w in g.ch[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
        for w in g.nei[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return True


class _Search:
    def __init__(self, data: Dataset, cfg: ScoreConfig, neighbor_cap: int):
        self.scorer = make_scorer(data, cfg)
        self.p = data.p
        self.labels = data.labels
        self.g = MutablePdag(self.p)
        self.neighbor_cap = neighbor_cap
        self.total = self.scorer.total([set() for _ in range(self.p)])
        self.trace = SearchTrace()
        # Exact mode: recompute every candidate after each operator.
        self._exact = self.p <= 12
        # Per ordered pair: cached best insert/delete proposal, invalidated
        # when either endpoint's neighborhood changes.
        self._insert_cache: dict[tuple[int, int], tuple | None] = {}
        self._delete_cache: dict[tuple[int, int], tuple | None] = {}

    # -- insert ------------------------------------------------------------

    def _na(self, y: int, x: int) -> set[int]:
        return {t for t in self.g.nei[y] if self.g.adjacent(t, x)}

    def _best_insert_for(self, x: int, y: int, check_paths: bool = False):
        """Best insert proposal for the ordered pair, or None.

        By default the global path-blocking condition is not checked here;
        it is rechecked on the winning candidate before application, and a
        failing winner triggers a recompute with check_paths=True."""
        g = self.g
        t0 = sorted(t for t in g.nei[y] if not g.adjacent(t, x))
        if len(t0) > self.neighbor_cap:
            warnings.warn(
                f"insert candidate set for ({x}, {y}) truncated to "
                f"{self.neighbor_cap} of {len(t0)} neighbors", stacklevel=4)
            t0 = t0[: self.neighbor_cap]
        na = frozenset(self._na(y, x))
        pa = frozenset(g.par[y])
        best = None
        for t in _subsets(t0):
            block = na | set(t)
            if not _is_clique(g, block):
                continue
            if check_paths and not _blocks_semidirected(g, y, x, frozenset(block)):
                continue
            base = pa | block
            delta = self.scorer.local(y, base | {x}) - self.scorer.local(y, base)
            if best is None or delta > best[0]:
                best = (delta, x, y, t)
        return best

    def best_insert(self):
        g = self.g
        best = None
        for x in range(self.p):
            for y in range(self.p):
                if x == y or g.adjacent(x, y):
                    continue
                key = (x, y)
                if key in self._insert_cache:
                    cand = self._insert_cache[key]
                else:
                    cand = self._best_insert_for(x, y)
                    self._insert_cache[key] = cand
                if cand is None:
                    continue
                if best is None or cand[0] > best[0]:
                    best = cand
        return best

    def apply_insert(self, x: int, y: int, t_subset) -> None:
        before = self.g if self._exact else self.g.copy()
        self.g.add_directed(x, y)
        for t in t_subset:
            self.g.orient(t, y)
        self._recomplete(before)

    # -- delete ------------------------------------------------------------

    def _best_delete_for(self, x: int, y: int):
        g = self.g
        na = sorted(self._na(y, x))
        if len(na) > self.neighbor_cap:
            warnings.warn(
                f"delete candidate set for ({x}, {y}) truncated to "
                f"{self.neighbor_cap} of {len(na)} neighbors", stacklevel=4)
            na = na[: self.neighbor_cap]
        pa = frozenset(g.par[y])
        best = None
        for h in _subsets(na):
            keep = frozenset(na) - set(h)
            if not _is_clique(g, keep):
                continue
            delta = (self.scorer.local(y, keep | (pa - {x}))
                     - self.scorer.local(y, keep | pa | {x}))
            if best is None or delta > best[0]:
                best = (delta, x, y, h)
        return best

    def best_delete(self):
        g = self.g
        best = None
        for x in range(self.p):
            for y in range(self.p):
                if x == y:
                    continue
                # Delete applies to x -> y and to x -- y (both orderings of
                # an undirected pair are distinct operators).
                if y not in g.ch[x] and y not in g.nei[x]:
                    continue
                key = (x, y)
                if key in self._delete_cache:
                    cand = self._delete_cache[key]
                else:
                    cand = self._best_delete_for(x, y)
                    self._delete_cache[key] = cand
                if cand is None:
                    continue
                if best is None or cand[0] > best[0]:
                    best = cand
        return best

    def apply_delete(self, x: int, y: int, h_subset) -> None:
        before = self.g if self._exact else self.g.copy()
        g = self.g
        g.remove_between(x, y)
        for h in h_subset:
            if h in g.nei[y]:
                g.orient(y, h)
            if h in g.nei[x]:
                g.orient(x, h)
        self._recomplete(before)

    # -- shared ------------------------------------------------------------

    def _recomplete(self, before: MutablePdag) -> None:
        """Complete the mutated graph; drop cached proposals invalidated by
        any change relative to `before` (the pre-operator graph)."""
        new = complete_mutable(self.g)
        self.g = new
        if self._exact:
            self._insert_cache.clear()
            self._delete_cache.clear()
            return
        changed = {
            v for v in range(self.p)
            if (before.par[v] != new.par[v] or before.nei[v] != new.nei[v]
                or before.ch[v] != new.ch[v])
        }
        # A pair's proposal depends on its endpoints and on the mutual
        # adjacencies of the target's neighbors, so invalidate when either
        # endpoint or any node adjacent to the target changed.
        def stale(key: tuple[int, int]) -> bool:
            x, y = key
            if x in changed or y in changed:
                return True
            return bool(new.adjacency(y) & changed)

        for cache in (self._insert_cache, self._delete_cache):
            for key in [k for k in cache if stale(k)]:
                del cache[key]

    def _revalidate_insert(self, cand) -> bool:
        """Path blocking is global, so recheck the cached winner in the
        current graph before applying it."""
        delta, x, y, t = cand
        g = self.g
        if g.adjacent(x, y):
            return False
        if any(s not in g.nei[y] or g.adjacent(s, x) for s in t):
            return False
        block = self._na(y, x) | set(t)
        return (_is_clique(g, block)
                and _blocks_semidirected(g, y, x, frozenset(block)))

    def run_forward(self) -> None:
        while True:
            cand = self.best_insert()
            if cand is None or cand[0] <= DELTA_TOLERANCE:
                break
            if not self._revalidate_insert(cand):
                self._insert_cache[(cand[1], cand[2])] = self._best_insert_for(
                    cand[1], cand[2], check_paths=True)
                continue
            delta, x, y, t = cand
            self.apply_insert(x, y, t)
            self.total += delta
            self.trace.steps.append(
                TraceStep("forward", "insert", x, y, tuple(t), delta, self.total))

    def _revalidate_delete(self, cand) -> bool:
        delta, x, y, h = cand
        g = self.g
        if y not in g.ch[x] and y not in g.nei[x]:
            return False
        na = self._na(y, x)
        return set(h) <= na and _is_clique(g, na - set(h))

    def run_backward(self) -> None:
        while True:
            cand = self.best_delete()
            if cand is None or cand[0] <= DELTA_TOLERANCE:
                break
            if not self._revalidate_delete(cand):
                self._delete_cache[(cand[1], cand[2])] = self._best_delete_for(
                    cand[1], cand[2])
                continue
            delta, x, y, h = cand
            self.apply_delete(x, y, h)
            self.total += delta
            self.trace.steps.append(
                TraceStep("backward", "delete", x, y, tuple(h), delta, self.total))

    def finish(self) -> tuple[Cpdag, SearchTrace]:
        self.trace.cache_hits = self.scorer.cache_hits
        self.trace.cache_misses = self.scorer.cache_misses
        return self.g.to_pdag(self.labels, cls=Cpdag), self.trace


def run_ges(data: Dataset, cfg: ScoreConfig = ScoreConfig(), *,
            neighbor_cap: int = DEFAULT_NEIGHBOR_CAP) -> tuple[Cpdag, SearchTrace]:
    """Full two-phase search from the empty graph."""
    search = _Search(data, cfg, neighbor_cap)
    search.run_forward()
    search._insert_cache.clear()
    search._delete_cache.clear()
    search.run_backward()
    return search.finish()


def forward_phase(data: Dataset, cfg: ScoreConfig = ScoreConfig(), *,
                  neighbor_cap: int = DEFAULT_NEIGHBOR_CAP) -> tuple[Cpdag, SearchTrace]:
    """Insert phase only, from the empty graph."""
    search = _Search(data, cfg, neighbor_cap)
    search.run_forward()
    return search.finish()


def backward_phase(data: Dataset, start: Cpdag,
                   cfg: ScoreConfig = ScoreConfig(), *,
                   neighbor_cap: int = DEFAULT_NEIGHBOR_CAP) -> tuple[Cpdag, SearchTrace]:
    """Delete phase only, from `start`."""
    search = _Search(data, cfg, neighbor_cap)
    search.g = MutablePdag.from_pdag(start)
    # Total score of a CPDAG is the score of any consistent DAG extension.
    from .graphs import _consistent_extension_order

    parents = [set(search.g.par[i]) for i in range(data.p)]
    for a, b in _consistent_extension_order(search.g):
        parents[b].add(a)
    search.total = search.scorer.total(parents)
    search.run_backward()
    return search.finish()
