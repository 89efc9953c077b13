"""Decomposable penalized-BIC local scores.

Sign convention: the search maximizes

    local(child, parents) = logL_child - (d/2) * k_child * ln(n)

up to terms constant across models at fixed n.  For continuous data the
per-node term is -n*ln(RSS/n) - d*(|parents|+1)*ln(n) (the 2*pi and n/2
likelihood constants are dropped); for categorical data it is the
multinomial log-likelihood minus (d/2)*q*(r-1)*ln(n).  Doubling the score
of the textbook BIC with discount d and negating recovers the same
ordering, so comparisons are unaffected.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .datasets import Dataset

__all__ = [
    "ScoreConfig",
    "SingularRegression",
    "DegenerateVarianceWarning",
    "GaussianScorer",
    "DiscreteScorer",
    "make_scorer",
    "gaussian_local_score",
    "discrete_local_score",
]

VARIANCE_FLOOR = 1e-12


class SingularRegression(ValueError):
    """The parent Gram matrix is rank-deficient (collinear columns)."""


class DegenerateVarianceWarning(UserWarning):
    """Residual variance hit the floor; score computed at the floor."""


@dataclass(frozen=True)
class ScoreConfig:
    """`penalty_discount` multiplies the BIC complexity term."""

    penalty_discount: float = 2.0

    def __post_init__(self):
        if self.penalty_discount <= 0:
            raise ValueError("penalty_discount must be positive")


class _CacheMixin:
    """Per-scorer memo of (child, parent-set) -> score with hit/miss counts."""

    def __init__(self):
        self._cache: dict[tuple[int, frozenset[int]], float] = {}
        self.cache_hits = 0
        self.cache_misses = 0

    def local(self, child: int, parents: Iterable[int]) -> float:
        key = (child, frozenset(parents))
        cached = self._cache.get(key)
        if cached is not None:
            self.cache_hits += 1
            return cached
        self.cache_misses += 1
        value = self._compute(child, key[1])
        self._cache[key] = value
        return value

    def total(self, parent_sets: list[set[int]]) -> float:
        """Sum of local scores for a full parent-set assignment."""
        return sum(self.local(i, ps) for i, ps in enumerate(parent_sets))


class GaussianScorer(_CacheMixin):
    """Penalized Gaussian BIC from the dataset's MLE covariance matrix.

    The covariance is computed once; each local score solves a small
    normal-equations system on the relevant submatrix.
    """

    def __init__(self, data: Dataset, cfg: ScoreConfig = ScoreConfig()):
        super().__init__()
        if data.kind != "continuous":
            raise ValueError("GaussianScorer requires continuous data")
        self.n = data.n
        self.p = data.p
        self.cfg = cfg
        x = data.values - data.values.mean(axis=0)
        self.cov = (x.T @ x) / data.n
        # Plain-list copy: scalar indexing is much cheaper than ndarray
        # item access in the small closed-form regressions below.
        self._cov_list = self.cov.tolist()
        self._logn = float(np.log(data.n))

    def _compute(self, child: int, parents: frozenset[int]) -> float:
        if child in parents:
            raise ValueError("child must not be among its parents")
        k = len(parents)
        if self.n <= k + 1:
            raise SingularRegression(
                f"need n > |parents| + 1 (n={self.n}, |parents|={k})")
        c = self._cov_list
        if k == 0:
            sigma2 = c[child][child]
        elif k == 1:
            (a,) = parents
            if c[a][a] == 0.0:
                raise SingularRegression(f"zero-variance parent {a}")
            sigma2 = c[child][child] - c[a][child] ** 2 / c[a][a]
        elif k == 2:
            a, b = parents
            det = c[a][a] * c[b][b] - c[a][b] ** 2
            if abs(det) < 1e-300:
                raise SingularRegression(f"singular Gram matrix for parents {a}, {b}")
            ay, by = c[a][child], c[b][child]
            explained = (c[b][b] * ay * ay - 2.0 * c[a][b] * ay * by
                         + c[a][a] * by * by) / det
            sigma2 = c[child][child] - explained
        else:
            idx = sorted(parents)
            gram = self.cov[np.ix_(idx, idx)]
            cross = self.cov[idx, child]
            try:
                coef = np.linalg.solve(gram, cross)
            except np.linalg.LinAlgError as exc:
                raise SingularRegression(
                    f"singular parent Gram matrix for child {child}, "
                    f"parents {idx}") from exc
            sigma2 = self.cov[child, child] - cross @ coef
        if sigma2 < VARIANCE_FLOOR:
            warnings.warn(
                f"residual variance {sigma2:.3e} for child {child} floored at "
                f"{VARIANCE_FLOOR:g}", DegenerateVarianceWarning, stacklevel=3)
            sigma2 = VARIANCE_FLOOR
        d = self.cfg.penalty_discount
        return -self.n * math.log(sigma2) - d * (k + 1) * self._logn


class DiscreteScorer(_CacheMixin):
    """Penalized multinomial BIC from contingency counts.

    Cardinalities come from the dataset's category lists, not from the
    observed values, so parameter counts stay stable across resamples that
    miss rare categories.
    """

    def __init__(self, data: Dataset, cfg: ScoreConfig = ScoreConfig()):
        super().__init__()
        if data.kind != "categorical":
            raise ValueError("DiscreteScorer requires categorical data")
        self.n = data.n
        self.p = data.p
        self.cfg = cfg
        self.cards = tuple(len(c) for c in data.categories)
        self._cols = [np.ascontiguousarray(data.values[:, j]) for j in range(data.p)]
        self._logn = float(np.log(data.n))

    def _compute(self, child: int, parents: frozenset[int]) -> float:
        if child in parents:
            raise ValueError("child must not be among its parents")
        r = self.cards[child]
        q = 1
        code = np.zeros(self.n, dtype=np.int64)
        for j in sorted(parents):
            code = code * self.cards[j] + self._cols[j]
            q *= self.cards[j]
        counts = np.bincount(code * r + self._cols[child], minlength=q * r)
        counts = counts.reshape(q, r)
        row_totals = counts.sum(axis=1)
        nz = counts > 0
        loglik = float(np.sum(
            counts[nz] * np.log(counts[nz] / np.repeat(row_totals, r).reshape(q, r)[nz])
        ))
        d = self.cfg.penalty_discount
        return loglik - (d / 2.0) * q * (r - 1) * self._logn


def make_scorer(data: Dataset, cfg: ScoreConfig = ScoreConfig()):
    """Scorer matching the dataset kind."""
    if data.kind == "continuous":
        return GaussianScorer(data, cfg)
    return DiscreteScorer(data, cfg)


def gaussian_local_score(data: Dataset, child: int, parents: Iterable[int],
                         cfg: ScoreConfig = ScoreConfig()) -> float:
    """One-off Gaussian local score.  For repeated queries on the same
    dataset build a GaussianScorer once."""
    return GaussianScorer(data, cfg).local(child, parents)


def discrete_local_score(data: Dataset, child: int, parents: Iterable[int],
                         cfg: ScoreConfig = ScoreConfig()) -> float:
    """One-off multinomial local score."""
    return DiscreteScorer(data, cfg).local(child, parents)
