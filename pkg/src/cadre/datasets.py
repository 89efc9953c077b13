"""Column-typed data matrices: all-continuous or all-categorical."""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = ["Dataset", "write_csv", "read_continuous_csv", "read_categorical_csv"]


@dataclass(frozen=True)
class Dataset:
    """Immutable data matrix with column labels.

    Continuous data are float64; categorical data are small-integer codes
    with a per-column list of category label strings in `categories`.
    """

    values: np.ndarray
    labels: tuple[str, ...]
    kind: str  # "continuous" | "categorical"
    categories: tuple[tuple[str, ...], ...] | None = None

    def __post_init__(self):
        if self.kind not in ("continuous", "categorical"):
            raise ValueError(f"unknown dataset kind {self.kind!r}")
        vals = np.asarray(self.values)
        if vals.ndim != 2:
            raise ValueError("values must be a 2-D array")
        if vals.shape[0] < 1:
            raise ValueError("dataset must have at least one row")
        if vals.shape[1] != len(self.labels):
            raise ValueError("label count does not match column count")
        if self.kind == "continuous":
            vals = np.asfortranarray(vals, dtype=np.float64)
            if not np.all(np.isfinite(vals)):
                raise ValueError("continuous data must be finite (no missing values)")
            if self.categories is not None:
                raise ValueError("continuous datasets carry no categories")
        else:
            vals = np.asfortranarray(vals, dtype=np.int64)
            if self.categories is None:
                raise ValueError("categorical datasets require per-column categories")
            cats = tuple(tuple(c) for c in self.categories)
            object.__setattr__(self, "categories", cats)
            if len(cats) != vals.shape[1]:
                raise ValueError("categories count does not match column count")
            for j, col_cats in enumerate(cats):
                col = vals[:, j]
                if col.min() < 0 or col.max() >= len(col_cats):
                    raise ValueError(f"column {j} has codes outside its category list")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    def take_rows(self, rows: np.ndarray) -> "Dataset":
        rows = np.asarray(rows)
        if rows.size and (rows.min() < 0 or rows.max() >= self.n):
            raise IndexError("row index out of range")
        return Dataset(self.values[rows, :], self.labels, self.kind, self.categories)


def write_csv(data: Dataset) -> str:
    """CSV text: header of labels, one row per sample.

    Continuous values are written with 17 significant digits so the export
    round-trips float64 exactly; categorical values are written as their
    string labels.
    """
    buf = io.StringIO()
    buf.write(",".join(data.labels) + "\n")
    if data.kind == "continuous":
        for row in data.values:
            buf.write(",".join(f"{v:.17g}" for v in row) + "\n")
    else:
        cats = data.categories
        for row in data.values:
            buf.write(",".join(cats[j][row[j]] for j in range(data.p)) + "\n")
    return buf.getvalue()


def _split_csv(text: str) -> tuple[list[str], list[list[str]]]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty CSV")
    header = [h.strip() for h in lines[0].split(",")]
    rows = [ln.split(",") for ln in lines[1:]]
    for r in rows:
        if len(r) != len(header):
            raise ValueError("ragged CSV row")
    return header, rows


def read_continuous_csv(text: str) -> Dataset:
    header, rows = _split_csv(text)
    values = np.array([[float(v) for v in r] for r in rows], dtype=np.float64)
    return Dataset(values, tuple(header), "continuous")


def read_categorical_csv(text: str,
                         categories: Sequence[Sequence[str]] | None = None) -> Dataset:
    """Read label-valued CSV.  Without an explicit category list, per-column
    categories are the sorted distinct observed values."""
    header, rows = _split_csv(text)
    cols = list(zip(*rows)) if rows else [[] for _ in header]
    if categories is None:
        categories = [tuple(sorted(set(c))) for c in cols]
    cats = tuple(tuple(c) for c in categories)
    codes = np.empty((len(rows), len(header)), dtype=np.int64)
    for j, col_cats in enumerate(cats):
        lookup = {lab: k for k, lab in enumerate(col_cats)}
        try:
            codes[:, j] = [lookup[v] for v in cols[j]]
        except KeyError as exc:
            raise ValueError(f"value {exc.args[0]!r} not in categories of column {j}")
    return Dataset(codes, tuple(header), "categorical", cats)
