"""Quantile discretization of numeric columns into small code vocabularies.

Columns with fewer distinct values than ``max_bins`` get one singleton
bin per value and decode exactly.  Otherwise bin edges sit at empirical
quantiles i/max_bins (duplicates collapsed, capped to the observed
min/max), and a code decodes to a uniform draw within its bin, so every
decoded value stays inside the training range.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import EmptyTableError
from ..table import ColumnKind, Table

DEFAULT_MAX_BINS = 32


@dataclass(frozen=True)
class NumericBins:
    mode: str  # "distinct" | "quantile"
    values: np.ndarray | None = None  # distinct: sorted unique values
    edges: np.ndarray | None = None  # quantile: [lo, interior..., hi]

    @property
    def n_bins(self) -> int:
        if self.mode == "distinct":
            return int(self.values.size)
        return int(self.edges.size) - 1

    def encode(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if self.mode == "distinct":
            codes = np.searchsorted(self.values, x, side="left")
            return np.clip(codes, 0, self.values.size - 1).astype(np.int32)
        interior = self.edges[1:-1]
        return np.searchsorted(interior, x, side="right").astype(np.int32)

    def decode(self, codes: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        codes = np.asarray(codes)
        if self.mode == "distinct":
            return self.values[codes]
        lo = self.edges[codes]
        hi = self.edges[codes + 1]
        return lo + rng.random(codes.size) * (hi - lo)


@dataclass(frozen=True)
class Discretizer:
    max_bins: int
    numeric: dict[str, NumericBins]


def fit_discretizer(table: Table, max_bins: int = DEFAULT_MAX_BINS) -> Discretizer:
    if table.n_rows == 0:
        raise EmptyTableError("cannot fit a discretizer on an empty table")
    if max_bins < 2:
        raise ValueError("max_bins must be at least 2")
    numeric: dict[str, NumericBins] = {}
    for name, kind in zip(table.schema.names, table.schema.kinds):
        if kind is not ColumnKind.NUMERIC:
            continue
        x = table.column(name)
        u = np.unique(x)
        if u.size < max_bins:
            numeric[name] = NumericBins(mode="distinct", values=u)
            continue
        qs = np.arange(1, max_bins) / max_bins
        interior = np.unique(np.quantile(x, qs))
        lo = float(u[0])
        hi = float(u[-1])
        interior = interior[(interior > lo) & (interior < hi)]
        edges = np.r_[lo, interior, hi]
        numeric[name] = NumericBins(mode="quantile", edges=edges)
    return Discretizer(max_bins=max_bins, numeric=numeric)
