"""Duplication- and interpolation-based minority upsampling.

Naive oversampling duplicates minority rows uniformly with replacement.
The interpolation upsampler follows the mixed-type nearest-neighbor
recipe: numeric features are blended along the segment between a donor
and one of its k nearest minority neighbors, categorical features take
the majority vote of those neighbors.  Distances standardize numeric
differences per column and charge each categorical mismatch a penalty
equal to the median numeric standard deviation of the minority rows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    NoFeatureColumnsError,
    NoMinorityRowsError,
    TooFewMinorityRowsError,
)
from .table import ColumnKind, Table, concat_tables, from_columns


def naive_oversample(table: Table, n_new: int, seed: int) -> Table:
    """Append n_new exact copies of minority rows, drawn uniformly."""
    if n_new < 0:
        raise ValueError("n_new must be non-negative")
    minority = np.flatnonzero(table.y == 1)
    if minority.size == 0:
        raise NoMinorityRowsError("no minority rows to duplicate")
    if n_new == 0:
        return table
    rng = np.random.default_rng(seed)
    picks = minority[rng.integers(0, minority.size, size=n_new)]
    return concat_tables([table, table.filter_rows(picks)])


@dataclass(frozen=True)
class SmoteNcConfig:
    k_neighbors: int = 5
    seed: int = 0

    def __post_init__(self) -> None:
        if self.k_neighbors < 1:
            raise ValueError("k_neighbors must be at least 1")


@dataclass(frozen=True)
class NcDistanceContext:
    """Standardization constants fitted on the minority rows only."""

    numeric_names: tuple[str, ...]
    categorical_names: tuple[str, ...]
    means: np.ndarray
    stds: np.ndarray
    categorical_penalty: float

    @classmethod
    def fit(cls, minority: Table) -> "NcDistanceContext":
        schema = minority.schema
        num = schema.numeric_features
        cat = schema.categorical_features
        if not num and not cat:
            raise NoFeatureColumnsError("table has no feature columns")
        if num:
            x = np.column_stack([minority.column(n) for n in num])
            means = x.mean(axis=0)
            stds = x.std(axis=0)
            penalty = float(np.median(stds))
        else:
            means = np.zeros(0)
            stds = np.zeros(0)
            # no numeric scale to borrow; any positive constant ranks the same
            penalty = 1.0
        return cls(num, cat, means, stds, penalty)


def smotenc_distance(
    a_num: np.ndarray,
    b_num: np.ndarray,
    a_cat: np.ndarray,
    b_cat: np.ndarray,
    ctx: NcDistanceContext,
) -> float:
    """Mixed-type distance between two feature rows.

    sqrt of: sum of squared standardized numeric differences, plus
    categorical_penalty^2 per mismatched categorical value.  Columns with
    zero variance contribute nothing.
    """
    total = 0.0
    for j in range(len(ctx.numeric_names)):
        if ctx.stds[j] > 0:
            d = (float(a_num[j]) - float(b_num[j])) / ctx.stds[j]
            total += d * d
    mismatches = int(np.sum(np.asarray(a_cat) != np.asarray(b_cat)))
    total += mismatches * ctx.categorical_penalty**2
    return float(np.sqrt(total))


def _pairwise_distances(
    num: np.ndarray, cat: np.ndarray, ctx: NcDistanceContext
) -> np.ndarray:
    """Full minority-vs-minority distance matrix, chunked by rows."""
    n = num.shape[0] if num.size else cat.shape[0]
    scaled = np.zeros((n, 0))
    if ctx.numeric_names:
        safe = np.where(ctx.stds > 0, ctx.stds, 1.0)
        scaled = (num / safe) * (ctx.stds > 0)
    out = np.empty((n, n), dtype=np.float64)
    p2 = ctx.categorical_penalty**2
    for start in range(0, n, 512):
        stop = min(start + 512, n)
        block = scaled[start:stop]
        d2 = ((block[:, None, :] - scaled[None, :, :]) ** 2).sum(axis=2)
        if ctx.categorical_names:
            mism = (cat[start:stop, None, :] != cat[None, :, :]).sum(axis=2)
            d2 = d2 + mism * p2
        out[start:stop] = np.sqrt(d2)
    return out


def smotenc_upsample(table: Table, n_new: int, config: SmoteNcConfig) -> Table:
    """Append n_new interpolated minority rows.

    Per sample: a uniform donor, one of its k nearest minority neighbors
    (self excluded) chosen uniformly, a single u ~ Uniform[0,1] blending
    every numeric feature, and per-categorical majority vote over the k
    neighbors with ties going to the lowest dictionary code.
    """
    if n_new < 0:
        raise ValueError("n_new must be non-negative")
    y = table.y
    minority_idx = np.flatnonzero(y == 1)
    if minority_idx.size == 0:
        raise NoMinorityRowsError("no minority rows to interpolate")
    if minority_idx.size < 2:
        raise TooFewMinorityRowsError("interpolation needs at least 2 minority rows")
    minority = table.filter_rows(minority_idx)
    ctx = NcDistanceContext.fit(minority)
    if n_new == 0:
        return table

    schema = table.schema
    n_min = minority.n_rows
    k = min(config.k_neighbors, n_min - 1)
    num = (
        np.column_stack([minority.column(n) for n in ctx.numeric_names])
        if ctx.numeric_names
        else np.zeros((n_min, 0))
    )
    cat = (
        np.column_stack([minority.column(n) for n in ctx.categorical_names])
        if ctx.categorical_names
        else np.zeros((n_min, 0), dtype=np.int32)
    )
    dist = _pairwise_distances(num, cat, ctx)
    np.fill_diagonal(dist, np.inf)
    # stable ordering so equidistant neighbors resolve by row position
    neighbor_table = np.argsort(dist, axis=1, kind="stable")[:, :k]

    rng = np.random.default_rng(config.seed)
    new_num = np.empty((n_new, num.shape[1]))
    new_cat = np.empty((n_new, cat.shape[1]), dtype=np.int32)
    for i in range(n_new):
        donor = int(rng.integers(0, n_min))
        neighbors = neighbor_table[donor]
        chosen = int(neighbors[rng.integers(0, k)])
        u = rng.uniform()
        new_num[i] = num[donor] + u * (num[chosen] - num[donor])
        for j in range(cat.shape[1]):
            votes = np.bincount(cat[neighbors, j])
            new_cat[i, j] = int(np.argmax(votes))

    columns: dict[str, np.ndarray] = {}
    dicts = {
        n: minority.dictionary(n)
        for n, kd in zip(schema.names, schema.kinds)
        if kd is ColumnKind.CATEGORICAL
    }
    for j, name in enumerate(ctx.numeric_names):
        columns[name] = new_num[:, j]
    for j, name in enumerate(ctx.categorical_names):
        columns[name] = new_cat[:, j]
    tdict = table.dictionary(schema.target)
    columns[schema.target] = np.full(
        n_new, tdict.index(schema.positive_label), dtype=np.int32
    )
    synthetic = from_columns(schema, columns, dicts)
    return concat_tables([table, synthetic])
