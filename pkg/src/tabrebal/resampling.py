"""Stratified fold splitting and controlled class-imbalance induction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ClassTooSmallError,
    EmptyTableError,
    FractionNotBelowCurrentError,
    MinorityVanishesError,
    NoMinorityRowsError,
    SingleClassTableError,
)
from .table import Table

DEFAULT_FRACTION_GRID = (0.0005, 0.001, 0.002, 0.005, 0.01, 0.02, 0.05)


@dataclass(frozen=True)
class FoldSplit:
    fold: int
    train: np.ndarray
    test: np.ndarray


def stratified_kfold(table: Table, n_folds: int, seed: int) -> list[FoldSplit]:
    """Split rows into folds with near-equal class proportions.

    Rows of each class are shuffled once and dealt round-robin, so every
    fold's class counts differ by at most one from proportional.  Fold
    membership is a pure function of the table, fold count, and seed.
    """
    if n_folds < 2:
        raise ValueError("need at least 2 folds")
    if table.n_rows == 0:
        raise EmptyTableError("cannot split an empty table")
    y = table.y
    classes = [np.flatnonzero(y == 0), np.flatnonzero(y == 1)]
    non_empty = [c for c in classes if c.size > 0]
    if len(non_empty) < 2:
        raise SingleClassTableError("table has a single target class")
    for c in classes:
        if c.size < n_folds:
            raise ClassTooSmallError(
                f"class with {c.size} rows cannot be split into {n_folds} folds"
            )
    rng = np.random.default_rng(seed)
    assignment = np.empty(table.n_rows, dtype=np.int64)
    for indices in classes:
        shuffled = rng.permutation(indices)
        assignment[shuffled] = np.arange(shuffled.size) % n_folds
    splits = []
    for k in range(n_folds):
        test = np.flatnonzero(assignment == k)
        train = np.flatnonzero(assignment != k)
        splits.append(FoldSplit(fold=k, train=train, test=test))
    return splits


def induce_imbalance(table: Table, fraction: float, seed: int) -> Table:
    """Downsample the positive class to a target share of all rows.

    Keeps floor(n_neg * fraction / (1 - fraction)) positives, chosen as a
    prefix of one seed-determined shuffle.  Because the shuffle does not
    depend on the fraction, the rows kept at a smaller fraction are a
    subset of those kept at any larger one under the same seed.
    """
    if not 0.0 < fraction < 1.0:
        raise ValueError("fraction must lie strictly between 0 and 1")
    if table.n_rows == 0:
        raise EmptyTableError("cannot downsample an empty table")
    y = table.y
    pos = np.flatnonzero(y == 1)
    neg = np.flatnonzero(y == 0)
    if pos.size == 0 or neg.size == 0:
        raise SingleClassTableError("table has a single target class")
    current = pos.size / table.n_rows
    if fraction >= current:
        raise FractionNotBelowCurrentError(
            f"requested fraction {fraction} is not below the current {current:.6f}"
        )
    keep = int(np.floor(neg.size * fraction / (1.0 - fraction)))
    if keep == 0:
        raise MinorityVanishesError(
            f"fraction {fraction} leaves zero positive rows out of {neg.size} negatives"
        )
    rng = np.random.default_rng(seed)
    chosen = rng.permutation(pos)[:keep]
    kept = np.sort(np.concatenate([neg, chosen]))
    return table.filter_rows(kept)


def required_upsample_count(table: Table) -> int:
    """Synthetic positives needed to reach an exact 50:50 class balance."""
    n_pos = table.positive_count
    if n_pos == 0:
        raise NoMinorityRowsError("no positive rows to upsample from")
    return max(table.n_rows - 2 * n_pos, 0)
