"""Bagged trees with per-split feature subsampling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import SingleClassTableError
from ..seeding import derive_seed
from ..table import Schema, Table
from .encoding import Encoder
from .trees import Tree, bin_matrix, grow_tree


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 200
    max_depth: int | None = 12
    n_bins: int = 255
    bootstrap: bool = True
    feature_subsample: bool = True  # sqrt(p) candidates per split

    def to_dict(self) -> dict:
        return {
            "learner": "rf",
            "n_trees": self.n_trees,
            "max_depth": self.max_depth,
            "n_bins": self.n_bins,
            "bootstrap": self.bootstrap,
            "feature_subsample": self.feature_subsample,
        }


@dataclass
class ForestModel:
    schema: Schema
    encoder: Encoder
    config: ForestConfig
    trees: list[Tree]
    seed: int

    def predict_proba(self, table: Table) -> np.ndarray:
        X = self.encoder.transform(table)
        if X.shape[0] == 0:
            return np.zeros(0, dtype=np.float64)
        total = np.zeros(X.shape[0], dtype=np.float64)
        for tree in self.trees:
            total += tree.predict(X)
        return total / len(self.trees)

    def describe(self) -> dict:
        return self.config.to_dict()


def fit_forest(table: Table, config: ForestConfig, seed: int) -> ForestModel:
    y = table.y
    if table.n_rows == 0 or y.min() == y.max():
        raise SingleClassTableError("forest training needs both classes")
    encoder = Encoder.fit(table)
    X = encoder.transform(table)
    codes, cuts = bin_matrix(X, config.n_bins)
    n, p = codes.shape
    m = max(1, int(np.sqrt(p))) if config.feature_subsample else None
    trees: list[Tree] = []
    for i in range(config.n_trees):
        # per-tree stream so tree i is identical no matter when it is grown
        rng = np.random.default_rng(derive_seed(seed, ["tree", i]))
        rows = rng.integers(0, n, size=n) if config.bootstrap else np.arange(n)
        trees.append(
            grow_tree(
                codes[rows],
                cuts,
                "gini",
                y=y[rows],
                max_depth=config.max_depth,
                rng=rng,
                features_per_split=m,
            )
        )
    return ForestModel(table.schema, encoder, config, trees, seed)
