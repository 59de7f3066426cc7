"""Gradient-boosted trees with logistic loss and Newton leaf values."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import SingleClassTableError
from ..table import Schema, Table
from .encoding import Encoder
from .trees import Tree, bin_matrix, grow_tree


@dataclass(frozen=True)
class GbmConfig:
    n_trees: int = 200
    learning_rate: float = 0.1
    max_depth: int | None = 6
    n_bins: int = 64
    reg_lambda: float = 1.0

    def to_dict(self) -> dict:
        return {
            "learner": "gbm",
            "n_trees": self.n_trees,
            "learning_rate": self.learning_rate,
            "max_depth": self.max_depth,
            "n_bins": self.n_bins,
            "reg_lambda": self.reg_lambda,
        }


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _logloss(y: np.ndarray, prob: np.ndarray) -> float:
    eps = 1e-12
    p = np.clip(prob, eps, 1.0 - eps)
    return float(-(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)).mean())


@dataclass
class GbmModel:
    schema: Schema
    encoder: Encoder
    config: GbmConfig
    trees: list[Tree]
    base_score: float
    seed: int
    train_losses: list[float] = field(default_factory=list)

    def _raw(self, X: np.ndarray) -> np.ndarray:
        z = np.full(X.shape[0], self.base_score, dtype=np.float64)
        for tree in self.trees:
            z += self.config.learning_rate * tree.predict(X)
        return z

    def predict_proba(self, table: Table) -> np.ndarray:
        X = self.encoder.transform(table)
        if X.shape[0] == 0:
            return np.zeros(0, dtype=np.float64)
        return _sigmoid(self._raw(X))

    def describe(self) -> dict:
        return self.config.to_dict()


def fit_gbm(table: Table, config: GbmConfig, seed: int) -> GbmModel:
    y = table.y.astype(np.float64)
    if table.n_rows == 0 or y.min() == y.max():
        raise SingleClassTableError("boosting needs both classes")
    encoder = Encoder.fit(table)
    X = encoder.transform(table)
    codes, cuts = bin_matrix(X, config.n_bins)
    mean = float(np.clip(y.mean(), 1e-6, 1.0 - 1e-6))
    base = float(np.log(mean / (1.0 - mean)))
    z = np.full(y.size, base, dtype=np.float64)
    trees: list[Tree] = []
    losses: list[float] = []
    for _ in range(config.n_trees):
        prob = _sigmoid(z)
        grad = prob - y
        hess = prob * (1.0 - prob)
        tree = grow_tree(
            codes,
            cuts,
            "newton",
            g=grad,
            h=hess,
            max_depth=config.max_depth,
            reg_lambda=config.reg_lambda,
        )
        z += config.learning_rate * tree.predict(X)
        trees.append(tree)
        losses.append(_logloss(y, _sigmoid(z)))
    return GbmModel(table.schema, encoder, config, trees, base, seed, losses)
