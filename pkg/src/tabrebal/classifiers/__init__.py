"""Tree-based learners producing minority-class probability scores."""

from .encoding import Encoder
from .forest import ForestConfig, ForestModel, fit_forest
from .gbm import GbmConfig, GbmModel, fit_gbm
from .io import load_model, save_model

from ..errors import SchemaMismatchError
from ..table import Table

LEARNERS = ("rf", "gbm")


def fit(table: Table, learner: str, seed: int, config=None):
    """Train the named learner; config defaults to the learner's standard."""
    if learner == "rf":
        return fit_forest(table, config or ForestConfig(), seed)
    if learner == "gbm":
        return fit_gbm(table, config or GbmConfig(), seed)
    raise ValueError(f"unknown learner {learner!r}, expected one of {LEARNERS}")


def predict_proba(model, table: Table):
    """Minority-class probability per row; schema must match training."""
    if table.schema != model.schema:
        raise SchemaMismatchError("table schema differs from the training schema")
    return model.predict_proba(table)


__all__ = [
    "Encoder",
    "ForestConfig",
    "ForestModel",
    "GbmConfig",
    "GbmModel",
    "LEARNERS",
    "fit",
    "fit_forest",
    "fit_gbm",
    "load_model",
    "predict_proba",
    "save_model",
]
