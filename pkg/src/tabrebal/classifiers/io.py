"""Model persistence: one .npz archive holding metadata and tree arrays."""

from __future__ import annotations

import json

import numpy as np

from ..table import Schema
from .encoding import Encoder
from .forest import ForestConfig, ForestModel
from .gbm import GbmConfig, GbmModel
from .trees import Tree

FORMAT_VERSION = 1


def save_model(model, path: str) -> None:
    if isinstance(model, ForestModel):
        meta = {
            "format_version": FORMAT_VERSION,
            "learner": "rf",
            "schema_text": model.schema.to_text(),
            "config": model.config.to_dict(),
            "encoder": model.encoder.to_dict(),
            "seed": model.seed,
        }
    elif isinstance(model, GbmModel):
        meta = {
            "format_version": FORMAT_VERSION,
            "learner": "gbm",
            "schema_text": model.schema.to_text(),
            "config": model.config.to_dict(),
            "encoder": model.encoder.to_dict(),
            "seed": model.seed,
            "base_score": model.base_score,
        }
    else:
        raise TypeError(f"cannot save model of type {type(model).__name__}")
    arrays = {
        f"tree_{i:05d}": tree.to_array() for i, tree in enumerate(model.trees)
    }
    with open(path, "wb") as fh:
        np.savez_compressed(fh, meta=np.frombuffer(
            json.dumps(meta).encode("utf-8"), dtype=np.uint8
        ), **arrays)


def load_model(path: str):
    with np.load(path, allow_pickle=False) as data:
        meta = json.loads(bytes(data["meta"]).decode("utf-8"))
        if meta.get("format_version") != FORMAT_VERSION:
            raise ValueError(
                f"unsupported model format version {meta.get('format_version')!r}"
            )
        n_trees = sum(1 for k in data.files if k.startswith("tree_"))
        trees = [
            Tree.from_array(data[f"tree_{i:05d}"]) for i in range(n_trees)
        ]
    schema = Schema.from_text(meta["schema_text"])
    encoder = Encoder.from_dict(schema, meta["encoder"])
    cfg = dict(meta["config"])
    cfg.pop("learner", None)
    if meta["learner"] == "rf":
        return ForestModel(schema, encoder, ForestConfig(**cfg), trees, meta["seed"])
    return GbmModel(
        schema,
        encoder,
        GbmConfig(**cfg),
        trees,
        meta["base_score"],
        meta["seed"],
    )
