"""Autoregressive categorical model over discretized table columns.

The joint row distribution factorizes left-to-right over a fixed column
order with the target first, so clamping the first code gives exact
class-conditional sampling.  Each column's conditional head is a one
hidden layer network (tanh) reading the concatenated embeddings of all
preceding columns; the first column's head is a bare bias vector.  All
forward/backward passes are hand-written numpy; the optimizer is SGD
with momentum and a halving learning-rate schedule on stalled epochs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ..errors import (
    SingleClassTableError,
    UnknownConditionValueError,
)
from ..resampling import required_upsample_count
from ..seeding import derive_seed
from ..table import Schema, Table, concat_tables, from_columns
from .discretizer import (
    DEFAULT_MAX_BINS,
    Discretizer,
    NumericBins,
    fit_discretizer,
)

FORMAT_VERSION = 1


@dataclass(frozen=True)
class ArgnConfig:
    embed_dim: int = 16
    hidden_dim: int = 64
    epochs: int = 200
    batch_size: int = 256
    learning_rate: float = 0.05
    momentum: float = 0.9
    max_bins: int = DEFAULT_MAX_BINS
    seed: int = 0

    def to_dict(self) -> dict:
        return {
            "embed_dim": self.embed_dim,
            "hidden_dim": self.hidden_dim,
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "learning_rate": self.learning_rate,
            "momentum": self.momentum,
            "max_bins": self.max_bins,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class GenerationRequest:
    n_samples: int
    condition_column: str
    condition_value: str
    temperature: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_samples < 0:
            raise ValueError("n_samples must be non-negative")
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")


@dataclass
class ArgnModel:
    schema: Schema
    config: ArgnConfig
    column_order: tuple[str, ...]  # target first, then features in schema order
    vocab_sizes: tuple[int, ...]
    params: dict[str, np.ndarray]
    discretizer: Discretizer
    dictionaries: dict[str, tuple[str, ...]]
    epoch_losses: list[float] = field(default_factory=list)

    def describe(self) -> dict:
        return self.config.to_dict()


def _init_params(
    vocab_sizes: tuple[int, ...], d: int, h: int, rng: np.random.Generator
) -> dict[str, np.ndarray]:
    m = len(vocab_sizes)
    params: dict[str, np.ndarray] = {"b0": np.zeros(vocab_sizes[0])}
    for c in range(m - 1):  # the last column's embedding feeds no head
        params[f"emb_{c}"] = rng.normal(0.0, 0.1, size=(vocab_sizes[c], d))
    for t in range(1, m):
        fan_in = t * d
        params[f"W1_{t}"] = rng.normal(0.0, 1.0 / np.sqrt(fan_in), size=(fan_in, h))
        params[f"b1_{t}"] = np.zeros(h)
        params[f"W2_{t}"] = rng.normal(0.0, 1.0 / np.sqrt(h), size=(h, vocab_sizes[t]))
        params[f"b2_{t}"] = np.zeros(vocab_sizes[t])
    return params


def _softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def head_distribution(
    model_params: dict[str, np.ndarray],
    codes: np.ndarray,
    t: int,
    d: int,
    temperature: float = 1.0,
) -> np.ndarray:
    """Probability vector of column t given the preceding codes (batch)."""
    if t == 0:
        logits = np.broadcast_to(
            model_params["b0"], (codes.shape[0], model_params["b0"].size)
        )
        return _softmax(np.asarray(logits) / temperature)
    x = np.concatenate(
        [model_params[f"emb_{c}"][codes[:, c]] for c in range(t)], axis=1
    )
    a = np.tanh(x @ model_params[f"W1_{t}"] + model_params[f"b1_{t}"])
    logits = a @ model_params[f"W2_{t}"] + model_params[f"b2_{t}"]
    return _softmax(logits / temperature)


def loss_and_grads(
    params: dict[str, np.ndarray],
    codes: np.ndarray,
    vocab_sizes: tuple[int, ...],
    d: int,
) -> tuple[float, dict[str, np.ndarray]]:
    """Mean summed per-column cross-entropy and gradients for one batch."""
    B, m = codes.shape
    grads = {k: np.zeros_like(v) for k, v in params.items()}
    total = 0.0

    # head 0: plain categorical bias
    p0 = _softmax(np.broadcast_to(params["b0"], (B, vocab_sizes[0])).copy())
    total += -np.log(p0[np.arange(B), codes[:, 0]] + 1e-12).mean()
    d0 = p0.copy()
    d0[np.arange(B), codes[:, 0]] -= 1.0
    grads["b0"] = d0.mean(axis=0)

    for t in range(1, m):
        x = np.concatenate(
            [params[f"emb_{c}"][codes[:, c]] for c in range(t)], axis=1
        )
        z = x @ params[f"W1_{t}"] + params[f"b1_{t}"]
        a = np.tanh(z)
        logits = a @ params[f"W2_{t}"] + params[f"b2_{t}"]
        probs = _softmax(logits)
        total += -np.log(probs[np.arange(B), codes[:, t]] + 1e-12).mean()

        dlogits = probs.copy()
        dlogits[np.arange(B), codes[:, t]] -= 1.0
        dlogits /= B
        grads[f"W2_{t}"] += a.T @ dlogits
        grads[f"b2_{t}"] += dlogits.sum(axis=0)
        da = dlogits @ params[f"W2_{t}"].T
        dz = da * (1.0 - a * a)
        grads[f"W1_{t}"] += x.T @ dz
        grads[f"b1_{t}"] += dz.sum(axis=0)
        dx = dz @ params[f"W1_{t}"].T
        for c in range(t):
            np.add.at(
                grads[f"emb_{c}"], codes[:, c], dx[:, c * d : (c + 1) * d]
            )
    return float(total), grads


def _encode_table(table: Table, order: tuple[str, ...], disc: Discretizer) -> np.ndarray:
    cols = []
    for name in order:
        if name in disc.numeric:
            cols.append(disc.numeric[name].encode(table.column(name)))
        else:
            cols.append(table.column(name).astype(np.int32))
    return np.column_stack(cols)


def train(table: Table, discretizer: Discretizer, config: ArgnConfig) -> ArgnModel:
    """Fit the conditional heads by mini-batch SGD with momentum.

    The learning rate halves whenever an epoch fails to improve the best
    mean loss by at least 1e-4.
    """
    if table.n_rows < 2:
        raise SingleClassTableError("training needs at least 2 rows")
    y = table.y
    if y.min() == y.max():
        raise SingleClassTableError("training table has a single target class")
    schema = table.schema
    order = (schema.target,) + schema.feature_names
    vocab: list[int] = []
    dicts: dict[str, tuple[str, ...]] = {}
    for name in order:
        if name in discretizer.numeric:
            vocab.append(discretizer.numeric[name].n_bins)
        else:
            dicts[name] = table.dictionary(name)
            vocab.append(len(dicts[name]))
    vocab_sizes = tuple(vocab)

    codes = _encode_table(table, order, discretizer)
    rng = np.random.default_rng(derive_seed(config.seed, ["argn-train"]))
    params = _init_params(vocab_sizes, config.embed_dim, config.hidden_dim, rng)
    velocity = {k: np.zeros_like(v) for k, v in params.items()}

    n = codes.shape[0]
    lr = config.learning_rate
    best = np.inf
    epoch_losses: list[float] = []
    for _ in range(config.epochs):
        perm = rng.permutation(n)
        epoch_loss = 0.0
        n_batches = 0
        for start in range(0, n, config.batch_size):
            batch = codes[perm[start : start + config.batch_size]]
            loss, grads = loss_and_grads(params, batch, vocab_sizes, config.embed_dim)
            epoch_loss += loss
            n_batches += 1
            for k in params:
                velocity[k] = config.momentum * velocity[k] - lr * grads[k]
                params[k] = params[k] + velocity[k]
        epoch_loss /= n_batches
        epoch_losses.append(epoch_loss)
        if epoch_loss < best - 1e-4:
            best = epoch_loss
        else:
            lr *= 0.5
    return ArgnModel(
        schema=schema,
        config=config,
        column_order=order,
        vocab_sizes=vocab_sizes,
        params=params,
        discretizer=discretizer,
        dictionaries=dicts,
        epoch_losses=epoch_losses,
    )


def generate(model: ArgnModel, request: GenerationRequest) -> Table:
    """Sample rows left-to-right with the target clamped to the condition.

    Numeric codes decode to uniform draws inside their bins after all
    codes are sampled, in column order, from the same random stream.
    """
    schema = model.schema
    if request.condition_column != model.column_order[0]:
        raise ValueError(
            f"condition column must be {model.column_order[0]!r} (first in order)"
        )
    tdict = model.dictionaries[schema.target]
    if request.condition_value not in tdict:
        raise UnknownConditionValueError(
            f"value {request.condition_value!r} not among target values {list(tdict)}"
        )
    n = request.n_samples
    m = len(model.column_order)
    rng = np.random.default_rng(request.seed)
    codes = np.empty((n, m), dtype=np.int32)
    codes[:, 0] = tdict.index(request.condition_value)
    for t in range(1, m):
        probs = head_distribution(
            model.params, codes[:, :t], t, model.config.embed_dim, request.temperature
        )
        if n:
            cum = np.cumsum(probs, axis=1)
            r = rng.random(n)
            draw = (cum < r[:, None]).sum(axis=1)
            codes[:, t] = np.minimum(draw, model.vocab_sizes[t] - 1)

    columns: dict[str, np.ndarray] = {}
    for t, name in enumerate(model.column_order):
        if name in model.discretizer.numeric:
            columns[name] = model.discretizer.numeric[name].decode(codes[:, t], rng)
        else:
            columns[name] = codes[:, t]
    return from_columns(schema, columns, model.dictionaries)


def hybrid_upsample(table: Table, config: ArgnConfig) -> Table:
    """Train on the unbalanced table and append generated minority rows."""
    y = table.y
    if table.n_rows < 2 or y.min() == y.max():
        raise SingleClassTableError("hybrid upsampling needs both target classes")
    n_new = required_upsample_count(table)
    if n_new == 0:
        return table
    disc = fit_discretizer(table, config.max_bins)
    model = train(table, disc, config)
    request = GenerationRequest(
        n_samples=n_new,
        condition_column=table.schema.target,
        condition_value=table.schema.positive_label,
        seed=derive_seed(config.seed, ["argn-generate"]),
    )
    return concat_tables([table, generate(model, request)])


def save_argn(model: ArgnModel, path: str) -> None:
    meta = {
        "format_version": FORMAT_VERSION,
        "schema_text": model.schema.to_text(),
        "config": model.config.to_dict(),
        "column_order": list(model.column_order),
        "vocab_sizes": list(model.vocab_sizes),
        "dictionaries": {k: list(v) for k, v in model.dictionaries.items()},
        "epoch_losses": model.epoch_losses,
        "discretizer": {
            "max_bins": model.discretizer.max_bins,
            "columns": {
                name: bins.mode for name, bins in model.discretizer.numeric.items()
            },
        },
    }
    arrays: dict[str, np.ndarray] = {
        f"param_{k}": v for k, v in model.params.items()
    }
    for name, bins in model.discretizer.numeric.items():
        if bins.mode == "distinct":
            arrays[f"disc_{name}"] = bins.values
        else:
            arrays[f"disc_{name}"] = bins.edges
    with open(path, "wb") as fh:
        np.savez_compressed(
            fh,
            meta=np.frombuffer(json.dumps(meta).encode("utf-8"), dtype=np.uint8),
            **arrays,
        )


def load_argn(path: str) -> ArgnModel:
    with np.load(path, allow_pickle=False) as data:
        meta = json.loads(bytes(data["meta"]).decode("utf-8"))
        if meta.get("format_version") != FORMAT_VERSION:
            raise ValueError(
                f"unsupported model format version {meta.get('format_version')!r}"
            )
        params = {
            k[len("param_") :]: data[k].copy()
            for k in data.files
            if k.startswith("param_")
        }
        numeric: dict[str, NumericBins] = {}
        for name, mode in meta["discretizer"]["columns"].items():
            arr = data[f"disc_{name}"].copy()
            if mode == "distinct":
                numeric[name] = NumericBins(mode="distinct", values=arr)
            else:
                numeric[name] = NumericBins(mode="quantile", edges=arr)
    return ArgnModel(
        schema=Schema.from_text(meta["schema_text"]),
        config=ArgnConfig(**meta["config"]),
        column_order=tuple(meta["column_order"]),
        vocab_sizes=tuple(meta["vocab_sizes"]),
        params=params,
        discretizer=Discretizer(meta["discretizer"]["max_bins"], numeric),
        dictionaries={k: tuple(v) for k, v in meta["dictionaries"].items()},
        epoch_losses=list(meta["epoch_losses"]),
    )
