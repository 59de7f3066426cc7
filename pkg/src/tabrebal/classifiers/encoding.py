"""Feature-matrix encoding for the tree learners.

Numeric columns pass through unchanged.  Categorical columns become
one-hot blocks when the training table shows at most ``onehot_cap``
distinct values, otherwise a single frequency-rank ordinal column
(rank 1 = most frequent, ties by dictionary code).  The mapping is
fitted on training data only and keyed by category string, so it
transfers to tables whose dictionaries were built in a different order.
Categories never seen in training encode as an all-zero block / rank 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..table import ColumnKind, Schema, Table

ONEHOT_CAP = 32


@dataclass(frozen=True)
class ColumnPlan:
    name: str
    mode: str  # "numeric" | "onehot" | "ordinal"
    categories: tuple[str, ...] = ()


@dataclass(frozen=True)
class Encoder:
    schema: Schema
    plans: tuple[ColumnPlan, ...]

    @classmethod
    def fit(cls, table: Table, onehot_cap: int = ONEHOT_CAP) -> "Encoder":
        plans: list[ColumnPlan] = []
        for name in table.schema.feature_names:
            if table.schema.kind_of(name) is ColumnKind.NUMERIC:
                plans.append(ColumnPlan(name, "numeric"))
                continue
            d = table.dictionary(name)
            counts = np.bincount(table.column(name), minlength=len(d))
            observed = [c for c in range(len(d)) if counts[c] > 0]
            observed.sort(key=lambda c: (-counts[c], c))
            cats = tuple(d[c] for c in observed)
            mode = "onehot" if len(cats) <= onehot_cap else "ordinal"
            plans.append(ColumnPlan(name, mode, cats))
        return cls(table.schema, tuple(plans))

    @property
    def n_features(self) -> int:
        return sum(
            len(p.categories) if p.mode == "onehot" else 1 for p in self.plans
        )

    def feature_names(self) -> list[str]:
        out: list[str] = []
        for p in self.plans:
            if p.mode == "onehot":
                out.extend(f"{p.name}={c}" for c in p.categories)
            else:
                out.append(p.name)
        return out

    def transform(self, table: Table) -> np.ndarray:
        n = table.n_rows
        X = np.zeros((n, self.n_features), dtype=np.float64)
        col = 0
        for p in self.plans:
            if p.mode == "numeric":
                X[:, col] = table.column(p.name)
                col += 1
                continue
            d = table.dictionary(p.name)
            slot_of = {cat: i for i, cat in enumerate(p.categories)}
            lookup = np.array(
                [slot_of.get(cat, -1) for cat in d], dtype=np.int64
            )
            slots = lookup[table.column(p.name)]
            if p.mode == "onehot":
                seen = slots >= 0
                X[np.flatnonzero(seen), col + slots[seen]] = 1.0
                col += len(p.categories)
            else:
                X[:, col] = np.where(slots >= 0, slots + 1, 0).astype(np.float64)
                col += 1
        return X

    def to_dict(self) -> dict:
        return {
            "plans": [
                {"name": p.name, "mode": p.mode, "categories": list(p.categories)}
                for p in self.plans
            ]
        }

    @classmethod
    def from_dict(cls, schema: Schema, data: dict) -> "Encoder":
        plans = tuple(
            ColumnPlan(p["name"], p["mode"], tuple(p["categories"]))
            for p in data["plans"]
        )
        return cls(schema, plans)
