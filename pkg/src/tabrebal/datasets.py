"""Synthetic mixed-type demo data with a nonlinear class boundary.

The positive class lives on an annulus in the (x1, x2) plane while the
negative class clusters near the origin, so no single axis-aligned cut
separates them.  Two noisy categorical features (a radius band and an
angle sector) summarize the geometry coarsely; two more columns are
pure nuisance.  The construction makes the numeric columns depend on
the categorical ones in a class-independent way, which is the regime
where a conditional generator can widen a tiny minority sample.
"""

from __future__ import annotations

import numpy as np

from .table import ColumnKind, Schema, Table, from_columns

RING_EDGES = (0.8, 1.6, 2.4, 3.2)
N_SECTORS = 8


N_NUISANCE = 6


def ring_schema() -> Schema:
    nuisance = tuple(f"n{i}" for i in range(1, N_NUISANCE + 1))
    return Schema(
        names=("label", "band", "sector", "x1", "x2") + nuisance + ("group",),
        kinds=(
            ColumnKind.CATEGORICAL,
            ColumnKind.CATEGORICAL,
            ColumnKind.CATEGORICAL,
            ColumnKind.NUMERIC,
            ColumnKind.NUMERIC,
        )
        + (ColumnKind.NUMERIC,) * N_NUISANCE
        + (ColumnKind.CATEGORICAL,),
        target="label",
        positive_label="pos",
    )


def make_ring_dataset(
    n_rows: int = 20000,
    seed: int = 0,
    positive_rate: float = 0.25,
) -> Table:
    """Annulus-vs-core classification table with mixed feature types.

    Positives sit at radius ~ N(2.7, 0.35), negatives at Rayleigh(1.0);
    the tails overlap so scores cannot saturate.  ``band`` is the radius
    quantized after fresh noise, ``sector`` the angle likewise, so both
    are informative but deliberately blurry.  ``n1``..``n6`` and
    ``group`` carry no signal; they exist so that a model fit on a
    handful of minority rows has something to overfit.
    """
    if n_rows < 1:
        raise ValueError("n_rows must be positive")
    if not 0.0 < positive_rate < 1.0:
        raise ValueError("positive_rate must be inside (0, 1)")
    rng = np.random.default_rng(seed)
    y = rng.random(n_rows) < positive_rate
    radius = np.where(
        y,
        rng.normal(2.7, 0.35, n_rows),
        rng.rayleigh(1.0, n_rows),
    )
    radius = np.abs(radius)
    theta = rng.uniform(0.0, 2.0 * np.pi, n_rows)
    x1 = radius * np.cos(theta) + rng.normal(0.0, 0.15, n_rows)
    x2 = radius * np.sin(theta) + rng.normal(0.0, 0.15, n_rows)
    band = np.searchsorted(RING_EDGES, radius + rng.normal(0.0, 0.45, n_rows))
    blurred = (theta + rng.normal(0.0, 0.3, n_rows)) % (2.0 * np.pi)
    sector = np.minimum(
        (blurred / (2.0 * np.pi) * N_SECTORS).astype(np.int64), N_SECTORS - 1
    )
    group = rng.integers(0, 6, n_rows)

    schema = ring_schema()
    dictionaries = {
        "label": ("neg", "pos"),
        "band": tuple(f"band{i}" for i in range(len(RING_EDGES) + 1)),
        "sector": tuple(f"s{i}" for i in range(N_SECTORS)),
        "group": tuple(f"g{i}" for i in range(6)),
    }
    columns = {
        "label": y.astype(np.int32),
        "band": band,
        "sector": sector,
        "x1": x1,
        "x2": x2,
        "group": group,
    }
    for i in range(1, N_NUISANCE + 1):
        columns[f"n{i}"] = rng.normal(0.0, 1.0, n_rows)
    return from_columns(schema, columns, dictionaries)
