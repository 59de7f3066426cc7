"""Histogram-binned decision trees shared by the forest and the booster.

Bin cut points are actual training-data values (the full distinct-value
set when small, order-statistic quantiles otherwise).  A split predicate
is ``x <= cut``, so any strictly increasing transform of a feature moves
the cuts with the data and leaves the induced partition unchanged.

Two growth criteria: ``gini`` (leaf = positive fraction) and ``newton``
(leaf = -G/(H + lambda), gain by the regularized second-order formula).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MIN_GAIN = 1e-12


def bin_cuts(x: np.ndarray, n_bins: int) -> np.ndarray:
    """Ascending cut values; bin b holds x <= cuts[b], last bin the rest."""
    u = np.unique(x)
    if u.size <= 1:
        return np.empty(0, dtype=np.float64)
    if u.size <= n_bins:
        return u[:-1]
    qs = np.arange(1, n_bins) / n_bins
    return np.unique(np.quantile(x, qs, method="lower"))


def bin_matrix(X: np.ndarray, n_bins: int) -> tuple[np.ndarray, list[np.ndarray]]:
    n, p = X.shape
    codes = np.empty((n, p), dtype=np.int32)
    cuts: list[np.ndarray] = []
    for j in range(p):
        c = bin_cuts(X[:, j], n_bins)
        codes[:, j] = np.searchsorted(c, X[:, j], side="left")
        cuts.append(c)
    return codes, cuts


@dataclass
class Tree:
    feature: np.ndarray  # int32; -1 marks a leaf
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    def predict(self, X: np.ndarray) -> np.ndarray:
        idx = np.zeros(X.shape[0], dtype=np.int64)
        active = np.flatnonzero(self.feature[idx] >= 0)
        while active.size:
            node = idx[active]
            f = self.feature[node]
            go_left = X[active, f] <= self.threshold[node]
            idx[active] = np.where(go_left, self.left[node], self.right[node])
            active = active[self.feature[idx[active]] >= 0]
        return self.value[idx]

    def to_array(self) -> np.ndarray:
        return np.column_stack(
            [
                self.feature.astype(np.float64),
                self.threshold,
                self.left.astype(np.float64),
                self.right.astype(np.float64),
                self.value,
            ]
        )

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "Tree":
        return cls(
            feature=arr[:, 0].astype(np.int32),
            threshold=arr[:, 1].copy(),
            left=arr[:, 2].astype(np.int64),
            right=arr[:, 3].astype(np.int64),
            value=arr[:, 4].copy(),
        )


def _gini_weighted(n: float, pos: float) -> float:
    # n * (1 - p^2 - q^2) == 2 * pos * neg / n
    if n <= 0:
        return 0.0
    return 2.0 * pos * (n - pos) / n


def grow_tree(
    codes: np.ndarray,
    cuts: list[np.ndarray],
    mode: str,
    *,
    y: np.ndarray | None = None,
    g: np.ndarray | None = None,
    h: np.ndarray | None = None,
    max_depth: int | None,
    rng: np.random.Generator | None = None,
    features_per_split: int | None = None,
    reg_lambda: float = 1.0,
) -> Tree:
    """Depth-first greedy growth over pre-binned features.

    ``features_per_split`` draws that many candidate features per split
    (requires ``rng``); None considers every feature.
    """
    n, p = codes.shape
    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    value: list[float] = []

    def leaf_value(idx: np.ndarray) -> float:
        if mode == "gini":
            return float(y[idx].mean())
        G = float(g[idx].sum())
        H = float(h[idx].sum())
        return -G / (H + reg_lambda)

    def new_node() -> int:
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(0.0)
        return len(feature) - 1

    def best_split(idx: np.ndarray):
        if features_per_split is not None and features_per_split < p:
            cand = np.sort(rng.choice(p, size=features_per_split, replace=False))
        else:
            cand = np.arange(p)
        if mode == "gini":
            y_sub = y[idx].astype(np.float64)
            pos_total = float(y_sub.sum())
            parent = _gini_weighted(idx.size, pos_total)
        else:
            g_sub = g[idx]
            h_sub = h[idx]
            G = float(g_sub.sum())
            H = float(h_sub.sum())
            parent = G * G / (H + reg_lambda)
        best = (MIN_GAIN, -1, -1)  # gain, feature, bin
        for j in cand:
            nb = cuts[j].size + 1
            if nb < 2:
                continue
            c = codes[idx, j]
            cnt = np.bincount(c, minlength=nb).astype(np.float64)
            nL = np.cumsum(cnt)[:-1]
            nR = idx.size - nL
            valid = (nL > 0) & (nR > 0)
            if not valid.any():
                continue
            if mode == "gini":
                pL = np.cumsum(np.bincount(c, weights=y_sub, minlength=nb))[:-1]
                pR = pos_total - pL
                with np.errstate(divide="ignore", invalid="ignore"):
                    wL = 2.0 * pL * (nL - pL) / nL
                    wR = 2.0 * pR * (nR - pR) / nR
                gains = np.where(valid, parent - wL - wR, -np.inf)
            else:
                GL = np.cumsum(np.bincount(c, weights=g_sub, minlength=nb))[:-1]
                HL = np.cumsum(np.bincount(c, weights=h_sub, minlength=nb))[:-1]
                GR = G - GL
                HR = H - HL
                gains = np.where(
                    valid,
                    0.5
                    * (
                        GL * GL / (HL + reg_lambda)
                        + GR * GR / (HR + reg_lambda)
                        - parent
                    ),
                    -np.inf,
                )
            b = int(np.argmax(gains))  # first bin on ties
            if gains[b] > best[0]:
                best = (float(gains[b]), int(j), b)
        return best

    def build(idx: np.ndarray, depth: int) -> int:
        node = new_node()
        stop = idx.size < 2 or (max_depth is not None and depth >= max_depth)
        if not stop and mode == "gini":
            stop = y[idx].min() == y[idx].max()
        if not stop:
            gain, j, b = best_split(idx)
            if j >= 0:
                mask = codes[idx, j] <= b
                left_idx = idx[mask]
                right_idx = idx[~mask]
                feature[node] = j
                threshold[node] = float(cuts[j][b])
                left[node] = build(left_idx, depth + 1)
                right[node] = build(right_idx, depth + 1)
                return node
        value[node] = leaf_value(idx)
        return node

    build(np.arange(n, dtype=np.int64), 0)
    return Tree(
        feature=np.asarray(feature, dtype=np.int32),
        threshold=np.asarray(threshold, dtype=np.float64),
        left=np.asarray(left, dtype=np.int64),
        right=np.asarray(right, dtype=np.int64),
        value=np.asarray(value, dtype=np.float64),
    )
