"""Experiment harness running the full rebalancing benchmark grid.

For every (fold, fraction, method, learner) combination the harness
downsamples the training fold, rebalances it with the requested method,
trains the learner, and scores the untouched holdout fold.  All
randomness comes from seeds derived from the master seed and the
combination coordinates, and rows are sorted by coordinate before
writing, so the results file is byte-identical across reruns and worker
counts.  Wall-clock timings go to a separate file for the same reason.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .classifiers import ForestConfig, GbmConfig, fit, predict_proba
from .errors import (
    EmptyColumnError,
    EmptySubgroupError,
    MalformedResultsError,
    TabrebalError,
)
from .metrics import (
    auc_pr,
    auc_roc,
    column_entropy,
    frequency_report,
    pr_curve,
    roc_curve,
)
from .resampling import (
    DEFAULT_FRACTION_GRID,
    induce_imbalance,
    required_upsample_count,
    stratified_kfold,
)
from .seeding import derive_seed
from .synth import ArgnConfig, hybrid_upsample
from .table import ColumnKind, Schema, Table, load_csv, parse_predicate
from .upsamplers import SmoteNcConfig, naive_oversample, smotenc_upsample

METHODS = ("unbalanced", "naive", "smotenc", "hybrid")
LEARNERS = ("rf", "gbm")

RESULT_COLUMNS = (
    "dataset",
    "fold",
    "fraction",
    "method",
    "learner",
    "status",
    "auc_roc",
    "auc_pr",
    "n_minority_train",
    "fingerprint",
    "error",
)


@dataclass(frozen=True)
class ExperimentConfig:
    dataset_path: str
    schema_path: str
    output_dir: str
    master_seed: int
    name: str = ""
    k_folds: int = 5
    fractions: tuple[float, ...] = DEFAULT_FRACTION_GRID
    methods: tuple[str, ...] = METHODS
    learners: tuple[str, ...] = LEARNERS
    folds: tuple[int, ...] = ()  # empty tuple runs every fold
    workers: int = 1
    smotenc_k: int = 5
    rf: ForestConfig = field(default_factory=ForestConfig)
    gbm: GbmConfig = field(default_factory=GbmConfig)
    argn: ArgnConfig = field(default_factory=ArgnConfig)
    subgroups: tuple[tuple[str, str], ...] = ()  # (name, predicate text)
    frequency_features: tuple[str, ...] = ()
    entropy_fraction: float | None = None

    def __post_init__(self) -> None:
        if not self.methods:
            raise ValueError("methods must be non-empty")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ValueError(f"unknown methods: {sorted(unknown)}")
        if not self.learners:
            raise ValueError("learners must be non-empty")
        unknown = set(self.learners) - set(LEARNERS)
        if unknown:
            raise ValueError(f"unknown learners: {sorted(unknown)}")
        for grid_name in ("methods", "learners", "fractions", "folds"):
            values = getattr(self, grid_name)
            if len(set(values)) != len(values):
                raise ValueError(f"duplicate entries in {grid_name}")
        if self.k_folds < 2:
            raise ValueError("k_folds must be at least 2")
        if not self.fractions:
            raise ValueError("fractions must be non-empty")
        for f in self.fractions:
            if not 0.0 < f < 1.0:
                raise ValueError(f"fraction {f} outside (0, 1)")
        for fold in self.folds:
            if not 0 <= fold < self.k_folds:
                raise ValueError(f"fold {fold} outside [0, {self.k_folds})")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")

    @property
    def dataset_name(self) -> str:
        if self.name:
            return self.name
        base = os.path.basename(self.dataset_path)
        return base.rsplit(".", 1)[0] if "." in base else base


_INT_KEYS = {
    "k_folds": "k_folds",
    "workers": "workers",
    "smotenc_k": "smotenc_k",
    "seed": "master_seed",
}
_LEARNER_KEYS = {
    "rf_trees": ("rf", "n_trees", int),
    "rf_depth": ("rf", "max_depth", int),
    "rf_bins": ("rf", "n_bins", int),
    "gbm_trees": ("gbm", "n_trees", int),
    "gbm_depth": ("gbm", "max_depth", int),
    "gbm_bins": ("gbm", "n_bins", int),
    "gbm_lr": ("gbm", "learning_rate", float),
    "gbm_lambda": ("gbm", "reg_lambda", float),
    "argn_embed_dim": ("argn", "embed_dim", int),
    "argn_hidden_dim": ("argn", "hidden_dim", int),
    "argn_epochs": ("argn", "epochs", int),
    "argn_batch_size": ("argn", "batch_size", int),
    "argn_lr": ("argn", "learning_rate", float),
    "argn_momentum": ("argn", "momentum", float),
    "argn_max_bins": ("argn", "max_bins", int),
}


def parse_config_text(text: str, **overrides) -> ExperimentConfig:
    """Build a config from ``key = value`` lines plus keyword overrides.

    Lists are comma-separated; ``subgroup <name> = <predicate>`` lines
    may repeat.  ``#`` starts a comment line.  Keyword overrides win over
    file values.
    """
    kw: dict = {"subgroups": []}
    nested: dict[str, dict] = {"rf": {}, "gbm": {}, "argn": {}}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"line {lineno}: expected key = value, got {raw!r}")
        key = key.strip()
        value = value.strip()
        if key.startswith("subgroup "):
            kw["subgroups"].append((key[len("subgroup ") :].strip(), value))
        elif key == "dataset":
            kw["dataset_path"] = value
        elif key == "schema":
            kw["schema_path"] = value
        elif key == "output":
            kw["output_dir"] = value
        elif key == "name":
            kw["name"] = value
        elif key == "fractions":
            kw["fractions"] = tuple(float(v) for v in value.split(","))
        elif key == "methods":
            kw["methods"] = tuple(v.strip() for v in value.split(","))
        elif key == "learners":
            kw["learners"] = tuple(v.strip() for v in value.split(","))
        elif key == "folds":
            kw["folds"] = tuple(int(v) for v in value.split(","))
        elif key == "frequency_features":
            kw["frequency_features"] = tuple(v.strip() for v in value.split(","))
        elif key == "entropy_fraction":
            kw["entropy_fraction"] = float(value)
        elif key in _INT_KEYS:
            kw[_INT_KEYS[key]] = int(value)
        elif key in _LEARNER_KEYS:
            group, attr, cast = _LEARNER_KEYS[key]
            nested[group][attr] = cast(value)
        else:
            raise ValueError(f"line {lineno}: unknown config key {key!r}")
    kw["subgroups"] = tuple(kw["subgroups"])
    kw.update(overrides)
    if nested["rf"] and "rf" not in kw:
        kw["rf"] = ForestConfig(**nested["rf"])
    if nested["gbm"] and "gbm" not in kw:
        kw["gbm"] = GbmConfig(**nested["gbm"])
    if nested["argn"] and "argn" not in kw:
        kw["argn"] = ArgnConfig(**nested["argn"])
    missing = [
        k
        for k in ("dataset_path", "schema_path", "output_dir", "master_seed")
        if k not in kw
    ]
    if missing:
        raise ValueError(f"config is missing required keys: {missing}")
    return ExperimentConfig(**kw)


def load_config(path: str, **overrides) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read(), **overrides)


def fingerprint(payload: dict) -> str:
    """Stable 12-hex-digit digest of a hyperparameter dictionary."""
    canon = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:12]


def _frac_str(fraction: float) -> str:
    return f"{fraction:g}"


def _rebalance(
    imb: Table, method: str, config: ExperimentConfig, seed: int
) -> Table:
    if method == "unbalanced":
        return imb
    n_new = required_upsample_count(imb)
    if method == "naive":
        return naive_oversample(imb, n_new, seed)
    if method == "smotenc":
        return smotenc_upsample(imb, n_new, SmoteNcConfig(config.smotenc_k, seed))
    return hybrid_upsample(imb, replace(config.argn, seed=seed))


def _method_params(method: str, config: ExperimentConfig) -> dict:
    if method == "naive" or method == "unbalanced":
        return {"method": method}
    if method == "smotenc":
        return {"method": method, "k_neighbors": config.smotenc_k}
    return {"method": method, **config.argn.to_dict()}


@dataclass
class ResultRow:
    dataset: str
    fold: int
    fraction: float
    method: str
    learner: str
    status: str
    auc_roc: float | None
    auc_pr: float | None
    n_minority_train: int | None
    fingerprint: str
    error: str

    def as_csv_row(self) -> list[str]:
        return [
            self.dataset,
            str(self.fold),
            _frac_str(self.fraction),
            self.method,
            self.learner,
            self.status,
            repr(self.auc_roc) if self.auc_roc is not None else "",
            repr(self.auc_pr) if self.auc_pr is not None else "",
            str(self.n_minority_train) if self.n_minority_train is not None else "",
            self.fingerprint,
            self.error,
        ]


@dataclass
class RunOutcome:
    output_dir: str
    results_path: str
    summary_path: str
    timings_path: str
    n_ok: int
    n_failed: int


def _run_unit(
    config: ExperimentConfig,
    table: Table,
    train_idx: np.ndarray,
    test_idx: np.ndarray,
    fold: int,
    fraction: float,
):
    """One (fold, fraction, method) cell: rebalance once, train all learners."""
    rows: list[ResultRow] = []
    curves: list[tuple[str, object]] = []
    timings: list[list[str]] = []
    dataset = config.dataset_name
    train_tab = table.filter_rows(train_idx)
    holdout = table.filter_rows(test_idx)
    fs = _frac_str(fraction)

    imb = None
    imb_error = None
    n_min = None
    try:
        imb = induce_imbalance(
            train_tab, fraction, derive_seed(config.master_seed, ["imbalance", fold])
        )
        n_min = imb.positive_count
    except TabrebalError as exc:
        imb_error = f"{type(exc).__name__}: {exc}"

    for method in config.methods:
        t0 = time.perf_counter()
        error = imb_error
        balanced = None
        if imb is not None:
            try:
                balanced = _rebalance(
                    imb,
                    method,
                    config,
                    derive_seed(config.master_seed, ["upsample", fold, fs, method]),
                )
            except TabrebalError as exc:
                error = f"{type(exc).__name__}: {exc}"
        upsample_s = time.perf_counter() - t0

        for learner in config.learners:
            lcfg = config.rf if learner == "rf" else config.gbm
            fp = fingerprint(
                {"learner": lcfg.to_dict(), **_method_params(method, config)}
            )
            if error is not None:
                rows.append(
                    ResultRow(
                        dataset, fold, fraction, method, learner,
                        "failed", None, None, n_min, fp, error,
                    )
                )
                timings.append(
                    [dataset, str(fold), fs, method, learner, f"{upsample_s:.3f}", ""]
                )
                continue
            t1 = time.perf_counter()
            try:
                model = fit(
                    balanced,
                    learner,
                    derive_seed(config.master_seed, ["fit", fold, fs, method, learner]),
                    config=lcfg,
                )
                scores = predict_proba(model, holdout)
                y = holdout.y
                row = ResultRow(
                    dataset, fold, fraction, method, learner,
                    "ok", auc_roc(y, scores), auc_pr(y, scores), n_min, fp, "",
                )
                combo = f"{dataset}_fold{fold}_f{fs}_{method}_{learner}"
                curves.append((f"{combo}_roc.csv", roc_curve(y, scores)))
                curves.append((f"{combo}_pr.csv", pr_curve(y, scores)))
            except TabrebalError as exc:
                row = ResultRow(
                    dataset, fold, fraction, method, learner,
                    "failed", None, None, n_min, fp, f"{type(exc).__name__}: {exc}",
                )
            rows.append(row)
            timings.append(
                [
                    dataset, str(fold), fs, method, learner,
                    f"{upsample_s:.3f}", f"{time.perf_counter() - t1:.3f}",
                ]
            )
    return rows, curves, timings


def run(config: ExperimentConfig) -> RunOutcome:
    schema = Schema.load(config.schema_path)
    table = load_csv(config.dataset_path, schema)
    for feat in config.frequency_features:
        if schema.kind_of(feat) != ColumnKind.CATEGORICAL:
            raise ValueError(f"frequency feature {feat!r} is not categorical")
    splits = stratified_kfold(
        table, config.k_folds, derive_seed(config.master_seed, ["kfold"])
    )
    if config.folds:
        wanted = set(config.folds)
        splits = [s for s in splits if s.fold in wanted]
    os.makedirs(config.output_dir, exist_ok=True)
    curves_dir = os.path.join(config.output_dir, "curves")
    os.makedirs(curves_dir, exist_ok=True)

    units = [
        (split, fraction)
        for split in splits
        for fraction in sorted(config.fractions)
    ]

    def task(args):
        split, fraction = args
        return _run_unit(config, table, split.train, split.test, split.fold, fraction)

    if config.workers == 1:
        outputs = [task(u) for u in units]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            outputs = list(pool.map(task, units))

    rows: list[ResultRow] = []
    timing_rows: list[list[str]] = []
    for unit_rows, unit_curves, unit_timings in outputs:
        rows.extend(unit_rows)
        timing_rows.extend(unit_timings)
        for fname, curve in unit_curves:
            curve.write_csv(os.path.join(curves_dir, fname))

    rows.sort(key=lambda r: (r.dataset, r.fold, r.fraction, r.method, r.learner))
    timing_rows.sort(key=lambda r: (r[0], int(r[1]), float(r[2]), r[3], r[4]))

    results_path = os.path.join(config.output_dir, "results.csv")
    with open(results_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RESULT_COLUMNS)
        for row in rows:
            writer.writerow(row.as_csv_row())

    timings_path = os.path.join(config.output_dir, "timings.csv")
    with open(timings_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["dataset", "fold", "fraction", "method", "learner",
             "upsample_s", "train_eval_s"]
        )
        writer.writerows(timing_rows)

    if config.subgroups:
        _write_entropy_reports(config, table, splits)

    summary_path = os.path.join(config.output_dir, "summary.csv")
    aggregate(results_path, summary_path)

    n_failed = sum(1 for r in rows if r.status != "ok")
    return RunOutcome(
        output_dir=config.output_dir,
        results_path=results_path,
        summary_path=summary_path,
        timings_path=timings_path,
        n_ok=len(rows) - n_failed,
        n_failed=n_failed,
    )


def _write_entropy_reports(config: ExperimentConfig, table: Table, splits) -> None:
    """Per-subgroup entropy of the minority partition, one arm per method.

    Uses fold 0 at the configured entropy fraction (default: the smallest
    fraction in the grid), mirroring the benchmark's seed derivations.
    """
    entropy_dir = os.path.join(config.output_dir, "entropy")
    os.makedirs(entropy_dir, exist_ok=True)
    fraction = (
        config.entropy_fraction
        if config.entropy_fraction is not None
        else min(config.fractions)
    )
    fs = _frac_str(fraction)
    fold = splits[0]
    train_tab = table.filter_rows(fold.train)
    holdout = table.filter_rows(fold.test)

    arms: list[tuple[str, Table | None, str]] = [("holdout", holdout, "")]
    try:
        imb = induce_imbalance(
            train_tab, fraction, derive_seed(config.master_seed, ["imbalance", 0])
        )
    except TabrebalError as exc:
        imb = None
        arms.append(("unbalanced", None, f"{type(exc).__name__}: {exc}"))
    if imb is not None:
        for method in config.methods:
            try:
                arms.append(
                    (
                        method,
                        _rebalance(
                            imb,
                            method,
                            config,
                            derive_seed(
                                config.master_seed, ["upsample", 0, fs, method]
                            ),
                        ),
                        "",
                    )
                )
            except TabrebalError as exc:
                arms.append((method, None, f"{type(exc).__name__}: {exc}"))

    features = table.schema.feature_names
    for name, text in config.subgroups:
        predicate = parse_predicate(text)
        path = os.path.join(entropy_dir, f"{name}.csv")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["arm", "feature", "entropy", "error"])
            for arm_name, arm_table, arm_error in arms:
                if arm_table is None:
                    writer.writerow([arm_name, "", "", arm_error])
                    continue
                try:
                    mask = predicate.mask(arm_table) & (arm_table.y == 1)
                    if not mask.any():
                        raise EmptySubgroupError(
                            f"predicate {text!r} matched no minority rows"
                        )
                    values = []
                    for feat in features:
                        h = column_entropy(arm_table, feat, mask)
                        values.append(h)
                        writer.writerow([arm_name, feat, repr(h), ""])
                    writer.writerow(
                        [arm_name, "all_avg", repr(float(np.mean(values))), ""]
                    )
                except (EmptySubgroupError, EmptyColumnError) as exc:
                    writer.writerow(
                        [arm_name, "", "", f"{type(exc).__name__}: {exc}"]
                    )
        for feat in config.frequency_features:
            freq_path = os.path.join(entropy_dir, f"{name}_freq_{feat}.csv")
            with open(freq_path, "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["arm", "category", "frequency", "error"])
                for arm_name, arm_table, arm_error in arms:
                    if arm_table is None:
                        writer.writerow([arm_name, "", "", arm_error])
                        continue
                    try:
                        mask = predicate.mask(arm_table) & (arm_table.y == 1)
                        if not mask.any():
                            raise EmptySubgroupError(
                                f"predicate {text!r} matched no minority rows"
                            )
                        sub = arm_table.filter_rows(np.flatnonzero(mask))
                        for cat, freq in frequency_report(sub, feat):
                            writer.writerow([arm_name, cat, repr(freq), ""])
                    except (EmptySubgroupError, EmptyColumnError) as exc:
                        writer.writerow(
                            [arm_name, "", "", f"{type(exc).__name__}: {exc}"]
                        )


SUMMARY_COLUMNS = (
    "dataset",
    "fraction",
    "method",
    "learner",
    "n",
    "auc_roc_mean",
    "auc_roc_sd",
    "auc_pr_mean",
    "auc_pr_sd",
)


def aggregate(results_path: str, out_path: str) -> None:
    """Mean and population standard deviation grouped over folds."""
    try:
        with open(results_path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or not set(RESULT_COLUMNS) <= set(
                reader.fieldnames
            ):
                raise MalformedResultsError(
                    f"{results_path}: expected columns {list(RESULT_COLUMNS)}"
                )
            records = list(reader)
    except OSError as exc:
        raise MalformedResultsError(f"cannot read {results_path}: {exc}") from None

    groups: dict[tuple, list[tuple[float, float]]] = {}
    for rec in records:
        if rec["status"] != "ok":
            continue
        key = (rec["dataset"], rec["fraction"], rec["method"], rec["learner"])
        try:
            pair = (float(rec["auc_roc"]), float(rec["auc_pr"]))
        except (ValueError, TypeError):
            raise MalformedResultsError(
                f"{results_path}: unparsable AUC in row {rec}"
            ) from None
        groups.setdefault(key, []).append(pair)

    def stats(values: list[float]) -> tuple[float, float]:
        arr = np.asarray(values, dtype=np.float64)
        return float(arr.mean()), float(arr.std())

    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_COLUMNS)
        for key in sorted(groups, key=lambda k: (k[0], float(k[1]), k[2], k[3])):
            rocs = [p[0] for p in groups[key]]
            prs = [p[1] for p in groups[key]]
            roc_m, roc_s = stats(rocs)
            pr_m, pr_s = stats(prs)
            writer.writerow(
                [
                    key[0], key[1], key[2], key[3], str(len(rocs)),
                    repr(roc_m), repr(roc_s), repr(pr_m), repr(pr_s),
                ]
            )
