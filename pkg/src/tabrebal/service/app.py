"""HTTP service exposing the rebalancing toolkit over JSON.

Every route is a thin adapter: validate the body, call into the core
package, write any requested files, and echo the numbers back.  Domain
errors map to 400 with the exception class name so clients can branch
on them.
"""

from __future__ import annotations

import csv
import os
from dataclasses import replace

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import bench as bench_mod
from ..classifiers import ForestConfig, GbmConfig, fit, predict_proba
from ..classifiers.io import load_model, save_model
from ..datasets import make_ring_dataset
from ..errors import EmptySubgroupError, TabrebalError
from ..metrics import (
    auc_pr,
    auc_roc,
    column_entropy,
    frequency_report,
    pr_curve,
    roc_curve,
)
from ..resampling import induce_imbalance, required_upsample_count, stratified_kfold
from ..synth import ArgnConfig, hybrid_upsample
from ..table import Schema, load_csv, parse_predicate, write_csv
from ..upsamplers import SmoteNcConfig, naive_oversample, smotenc_upsample
from . import schemas as s


def _load(dataset_path: str, schema_path: str):
    return load_csv(dataset_path, Schema.load(schema_path))


def create_app() -> FastAPI:
    app = FastAPI(title="tabrebal", version="0.1.0")

    @app.exception_handler(TabrebalError)
    async def domain_error(request: Request, exc: TabrebalError):
        return JSONResponse(
            status_code=400,
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.exception_handler(ValueError)
    async def value_error(request: Request, exc: ValueError):
        return JSONResponse(
            status_code=400,
            content={"error": "ValueError", "detail": str(exc)},
        )

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/split", response_model=s.SplitResponse)
    def split(req: s.SplitRequest):
        table = _load(req.dataset_path, req.schema_path)
        splits = stratified_kfold(table, req.k_folds, req.seed)
        os.makedirs(req.output_dir, exist_ok=True)
        folds = []
        for sp in splits:
            train = table.filter_rows(sp.train)
            test = table.filter_rows(sp.test)
            train_path = os.path.join(req.output_dir, f"fold{sp.fold}_train.csv")
            test_path = os.path.join(req.output_dir, f"fold{sp.fold}_test.csv")
            write_csv(train, train_path)
            write_csv(test, test_path)
            folds.append(
                s.FoldInfo(
                    fold=sp.fold,
                    train_path=train_path,
                    test_path=test_path,
                    n_train=train.n_rows,
                    n_test=test.n_rows,
                    n_train_positive=train.positive_count,
                    n_test_positive=test.positive_count,
                )
            )
        return s.SplitResponse(folds=folds)

    @app.post("/imbalance", response_model=s.ImbalanceResponse)
    def imbalance(req: s.ImbalanceRequest):
        table = _load(req.dataset_path, req.schema_path)
        out = induce_imbalance(table, req.fraction, req.seed)
        write_csv(out, req.output_path)
        return s.ImbalanceResponse(
            output_path=req.output_path,
            n_rows=out.n_rows,
            n_minority=out.positive_count,
            n_majority=out.negative_count,
        )

    @app.post("/upsample", response_model=s.UpsampleResponse)
    def upsample(req: s.UpsampleRequest):
        table = _load(req.dataset_path, req.schema_path)
        n_new = required_upsample_count(table)
        if req.method == "naive":
            out = naive_oversample(table, n_new, req.seed)
        elif req.method == "smotenc":
            out = smotenc_upsample(table, n_new, SmoteNcConfig(req.k_neighbors, req.seed))
        else:
            cfg = ArgnConfig(seed=req.seed, **req.argn.overrides())
            out = hybrid_upsample(table, cfg)
        write_csv(out, req.output_path)
        return s.UpsampleResponse(
            output_path=req.output_path,
            n_rows=out.n_rows,
            n_minority=out.positive_count,
            n_majority=out.negative_count,
            n_generated=out.n_rows - table.n_rows,
        )

    @app.post("/train", response_model=s.TrainResponse)
    def train(req: s.TrainRequest):
        table = _load(req.dataset_path, req.schema_path)
        base = ForestConfig if req.learner == "rf" else GbmConfig
        config = base(**req.params.overrides())
        model = fit(table, req.learner, req.seed, config=config)
        save_model(model, req.model_path)
        return s.TrainResponse(
            model_path=req.model_path,
            learner=req.learner,
            n_rows_train=table.n_rows,
            n_minority_train=table.positive_count,
            fingerprint=bench_mod.fingerprint(
                {"learner": config.to_dict(), "method": "direct"}
            ),
        )

    @app.post("/evaluate", response_model=s.EvaluateResponse)
    def evaluate(req: s.EvaluateRequest):
        model = load_model(req.model_path)
        table = _load(req.dataset_path, req.schema_path)
        scores = predict_proba(model, table)
        y = table.y
        if req.roc_path:
            roc_curve(y, scores).write_csv(req.roc_path)
        if req.pr_path:
            pr_curve(y, scores).write_csv(req.pr_path)
        return s.EvaluateResponse(
            auc_roc=auc_roc(y, scores),
            auc_pr=auc_pr(y, scores),
            n_rows=table.n_rows,
            n_positive=table.positive_count,
            roc_path=req.roc_path,
            pr_path=req.pr_path,
        )

    @app.post("/report", response_model=s.ReportResponse)
    def report(req: s.ReportRequest):
        table = _load(req.dataset_path, req.schema_path)
        if req.minority_only:
            table = table.filter_rows(np.flatnonzero(table.y == 1))
        if req.predicate is not None:
            predicate = parse_predicate(req.predicate)
            table = table.filter_rows(np.flatnonzero(predicate.mask(table)))
        if table.n_rows == 0:
            raise EmptySubgroupError("no rows match the requested partition")
        columns = (
            tuple(req.columns)
            if req.columns is not None
            else table.schema.feature_names
        )
        entropy = {name: column_entropy(table, name) for name in columns}
        frequencies = None
        if req.frequency_column is not None:
            frequencies = [
                s.FrequencyItem(category=c, frequency=f)
                for c, f in frequency_report(table, req.frequency_column)
            ]
        return s.ReportResponse(
            n_rows_matched=table.n_rows,
            entropy=entropy,
            entropy_mean=float(np.mean(list(entropy.values()))),
            frequencies=frequencies,
        )

    @app.post("/bench", response_model=s.BenchResponse)
    def run_bench(req: s.BenchRequest):
        config = bench_mod.parse_config_text(req.config_text, master_seed=req.seed)
        outcome = bench_mod.run(config)
        return s.BenchResponse(
            output_dir=outcome.output_dir,
            results_path=outcome.results_path,
            summary_path=outcome.summary_path,
            timings_path=outcome.timings_path,
            n_ok=outcome.n_ok,
            n_failed=outcome.n_failed,
        )

    @app.post("/aggregate", response_model=s.AggregateResponse)
    def aggregate(req: s.AggregateRequest):
        bench_mod.aggregate(req.results_path, req.output_path)
        with open(req.output_path, newline="") as fh:
            n_groups = sum(1 for _ in csv.DictReader(fh))
        return s.AggregateResponse(output_path=req.output_path, n_groups=n_groups)

    @app.post("/demo-data", response_model=s.DemoDataResponse)
    def demo_data(req: s.DemoDataRequest):
        table = make_ring_dataset(req.n_rows, seed=req.seed, positive_rate=req.positive_rate)
        write_csv(table, req.csv_path)
        table.schema.save(req.schema_path)
        return s.DemoDataResponse(
            csv_path=req.csv_path,
            schema_path=req.schema_path,
            n_rows=table.n_rows,
            n_positive=table.positive_count,
        )

    return app
