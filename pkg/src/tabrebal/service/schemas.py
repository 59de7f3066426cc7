"""Request and response bodies for the HTTP service.

The service operates on files the caller can already reach: requests
carry paths, responses carry paths plus the numbers worth echoing back.
"""

from __future__ import annotations

from pydantic import BaseModel, Field


class SplitRequest(BaseModel):
    dataset_path: str
    schema_path: str
    output_dir: str
    k_folds: int = 5
    seed: int = 0


class FoldInfo(BaseModel):
    fold: int
    train_path: str
    test_path: str
    n_train: int
    n_test: int
    n_train_positive: int
    n_test_positive: int


class SplitResponse(BaseModel):
    folds: list[FoldInfo]


class ImbalanceRequest(BaseModel):
    dataset_path: str
    schema_path: str
    output_path: str
    fraction: float
    seed: int = 0


class ImbalanceResponse(BaseModel):
    output_path: str
    n_rows: int
    n_minority: int
    n_majority: int


class ArgnParams(BaseModel):
    """Optional overrides; unset fields keep the model's defaults."""

    embed_dim: int | None = None
    hidden_dim: int | None = None
    epochs: int | None = None
    batch_size: int | None = None
    learning_rate: float | None = None
    momentum: float | None = None
    max_bins: int | None = None

    def overrides(self) -> dict:
        return {k: v for k, v in self.model_dump().items() if v is not None}


class UpsampleRequest(BaseModel):
    dataset_path: str
    schema_path: str
    output_path: str
    method: str = Field(pattern="^(naive|smotenc|hybrid)$")
    seed: int = 0
    k_neighbors: int = 5
    argn: ArgnParams = Field(default_factory=ArgnParams)


class UpsampleResponse(BaseModel):
    output_path: str
    n_rows: int
    n_minority: int
    n_majority: int
    n_generated: int


class LearnerParams(BaseModel):
    """Optional overrides; unset fields keep the learner's defaults."""

    n_trees: int | None = None
    max_depth: int | None = None
    n_bins: int | None = None
    learning_rate: float | None = None
    reg_lambda: float | None = None
    bootstrap: bool | None = None
    feature_subsample: bool | None = None

    def overrides(self) -> dict:
        return {k: v for k, v in self.model_dump().items() if v is not None}


class TrainRequest(BaseModel):
    dataset_path: str
    schema_path: str
    model_path: str
    learner: str = Field(pattern="^(rf|gbm)$")
    seed: int = 0
    params: LearnerParams = Field(default_factory=LearnerParams)


class TrainResponse(BaseModel):
    model_path: str
    learner: str
    n_rows_train: int
    n_minority_train: int
    fingerprint: str


class EvaluateRequest(BaseModel):
    model_path: str
    dataset_path: str
    schema_path: str
    roc_path: str | None = None
    pr_path: str | None = None


class EvaluateResponse(BaseModel):
    auc_roc: float
    auc_pr: float
    n_rows: int
    n_positive: int
    roc_path: str | None = None
    pr_path: str | None = None


class ReportRequest(BaseModel):
    dataset_path: str
    schema_path: str
    predicate: str | None = None
    columns: list[str] | None = None
    frequency_column: str | None = None
    minority_only: bool = False


class FrequencyItem(BaseModel):
    category: str
    frequency: float


class ReportResponse(BaseModel):
    n_rows_matched: int
    entropy: dict[str, float]
    entropy_mean: float
    frequencies: list[FrequencyItem] | None = None


class BenchRequest(BaseModel):
    config_text: str
    seed: int


class BenchResponse(BaseModel):
    output_dir: str
    results_path: str
    summary_path: str
    timings_path: str
    n_ok: int
    n_failed: int


class AggregateRequest(BaseModel):
    results_path: str
    output_path: str


class AggregateResponse(BaseModel):
    output_path: str
    n_groups: int


class DemoDataRequest(BaseModel):
    csv_path: str
    schema_path: str
    n_rows: int = 20000
    seed: int = 0
    positive_rate: float = 0.25


class DemoDataResponse(BaseModel):
    csv_path: str
    schema_path: str
    n_rows: int
    n_positive: int


class ErrorBody(BaseModel):
    error: str
    detail: str
