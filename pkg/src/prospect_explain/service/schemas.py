"""Pydantic request/response models for the HTTP service.

Artifacts travel inline: datasets as CSV text and models in the same
versioned text format the CLI writes, so anything produced over HTTP is
interchangeable with files on disk.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field


class FeatureParamsIn(BaseModel):
    mean_success: float
    mean_failure: float
    std: float


class SynthRequest(BaseModel):
    n: int = 258
    seed: int
    prior: float = 0.5
    features: dict[str, FeatureParamsIn] | None = None


class SynthResponse(BaseModel):
    csv: str
    n_success: int
    n_failure: int


class TrainRequest(BaseModel):
    csv: str
    model: Literal["logreg", "svm", "mlp"]
    test_fraction: float = 0.5
    split_seed: int
    train_seed: int


class TrainReportOut(BaseModel):
    final_loss: float
    train_accuracy: float
    test_accuracy: float
    epochs: int


class TrainResponse(BaseModel):
    model: str = Field(description="serialized model (versioned text format)")
    report: TrainReportOut


class EvaluateRequest(BaseModel):
    model: str
    csv: str


class EvaluateResponse(BaseModel):
    accuracy: float


class ExplainRequest(BaseModel):
    model: str
    csv: str
    index: int | None = None
    all_test: bool = False
    samples: int = 5000
    sigma: float = 3.375
    l1: float = 0.001
    seed: int


class FeatureWeightOut(BaseModel):
    name: str
    value: float
    weight: float


class ExplanationOut(BaseModel):
    id: int
    predicted_probability: float
    intercept: float
    fidelity: float
    converged: bool
    features: list[FeatureWeightOut]
    tsv: str
    svg: str


class ExplainResponse(BaseModel):
    explanations: list[ExplanationOut]


class StatsRequest(BaseModel):
    csv: str


class StatsResponse(BaseModel):
    tsv: str


class HealthResponse(BaseModel):
    status: str
    version: str
