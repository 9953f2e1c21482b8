"""Shared fixtures: one synthetic dataset and one trained model per family.

Training and batch explanation are session-scoped so the acceptance
criteria and the module tests share the same artifacts instead of
retraining per test.
"""

from __future__ import annotations

import time

import pytest

from prospect_explain.explain import ExplainConfig
from prospect_explain.synthgen import generate
from prospect_explain.workflows import explain_records, train_pipeline

DATASET_SEED = 7
SPLIT_SEED = 1
TRAIN_SEED = 1
EXPLAIN_SEED = 101

MODEL_KINDS = ("logreg", "svm", "mlp")


@pytest.fixture(scope="session")
def default_dataset():
    return generate(258, seed=DATASET_SEED)


@pytest.fixture(scope="session")
def pipelines(default_dataset):
    return {
        kind: train_pipeline(
            default_dataset, kind, 0.5, split_seed=SPLIT_SEED, train_seed=TRAIN_SEED
        )
        for kind in MODEL_KINDS
    }


@pytest.fixture(scope="session")
def test_split_explanations(default_dataset, pipelines):
    """Default-config explanations of every test instance, per model.

    Returns ({kind: [Explanation]}, elapsed_seconds) so the acceptance
    suite can check the batch runtime it actually paid.
    """
    cfg = ExplainConfig(seed=EXPLAIN_SEED)
    start = time.monotonic()
    out = {}
    for kind in MODEL_KINDS:
        model = pipelines[kind].model
        out[kind] = explain_records(
            model, default_dataset, list(model.test_ids), cfg
        )
    elapsed = time.monotonic() - start
    return out, elapsed
