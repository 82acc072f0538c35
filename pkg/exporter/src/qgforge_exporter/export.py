"""Scenario orchestration: one export job, four scenarios, one bundle file.

The bundle wire format is the scoring CLI's external interface::

    {"method": str, "features": [str], "base": [[num]],
     "data_randomized": [[num]], "model_randomized": [[num]],
     "splits": [[[num]]]}

This package writes that format directly and never imports the scorer.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data import BUNDLED, Dataset, load_dataset
from .explainers import EXPLAINERS, kernel_shap_matrix, lime_matrix
from .models import MODELS, fit_model, positive_class_probability, random_init_model

_TRAIN_FRACTION = 0.8
_N_EXPLAIN = 16
_BACKGROUND_SIZE = 16


@dataclass(frozen=True)
class ExportJob:
    dataset: str = BUNDLED
    model: str = "logistic"
    explainer: str = "SHAP"
    splits: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}; pick one of {MODELS}")
        if self.explainer not in EXPLAINERS:
            raise ValueError(
                f"unknown explainer {self.explainer!r}; pick one of {EXPLAINERS}"
            )
        if self.splits < 2:
            raise ValueError(f"need at least 2 splits, got {self.splits}")


def _explain(job: ExportJob, model, x_explain, x_train, seed: int) -> np.ndarray:
    def predict(rows: np.ndarray) -> np.ndarray:
        return positive_class_probability(model, rows)

    if job.explainer == "SHAP":
        rng = np.random.default_rng(seed)
        background = x_train[
            rng.permutation(len(x_train))[:_BACKGROUND_SIZE]
        ]
        return kernel_shap_matrix(predict, x_explain, background, seed)
    return lime_matrix(
        predict, x_explain, x_train.mean(axis=0), x_train.std(axis=0), seed
    )


def _split(rng: np.random.Generator, data: Dataset):
    order = rng.permutation(len(data.x))
    cut = int(len(order) * _TRAIN_FRACTION)
    train, test = order[:cut], order[cut:]
    return data.x[train], data.y[train], data.x[test]


def run_export(job: ExportJob) -> dict:
    """Execute the four scenarios and return the bundle document."""
    data = load_dataset(job.dataset, job.seed)
    rng = np.random.default_rng(job.seed)

    x_train, y_train, x_test = _split(rng, data)
    x_explain = x_test[:_N_EXPLAIN]

    base_model = fit_model(job.model, job.seed, x_train, y_train)
    base = _explain(job, base_model, x_explain, x_train, job.seed)

    shuffled = rng.permutation(y_train)
    if shuffled.min() == shuffled.max():
        shuffled[0] = 1.0 - shuffled[0]
    data_rand_model = fit_model(job.model, job.seed + 1, x_train, shuffled)
    data_randomized = _explain(job, data_rand_model, x_explain, x_train, job.seed)

    model_rand = random_init_model(job.model, job.seed + 2, x_train)
    model_randomized = _explain(job, model_rand, x_explain, x_train, job.seed)

    split_matrices = []
    for k in range(job.splits):
        xk_train, yk_train, xk_test = _split(rng, data)
        if yk_train.min() == yk_train.max():
            yk_train[0] = 1.0 - yk_train[0]
        model_k = fit_model(job.model, job.seed + 10 + k, xk_train, yk_train)
        split_matrices.append(
            _explain(job, model_k, xk_test[:_N_EXPLAIN], xk_train, job.seed)
        )

    matrices = {
        "base": base,
        "data_randomized": data_randomized,
        "model_randomized": model_randomized,
    }
    d = len(data.feature_names)
    for label, matrix in list(matrices.items()) + [
        (f"splits[{i}]", m) for i, m in enumerate(split_matrices)
    ]:
        if matrix.shape[1] != d:
            raise AssertionError(f"{label}: expected {d} columns, got {matrix.shape[1]}")
        if not np.isfinite(matrix).all():
            raise AssertionError(f"{label}: non-finite importance values")

    return {
        "method": job.explainer,
        "features": list(data.feature_names),
        "base": base.tolist(),
        "data_randomized": data_randomized.tolist(),
        "model_randomized": model_randomized.tolist(),
        "splits": [m.tolist() for m in split_matrices],
    }


def export(job: ExportJob, out_path: str | Path) -> Path:
    """Run the job and write the bundle file; returns the written path."""
    document = run_export(job)
    path = Path(out_path)
    path.write_text(json.dumps(document, indent=1) + "\n", encoding="utf-8")
    return path
