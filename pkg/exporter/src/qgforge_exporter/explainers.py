"""Self-contained tabular explainers producing per-instance importances.

KernelSHAP estimates Shapley values of the interventional value function
v(S) = E_b[f(x with features outside S replaced from background b)] by a
weighted least squares over feature coalitions. With the small feature
counts used here the coalition space is enumerated exhaustively, so the
solve is exact up to the background approximation.

LIME fits a weighted ridge surrogate to the model's behaviour in a Gaussian
neighbourhood of the instance; the surrogate's coefficients (in standardized
feature space) are the importances.
"""

from __future__ import annotations

import itertools
from math import comb

import numpy as np

EXPLAINERS = ("SHAP", "LIME")


# ---------------------------------------------------------------------------
# KernelSHAP
# ---------------------------------------------------------------------------

def _coalitions(d: int, rng: np.random.Generator, max_coalitions: int) -> np.ndarray:
    total = 2**d - 2
    if total <= max_coalitions:
        rows = [
            [(size >> j) & 1 for j in range(d)]
            for size in range(1, 2**d - 1)
        ]
        return np.array(rows, dtype=np.float64)
    # always include all singleton and all-but-one coalitions, sample the rest
    rows = []
    eye = np.eye(d)
    rows.extend(eye.tolist())
    rows.extend((1.0 - eye).tolist())
    seen = {tuple(r) for r in rows}
    while len(rows) < max_coalitions:
        size = int(rng.integers(2, d - 1)) if d > 3 else 1
        members = rng.choice(d, size=size, replace=False)
        z = np.zeros(d)
        z[members] = 1.0
        key = tuple(z.tolist())
        if key not in seen:
            seen.add(key)
            rows.append(z.tolist())
    return np.array(rows, dtype=np.float64)


def _shapley_kernel_weights(coalitions: np.ndarray) -> np.ndarray:
    d = coalitions.shape[1]
    sizes = coalitions.sum(axis=1).astype(int)
    return np.array(
        [(d - 1) / (comb(d, s) * s * (d - s)) for s in sizes], dtype=np.float64
    )


def _coalition_values(
    predict, instance: np.ndarray, background: np.ndarray, coalitions: np.ndarray
) -> np.ndarray:
    m, d = coalitions.shape
    k = background.shape[0]
    # rows grouped per coalition: coalition features from the instance,
    # the rest from each background row
    masked = (
        coalitions[:, None, :] * instance[None, None, :]
        + (1.0 - coalitions)[:, None, :] * background[None, :, :]
    ).reshape(m * k, d)
    return predict(masked).reshape(m, k).mean(axis=1)


def kernel_shap_row(
    predict, instance: np.ndarray, background: np.ndarray,
    rng: np.random.Generator, max_coalitions: int = 2048,
) -> np.ndarray:
    """Shapley values for one instance; they sum to f(x) - E[f(background)]."""
    d = instance.shape[0]
    coalitions = _coalitions(d, rng, max_coalitions)
    weights = _shapley_kernel_weights(coalitions)
    values = _coalition_values(predict, instance, background, coalitions)
    base_value = float(predict(background).mean())
    fx = float(predict(instance[None, :])[0])

    # eliminate the last coefficient through the sum constraint
    gap = fx - base_value
    target = (values - base_value) - coalitions[:, -1] * gap
    design = coalitions[:, :-1] - coalitions[:, -1:]
    sqrt_w = np.sqrt(weights)[:, None]
    solution, *_ = np.linalg.lstsq(design * sqrt_w, target * sqrt_w[:, 0], rcond=None)
    phi = np.empty(d)
    phi[:-1] = solution
    phi[-1] = gap - solution.sum()
    return phi


def kernel_shap_matrix(
    predict, x_explain: np.ndarray, background: np.ndarray, seed: int,
    max_coalitions: int = 2048,
) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return np.vstack([
        kernel_shap_row(predict, row, background, rng, max_coalitions)
        for row in x_explain
    ])


# ---------------------------------------------------------------------------
# LIME
# ---------------------------------------------------------------------------

def lime_row(
    predict, instance: np.ndarray, feature_mean: np.ndarray, feature_std: np.ndarray,
    rng: np.random.Generator, n_samples: int = 400, ridge: float = 1.0,
) -> np.ndarray:
    """Weighted ridge surrogate coefficients around one instance."""
    d = instance.shape[0]
    std = np.where(feature_std > 0, feature_std, 1.0)
    noise = rng.standard_normal((n_samples, d))
    samples = instance[None, :] + noise * std[None, :]
    samples[0] = instance  # anchor the neighbourhood

    predictions = predict(samples)
    distances_sq = ((samples - instance[None, :]) / std[None, :]) ** 2
    kernel_width = 0.75 * np.sqrt(d)
    weights = np.exp(-distances_sq.sum(axis=1) / kernel_width**2)

    standardized = (samples - feature_mean[None, :]) / std[None, :]
    design = np.hstack([np.ones((n_samples, 1)), standardized])
    sqrt_w = np.sqrt(weights)[:, None]
    lhs = (design * sqrt_w).T @ (design * sqrt_w)
    lhs += ridge * np.eye(d + 1)
    rhs = (design * sqrt_w).T @ (predictions * sqrt_w[:, 0])
    coef = np.linalg.solve(lhs, rhs)
    return coef[1:]


def lime_matrix(
    predict, x_explain: np.ndarray, feature_mean: np.ndarray, feature_std: np.ndarray,
    seed: int, n_samples: int = 400,
) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return np.vstack([
        lime_row(predict, row, feature_mean, feature_std, rng, n_samples)
        for row in x_explain
    ])
