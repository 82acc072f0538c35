"""Dataset selection: a bundled small tabular set or a user CSV."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from sklearn.datasets import load_breast_cancer

BUNDLED = "breast_cancer"

# keep KernelSHAP's coalition space fully enumerable
_MAX_FEATURES = 8
_MAX_ROWS = 400


@dataclass(frozen=True)
class Dataset:
    x: np.ndarray
    y: np.ndarray
    feature_names: tuple[str, ...]


def load_dataset(selector: str, seed: int) -> Dataset:
    """Resolve the selector: the bundled set's name or a CSV path.

    CSV files need a header row; the last column is the binary label, the
    rest are numeric features.
    """
    if selector == BUNDLED:
        return _bundled(seed)
    path = Path(selector)
    if not path.is_file():
        raise ValueError(f"unknown dataset {selector!r} (not {BUNDLED!r}, not a CSV path)")
    return _from_csv(path)


def _bundled(seed: int) -> Dataset:
    raw = load_breast_cancer()
    x, y = raw.data, raw.target
    # highest-variance features after standardization carry the signal
    scaled = (x - x.mean(axis=0)) / (x.std(axis=0) + 1e-12)
    order = np.argsort(-scaled.var(axis=0), kind="stable")[:_MAX_FEATURES]
    order = np.sort(order)
    rng = np.random.default_rng(seed)
    rows = rng.permutation(len(x))[:_MAX_ROWS]
    rows.sort()
    names = tuple(str(raw.feature_names[j]).replace(" ", "_") for j in order)
    return Dataset(
        x=np.ascontiguousarray(x[np.ix_(rows, order)], dtype=np.float64),
        y=np.ascontiguousarray(y[rows], dtype=np.float64),
        feature_names=names,
    )


def _from_csv(path: Path) -> Dataset:
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if not header or len(header) < 3:
            raise ValueError(f"{path}: need a header with at least two features and a label")
        rows = [[float(v) for v in row] for row in reader if row]
    if len(rows) < 40:
        raise ValueError(f"{path}: need at least 40 rows, got {len(rows)}")
    data = np.asarray(rows, dtype=np.float64)
    x, y = data[:, :-1], data[:, -1]
    labels = np.unique(y)
    if len(labels) != 2:
        raise ValueError(f"{path}: label column must be binary, found {len(labels)} values")
    y = (y == labels.max()).astype(np.float64)
    if x.shape[1] > _MAX_FEATURES:
        x = x[:, :_MAX_FEATURES]
        header = header[:_MAX_FEATURES] + header[-1:]
    names = tuple(h.strip().replace(" ", "_") for h in header[:-1])
    return Dataset(x=np.ascontiguousarray(x), y=y, feature_names=names)
