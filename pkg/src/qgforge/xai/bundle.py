"""Explanation bundles: the JSON wire format consumed by the scorer.

One bundle holds per-instance feature-importance matrices for the base
scenario, the two randomization scenarios, and K data resplits, all over one
shared feature list::

    {"method": str, "features": [str], "base": [[num]],
     "data_randomized": [[num]], "model_randomized": [[num]],
     "splits": [[[num]]]}

Matrices are row-major; values must be finite doubles.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import BundleError, TooFewSplits


@dataclass(frozen=True)
class ExplanationMatrix:
    """n_instances x n_features signed importance values."""

    values: np.ndarray
    feature_names: tuple[str, ...]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise BundleError("values", f"expected a 2-d matrix, got {values.ndim}-d")
        if len(self.feature_names) < 2:
            raise BundleError("features", "at least two features are required")
        if values.shape[1] != len(self.feature_names):
            raise BundleError(
                "values",
                f"rows have {values.shape[1]} columns for {len(self.feature_names)} features",
            )
        if values.size and not np.isfinite(values).all():
            raise BundleError("values", "importance values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))

    @property
    def n_instances(self) -> int:
        return self.values.shape[0]

    @property
    def n_features(self) -> int:
        return self.values.shape[1]

    def __eq__(self, other):
        if not isinstance(other, ExplanationMatrix):
            return NotImplemented
        return self.feature_names == other.feature_names and np.array_equal(
            self.values, other.values
        )

    __hash__ = None


@dataclass(frozen=True)
class ExplanationBundle:
    method: str
    features: tuple[str, ...]
    base: ExplanationMatrix
    data_randomized: ExplanationMatrix
    model_randomized: ExplanationMatrix
    splits: tuple[ExplanationMatrix, ...]

    def __post_init__(self):
        object.__setattr__(self, "features", tuple(self.features))
        object.__setattr__(self, "splits", tuple(self.splits))
        if len(self.splits) < 2:
            raise TooFewSplits(
                f"a bundle needs at least 2 splits, got {len(self.splits)}"
            )
        for label, matrix in self.named_matrices():
            if matrix.feature_names != self.features:
                raise BundleError(label, "matrix feature names differ from the bundle's")

    def named_matrices(self):
        yield "base", self.base
        yield "data_randomized", self.data_randomized
        yield "model_randomized", self.model_randomized
        for i, split in enumerate(self.splits):
            yield f"splits[{i}]", split

    __hash__ = None


# ---------------------------------------------------------------------------
# JSON wire format
# ---------------------------------------------------------------------------

def _matrix_from_json(raw, path: str, features: tuple[str, ...]) -> ExplanationMatrix:
    if not isinstance(raw, list):
        raise BundleError(path, "expected a list of rows")
    width = len(features)
    for i, row in enumerate(raw):
        if not isinstance(row, list):
            raise BundleError(f"{path}[{i}]", "expected a list of numbers")
        if len(row) != width:
            raise BundleError(
                f"{path}[{i}]", f"row has {len(row)} values, expected {width}"
            )
        for j, value in enumerate(row):
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise BundleError(f"{path}[{i}][{j}]", "expected a number")
            if not math.isfinite(value):
                raise BundleError(f"{path}[{i}][{j}]", "values must be finite")
    values = np.array(raw, dtype=np.float64).reshape(len(raw), width)
    return ExplanationMatrix(values=values, feature_names=features)


def bundle_from_json(text: str) -> ExplanationBundle:
    """Parse the wire format; errors carry the path of the offending field."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BundleError("$", f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise BundleError("$", "expected a JSON object")
    method = doc.get("method")
    if not isinstance(method, str) or not method:
        raise BundleError("method", "expected a non-empty string")
    features_raw = doc.get("features")
    if (
        not isinstance(features_raw, list)
        or len(features_raw) < 2
        or not all(isinstance(f, str) for f in features_raw)
    ):
        raise BundleError("features", "expected a list of at least two feature names")
    features = tuple(features_raw)
    splits_raw = doc.get("splits")
    if not isinstance(splits_raw, list):
        raise BundleError("splits", "expected a list of matrices")
    if len(splits_raw) < 2:
        raise BundleError("splits", f"need at least 2 splits, got {len(splits_raw)}")
    return ExplanationBundle(
        method=method,
        features=features,
        base=_matrix_from_json(doc.get("base"), "base", features),
        data_randomized=_matrix_from_json(
            doc.get("data_randomized"), "data_randomized", features
        ),
        model_randomized=_matrix_from_json(
            doc.get("model_randomized"), "model_randomized", features
        ),
        splits=tuple(
            _matrix_from_json(raw, f"splits[{i}]", features)
            for i, raw in enumerate(splits_raw)
        ),
    )


def bundle_to_json(bundle: ExplanationBundle) -> str:
    doc = {
        "method": bundle.method,
        "features": list(bundle.features),
        "base": bundle.base.values.tolist(),
        "data_randomized": bundle.data_randomized.values.tolist(),
        "model_randomized": bundle.model_randomized.values.tolist(),
        "splits": [split.values.tolist() for split in bundle.splits],
    }
    return json.dumps(doc, indent=1)


def read_bundle(path: str | Path) -> ExplanationBundle:
    return bundle_from_json(Path(path).read_text(encoding="utf-8"))


def write_bundle(bundle: ExplanationBundle, path: str | Path) -> None:
    Path(path).write_text(bundle_to_json(bundle) + "\n", encoding="utf-8")
