"""Explanation-quality scoring: bundles, NDCG, fidelity and robustness."""

from .bundle import (
    ExplanationBundle,
    ExplanationMatrix,
    bundle_from_json,
    bundle_to_json,
    read_bundle,
    write_bundle,
)
from .scoring import (
    FidelityRobustnessReport,
    MONITORING_QUESTION,
    MONITORING_TRIGGER,
    ScoreConfig,
    aggregate,
    fidelity_check,
    ndcg,
    null_quantile,
    robustness,
    score,
    verdict_for,
)
from .synth import SynthSpec, synth_generate

__all__ = [
    "ExplanationBundle",
    "ExplanationMatrix",
    "FidelityRobustnessReport",
    "MONITORING_QUESTION",
    "MONITORING_TRIGGER",
    "ScoreConfig",
    "SynthSpec",
    "aggregate",
    "bundle_from_json",
    "bundle_to_json",
    "fidelity_check",
    "ndcg",
    "null_quantile",
    "read_bundle",
    "robustness",
    "score",
    "synth_generate",
    "verdict_for",
    "write_bundle",
]
