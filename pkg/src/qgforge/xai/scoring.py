"""Fidelity-robustness scoring of feature-importance explanations.

Fidelity is a binary sanity verdict: explanations of a label-randomized
retrain and of a randomly initialized model must both look *dissimilar* to
the base explanation, where similarity is the normalized discounted
cumulative gain (NDCG) of the candidate's feature ranking against the base
relevances. Robustness is the mean symmetrized pairwise NDCG across data
splits. The final score is their product, so a failed sanity check zeroes
everything.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from ..errors import AllZeroReference, EmptyMatrix, LengthMismatch, TooFewSplits
from .bundle import ExplanationBundle, ExplanationMatrix
from .kernels import ndcg_kernel, ndcg_many_kernel

MONITORING_QUESTION = "Are LIME/SHAP explanations appropriate for explaining the model?"
MONITORING_TRIGGER = "model retrained on new data"

NULL_CALIBRATED = "null_calibrated"
FIXED_THRESHOLD = "fixed_threshold"


@dataclass(frozen=True)
class ScoreConfig:
    """Pass/fail mechanics for the fidelity randomization tests.

    The default calibrates the cut against a seeded null distribution of
    permuted-reference rankings, because NDCG has a high chance baseline
    that varies with the feature count; a fixed threshold stays available
    for reproducing simpler protocols.
    """

    fidelity_mode: str = NULL_CALIBRATED
    permutations: int = 1000
    quantile: float = 0.95
    threshold: float | None = None
    rng_seed: int = 0
    aggregation: str = "mean_abs"

    def __post_init__(self):
        if self.fidelity_mode not in (NULL_CALIBRATED, FIXED_THRESHOLD):
            raise ValueError(f"unknown fidelity mode {self.fidelity_mode!r}")
        if self.aggregation != "mean_abs":
            raise ValueError(f"unknown aggregation {self.aggregation!r}")
        if self.fidelity_mode == NULL_CALIBRATED:
            if self.permutations < 100:
                raise ValueError("null calibration needs at least 100 permutations")
            if not 0.5 < self.quantile < 1.0:
                raise ValueError("quantile must lie in (0.5, 1)")
        else:
            if self.threshold is None or not 0.0 < self.threshold < 1.0:
                raise ValueError("fixed mode needs a threshold in (0, 1)")


def aggregate(matrix: ExplanationMatrix) -> np.ndarray:
    """Per-feature relevance: mean of absolute importances over instances.

    Absolute value comes first so opposing local attributions do not cancel.
    """
    if matrix.n_instances == 0:
        raise EmptyMatrix("cannot aggregate a matrix with no instances")
    return np.mean(np.abs(matrix.values), axis=0)


def ndcg(reference: np.ndarray, candidate: np.ndarray) -> float:
    """Ranking similarity of ``candidate`` against ``reference`` relevances.

    Features are ranked by candidate value descending, ties broken by
    ascending feature index; the gain of rank i (1-based) is
    reference[rank_i] / log2(i + 1), normalized by the same sum under the
    ideal (reference-descending) ranking. Result lies in [0, 1] for
    non-negative references.
    """
    reference = np.asarray(reference, dtype=np.float64)
    candidate = np.asarray(candidate, dtype=np.float64)
    if reference.ndim != 1 or candidate.ndim != 1:
        raise LengthMismatch("reference and candidate must be 1-d vectors")
    if reference.shape[0] != candidate.shape[0]:
        raise LengthMismatch(
            f"reference has {reference.shape[0]} entries, candidate {candidate.shape[0]}"
        )
    if reference.shape[0] < 1:
        raise LengthMismatch("vectors must have at least one entry")
    if np.any(reference < 0):
        raise ValueError("reference relevances must be non-negative")
    if not np.any(reference > 0):
        raise AllZeroReference("all reference relevances are zero")
    return float(ndcg_kernel(reference, candidate))


def null_quantile(
    reference: np.ndarray, permutations: int, quantile: float, rng_seed: int
) -> float:
    """q-quantile of ndcg(reference, reference[perm]) over random permutations."""
    rng = np.random.default_rng(rng_seed)
    n = reference.shape[0]
    perms = rng.permuted(np.tile(np.arange(n), (permutations, 1)), axis=1)
    candidates = reference[perms]
    values = ndcg_many_kernel(reference, candidates)
    return float(np.quantile(values, quantile))


@dataclass(frozen=True)
class FidelityResult:
    fidelity: int
    data_rand_similarity: float
    model_rand_similarity: float
    threshold: float
    mode: str


def fidelity_check(bundle: ExplanationBundle, config: ScoreConfig = ScoreConfig()) -> FidelityResult:
    """Binary sanity verdict from the two randomization tests.

    Both randomized scenarios must score *below* the threshold: a faithful
    method's explanations are destroyed by label shuffling and by random
    weights, so high similarity to the base explanation fails the check.
    """
    reference = aggregate(bundle.base)
    s_data = ndcg(reference, aggregate(bundle.data_randomized))
    s_model = ndcg(reference, aggregate(bundle.model_randomized))
    if config.fidelity_mode == NULL_CALIBRATED:
        threshold = null_quantile(
            reference, config.permutations, config.quantile, config.rng_seed
        )
    else:
        threshold = float(config.threshold)
    passed = s_data < threshold and s_model < threshold
    return FidelityResult(
        fidelity=1 if passed else 0,
        data_rand_similarity=s_data,
        model_rand_similarity=s_model,
        threshold=threshold,
        mode=config.fidelity_mode,
    )


@dataclass(frozen=True)
class PairwiseNdcg:
    first: int
    second: int
    value: float

    def to_json_dict(self) -> dict:
        return {"splits": [self.first, self.second], "ndcg": self.value}


@dataclass(frozen=True)
class RobustnessResult:
    value: float
    pairwise: tuple[PairwiseNdcg, ...]


def robustness(bundle: ExplanationBundle) -> RobustnessResult:
    """Mean symmetrized NDCG over all unordered split pairs.

    NDCG is asymmetric in (reference, candidate), so each pair is scored in
    both directions and averaged; no split is privileged as the reference.
    """
    if len(bundle.splits) < 2:
        raise TooFewSplits("robustness needs at least 2 splits")
    relevances = [aggregate(split) for split in bundle.splits]
    pairs = []
    for i, j in combinations(range(len(relevances)), 2):
        sym = 0.5 * (ndcg(relevances[i], relevances[j]) + ndcg(relevances[j], relevances[i]))
        pairs.append(PairwiseNdcg(first=i, second=j, value=sym))
    mean = float(np.mean([p.value for p in pairs]))
    return RobustnessResult(value=mean, pairwise=tuple(pairs))


VERDICT_NOT_TRUSTED = "not_trusted"
VERDICT_ACCEPTABLE = "acceptable"
VERDICT_GOOD = "good"
VERDICT_PRETTY_GOOD = "pretty_good"


def verdict_for(final_score: float, fidelity: int) -> str:
    # bands are strict: exactly 0.9 is good, not pretty_good
    if fidelity == 0:
        return VERDICT_NOT_TRUSTED
    if final_score > 0.9:
        return VERDICT_PRETTY_GOOD
    if final_score > 0.8:
        return VERDICT_GOOD
    return VERDICT_ACCEPTABLE


@dataclass(frozen=True)
class MonitoringRecord:
    question: str
    value: float
    trigger: str

    def to_json_dict(self) -> dict:
        return {"question": self.question, "value": self.value, "trigger": self.trigger}


@dataclass(frozen=True)
class FidelityRobustnessReport:
    fidelity: int
    ndcg_data_rand: float
    ndcg_model_rand: float
    null_threshold_used: float | None
    robustness: float
    pairwise_ndcg: tuple[PairwiseNdcg, ...]
    final_score: float
    verdict: str
    monitoring_record: MonitoringRecord

    def to_json_dict(self) -> dict:
        return {
            "fidelity": self.fidelity,
            "ndcg_data_rand": self.ndcg_data_rand,
            "ndcg_model_rand": self.ndcg_model_rand,
            "null_threshold_used": self.null_threshold_used,
            "robustness": self.robustness,
            "pairwise_ndcg": [p.to_json_dict() for p in self.pairwise_ndcg],
            "final_score": self.final_score,
            "verdict": self.verdict,
            "monitoring_record": self.monitoring_record.to_json_dict(),
        }


def score(bundle: ExplanationBundle, config: ScoreConfig = ScoreConfig()) -> FidelityRobustnessReport:
    """Full report: fidelity bit times robustness mean, with verdict band."""
    fid = fidelity_check(bundle, config)
    rob = robustness(bundle)
    final = float(fid.fidelity) * rob.value
    return FidelityRobustnessReport(
        fidelity=fid.fidelity,
        ndcg_data_rand=fid.data_rand_similarity,
        ndcg_model_rand=fid.model_rand_similarity,
        null_threshold_used=fid.threshold if fid.mode == NULL_CALIBRATED else None,
        robustness=rob.value,
        pairwise_ndcg=rob.pairwise,
        final_score=final,
        verdict=verdict_for(final, fid.fidelity),
        monitoring_record=MonitoringRecord(
            question=MONITORING_QUESTION, value=final, trigger=MONITORING_TRIGGER
        ),
    )
