#!/usr/bin/env python3
"""Regenerate the bundled explanation-stage design-knowledge fixture.

The fixture is a complete, valid repository: the generic lifecycle skeleton,
the explanation stage with its two leaf gates, the stakeholder roster, and
the two explainability risks. Output is canonical, so re-running the script
on an unchanged definition is a no-op.

Usage: python scripts/build_fixture.py [output-dir]
"""

from __future__ import annotations

import sys
from pathlib import Path

from qgforge import model, store
from qgforge.model import (
    CollectionQg,
    ExplanationApplicability,
    ExplanationMethodConfig,
    ExplanationPurpose,
    ExplanationResult,
    ExplanationScope,
    ExplanationTiming,
    LeafQg,
    LifecycleStage,
    Likelihood,
    MonitoringHook,
    QgTags,
    RepositoryKind,
    Risk,
    RiskLinks,
    RiskStatus,
    Severity,
    Stakeholder,
    StakeholderRole,
    SystemInfo,
    TaiCriterion,
    TemplateRepository,
    VersionMeta,
    VersionPhase,
)
from qgforge.xai.scoring import MONITORING_QUESTION, MONITORING_TRIGGER

DEFAULT_OUT = Path(__file__).resolve().parent.parent / "fixtures" / "explanation-stage"

ROOT = model.ROOT_NAME
SCORE_GATE = "QG_FidelityRobustnessScore_(SHAPLIME)"
METHOD_GATE = "QG_MethodConfiguration_(Explanation)"


def _collection(name, stage, description, children=()):
    return CollectionQg(
        name=name, stage=stage, description=description, children=tuple(children)
    )


def build_repository() -> TemplateRepository:
    gates = {}

    def add(gate):
        gates[gate.name] = gate

    add(_collection(
        ROOT,
        LifecycleStage.CONCEPTUALIZATION,
        "Root of the lifecycle tree. Summarizes all stage collections for the "
        "application and anchors pulls, scores and exports.",
        [
            "QG_Conceptualization",
            "QG_Data",
            "QG_Development",
            "QG_Deployment",
            "QG_Maintenance",
            "QG_Decommissioning",
        ],
    ))
    add(_collection(
        "QG_Conceptualization",
        LifecycleStage.CONCEPTUALIZATION,
        "Project inception: business analysis, system requirements and the "
        "feasibility decision. Fills the contextual system sections that the "
        "rest of the lifecycle links against.",
    ))
    add(_collection(
        "QG_Data",
        LifecycleStage.DATA,
        "Design choices around data acquisition, quality and transformation. "
        "The model may not exist yet; data quality decisions made here "
        "propagate into every later stage.",
        ["QG_Utilization_(Data)"],
    ))
    add(_collection(
        "QG_Utilization_(Data)",
        LifecycleStage.DATA,
        "Data quality assessment and preprocessing: statistical profiling, "
        "cleaning and the transformations that produce model-ready inputs.",
    ))
    add(_collection(
        "QG_Development",
        LifecycleStage.DEVELOPMENT,
        "Model creation, evaluation and refinement, plus the explanation "
        "stage that runs alongside model work.",
        [
            "QG_Configuration_(Development)",
            "QG_Generation_(Development)",
            "QG_Evaluation_(Development)",
            "QG_Optimization_(Development)",
            "QG_Explanation_(Development)",
        ],
    ))
    add(_collection(
        "QG_Configuration_(Development)",
        LifecycleStage.DEVELOPMENT,
        "Model and hyperparameter configuration: the architecture and "
        "training setup whose outputs downstream gates explain and evaluate.",
    ))
    add(_collection(
        "QG_Generation_(Development)",
        LifecycleStage.DEVELOPMENT,
        "Model training runs that turn a configuration and prepared data "
        "into candidate models.",
    ))
    add(_collection(
        "QG_Evaluation_(Development)",
        LifecycleStage.DEVELOPMENT,
        "Performance evaluation strategy: metric selection and measurement "
        "used to monitor the model. Metric quality bounds what any "
        "explanation of the model can show.",
    ))
    add(_collection(
        "QG_Optimization_(Development)",
        LifecycleStage.DEVELOPMENT,
        "Iterative improvement of the configured model, including "
        "post-processing; explored combinations are tracked as template "
        "branches rather than merged into the released concept.",
    ))
    add(_collection(
        "QG_Explanation_(Development)",
        LifecycleStage.DEVELOPMENT,
        "Everything required to explain model output responsibly: method "
        "configuration, evaluation of the produced explanations, and their "
        "presentation to people.",
        [METHOD_GATE, "QG_Evaluation_(Explanation)", "QG_UserInteraction_(Explanation)"],
    ))
    add(_collection(
        "QG_Evaluation_(Explanation)",
        LifecycleStage.DEVELOPMENT,
        "Assessment of generated explanations on two axes: usability for "
        "the intended audience and objective quality of the explanation "
        "itself. Explanations must be validated, not assumed meaningful; "
        "unvalidated explanations may be coincidental or misleading.",
        ["QG_Usability_(Explanation)", "QG_Quality_(Explanation)"],
    ))
    add(_collection(
        "QG_Usability_(Explanation)",
        LifecycleStage.DEVELOPMENT,
        "Subjective evaluation: whether the audience can understand and act "
        "on the explanations. Assessed with user studies, surveys and case "
        "reviews; outside the numeric tooling in this template.",
    ))
    add(_collection(
        "QG_Quality_(Explanation)",
        LifecycleStage.DEVELOPMENT,
        "Objective evaluation of explanation reliability. With explanation "
        "ground truth unavailable, mathematical properties computed from the "
        "explanations themselves stand in: the gates below contribute "
        "unsupervised checks.",
        [SCORE_GATE],
    ))
    add(_collection(
        "QG_UserInteraction_(Explanation)",
        LifecycleStage.DEVELOPMENT,
        "Presentation of explanations to stakeholders: interfaces at levels "
        "of detail matched to each audience, an interaction flow that builds "
        "an accurate picture of what the system can and cannot do, and "
        "notifications when system behaviour changes in ways that affect "
        "interpretation. Clear communication is the first defence against "
        "explanations confusing the people they are meant to inform.",
    ))
    add(_collection(
        "QG_Deployment",
        LifecycleStage.DEPLOYMENT,
        "Integration of the released model into its target environment, "
        "including validation against real-world data distributions and the "
        "pipelines it joins.",
    ))
    add(_collection(
        "QG_Maintenance",
        LifecycleStage.MAINTENANCE,
        "Continuous monitoring and re-evaluation in production: drift "
        "detection, periodic validation, and feeding post-market insight "
        "back into a new planning cycle.",
    ))
    add(_collection(
        "QG_Decommissioning",
        LifecycleStage.DECOMMISSIONING,
        "Controlled retirement of the system from its environment, "
        "potentially reversing integration steps from earlier stages.",
    ))

    add(LeafQg(
        name=METHOD_GATE,
        tags=QgTags(
            name="Explanation method configuration",
            intent="Pin down, per explanation method in use, why explanations "
                   "are produced and in what form, so evaluation and "
                   "presentation can be planned against explicit choices.",
            problem="Explanation methods differ along axes that are easy to "
                    "leave implicit; an unexamined default produces "
                    "explanations nobody can evaluate or act on.",
            solution="Record a five-way configuration for each method: "
                     "purpose (model validation, preprocessing assessment, "
                     "stakeholder information, model discovery), "
                     "applicability (model-agnostic or model-specific), "
                     "scope (global or local), result form (text, "
                     "visualization, statistical summary, feature "
                     "importance), and timing (ante-hoc or post-hoc).",
            applicability=(
                "feature_importance", "local", "global", "post_hoc",
                "ante_hoc", "model_agnostic", "model_specific", "shap", "lime",
            ),
            consequences="Multiple simultaneous purposes may need multiple "
                         "configurations; each configured method must be "
                         "wired into evaluation and user interaction.",
            usage_example="A tabular classifier explained with SHAP or LIME: "
                          "local scope, feature-importance result, "
                          "model-agnostic, post-hoc, configured for model "
                          "validation and stakeholder information.",
        ),
        content=(
            "Defines the explanation setting for one method; append further "
            "instances for additional methods. Prefer intrinsically "
            "interpretable (ante-hoc) models where the use case permits: "
            "explanations that are part of the model architecture need far "
            "less downstream validation than post-hoc approximations. When "
            "post-hoc methods are chosen anyway, this configuration is what "
            "the evaluation stage tests against.\n"
            "The instance recorded here covers the SHAP/LIME family: local, "
            "per-prediction feature-importance explanations, model-agnostic "
            "and post-hoc."
        ),
        method=(
            "Derive each axis from use-case requirements rather than tool "
            "defaults: who consumes the explanation, what decision it "
            "supports, what the computational budget allows, and whether "
            "the model family constrains the method. Record the selection "
            "and revisit it whenever the model, data or audience changes."
        ),
        inputs=("QG_Configuration_(Development)", "system:application"),
        outputs=(),
        representation={
            "ai_expert": "Full configuration matrix with the trade-offs "
                         "behind each axis and pointers to method-specific "
                         "constraints.",
            "data_scientist": "Checklist form: chosen value per axis, the "
                              "alternatives that were rejected, and why.",
        },
        evaluation_notes=(
            "Open: whether a single configuration per method suffices when "
            "the same method serves several purposes at once, or whether "
            "purposes should be tracked as separate instances."
        ),
        risk_links=RiskLinks(poses=("unfaithful_explanations",)),
        explanation_config=ExplanationMethodConfig(
            purpose=(
                ExplanationPurpose.MODEL_VALIDATION,
                ExplanationPurpose.STAKEHOLDER_INFORMATION,
                ExplanationPurpose.MODEL_DISCOVERY,
            ),
            applicability=ExplanationApplicability.MODEL_AGNOSTIC,
            scope=ExplanationScope.LOCAL,
            result=ExplanationResult.FEATURE_IMPORTANCE,
            stage=ExplanationTiming.POST_HOC,
        ),
    ))

    add(LeafQg(
        name=SCORE_GATE,
        tags=QgTags(
            name="Fidelity-robustness score for SHAP and LIME explanations",
            intent="Decide numerically whether local feature-importance "
                   "explanations of a trained model deserve trust.",
            problem="Post-hoc importance rankings can look plausible while "
                    "tracking neither the model nor the data, and can flip "
                    "under small changes to the evaluation data.",
            solution="Run two randomization sanity checks (retraining on "
                     "shuffled labels; replacing the trained weights with "
                     "random ones) and a split-stability measurement, "
                     "compare rankings with the normalized discounted "
                     "cumulative gain, and multiply the binary sanity "
                     "outcome with mean pairwise stability.",
            applicability=(
                "feature_importance", "local", "post_hoc", "model_agnostic",
                "shap", "lime", "tabular",
            ),
            consequences="Each scoring run retrains the model several times; "
                         "schedule it with the training budget. A zero "
                         "score blocks the explanation pipeline until the "
                         "method, model or data changes.",
            usage_example="Export importance matrices for the four scenarios "
                          "from the trained classifier, run the scorer, and "
                          "gate the release on the verdict band.",
        ),
        content=(
            "Scores explanation quality on two complementary axes and "
            "combines them by multiplication.\n"
            "Fidelity is a sanity bit: explanations must change when the "
            "link between model and data is destroyed. If retraining on "
            "shuffled labels or randomizing the model weights leaves the "
            "importance ranking close to the original, the explanations "
            "never depended on what the model learned, and the bit is 0.\n"
            "Robustness is the mean ranking similarity of explanations "
            "computed on slightly different data splits, a value between 0 "
            "and 1. The method assumes that stability across resampled test "
            "splits stands in for stability under test-set distribution "
            "change, and that once the sanity checks pass, the mean of the "
            "per-instance explanations represents the method's behaviour.\n"
            "The final score is fidelity times robustness: zero whenever "
            "fidelity fails, otherwise the robustness value."
        ),
        method=(
            "1. Produce per-instance importance matrices for four "
            "scenarios: the trained model (base), a model retrained on "
            "label-shuffled data, an untrained randomly initialized model, "
            "and K models retrained on resampled train/test splits.\n"
            "2. Aggregate each matrix to one relevance vector per scenario: "
            "mean of absolute importances per feature.\n"
            "3. Compare each randomized scenario's ranking to the base "
            "relevances with NDCG, which weights agreement on the most "
            "important features highest. Both similarities must fall below "
            "a threshold calibrated from a null distribution of permuted "
            "rankings; then fidelity = 1, else 0.\n"
            "4. Score every pair of splits with symmetrized NDCG and "
            "average: robustness.\n"
            "5. Final score = fidelity x robustness. Above 0.8 reads as "
            "good, above 0.9 as pretty good; at 0 the explanations must "
            "not be trusted. Low scores call for regenerating explanations "
            "with a different model, data treatment or importance method."
        ),
        inputs=(
            "QG_Utilization_(Data)",
            "QG_Configuration_(Development)",
            "QG_Evaluation_(Development)",
            METHOD_GATE,
        ),
        outputs=(METHOD_GATE, "QG_Deployment", "QG_Maintenance"),
        monitoring_hooks=(
            MonitoringHook(
                question=MONITORING_QUESTION,
                trigger=MONITORING_TRIGGER,
                value_domain="score in [0, 1]; 0 means not trustworthy",
            ),
        ),
        representation={
            "ai_expert": "Per-test NDCG values, the calibrated threshold, "
                         "pairwise split similarities and the combined "
                         "score, for diagnosing which scenario failed.",
            "data_scientist": "The verdict band plus the two sanity "
                              "similarities, as a go/no-go signal on the "
                              "current preprocessing and model setup.",
            "domain_expert": "Top-ranked features of the base explanation "
                             "for a subjective cross-check against domain "
                             "knowledge, alongside the trust verdict.",
            "regulator": "Evidence that explanation quality is measured, "
                         "thresholded and monitored after deployment, with "
                         "the retraining trigger documented.",
            "ai_user": "A plain statement whether the system's explanations "
                       "are currently considered reliable.",
        },
        evaluation_notes=(
            "Open questions: the number of splits K and their overlap "
            "policy; whether per-instance rankings should be compared "
            "instead of the aggregated mean; and where exactly the "
            "sanity-check similarity cut belongs. The chosen metrics are "
            "widely referenced and domain-independent, which is why this "
            "gate is kept generic."
        ),
        risk_links=RiskLinks(controls=("unfaithful_explanations",)),
    ))

    stakeholders = (
        Stakeholder(
            id="ai_expert",
            display_name="AI Expert",
            role=StakeholderRole.ACTIVE,
            description="Designs models and explanation tooling; reconsiders "
                        "development choices when scores degrade.",
        ),
        Stakeholder(
            id="data_scientist",
            display_name="Data Scientist",
            role=StakeholderRole.ACTIVE,
            description="Owns data preparation and training runs; acts on "
                        "evaluation outcomes.",
        ),
        Stakeholder(
            id="domain_expert",
            display_name="Domain Expert",
            role=StakeholderRole.CONSULTING,
            description="Validates explanations subjectively against field "
                        "knowledge.",
        ),
        Stakeholder(
            id="regulator",
            display_name="Regulator",
            role=StakeholderRole.PASSIVE,
            description="Reads compliance-oriented summaries of the "
                        "lifecycle evidence.",
        ),
        Stakeholder(
            id="ai_user",
            display_name="AI User",
            role=StakeholderRole.PASSIVE,
            description="Consumes model decisions and their explanations in "
                        "daily work.",
        ),
    )

    risks = (
        Risk(
            id="unfaithful_explanations",
            title="Unfaithful or unreliable explanations",
            description=(
                "Explanation output fails to reflect the model's actual "
                "reasoning, or changes arbitrarily with the evaluation "
                "data, giving stakeholders a false picture of how "
                "decisions are made."
            ),
            tai_criterion=TaiCriterion.TRANSPARENCY,
            subsection="Explainability",
            source=(
                "Approximation error of post-hoc attribution methods and "
                "their sensitivity to data and training variation."
            ),
            events=(
                "Stakeholders act on an importance ranking that "
                "misrepresents the model.",
                "Debugging guided by explanations hides a real defect "
                "instead of exposing it.",
                "Contradictory explanations for similar cases surface and "
                "erode trust in the system.",
            ),
            harm=(
                "Wrong downstream decisions taken with unwarranted "
                "confidence; loss of trust in the deployed system."
            ),
            likelihood=Likelihood.POSSIBLE,
            severity=Severity.SERIOUS,
            controlled_by=(SCORE_GATE,),
            status=RiskStatus.OPEN,
        ),
        Risk(
            id="incomprehensible_explanations",
            title="Explanations incomprehensible to their audience",
            description=(
                "Explanations are too vague, too complex or badly framed "
                "for the people who must act on them, so the model's "
                "reasoning stays opaque in practice even when the "
                "explanation method itself is sound."
            ),
            tai_criterion=TaiCriterion.TRANSPARENCY,
            subsection="Explainability",
            source=(
                "Mismatch between explanation presentation and the "
                "audience's capacity and context."
            ),
            events=(
                "Users misread an explanation and over- or under-trust a "
                "model decision.",
                "An interface presents raw attribution values without the "
                "framing needed to interpret them.",
            ),
            harm=(
                "Misinterpretation of model behaviour leading to misuse, "
                "reduced trust and rejection of the system."
            ),
            likelihood=Likelihood.LIKELY,
            severity=Severity.SERIOUS,
            controlled_by=("QG_UserInteraction_(Explanation)",),
            status=RiskStatus.OPEN,
        ),
    )

    system_info = SystemInfo(
        application=(
            "Generic template for a high-risk AI application. Record the "
            "intended purpose, the operating environment, the AI technique "
            "in use and reasonably foreseeable misuse. The explanation "
            "stage below assumes a trained classifier whose predictions "
            "are explained with local feature-importance methods.\n"
        ),
        compliance=(
            "Record the system's regulatory classification, the "
            "obligations that follow from it, and pointers to the "
            "conformity evidence produced along the lifecycle.\n"
        ),
        documentation=(
            "Index of the technical documentation extracted from the "
            "lifecycle gates, kept current across template versions.\n"
        ),
        ethics_general=(
            "General ethical commitments for the application: fairness, "
            "human oversight, transparency towards affected people, and "
            "accountability for decisions the system supports.\n"
        ),
        ethics_specific=(
            "Use-case-specific ethical concerns and how lifecycle "
            "decisions address them; fill in per application.\n"
        ),
        domain_knowledge=(
            "Background material that contributors outside the application "
            "domain need in order to participate in lifecycle decisions; "
            "fill in per application.\n"
        ),
        stakeholders=stakeholders,
    )

    return TemplateRepository(
        kind=RepositoryKind.DESIGN_KNOWLEDGE,
        system_info=system_info,
        risk_register=risks,
        gates=gates,
        version=VersionMeta(
            version_id="v0",
            phase=VersionPhase.PRE_SELECTION,
            branch_name="main",
            note="explanation-stage design knowledge fixture",
        ),
    )


def main() -> int:
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else DEFAULT_OUT
    repo = build_repository()
    report = model.validate(repo)
    if not report.ok:
        for finding in report.findings:
            print(f"finding: {finding}", file=sys.stderr)
        return 1
    store.save(repo, out)
    print(f"wrote fixture with {len(repo.gates)} gates to {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
