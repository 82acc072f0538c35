"""Domain model for quality-gate template repositories.

A repository is an immutable value: system information, a risk register and a
map of named gates forming a lifecycle tree under the root ``QG4Application``.
Leaf gates document single design decisions; collection gates group them into
process stages. ``validate`` turns every structural rule into a finding with a
stable code instead of raising.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Mapping, Union

from .errors import MalformedName

ROOT_NAME = "QG4Application"

#: Valid targets of a ``system:`` reference in a gate's inputs/outputs.
SYSTEM_SECTIONS = (
    "application",
    "compliance",
    "documentation",
    "ethics_general",
    "ethics_specific",
    "domain_knowledge",
    "stakeholders",
)
SYSTEM_REF_PREFIX = "system:"

_IDENT = re.compile(r"[A-Za-z0-9]+")


# ---------------------------------------------------------------------------
# Names
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QgName:
    """Structured form of a gate name.

    Serialized forms::

        QG4Application            the root sentinel
        QG_<base>                 stage-level collections (no view context)
        QG_<base>_(<view>)        leaves and nested collections

    base and view are non-empty runs of ``[A-Za-z0-9]``.
    """

    base: str
    view: str | None = None
    is_root: bool = False

    def serialized(self) -> str:
        if self.is_root:
            return ROOT_NAME
        if self.view is None:
            return f"QG_{self.base}"
        return f"QG_{self.base}_({self.view})"

    def __str__(self) -> str:
        return self.serialized()


ROOT = QgName(base=ROOT_NAME, view=None, is_root=True)


def parse_name(text: str) -> QgName:
    """Parse a serialized gate name, raising :class:`MalformedName` on mismatch.

    The error carries the position of the first violating character.
    """
    if not isinstance(text, str):
        raise MalformedName(repr(text), 0, "name must be a string")
    if text == ROOT_NAME:
        return ROOT
    if not text.startswith("QG_"):
        # position of the first char that breaks the literal prefix
        pos = next((i for i, (a, b) in enumerate(zip(text, "QG_")) if a != b), min(len(text), 3))
        raise MalformedName(text, pos, "expected 'QG_' prefix or the literal root name")
    m = _IDENT.match(text, 3)
    if m is None:
        raise MalformedName(text, 3, "empty base component")
    base = m.group(0)
    i = m.end()
    if i == len(text):
        return QgName(base=base)
    if not text.startswith("_(", i):
        raise MalformedName(text, i, "expected '_(' before the view component")
    i += 2
    m = _IDENT.match(text, i)
    if m is None:
        raise MalformedName(text, i, "empty view component")
    view = m.group(0)
    i = m.end()
    if not text.startswith(")", i):
        raise MalformedName(text, i, "expected ')' closing the view component")
    i += 1
    if i != len(text):
        raise MalformedName(text, i, "trailing characters after the view component")
    return QgName(base=base, view=view)


def serialize_name(name: QgName) -> str:
    return name.serialized()


def is_valid_name(text: str) -> bool:
    try:
        parse_name(text)
    except MalformedName:
        return False
    return True


def is_system_ref(ref: str) -> bool:
    return ref.startswith(SYSTEM_REF_PREFIX)


# ---------------------------------------------------------------------------
# Enumerations
# ---------------------------------------------------------------------------

class StakeholderRole(str, Enum):
    ACTIVE = "active"
    CONSULTING = "consulting"
    PASSIVE = "passive"


class TaiCriterion(str, Enum):
    """The seven trustworthy-AI assessment criteria used to classify risks."""

    HUMAN_AGENCY_OVERSIGHT = "HumanAgencyOversight"
    TECHNICAL_ROBUSTNESS_SAFETY = "TechnicalRobustnessSafety"
    PRIVACY_DATA_GOVERNANCE = "PrivacyDataGovernance"
    TRANSPARENCY = "Transparency"
    DIVERSITY_NON_DISCRIMINATION_FAIRNESS = "DiversityNonDiscriminationFairness"
    SOCIETAL_ENVIRONMENTAL_WELLBEING = "SocietalEnvironmentalWellbeing"
    ACCOUNTABILITY = "Accountability"


class Likelihood(str, Enum):
    RARE = "rare"
    POSSIBLE = "possible"
    LIKELY = "likely"


class Severity(str, Enum):
    MINOR = "minor"
    SERIOUS = "serious"
    CRITICAL = "critical"


class RiskStatus(str, Enum):
    OPEN = "open"
    MITIGATED = "mitigated"
    RESIDUAL_ACCEPTED = "residual_accepted"


class LifecycleStage(str, Enum):
    CONCEPTUALIZATION = "Conceptualization"
    DATA = "Data"
    DEVELOPMENT = "Development"
    DEPLOYMENT = "Deployment"
    MAINTENANCE = "Maintenance"
    DECOMMISSIONING = "Decommissioning"


class ExplanationPurpose(str, Enum):
    MODEL_VALIDATION = "model_validation"
    PREPROCESSING_ASSESSMENT = "preprocessing_assessment"
    STAKEHOLDER_INFORMATION = "stakeholder_information"
    MODEL_DISCOVERY = "model_discovery"


class ExplanationApplicability(str, Enum):
    MODEL_AGNOSTIC = "model_agnostic"
    MODEL_SPECIFIC = "model_specific"


class ExplanationScope(str, Enum):
    GLOBAL = "global"
    LOCAL = "local"


class ExplanationResult(str, Enum):
    TEXT = "text"
    VISUALIZATION = "visualization"
    STATISTICAL_SUMMARY = "statistical_summary"
    FEATURE_IMPORTANCE = "feature_importance"


class ExplanationTiming(str, Enum):
    """When explanations are produced relative to model training."""

    ANTE_HOC = "ante_hoc"
    POST_HOC = "post_hoc"


class RepositoryKind(str, Enum):
    DESIGN_KNOWLEDGE = "design_knowledge"
    APPLICATION = "application"


class VersionPhase(str, Enum):
    PRE_SELECTION = "pre_selection"
    INTRA_SELECTION = "intra_selection"
    POST_SELECTION = "post_selection"


# ---------------------------------------------------------------------------
# Records
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QgTags:
    """Search/tag layer of a leaf gate; all seven fields are always present."""

    name: str
    intent: str
    problem: str
    solution: str
    applicability: tuple[str, ...]
    consequences: str
    usage_example: str

    def __post_init__(self):
        # applicability keywords are lowercase and deduplicated, order kept
        seen: dict[str, None] = {}
        for kw in self.applicability:
            seen.setdefault(kw.lower(), None)
        object.__setattr__(self, "applicability", tuple(seen))


@dataclass(frozen=True)
class Stakeholder:
    id: str
    display_name: str
    role: StakeholderRole
    description: str = ""


@dataclass(frozen=True)
class Risk:
    """A classified risk record linking harm analysis to controlling gates."""

    id: str
    title: str
    description: str
    tai_criterion: TaiCriterion
    subsection: str
    source: str
    events: tuple[str, ...]
    harm: str
    likelihood: Likelihood
    severity: Severity
    controlled_by: tuple[str, ...] = ()
    status: RiskStatus = RiskStatus.OPEN


@dataclass(frozen=True)
class SystemInfo:
    """Contextual sections linked from the lifecycle; all always present."""

    application: str = ""
    compliance: str = ""
    documentation: str = ""
    ethics_general: str = ""
    ethics_specific: str = ""
    domain_knowledge: str = ""
    stakeholders: tuple[Stakeholder, ...] = ()

    def section_text(self, section: str) -> str:
        if section == "stakeholders":
            raise KeyError("stakeholders is not a text section")
        if section not in SYSTEM_SECTIONS:
            raise KeyError(section)
        return getattr(self, section)

    def stakeholder_ids(self) -> frozenset[str]:
        return frozenset(s.id for s in self.stakeholders)


@dataclass(frozen=True)
class MonitoringHook:
    """A question exported to post-deployment surveillance."""

    question: str
    trigger: str
    value_domain: str


@dataclass(frozen=True)
class RiskLinks:
    poses: tuple[str, ...] = ()
    controls: tuple[str, ...] = ()


@dataclass(frozen=True)
class ExplanationMethodConfig:
    """Configuration taxonomy for one explanation method."""

    purpose: tuple[ExplanationPurpose, ...]
    applicability: ExplanationApplicability
    scope: ExplanationScope
    result: ExplanationResult
    stage: ExplanationTiming

    def __post_init__(self):
        dedup = tuple(sorted(set(self.purpose), key=lambda p: p.value))
        if not dedup:
            raise ValueError("explanation config requires at least one purpose")
        object.__setattr__(self, "purpose", dedup)


@dataclass(frozen=True, eq=True)
class LeafQg:
    """A documented design decision.

    ``inputs``/``outputs`` hold serialized gate names or ``system:<section>``
    references. ``representation`` maps stakeholder ids to the text tailored
    for them.
    """

    name: str
    tags: QgTags
    content: str
    method: str
    inputs: tuple[str, ...] = ()
    outputs: tuple[str, ...] = ()
    monitoring_hooks: tuple[MonitoringHook, ...] = ()
    representation: Mapping[str, str] = field(default_factory=dict)
    evaluation_notes: str = ""
    risk_links: RiskLinks = RiskLinks()
    explanation_config: ExplanationMethodConfig | None = None

    __hash__ = None  # gates are compared, never hashed

    def __post_init__(self):
        object.__setattr__(self, "representation", dict(self.representation))


@dataclass(frozen=True, eq=True)
class CollectionQg:
    """A process-stage grouping; children order is meaningful."""

    name: str
    stage: LifecycleStage
    description: str = ""
    children: tuple[str, ...] = ()

    __hash__ = None


Gate = Union[LeafQg, CollectionQg]


@dataclass(frozen=True)
class VersionMeta:
    version_id: str
    phase: VersionPhase
    branch_name: str
    parent: str | None = None
    note: str = ""


INITIAL_VERSION = VersionMeta(
    version_id="v0", phase=VersionPhase.PRE_SELECTION, branch_name="main"
)


@dataclass(frozen=True, eq=True)
class TemplateRepository:
    """One complete template instance; the unit of storage and versioning.

    Gates are keyed by serialized name. Construction canonicalizes ordering
    (gates and risks sorted by name/id) so equal content compares equal.
    """

    kind: RepositoryKind
    system_info: SystemInfo = SystemInfo()
    risk_register: tuple[Risk, ...] = ()
    gates: Mapping[str, Gate] = field(default_factory=dict)
    version: VersionMeta = INITIAL_VERSION

    __hash__ = None

    def __post_init__(self):
        object.__setattr__(self, "gates", dict(sorted(self.gates.items())))
        object.__setattr__(
            self, "risk_register", tuple(sorted(self.risk_register, key=lambda r: r.id))
        )

    @property
    def root(self) -> CollectionQg | None:
        gate = self.gates.get(ROOT_NAME)
        return gate if isinstance(gate, CollectionQg) else None

    def leaves(self) -> dict[str, LeafQg]:
        return {n: g for n, g in self.gates.items() if isinstance(g, LeafQg)}

    def collections(self) -> dict[str, CollectionQg]:
        return {n: g for n, g in self.gates.items() if isinstance(g, CollectionQg)}

    def risk_by_id(self) -> dict[str, Risk]:
        return {r.id: r for r in self.risk_register}

    def content_equals(self, other: "TemplateRepository") -> bool:
        """Equality ignoring version metadata."""
        return (
            self.kind == other.kind
            and self.system_info == other.system_info
            and self.risk_register == other.risk_register
            and self.gates == other.gates
        )

    def with_version(self, version: VersionMeta) -> "TemplateRepository":
        return replace(self, version=version)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

class FindingCode(str, Enum):
    DANGLING_REF = "DanglingRef"
    DUPLICATE_NAME = "DuplicateName"
    MALFORMED_NAME = "MalformedName"
    MULTIPLE_ROOTS = "MultipleRoots"
    HIERARCHY_CYCLE = "HierarchyCycle"
    ORPHAN_GATE = "OrphanGate"
    UNKNOWN_STAKEHOLDER = "UnknownStakeholder"
    UNKNOWN_RISK = "UnknownRisk"
    MISSING_CREATION_DIMENSION = "MissingCreationDimension"


@dataclass(frozen=True, order=True)
class Finding:
    code: FindingCode
    subject: str
    detail: str

    def __str__(self) -> str:
        return f"{self.code.value}: {self.subject}: {self.detail}"


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...]

    @property
    def ok(self) -> bool:
        return not self.findings

    def by_code(self, code: FindingCode) -> tuple[Finding, ...]:
        return tuple(f for f in self.findings if f.code == code)

    def codes(self) -> tuple[FindingCode, ...]:
        return tuple(f.code for f in self.findings)


def _check_names(repo: TemplateRepository, out: list[Finding]) -> None:
    for name in repo.gates:
        try:
            parse_name(name)
        except MalformedName as exc:
            out.append(Finding(FindingCode.MALFORMED_NAME, name, exc.reason))


def _check_references(repo: TemplateRepository, out: list[Finding]) -> None:
    gate_names = set(repo.gates)
    risk_ids = {r.id for r in repo.risk_register}
    stakeholder_ids = repo.system_info.stakeholder_ids()

    def check_ref(subject: str, ref: str, slot: str) -> None:
        if is_system_ref(ref):
            section = ref[len(SYSTEM_REF_PREFIX):]
            if section not in SYSTEM_SECTIONS:
                out.append(
                    Finding(
                        FindingCode.DANGLING_REF,
                        subject,
                        f"{slot} references unknown system section {ref!r}",
                    )
                )
        elif ref not in gate_names:
            out.append(
                Finding(
                    FindingCode.DANGLING_REF,
                    subject,
                    f"{slot} references unknown gate {ref!r}",
                )
            )

    for name, gate in repo.gates.items():
        if isinstance(gate, CollectionQg):
            for child in gate.children:
                if child not in gate_names:
                    out.append(
                        Finding(
                            FindingCode.DANGLING_REF,
                            name,
                            f"children references unknown gate {child!r}",
                        )
                    )
            continue
        for ref in gate.inputs:
            check_ref(name, ref, "inputs")
        for ref in gate.outputs:
            check_ref(name, ref, "outputs")
        for rid in (*gate.risk_links.poses, *gate.risk_links.controls):
            if rid not in risk_ids:
                out.append(
                    Finding(
                        FindingCode.UNKNOWN_RISK,
                        name,
                        f"risk_links references unknown risk {rid!r}",
                    )
                )
        for sid in gate.representation:
            if sid not in stakeholder_ids:
                out.append(
                    Finding(
                        FindingCode.UNKNOWN_STAKEHOLDER,
                        name,
                        f"representation references unknown stakeholder {sid!r}",
                    )
                )

    for risk in repo.risk_register:
        for ref in risk.controlled_by:
            if ref not in gate_names:
                out.append(
                    Finding(
                        FindingCode.DANGLING_REF,
                        risk.id,
                        f"controlled_by references unknown gate {ref!r}",
                    )
                )


def _check_hierarchy(repo: TemplateRepository, out: list[Finding]) -> None:
    parents: dict[str, list[str]] = {}
    for name, gate in repo.gates.items():
        if not isinstance(gate, CollectionQg):
            continue
        seen: set[str] = set()
        for child in gate.children:
            if child in seen:
                out.append(
                    Finding(
                        FindingCode.DUPLICATE_NAME,
                        name,
                        f"child {child!r} listed more than once",
                    )
                )
                continue
            seen.add(child)
            if child in repo.gates:
                parents.setdefault(child, []).append(name)

    # a gate referenced from two different collections has two parents
    for child, ps in parents.items():
        if len(ps) > 1:
            out.append(
                Finding(
                    FindingCode.DUPLICATE_NAME,
                    child,
                    f"referenced as a child by multiple collections: {sorted(ps)}",
                )
            )

    for name, gate in repo.gates.items():
        has_parent = name in parents
        if isinstance(gate, CollectionQg):
            if name != ROOT_NAME and not has_parent:
                out.append(
                    Finding(
                        FindingCode.MULTIPLE_ROOTS,
                        name,
                        "collection has no parent; the hierarchy must have the single root "
                        + ROOT_NAME,
                    )
                )
        else:
            if not has_parent:
                out.append(
                    Finding(
                        FindingCode.ORPHAN_GATE,
                        name,
                        "leaf gate is not reachable from any collection",
                    )
                )

    # cycle detection over collection -> child edges
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {name: WHITE for name in repo.gates}
    reported: set[str] = set()

    def visit(name: str, stack: list[str]) -> None:
        color[name] = GRAY
        stack.append(name)
        gate = repo.gates[name]
        if isinstance(gate, CollectionQg):
            for child in gate.children:
                if child not in repo.gates:
                    continue
                if color[child] == GRAY:
                    cycle = stack[stack.index(child):] + [child]
                    key = min(cycle)
                    if key not in reported:
                        reported.add(key)
                        out.append(
                            Finding(
                                FindingCode.HIERARCHY_CYCLE,
                                key,
                                "collection hierarchy contains a cycle: "
                                + " -> ".join(cycle),
                            )
                        )
                elif color[child] == WHITE:
                    visit(child, stack)
        stack.pop()
        color[name] = BLACK

    for name in repo.gates:
        if color[name] == WHITE:
            visit(name, [])


def _check_creation_dimensions(repo: TemplateRepository, out: list[Finding]) -> None:
    for name, gate in repo.gates.items():
        if not isinstance(gate, LeafQg):
            continue
        for dim in ("content", "method"):
            if not getattr(gate, dim).strip():
                out.append(
                    Finding(
                        FindingCode.MISSING_CREATION_DIMENSION,
                        name,
                        f"leaf gate has an empty {dim} dimension",
                    )
                )


def validate(repo: TemplateRepository) -> ValidationReport:
    """Check every structural rule; findings are data, never exceptions.

    The report is deterministic: findings are sorted by (code, subject,
    detail). An empty report means the repository is well-formed.
    """
    out: list[Finding] = []
    _check_names(repo, out)
    _check_references(repo, out)
    _check_hierarchy(repo, out)
    _check_creation_dimensions(repo, out)
    out.sort(key=lambda f: (f.code.value, f.subject, f.detail))
    return ValidationReport(findings=tuple(out))


# ---------------------------------------------------------------------------
# Plain-dict conversion (shared by storage, diffing and the CLI)
# ---------------------------------------------------------------------------

def tags_to_dict(tags: QgTags) -> dict:
    return {
        "name": tags.name,
        "intent": tags.intent,
        "problem": tags.problem,
        "solution": tags.solution,
        "applicability": list(tags.applicability),
        "consequences": tags.consequences,
        "usage_example": tags.usage_example,
    }


def tags_from_dict(data: Mapping) -> QgTags:
    return QgTags(
        name=_text(data, "name"),
        intent=_text(data, "intent"),
        problem=_text(data, "problem"),
        solution=_text(data, "solution"),
        applicability=_str_list(data, "applicability"),
        consequences=_text(data, "consequences"),
        usage_example=_text(data, "usage_example"),
    )


def explanation_config_to_dict(cfg: ExplanationMethodConfig) -> dict:
    return {
        "purpose": [p.value for p in cfg.purpose],
        "applicability": cfg.applicability.value,
        "scope": cfg.scope.value,
        "result": cfg.result.value,
        "stage": cfg.stage.value,
    }


def explanation_config_from_dict(data: Mapping) -> ExplanationMethodConfig:
    return ExplanationMethodConfig(
        purpose=tuple(ExplanationPurpose(p) for p in _str_list(data, "purpose")),
        applicability=ExplanationApplicability(_text(data, "applicability")),
        scope=ExplanationScope(_text(data, "scope")),
        result=ExplanationResult(_text(data, "result")),
        stage=ExplanationTiming(_text(data, "stage")),
    )


def gate_to_dict(gate: Gate) -> dict:
    if isinstance(gate, CollectionQg):
        return {
            "name": gate.name,
            "type": "collection",
            "stage": gate.stage.value,
            "description": gate.description,
            "children": list(gate.children),
        }
    data = {
        "name": gate.name,
        "type": "leaf",
        "tags": tags_to_dict(gate.tags),
        "inputs": list(gate.inputs),
        "outputs": list(gate.outputs),
        "monitoring_hooks": [
            {"question": h.question, "trigger": h.trigger, "value_domain": h.value_domain}
            for h in gate.monitoring_hooks
        ],
        "content": gate.content,
        "method": gate.method,
        "representation": {k: gate.representation[k] for k in sorted(gate.representation)},
        "evaluation_notes": gate.evaluation_notes,
        "risk_links": {
            "poses": list(gate.risk_links.poses),
            "controls": list(gate.risk_links.controls),
        },
        "explanation_config": (
            explanation_config_to_dict(gate.explanation_config)
            if gate.explanation_config is not None
            else None
        ),
    }
    return data


def gate_from_dict(data: Mapping) -> Gate:
    kind = _text(data, "type")
    if kind == "collection":
        return CollectionQg(
            name=_text(data, "name"),
            stage=LifecycleStage(_text(data, "stage")),
            description=_text(data, "description", default=""),
            children=_str_list(data, "children", default=()),
        )
    if kind != "leaf":
        raise ValueError(f"unknown gate type {kind!r}")
    hooks = []
    for i, raw in enumerate(data.get("monitoring_hooks") or []):
        if not isinstance(raw, Mapping):
            raise ValueError(f"monitoring_hooks[{i}] must be a mapping")
        hooks.append(
            MonitoringHook(
                question=_text(raw, "question"),
                trigger=_text(raw, "trigger"),
                value_domain=_text(raw, "value_domain", default=""),
            )
        )
    links_raw = data.get("risk_links") or {}
    if not isinstance(links_raw, Mapping):
        raise ValueError("risk_links must be a mapping")
    rep_raw = data.get("representation") or {}
    if not isinstance(rep_raw, Mapping):
        raise ValueError("representation must be a mapping")
    for key, value in rep_raw.items():
        if not isinstance(key, str) or not isinstance(value, str):
            raise ValueError("representation must map stakeholder ids to text")
    cfg_raw = data.get("explanation_config")
    return LeafQg(
        name=_text(data, "name"),
        tags=tags_from_dict(_mapping(data, "tags")),
        inputs=_str_list(data, "inputs", default=()),
        outputs=_str_list(data, "outputs", default=()),
        monitoring_hooks=tuple(hooks),
        content=_text(data, "content"),
        method=_text(data, "method"),
        representation=dict(rep_raw),
        evaluation_notes=_text(data, "evaluation_notes", default=""),
        risk_links=RiskLinks(
            poses=_str_list(links_raw, "poses", default=()),
            controls=_str_list(links_raw, "controls", default=()),
        ),
        explanation_config=(
            explanation_config_from_dict(cfg_raw) if cfg_raw is not None else None
        ),
    )


def risk_to_dict(risk: Risk) -> dict:
    return {
        "id": risk.id,
        "title": risk.title,
        "description": risk.description,
        "tai_criterion": risk.tai_criterion.value,
        "subsection": risk.subsection,
        "source": risk.source,
        "events": list(risk.events),
        "harm": risk.harm,
        "likelihood": risk.likelihood.value,
        "severity": risk.severity.value,
        "controlled_by": list(risk.controlled_by),
        "status": risk.status.value,
    }


def risk_from_dict(data: Mapping) -> Risk:
    return Risk(
        id=_text(data, "id"),
        title=_text(data, "title"),
        description=_text(data, "description", default=""),
        tai_criterion=TaiCriterion(_text(data, "tai_criterion")),
        subsection=_text(data, "subsection", default=""),
        source=_text(data, "source", default=""),
        events=_str_list(data, "events", default=()),
        harm=_text(data, "harm", default=""),
        likelihood=Likelihood(_text(data, "likelihood")),
        severity=Severity(_text(data, "severity")),
        controlled_by=_str_list(data, "controlled_by", default=()),
        status=RiskStatus(_text(data, "status", default="open")),
    )


def stakeholder_to_dict(s: Stakeholder) -> dict:
    return {
        "id": s.id,
        "display_name": s.display_name,
        "role": s.role.value,
        "description": s.description,
    }


def stakeholder_from_dict(data: Mapping) -> Stakeholder:
    return Stakeholder(
        id=_text(data, "id"),
        display_name=_text(data, "display_name"),
        role=StakeholderRole(_text(data, "role")),
        description=_text(data, "description", default=""),
    )


def version_to_dict(v: VersionMeta) -> dict:
    return {
        "version_id": v.version_id,
        "phase": v.phase.value,
        "branch_name": v.branch_name,
        "parent": v.parent,
        "note": v.note,
    }


def version_from_dict(data: Mapping) -> VersionMeta:
    parent = data.get("parent")
    if parent is not None and not isinstance(parent, str):
        raise ValueError("parent must be a string or null")
    return VersionMeta(
        version_id=_text(data, "version_id"),
        phase=VersionPhase(_text(data, "phase")),
        branch_name=_text(data, "branch_name"),
        parent=parent,
        note=_text(data, "note", default=""),
    )


_MISSING = object()


def _text(data: Mapping, key: str, default=_MISSING) -> str:
    value = data.get(key, default)
    if value is _MISSING:
        raise ValueError(f"missing required field {key!r}")
    if not isinstance(value, str):
        raise ValueError(f"field {key!r} must be a string, got {type(value).__name__}")
    return value


def _str_list(data: Mapping, key: str, default=_MISSING) -> tuple[str, ...]:
    value = data.get(key, _MISSING)
    if value is _MISSING or value is None:
        if default is _MISSING:
            raise ValueError(f"missing required field {key!r}")
        return tuple(default)
    if not isinstance(value, (list, tuple)) or not all(isinstance(v, str) for v in value):
        raise ValueError(f"field {key!r} must be a list of strings")
    return tuple(value)


def _mapping(data: Mapping, key: str) -> Mapping:
    value = data.get(key)
    if not isinstance(value, Mapping):
        raise ValueError(f"field {key!r} must be a mapping")
    return value


def empty_application(version: VersionMeta = INITIAL_VERSION) -> TemplateRepository:
    """The minimal valid repository: a lone root collection."""
    root = CollectionQg(name=ROOT_NAME, stage=LifecycleStage.CONCEPTUALIZATION)
    return TemplateRepository(
        kind=RepositoryKind.APPLICATION, gates={ROOT_NAME: root}, version=version
    )


def iter_subtree(repo: TemplateRepository, start: str) -> Iterable[str]:
    """Yield gate names in the hierarchy subtree below ``start`` (inclusive)."""
    seen: set[str] = set()
    stack = [start]
    while stack:
        name = stack.pop()
        if name in seen or name not in repo.gates:
            continue
        seen.add(name)
        yield name
        gate = repo.gates[name]
        if isinstance(gate, CollectionQg):
            stack.extend(reversed(gate.children))
