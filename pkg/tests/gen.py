"""Seeded random generators for repositories, mutations and bundles."""

from __future__ import annotations

import random

import numpy as np

from qgforge.model import (
    CollectionQg,
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
from qgforge.xai.bundle import ExplanationBundle, ExplanationMatrix

_WORDS = (
    "gate", "model", "data", "split", "review", "metric", "risk", "owner",
    "déjà", "naïve", "μ-threshold", "evidence", "shift", "release", "no",
    "yes", "null", "3.14", "0x1f", "on",
)

_BASES = (
    "Alpha", "Beta", "Gamma", "Delta", "Epsilon", "Zeta", "Eta", "Theta",
    "Iota", "Kappa", "Lambda0", "Mu1", "Nu2", "Xi3", "Omicron4", "Pi5",
)

_VIEWS = ("Vision", "Tabular", "Text", "Audio", "SHAPLIME", "Segmentation")


def rand_text(rng: random.Random, allow_empty: bool = False) -> str:
    if allow_empty and rng.random() < 0.15:
        return ""
    lines = []
    for _ in range(rng.randint(1, 3)):
        words = [rng.choice(_WORDS) for _ in range(rng.randint(1, 6))]
        line = " ".join(words)
        if rng.random() < 0.1:
            line += "  "  # trailing spaces force the quoted-style fallback
        lines.append(line)
    text = "\n".join(lines)
    if rng.random() < 0.5:
        text += "\n"
    return text


def rand_tags(rng: random.Random) -> QgTags:
    keywords = rng.sample(
        ["local", "global", "tabular", "vision", "feature_importance", "ranking"],
        k=rng.randint(0, 3),
    )
    return QgTags(
        name=rand_text(rng),
        intent=rand_text(rng),
        problem=rand_text(rng, allow_empty=True),
        solution=rand_text(rng, allow_empty=True),
        applicability=tuple(keywords),
        consequences=rand_text(rng, allow_empty=True),
        usage_example=rand_text(rng, allow_empty=True),
    )


def gen_repo(rng: random.Random) -> TemplateRepository:
    """A random repository that always validates cleanly."""
    stakeholders = tuple(
        Stakeholder(
            id=f"sh{i}",
            display_name=f"Person {i}",
            role=rng.choice(list(StakeholderRole)),
            description=rand_text(rng, allow_empty=True),
        )
        for i in range(rng.randint(0, 3))
    )
    risk_ids = [f"risk{i}" for i in range(rng.randint(0, 2))]

    used_bases = rng.sample(_BASES, k=rng.randint(1, 6))
    root_name = "QG4Application"
    gates: dict = {}
    collection_children: dict[str, list[str]] = {root_name: []}

    n_collections = rng.randint(0, max(0, len(used_bases) - 1))
    collection_names = []
    for base in used_bases[:n_collections]:
        name = f"QG_{base}"
        parent = rng.choice([root_name] + collection_names)
        collection_children[parent].append(name)
        collection_children[name] = []
        collection_names.append(name)

    leaf_names = []
    for base in used_bases[n_collections:]:
        name = f"QG_{base}_({rng.choice(_VIEWS)})"
        parent = rng.choice([root_name] + collection_names)
        collection_children[parent].append(name)
        leaf_names.append(name)

    all_names = [root_name] + collection_names + leaf_names
    for name in leaf_names:
        refs = [n for n in all_names if n != name]
        inputs = rng.sample(refs, k=rng.randint(0, min(2, len(refs))))
        if rng.random() < 0.3:
            inputs.append("system:application")
        outputs = rng.sample(refs, k=rng.randint(0, min(2, len(refs))))
        representation = {
            s.id: rand_text(rng)
            for s in stakeholders
            if rng.random() < 0.5
        }
        gates[name] = LeafQg(
            name=name,
            tags=rand_tags(rng),
            content=rand_text(rng),
            method=rand_text(rng),
            inputs=tuple(inputs),
            outputs=tuple(outputs),
            monitoring_hooks=tuple(
                MonitoringHook(
                    question=rand_text(rng),
                    trigger=rand_text(rng),
                    value_domain=rand_text(rng, allow_empty=True),
                )
                for _ in range(rng.randint(0, 1))
            ),
            representation=representation,
            evaluation_notes=rand_text(rng, allow_empty=True),
            risk_links=RiskLinks(
                poses=tuple(r for r in risk_ids if rng.random() < 0.3),
                controls=tuple(r for r in risk_ids if rng.random() < 0.3),
            ),
        )

    for name in [root_name] + collection_names:
        gates[name] = CollectionQg(
            name=name,
            stage=rng.choice(list(LifecycleStage)),
            description=rand_text(rng, allow_empty=True),
            children=tuple(collection_children[name]),
        )

    risks = tuple(
        Risk(
            id=rid,
            title=rand_text(rng),
            description=rand_text(rng, allow_empty=True),
            tai_criterion=rng.choice(list(TaiCriterion)),
            subsection=rand_text(rng, allow_empty=True),
            source=rand_text(rng, allow_empty=True),
            events=tuple(rand_text(rng) for _ in range(rng.randint(0, 2))),
            harm=rand_text(rng, allow_empty=True),
            likelihood=rng.choice(list(Likelihood)),
            severity=rng.choice(list(Severity)),
            controlled_by=tuple(
                n for n in all_names if rng.random() < 0.2
            ),
            status=rng.choice(list(RiskStatus)),
        )
        for rid in risk_ids
    )

    return TemplateRepository(
        kind=rng.choice(list(RepositoryKind)),
        system_info=SystemInfo(
            application=rand_text(rng, allow_empty=True),
            compliance=rand_text(rng, allow_empty=True),
            documentation=rand_text(rng, allow_empty=True),
            ethics_general=rand_text(rng, allow_empty=True),
            ethics_specific=rand_text(rng, allow_empty=True),
            domain_knowledge=rand_text(rng, allow_empty=True),
            stakeholders=stakeholders,
        ),
        risk_register=risks,
        gates=gates,
        version=VersionMeta(
            version_id=f"v{rng.randint(0, 9)}",
            phase=rng.choice(list(VersionPhase)),
            branch_name=rng.choice(["main", "trial", "robustness-analysis"]),
            parent=None,
            note=rand_text(rng, allow_empty=True),
        ),
    )


def mutate_repo(rng: random.Random, repo: TemplateRepository) -> TemplateRepository:
    """Random content edits; version metadata stays untouched."""
    from dataclasses import replace

    gates = dict(repo.gates)
    risks = list(repo.risk_register)
    info = repo.system_info
    leaf_names = [n for n, g in gates.items() if isinstance(g, LeafQg)]
    collection_names = [n for n, g in gates.items() if isinstance(g, CollectionQg)]

    for _ in range(rng.randint(1, 4)):
        op = rng.randint(0, 6)
        if op == 0 and leaf_names:
            name = rng.choice(leaf_names)
            field = rng.choice(["content", "method", "evaluation_notes"])
            value = rand_text(rng) if field != "evaluation_notes" else rand_text(rng, allow_empty=True)
            gates[name] = replace(gates[name], **{field: value})
        elif op == 1 and leaf_names:
            name = rng.choice(leaf_names)
            gates[name] = replace(
                gates[name], tags=replace(gates[name].tags, intent=rand_text(rng))
            )
        elif op == 2 and leaf_names and info.stakeholders:
            name = rng.choice(leaf_names)
            rep = dict(gates[name].representation)
            sid = rng.choice([s.id for s in info.stakeholders])
            if sid in rep and rng.random() < 0.4:
                del rep[sid]
            else:
                rep[sid] = rand_text(rng)
            gates[name] = replace(gates[name], representation=rep)
        elif op == 3:
            base = f"New{rng.randint(0, 999)}"
            name = f"QG_{base}_({rng.choice(_VIEWS)})"
            if name in gates:
                continue
            parent = rng.choice(collection_names)
            gates[name] = LeafQg(
                name=name,
                tags=rand_tags(rng),
                content=rand_text(rng),
                method=rand_text(rng),
            )
            gates[parent] = replace(
                gates[parent], children=gates[parent].children + (name,)
            )
            leaf_names.append(name)
        elif op == 4 and leaf_names:
            name = rng.choice(leaf_names)
            leaf_names.remove(name)
            del gates[name]
            for gname, gate in list(gates.items()):
                if isinstance(gate, CollectionQg):
                    if name in gate.children:
                        gates[gname] = replace(
                            gate, children=tuple(c for c in gate.children if c != name)
                        )
                else:
                    if name in gate.inputs or name in gate.outputs:
                        gates[gname] = replace(
                            gate,
                            inputs=tuple(r for r in gate.inputs if r != name),
                            outputs=tuple(r for r in gate.outputs if r != name),
                        )
            risks = [
                replace(r, controlled_by=tuple(c for c in r.controlled_by if c != name))
                for r in risks
            ]
        elif op == 5:
            section = rng.choice(
                ["application", "compliance", "documentation", "ethics_general"]
            )
            info = replace(info, **{section: rand_text(rng, allow_empty=True)})
        elif op == 6 and risks:
            i = rng.randrange(len(risks))
            risks[i] = replace(
                risks[i],
                title=rand_text(rng),
                likelihood=rng.choice(list(Likelihood)),
            )

    return TemplateRepository(
        kind=repo.kind,
        system_info=info,
        risk_register=tuple(risks),
        gates=gates,
        version=repo.version,
    )


def gen_bundle(rng: np.random.Generator, force_fidelity_zero: bool = False) -> ExplanationBundle:
    """Random small bundle; optionally force a failing data-randomization test."""
    d = int(rng.integers(2, 9))
    n = int(rng.integers(1, 6))
    k = int(rng.integers(2, 5))
    features = tuple(f"f{j}" for j in range(d))

    def matrix(values) -> ExplanationMatrix:
        return ExplanationMatrix(values=np.asarray(values, dtype=np.float64), feature_names=features)

    base = rng.standard_normal((n, d))
    if not np.any(np.abs(base) > 0):
        base[0, 0] = 1.0
    data_rand = base.copy() if force_fidelity_zero else rng.standard_normal((n, d))
    model_rand = rng.standard_normal((n, d))
    splits = [rng.standard_normal((n, d)) for _ in range(k)]
    return ExplanationBundle(
        method="generated",
        features=features,
        base=matrix(base),
        data_randomized=matrix(data_rand),
        model_randomized=matrix(model_rand),
        splits=tuple(matrix(s) for s in splits),
    )
