"""Interdependency graph, tag search, closures and repository scores.

All queries are pure functions of an immutable repository; the graph is an
index rebuilt on demand.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    EmptyScope,
    MalformedName,
    NotACollection,
    UnknownGate,
    UnvalidatedRepository,
)
from .model import (
    CollectionQg,
    FindingCode,
    LeafQg,
    StakeholderRole,
    TemplateRepository,
    is_system_ref,
    iter_subtree,
    parse_name,
    validate,
)


@dataclass(frozen=True)
class QgGraph:
    nodes: frozenset[str]
    hierarchy_edges: frozenset[tuple[str, str]]
    dependency_edges: frozenset[tuple[str, str]]

    def successors(self, name: str) -> set[str]:
        return {v for u, v in self.dependency_edges if u == name}

    def predecessors(self, name: str) -> set[str]:
        return {u for u, v in self.dependency_edges if v == name}


@dataclass(frozen=True)
class TagQuery:
    """Tag search over leaf gates: by name view and/or applicability keywords."""

    views: frozenset[str] = frozenset()
    keywords: frozenset[str] = frozenset()
    match_mode: str = "any"

    def __post_init__(self):
        if not self.views and not self.keywords:
            raise ValueError("a tag query needs at least one view or keyword")
        if self.match_mode not in ("any", "all"):
            raise ValueError(f"match_mode must be 'any' or 'all', got {self.match_mode!r}")
        object.__setattr__(self, "views", frozenset(self.views))
        object.__setattr__(self, "keywords", frozenset(k.lower() for k in self.keywords))


def build_graph(repo: TemplateRepository) -> QgGraph:
    """Index hierarchy and dependency edges.

    Dependency edges point in the direction information flows: u -> v when v
    lists u as an input or u lists v as an output. The repository must have
    no dangling references.
    """
    report = validate(repo)
    dangling = report.by_code(FindingCode.DANGLING_REF)
    if dangling:
        raise UnvalidatedRepository(
            "repository has dangling references: "
            + "; ".join(str(f) for f in dangling)
        )

    hierarchy: set[tuple[str, str]] = set()
    dependency: set[tuple[str, str]] = set()
    for name, gate in repo.gates.items():
        if isinstance(gate, CollectionQg):
            hierarchy.update((name, child) for child in gate.children)
            continue
        for ref in gate.inputs:
            if not is_system_ref(ref):
                dependency.add((ref, name))
        for ref in gate.outputs:
            if not is_system_ref(ref):
                dependency.add((name, ref))
    return QgGraph(
        nodes=frozenset(repo.gates),
        hierarchy_edges=frozenset(hierarchy),
        dependency_edges=frozenset(dependency),
    )


def find_by_tags(repo: TemplateRepository, query: TagQuery) -> list[str]:
    """Leaf gates whose view or applicability keywords match the query.

    A leaf matches when its name's view is in ``query.views``, or its
    keywords match per ``match_mode`` (any: non-empty intersection, all:
    every query keyword present). Results are in lexicographic order.
    """
    matches = []
    for name, gate in repo.gates.items():
        if not isinstance(gate, LeafQg):
            continue
        try:
            parsed = parse_name(name)
        except MalformedName:
            continue
        if parsed.view is not None and parsed.view in query.views:
            matches.append(name)
            continue
        if query.keywords:
            tag_keywords = set(gate.tags.applicability)
            if query.match_mode == "any":
                hit = bool(tag_keywords & query.keywords)
            else:
                hit = query.keywords <= tag_keywords
            if hit:
                matches.append(name)
    return sorted(matches)


def _closure(repo: TemplateRepository, gate: str, forward: bool) -> set[str]:
    if gate not in repo.gates:
        raise UnknownGate(gate)
    graph = build_graph(repo)
    step = graph.successors if forward else graph.predecessors
    seen: set[str] = set()
    stack = [gate]
    while stack:
        for nxt in step(stack.pop()):
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    seen.discard(gate)
    return seen


def impact_set(repo: TemplateRepository, gate: str) -> set[str]:
    """Everything transitively downstream of ``gate`` along dependency edges."""
    return _closure(repo, gate, forward=True)


def input_closure(repo: TemplateRepository, gate: str) -> set[str]:
    """Everything transitively upstream of ``gate`` along dependency edges."""
    return _closure(repo, gate, forward=False)


def stakeholder_participation_score(
    repo: TemplateRepository, scope: str, role: StakeholderRole
) -> float:
    """Fraction of leaves under ``scope`` whose representation reaches the role."""
    gate = repo.gates.get(scope)
    if gate is None:
        raise UnknownGate(scope)
    if not isinstance(gate, CollectionQg):
        raise NotACollection(scope)
    role_ids = {
        s.id for s in repo.system_info.stakeholders if s.role == role
    }
    leaves = [
        repo.gates[name]
        for name in iter_subtree(repo, scope)
        if isinstance(repo.gates[name], LeafQg)
    ]
    if not leaves:
        raise EmptyScope(scope)
    covered = sum(1 for leaf in leaves if role_ids & set(leaf.representation))
    return covered / len(leaves)


@dataclass(frozen=True)
class RiskCoverage:
    uncontrolled: tuple[str, ...]
    controls_per_risk: dict[str, tuple[str, ...]]

    def to_json_dict(self) -> dict:
        return {
            "uncontrolled": list(self.uncontrolled),
            "controls_per_risk": {k: list(v) for k, v in self.controls_per_risk.items()},
        }


def risk_coverage(repo: TemplateRepository) -> RiskCoverage:
    """Which risks are tied to a controlling gate, and which are uncovered."""
    controls: dict[str, set[str]] = {r.id: set(r.controlled_by) for r in repo.risk_register}
    for name, gate in repo.gates.items():
        if not isinstance(gate, LeafQg):
            continue
        for rid in gate.risk_links.controls:
            if rid in controls:
                controls[rid].add(name)
    return RiskCoverage(
        uncontrolled=tuple(sorted(rid for rid, c in controls.items() if not c)),
        controls_per_risk={rid: tuple(sorted(c)) for rid, c in sorted(controls.items())},
    )


def to_dot(repo: TemplateRepository) -> str:
    """Render the gate graph as DOT text (hierarchy dashed, dependencies solid)."""
    graph = build_graph(repo)
    lines = ["digraph quality_gates {", "  rankdir=LR;"]
    for name in sorted(graph.nodes):
        shape = "box" if isinstance(repo.gates[name], CollectionQg) else "ellipse"
        lines.append(f'  "{name}" [shape={shape}];')
    for parent, child in sorted(graph.hierarchy_edges):
        lines.append(f'  "{parent}" -> "{child}" [style=dashed, arrowhead=empty];')
    for u, v in sorted(graph.dependency_edges):
        lines.append(f'  "{u}" -> "{v}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
