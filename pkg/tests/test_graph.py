from __future__ import annotations

import random

import pytest

from qgforge import graph, model
from qgforge.errors import (
    EmptyScope,
    NotACollection,
    UnknownGate,
    UnvalidatedRepository,
)
from qgforge.graph import TagQuery
from qgforge.model import (
    CollectionQg,
    LifecycleStage,
    RepositoryKind,
    Stakeholder,
    StakeholderRole,
    SystemInfo,
    TemplateRepository,
)

from conftest import METHOD_GATE, SCORE_GATE
from gen import gen_repo
from test_model import make_leaf, make_repo, root_with


def chain_repo() -> TemplateRepository:
    a = make_leaf("QG_A_(X)", outputs=("QG_B_(X)",))
    b = make_leaf("QG_B_(X)", outputs=("QG_C_(X)",))
    c = make_leaf("QG_C_(X)")
    return make_repo(root_with(
        ["QG_A_(X)", "QG_B_(X)", "QG_C_(X)"],
        **{"QG_A_(X)": a, "QG_B_(X)": b, "QG_C_(X)": c},
    ))


# ---------------------------------------------------------------------------
# build_graph
# ---------------------------------------------------------------------------

def test_root_only_graph():
    g = graph.build_graph(model.empty_application())
    assert g.nodes == frozenset({model.ROOT_NAME})
    assert not g.dependency_edges
    assert not g.hierarchy_edges


def test_fixture_score_gate_edges(fixture_repo):
    g = graph.build_graph(fixture_repo)
    assert g.predecessors(SCORE_GATE) == {
        "QG_Utilization_(Data)",
        "QG_Configuration_(Development)",
        "QG_Evaluation_(Development)",
        METHOD_GATE,
    }
    assert g.successors(SCORE_GATE) == {
        METHOD_GATE,
        "QG_Deployment",
        "QG_Maintenance",
    }


def test_dangling_references_refuse_graph():
    leaf = make_leaf("QG_A_(X)", inputs=("QG_Missing_(X)",))
    repo = make_repo(root_with(["QG_A_(X)"], **{"QG_A_(X)": leaf}))
    with pytest.raises(UnvalidatedRepository):
        graph.build_graph(repo)


def test_bidirectional_declarations_deduplicate():
    # u declares the output, v declares the same link as input: one edge
    a = make_leaf("QG_A_(X)", outputs=("QG_B_(X)",))
    b = make_leaf("QG_B_(X)", inputs=("QG_A_(X)",))
    repo = make_repo(root_with(
        ["QG_A_(X)", "QG_B_(X)"], **{"QG_A_(X)": a, "QG_B_(X)": b}
    ))
    g = graph.build_graph(repo)
    assert g.dependency_edges == frozenset({("QG_A_(X)", "QG_B_(X)")})


# ---------------------------------------------------------------------------
# find_by_tags
# ---------------------------------------------------------------------------

def test_view_query(fixture_repo):
    result = graph.find_by_tags(fixture_repo, TagQuery(views=frozenset({"SHAPLIME"})))
    assert result == [SCORE_GATE]


def test_keyword_query_matches_explanation_leaves(fixture_repo):
    query = TagQuery(keywords=frozenset({"feature_importance", "local"}), match_mode="all")
    assert graph.find_by_tags(fixture_repo, query) == [SCORE_GATE, METHOD_GATE]


def test_query_matching_nothing(fixture_repo):
    assert graph.find_by_tags(fixture_repo, TagQuery(views=frozenset({"Nothing"}))) == []


def test_empty_query_rejected():
    with pytest.raises(ValueError):
        TagQuery()


def test_keywords_lowercased():
    q = TagQuery(keywords=frozenset({"LOCAL"}))
    assert q.keywords == frozenset({"local"})


def test_union_distributes_over_any_queries():
    rng = random.Random(99)
    for _ in range(20):
        repo = gen_repo(rng)
        q1 = TagQuery(views=frozenset({"Vision"}), keywords=frozenset({"local"}))
        q2 = TagQuery(views=frozenset({"Tabular"}), keywords=frozenset({"ranking"}))
        union = TagQuery(
            views=q1.views | q2.views, keywords=q1.keywords | q2.keywords
        )
        lhs = set(graph.find_by_tags(repo, union))
        rhs = set(graph.find_by_tags(repo, q1)) | set(graph.find_by_tags(repo, q2))
        assert lhs == rhs


# ---------------------------------------------------------------------------
# closures
# ---------------------------------------------------------------------------

def test_chain_impact_and_closure():
    repo = chain_repo()
    assert graph.impact_set(repo, "QG_A_(X)") == {"QG_B_(X)", "QG_C_(X)"}
    assert graph.input_closure(repo, "QG_C_(X)") == {"QG_A_(X)", "QG_B_(X)"}
    assert graph.impact_set(repo, "QG_C_(X)") == set()
    assert graph.input_closure(repo, "QG_A_(X)") == set()


def test_fixture_impact_contains_deployment_and_maintenance(fixture_repo):
    impact = graph.impact_set(fixture_repo, SCORE_GATE)
    assert {"QG_Deployment", "QG_Maintenance"} <= impact


def test_fixture_closure_is_exactly_the_inputs(fixture_repo):
    closure = graph.input_closure(fixture_repo, SCORE_GATE)
    assert closure == {
        "QG_Utilization_(Data)",
        "QG_Configuration_(Development)",
        "QG_Evaluation_(Development)",
        METHOD_GATE,
    }


def test_unknown_gate():
    with pytest.raises(UnknownGate):
        graph.impact_set(model.empty_application(), "QG_Nope_(X)")


def test_duality_on_generated_repos():
    rng = random.Random(5)
    for _ in range(30):
        repo = gen_repo(rng)
        names = list(repo.gates)
        impacts = {n: graph.impact_set(repo, n) for n in names}
        closures = {n: graph.input_closure(repo, n) for n in names}
        for a in names:
            for b in names:
                assert (b in impacts[a]) == (a in closures[b])


# ---------------------------------------------------------------------------
# participation score
# ---------------------------------------------------------------------------

def participation_repo(covered: int = 3) -> TemplateRepository:
    stakeholders = (
        Stakeholder(id="lead", display_name="Lead", role=StakeholderRole.ACTIVE),
        Stakeholder(id="advisor", display_name="Advisor", role=StakeholderRole.CONSULTING),
    )
    leaves = {}
    names = []
    for i in range(4):
        name = f"QG_Leaf{i}_(X)"
        names.append(name)
        rep = {"lead": "summary"} if i < covered else {"advisor": "summary"}
        leaves[name] = make_leaf(name, representation=rep)
    gates = root_with(names, **leaves)
    return make_repo(gates, system_info=SystemInfo(stakeholders=stakeholders))


def test_participation_three_of_four():
    repo = participation_repo(covered=3)
    score = graph.stakeholder_participation_score(
        repo, model.ROOT_NAME, StakeholderRole.ACTIVE
    )
    assert score == 0.75


def test_participation_all_and_none():
    assert graph.stakeholder_participation_score(
        participation_repo(covered=4), model.ROOT_NAME, StakeholderRole.ACTIVE
    ) == 1.0
    assert graph.stakeholder_participation_score(
        participation_repo(covered=0), model.ROOT_NAME, StakeholderRole.ACTIVE
    ) == 0.0


def test_participation_errors():
    repo = participation_repo()
    with pytest.raises(NotACollection):
        graph.stakeholder_participation_score(repo, "QG_Leaf0_(X)", StakeholderRole.ACTIVE)
    with pytest.raises(UnknownGate):
        graph.stakeholder_participation_score(repo, "QG_Nope", StakeholderRole.ACTIVE)
    with pytest.raises(EmptyScope):
        graph.stakeholder_participation_score(
            model.empty_application(), model.ROOT_NAME, StakeholderRole.ACTIVE
        )


# ---------------------------------------------------------------------------
# risk coverage
# ---------------------------------------------------------------------------

def test_fixture_risk_coverage(fixture_repo):
    coverage = graph.risk_coverage(fixture_repo)
    assert coverage.uncontrolled == ()
    assert SCORE_GATE in coverage.controls_per_risk["unfaithful_explanations"]


def test_uncontrolled_risk_listed():
    import dataclasses
    base = participation_repo()
    risk = model.Risk(
        id="lonely",
        title="t",
        description="d",
        tai_criterion=model.TaiCriterion.TRANSPARENCY,
        subsection="s",
        source="src",
        events=(),
        harm="h",
        likelihood=model.Likelihood.RARE,
        severity=model.Severity.MINOR,
    )
    repo = dataclasses.replace(base, risk_register=(risk,))
    assert graph.risk_coverage(repo).uncontrolled == ("lonely",)


def test_empty_register_empty_report():
    coverage = graph.risk_coverage(model.empty_application())
    assert coverage.uncontrolled == ()
    assert coverage.controls_per_risk == {}


# ---------------------------------------------------------------------------
# dot
# ---------------------------------------------------------------------------

def test_dot_output_lists_every_edge(fixture_repo):
    dot = graph.to_dot(fixture_repo)
    assert dot.startswith("digraph quality_gates {")
    assert f'"{SCORE_GATE}" -> "QG_Deployment";' in dot
    assert f'"QG4Application" -> "QG_Development" [style=dashed, arrowhead=empty];' in dot
    assert graph.to_dot(fixture_repo) == dot
