from __future__ import annotations

import dataclasses
import random

import pytest

from qgforge import model, store, version
from qgforge.errors import (
    DuplicateBranch,
    MergeConflicts,
    NotDesignKnowledge,
    PatchError,
    PostMergeInvalid,
    UnknownBranch,
)
from qgforge.graph import TagQuery
from qgforge.model import RepositoryKind, VersionPhase

from conftest import METHOD_GATE, SCORE_GATE
from gen import gen_repo, mutate_repo
from test_model import make_leaf, make_repo, root_with


def edit_leaf(repo, name, **fields):
    gates = dict(repo.gates)
    gates[name] = dataclasses.replace(gates[name], **fields)
    return dataclasses.replace(repo, gates=gates)


def drop_gate(repo, name):
    gates = dict(repo.gates)
    del gates[name]
    for gname, gate in list(gates.items()):
        if isinstance(gate, model.CollectionQg) and name in gate.children:
            gates[gname] = dataclasses.replace(
                gate, children=tuple(c for c in gate.children if c != name)
            )
    return dataclasses.replace(repo, gates=gates)


@pytest.fixture()
def small_repo():
    a = make_leaf("QG_A_(X)")
    b = make_leaf("QG_B_(X)")
    return make_repo(root_with(["QG_A_(X)", "QG_B_(X)"], **{"QG_A_(X)": a, "QG_B_(X)": b}))


# ---------------------------------------------------------------------------
# diff / apply
# ---------------------------------------------------------------------------

def test_diff_identity(small_repo):
    assert version.diff(small_repo, small_repo).is_empty


def test_diff_single_field_edit(small_repo):
    edited = edit_leaf(small_repo, "QG_A_(X)", method="rewritten")
    changes = version.diff(small_repo, edited)
    assert not changes.added and not changes.removed
    assert list(changes.modified) == ["QG_A_(X)"]
    (change,) = changes.modified["QG_A_(X)"]
    assert change.path == "method"
    assert change.before == "some method"
    assert change.after == "rewritten"


def test_diff_removed_leaf(small_repo):
    smaller = drop_gate(small_repo, "QG_B_(X)")
    changes = version.diff(small_repo, smaller)
    assert set(changes.removed) == {"QG_B_(X)"}
    assert not changes.added
    # dropping the child reference shows up as a root modification
    assert list(changes.modified) == [model.ROOT_NAME]


def test_apply_reproduces_target(small_repo):
    edited = edit_leaf(small_repo, "QG_A_(X)", content="new content")
    edited = edit_leaf(edited, "QG_B_(X)", evaluation_notes="notes")
    changes = version.diff(small_repo, edited)
    assert version.apply(small_repo, changes) == edited


def test_apply_rejects_wrong_base(small_repo):
    edited = edit_leaf(small_repo, "QG_A_(X)", method="one")
    other = edit_leaf(small_repo, "QG_A_(X)", method="two")
    changes = version.diff(small_repo, edited)
    with pytest.raises(PatchError):
        version.apply(other, changes)


def test_diff_apply_round_trip_on_generated_pairs():
    rng = random.Random(2024)
    for _ in range(60):
        a = gen_repo(rng)
        b = mutate_repo(rng, a)
        assert version.apply(a, version.diff(a, b)) == b


def test_changeset_json_round_trippable(small_repo):
    import json

    edited = edit_leaf(small_repo, "QG_A_(X)", method="rewritten")
    payload = version.diff(small_repo, edited).to_json_dict()
    assert json.loads(json.dumps(payload)) == payload


# ---------------------------------------------------------------------------
# merge
# ---------------------------------------------------------------------------

def test_merge_non_overlapping_edits(small_repo):
    ours = edit_leaf(small_repo, "QG_A_(X)", method="ours method")
    theirs = edit_leaf(small_repo, "QG_B_(X)", content="theirs content")
    merged = version.merge(small_repo, ours, theirs)
    assert merged.gates["QG_A_(X)"].method == "ours method"
    assert merged.gates["QG_B_(X)"].content == "theirs content"


def test_merge_same_field_conflict(small_repo):
    ours = edit_leaf(small_repo, "QG_A_(X)", method="ours")
    theirs = edit_leaf(small_repo, "QG_A_(X)", method="theirs")
    with pytest.raises(MergeConflicts) as exc:
        version.merge(small_repo, ours, theirs)
    assert len(exc.value.conflicts) == 1
    conflict = exc.value.conflicts[0]
    assert (conflict.name, conflict.field_path) == ("QG_A_(X)", "method")
    assert (conflict.ours, conflict.theirs) == ("ours", "theirs")


def test_merge_one_conflict_per_divergent_field(small_repo):
    ours = edit_leaf(small_repo, "QG_A_(X)", method="m-ours", content="c-ours")
    theirs = edit_leaf(small_repo, "QG_A_(X)", method="m-theirs", content="c-theirs")
    with pytest.raises(MergeConflicts) as exc:
        version.merge(small_repo, ours, theirs)
    assert sorted(c.field_path for c in exc.value.conflicts) == ["content", "method"]


def test_merge_noop_side_returns_other(small_repo):
    ours = edit_leaf(small_repo, "QG_A_(X)", method="changed")
    merged = version.merge(small_repo, ours, small_repo)
    assert merged.content_equals(ours)
    merged2 = version.merge(small_repo, small_repo, ours)
    assert merged2.content_equals(ours)


def test_merge_same_change_both_sides(small_repo):
    ours = edit_leaf(small_repo, "QG_A_(X)", method="same")
    theirs = edit_leaf(small_repo, "QG_A_(X)", method="same")
    merged = version.merge(small_repo, ours, theirs)
    assert merged.gates["QG_A_(X)"].method == "same"


def test_merge_remove_vs_modify_conflicts(small_repo):
    ours = drop_gate(small_repo, "QG_B_(X)")
    theirs = edit_leaf(small_repo, "QG_B_(X)", method="still here")
    with pytest.raises(MergeConflicts) as exc:
        version.merge(small_repo, ours, theirs)
    assert exc.value.conflicts[0].name == "QG_B_(X)"


def test_conflicts_are_symmetric(small_repo):
    ours = edit_leaf(small_repo, "QG_A_(X)", method="ours", content="c1")
    theirs = edit_leaf(small_repo, "QG_A_(X)", method="theirs", content="c2")
    with pytest.raises(MergeConflicts) as one:
        version.merge(small_repo, ours, theirs)
    with pytest.raises(MergeConflicts) as two:
        version.merge(small_repo, theirs, ours)
    assert tuple(c.swapped() for c in one.value.conflicts) == two.value.conflicts


def test_merge_rejects_invalid_result(small_repo):
    # ours points A's inputs at B; theirs removes B: the edits touch
    # different fields, so they combine, but the combination dangles
    ours = edit_leaf(small_repo, "QG_A_(X)", inputs=("QG_B_(X)",))
    theirs = drop_gate(small_repo, "QG_B_(X)")
    with pytest.raises(PostMergeInvalid) as exc:
        version.merge(small_repo, ours, theirs)
    assert any(f.code == model.FindingCode.DANGLING_REF for f in exc.value.findings)


def test_merge_section_conflict(small_repo):
    ours = dataclasses.replace(
        small_repo,
        system_info=dataclasses.replace(small_repo.system_info, application="ours"),
    )
    theirs = dataclasses.replace(
        small_repo,
        system_info=dataclasses.replace(small_repo.system_info, application="theirs"),
    )
    with pytest.raises(MergeConflicts) as exc:
        version.merge(small_repo, ours, theirs)
    assert exc.value.conflicts[0].name == "system_info.application"


# ---------------------------------------------------------------------------
# pull
# ---------------------------------------------------------------------------

def test_pull_view_from_fixture(fixture_repo):
    result = version.pull(fixture_repo, TagQuery(views=frozenset({"SHAPLIME"})))
    repo = result.repo
    assert not result.empty
    assert result.pulled == (SCORE_GATE,)
    assert repo.kind == RepositoryKind.APPLICATION
    assert repo.version.version_id == "v0"
    assert repo.version.branch_name == "main"
    assert repo.version.phase == VersionPhase.PRE_SELECTION
    assert model.validate(repo).ok
    # the score gate, its transitive leaf input, and every collection
    assert SCORE_GATE in repo.gates
    assert METHOD_GATE in repo.gates
    assert set(repo.collections()) == set(fixture_repo.collections())
    assert set(repo.leaves()) == {SCORE_GATE, METHOD_GATE}


def test_pull_empty_query_gives_skeleton(fixture_repo):
    result = version.pull(fixture_repo, TagQuery(views=frozenset({"NothingHere"})))
    assert result.empty
    assert result.pulled == ()
    assert set(result.repo.leaves()) == set()
    assert set(result.repo.collections()) == set(fixture_repo.collections())
    assert model.validate(result.repo).ok


def test_pull_requires_design_knowledge(fixture_repo):
    app = dataclasses.replace(fixture_repo, kind=RepositoryKind.APPLICATION)
    with pytest.raises(NotDesignKnowledge):
        version.pull(app, TagQuery(views=frozenset({"SHAPLIME"})))


def test_pull_is_deterministic(fixture_repo, tmp_path):
    from test_store import tree_bytes

    q = TagQuery(views=frozenset({"SHAPLIME"}), keywords=frozenset({"lime"}))
    first = version.pull(fixture_repo, q).repo
    second = version.pull(fixture_repo, q).repo
    assert first == second
    store.save(first, tmp_path / "a")
    store.save(second, tmp_path / "b")
    assert tree_bytes(tmp_path / "a") == tree_bytes(tmp_path / "b")


def test_pull_validates_on_random_design_knowledge():
    rng = random.Random(77)
    checked = 0
    for _ in range(40):
        repo = gen_repo(rng)
        if repo.kind != RepositoryKind.DESIGN_KNOWLEDGE:
            repo = dataclasses.replace(repo, kind=RepositoryKind.DESIGN_KNOWLEDGE)
        result = version.pull(
            repo, TagQuery(views=frozenset({"Vision", "SHAPLIME"}),
                           keywords=frozenset({"local"}))
        )
        report = model.validate(result.repo)
        assert report.ok, report.findings
        checked += 1
    assert checked == 40


# ---------------------------------------------------------------------------
# branches and the lineage store
# ---------------------------------------------------------------------------

def test_branch_then_diff_is_empty(small_repo):
    branched = version.derive_branch(small_repo, "trial", "v1")
    assert version.diff(small_repo, branched).is_empty
    assert branched.version.branch_name == "trial"
    assert branched.version.parent == small_repo.version.version_id
    assert branched.version.phase == small_repo.version.phase


def test_branch_requires_name(small_repo):
    with pytest.raises(ValueError):
        version.derive_branch(small_repo, "", "v1")


def test_lineage_store_branching(tmp_path, small_repo):
    lineage = version.LineageStore(tmp_path / "lineage")
    stored = lineage.init(small_repo)
    assert stored.version.version_id == "v0"
    assert lineage.branches() == {stored.version.branch_name: "v0"}

    branched = lineage.branch("robustness-analysis", stored.version.branch_name)
    assert branched.version.version_id == "v1"
    assert branched.version.parent == "v0"
    assert branched.content_equals(small_repo)

    with pytest.raises(DuplicateBranch):
        lineage.branch("robustness-analysis", stored.version.branch_name)
    with pytest.raises(UnknownBranch):
        lineage.branch("next", "nope")

    head = lineage.head("robustness-analysis")
    assert head == branched


def test_lineage_commit_advances_head(tmp_path, small_repo):
    lineage = version.LineageStore(tmp_path / "lineage")
    stored = lineage.init(small_repo)
    edited = edit_leaf(stored, "QG_A_(X)", method="v2 method")
    committed = lineage.commit(edited, stored.version.branch_name)
    assert committed.version.version_id == "v1"
    assert committed.version.parent == "v0"
    assert lineage.head(stored.version.branch_name) == committed
    assert lineage.load_version("v0") == stored


def test_branch_preserves_phase_on_generated_repos():
    rng = random.Random(31)
    for i in range(20):
        repo = gen_repo(rng)
        branched = version.derive_branch(repo, f"b{i}", "v9")
        assert branched.version.phase == repo.version.phase
        assert version.diff(repo, branched).is_empty
