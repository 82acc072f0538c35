"""Versioning: tag-filtered pulls, branches, field-level diff/apply and merge.

Diffs operate on the canonical dict form of a repository so change sets are
JSON-native. Version metadata is never part of a diff; branching and pulling
set it explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import yaml

from . import model, store
from .errors import (
    DuplicateBranch,
    MergeConflicts,
    NotDesignKnowledge,
    PatchError,
    PostMergeInvalid,
    RepoSyntaxError,
    UnknownBranch,
)
from .graph import TagQuery, find_by_tags
from .model import (
    CollectionQg,
    LeafQg,
    RepositoryKind,
    TemplateRepository,
    VersionMeta,
    VersionPhase,
    is_system_ref,
    validate,
)

# ---------------------------------------------------------------------------
# Canonical tree form
# ---------------------------------------------------------------------------

def repo_to_tree(repo: TemplateRepository) -> dict:
    """Dict form used by diff/apply; excludes version metadata."""
    info = repo.system_info
    return {
        "kind": repo.kind.value,
        "system_info": {s: info.section_text(s) for s in model.SYSTEM_SECTIONS if s != "stakeholders"},
        "stakeholders": {s.id: model.stakeholder_to_dict(s) for s in info.stakeholders},
        "risks": {r.id: model.risk_to_dict(r) for r in repo.risk_register},
        "gates": {name: model.gate_to_dict(gate) for name, gate in repo.gates.items()},
    }


def tree_to_repo(tree: Mapping, version: VersionMeta) -> TemplateRepository:
    info = model.SystemInfo(
        stakeholders=tuple(
            model.stakeholder_from_dict(tree["stakeholders"][sid])
            for sid in sorted(tree["stakeholders"])
        ),
        **tree["system_info"],
    )
    return TemplateRepository(
        kind=RepositoryKind(tree["kind"]),
        system_info=info,
        risk_register=tuple(
            model.risk_from_dict(tree["risks"][rid]) for rid in sorted(tree["risks"])
        ),
        gates={name: model.gate_from_dict(g) for name, g in tree["gates"].items()},
        version=version,
    )


# ---------------------------------------------------------------------------
# Change sets
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class FieldChange:
    """One replaced value; ``before``/``after`` of None mean absent."""

    path: str
    before: object
    after: object

    def to_json_dict(self) -> dict:
        return {"path": self.path, "before": self.before, "after": self.after}


@dataclass(frozen=True)
class ChangeSet:
    """Field-granular difference between two repositories.

    ``added``/``removed`` map gate names to their full dict payloads so a
    change set is a complete patch. The three gate maps are disjoint.
    """

    added: dict[str, dict] = field(default_factory=dict)
    removed: dict[str, dict] = field(default_factory=dict)
    modified: dict[str, tuple[FieldChange, ...]] = field(default_factory=dict)
    section_changes: tuple[FieldChange, ...] = ()

    @property
    def is_empty(self) -> bool:
        return not (self.added or self.removed or self.modified or self.section_changes)

    def to_json_dict(self) -> dict:
        return {
            "added": {k: self.added[k] for k in sorted(self.added)},
            "removed": {k: self.removed[k] for k in sorted(self.removed)},
            "modified": {
                k: [c.to_json_dict() for c in v] for k, v in sorted(self.modified.items())
            },
            "section_changes": [c.to_json_dict() for c in self.section_changes],
        }


# leaf fields diffed as a unit vs. recursed into
_GATE_ATOMIC = (
    "inputs",
    "outputs",
    "monitoring_hooks",
    "content",
    "method",
    "evaluation_notes",
    "stage",
    "description",
    "children",
)


def _gate_field_changes(before: Mapping, after: Mapping) -> list[FieldChange]:
    if before.get("type") != after.get("type"):
        return [FieldChange("", dict(before), dict(after))]
    changes: list[FieldChange] = []
    for key in _GATE_ATOMIC:
        if key in before or key in after:
            if before.get(key) != after.get(key):
                changes.append(FieldChange(key, before.get(key), after.get(key)))
    for sub in ("tags", "risk_links"):
        b, a = before.get(sub), after.get(sub)
        if b is None and a is None:
            continue
        for key in sorted(set(b or {}) | set(a or {})):
            bv = (b or {}).get(key)
            av = (a or {}).get(key)
            if bv != av:
                changes.append(FieldChange(f"{sub}.{key}", bv, av))
    b_rep, a_rep = before.get("representation"), after.get("representation")
    if before.get("type") == "leaf":
        for sid in sorted(set(b_rep or {}) | set(a_rep or {})):
            bv = (b_rep or {}).get(sid)
            av = (a_rep or {}).get(sid)
            if bv != av:
                changes.append(FieldChange(f"representation.{sid}", bv, av))
        b_cfg, a_cfg = before.get("explanation_config"), after.get("explanation_config")
        if isinstance(b_cfg, Mapping) and isinstance(a_cfg, Mapping):
            for key in sorted(set(b_cfg) | set(a_cfg)):
                if b_cfg.get(key) != a_cfg.get(key):
                    changes.append(
                        FieldChange(f"explanation_config.{key}", b_cfg.get(key), a_cfg.get(key))
                    )
        elif b_cfg != a_cfg:
            changes.append(FieldChange("explanation_config", b_cfg, a_cfg))
    return changes


def diff(a: TemplateRepository, b: TemplateRepository) -> ChangeSet:
    """Field-level difference; apply(a, diff(a, b)) reproduces b's content."""
    ta, tb = repo_to_tree(a), repo_to_tree(b)
    added: dict[str, dict] = {}
    removed: dict[str, dict] = {}
    modified: dict[str, tuple[FieldChange, ...]] = {}
    for name in sorted(set(ta["gates"]) | set(tb["gates"])):
        in_a, in_b = name in ta["gates"], name in tb["gates"]
        if in_a and not in_b:
            removed[name] = ta["gates"][name]
        elif in_b and not in_a:
            added[name] = tb["gates"][name]
        else:
            changes = _gate_field_changes(ta["gates"][name], tb["gates"][name])
            if changes:
                modified[name] = tuple(changes)

    sections: list[FieldChange] = []
    if ta["kind"] != tb["kind"]:
        sections.append(FieldChange("kind", ta["kind"], tb["kind"]))
    for section in sorted(set(ta["system_info"]) | set(tb["system_info"])):
        bv, av = ta["system_info"].get(section), tb["system_info"].get(section)
        if bv != av:
            sections.append(FieldChange(f"system_info.{section}", bv, av))
    for sid in sorted(set(ta["stakeholders"]) | set(tb["stakeholders"])):
        bv, av = ta["stakeholders"].get(sid), tb["stakeholders"].get(sid)
        if bv != av:
            sections.append(FieldChange(f"stakeholders.{sid}", bv, av))
    for rid in sorted(set(ta["risks"]) | set(tb["risks"])):
        bv, av = ta["risks"].get(rid), tb["risks"].get(rid)
        if bv is None or av is None:
            if bv != av:
                sections.append(FieldChange(f"risks.{rid}", bv, av))
            continue
        for key in sorted(set(bv) | set(av)):
            if bv.get(key) != av.get(key):
                sections.append(FieldChange(f"risks.{rid}.{key}", bv.get(key), av.get(key)))

    return ChangeSet(
        added=added, removed=removed, modified=modified, section_changes=tuple(sections)
    )


def _apply_gate_change(gate: dict, change: FieldChange, name: str) -> dict:
    if change.path == "":
        if gate != change.before:
            raise PatchError(f"gate {name!r} does not match the change set base")
        return dict(change.after)
    parts = change.path.split(".")
    target = gate
    for part in parts[:-1]:
        nxt = target.get(part)
        if not isinstance(nxt, dict):
            nxt = {}
            target[part] = nxt
        target = nxt
    leaf_key = parts[-1]
    current = target.get(leaf_key)
    if current != change.before:
        raise PatchError(
            f"gate {name!r} field {change.path!r} is {current!r}, expected {change.before!r}"
        )
    if change.after is None and change.path.startswith(("representation.",)):
        target.pop(leaf_key, None)
    else:
        target[leaf_key] = change.after
    return gate


def apply(a: TemplateRepository, changes: ChangeSet) -> TemplateRepository:
    """Apply a change set; raises :class:`PatchError` when it does not fit."""
    tree = repo_to_tree(a)
    gates = tree["gates"]
    for name, payload in changes.removed.items():
        if name not in gates:
            raise PatchError(f"cannot remove missing gate {name!r}")
        del gates[name]
    for name, payload in changes.added.items():
        if name in gates:
            raise PatchError(f"cannot add existing gate {name!r}")
        gates[name] = dict(payload)
    for name, field_changes in changes.modified.items():
        if name not in gates:
            raise PatchError(f"cannot modify missing gate {name!r}")
        gate = dict(gates[name])
        for change in field_changes:
            gate = _apply_gate_change(gate, change, name)
        gates[name] = gate

    for change in changes.section_changes:
        parts = change.path.split(".")
        if change.path == "kind":
            if tree["kind"] != change.before:
                raise PatchError("kind does not match the change set base")
            tree["kind"] = change.after
        elif parts[0] == "system_info":
            section = parts[1]
            if tree["system_info"].get(section) != change.before:
                raise PatchError(f"section {section!r} does not match the change set base")
            tree["system_info"][section] = change.after
        elif parts[0] in ("stakeholders", "risks"):
            table = tree[parts[0]]
            key = parts[1]
            if len(parts) == 2:
                current = table.get(key)
                if current != change.before:
                    raise PatchError(f"{change.path!r} does not match the change set base")
                if change.after is None:
                    table.pop(key, None)
                else:
                    table[key] = dict(change.after)
            else:
                record = table.get(key)
                if record is None:
                    raise PatchError(f"cannot modify missing record {change.path!r}")
                fld = parts[2]
                if record.get(fld) != change.before:
                    raise PatchError(f"{change.path!r} does not match the change set base")
                record[fld] = change.after
        else:
            raise PatchError(f"unknown section path {change.path!r}")
    return tree_to_repo(tree, version=a.version)


# ---------------------------------------------------------------------------
# Three-way merge
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Conflict:
    name: str
    field_path: str
    ours: object
    theirs: object

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "field_path": self.field_path,
            "ours": self.ours,
            "theirs": self.theirs,
        }

    def swapped(self) -> "Conflict":
        return Conflict(self.name, self.field_path, self.theirs, self.ours)


def merge(
    base: TemplateRepository, ours: TemplateRepository, theirs: TemplateRepository
) -> TemplateRepository:
    """Field-granular three-way merge.

    Non-overlapping changes combine; the same field changed to different
    values on both sides raises :class:`MergeConflicts`. A merge whose result
    fails validation raises :class:`PostMergeInvalid`.
    """
    d_ours = diff(base, ours)
    d_theirs = diff(base, theirs)
    conflicts: list[Conflict] = []

    added: dict[str, dict] = {}
    removed: dict[str, dict] = {}
    modified: dict[str, dict[str, FieldChange]] = {}

    def add_modification(name: str, change: FieldChange) -> None:
        slot = modified.setdefault(name, {})
        existing = slot.get(change.path)
        if existing is None:
            slot[change.path] = change
        elif existing.after != change.after:
            conflicts.append(Conflict(name, change.path, existing.after, change.after))

    gate_names = (
        set(d_ours.added) | set(d_theirs.added)
        | set(d_ours.removed) | set(d_theirs.removed)
        | set(d_ours.modified) | set(d_theirs.modified)
    )
    for name in sorted(gate_names):
        o_add, t_add = d_ours.added.get(name), d_theirs.added.get(name)
        o_rem, t_rem = name in d_ours.removed, name in d_theirs.removed
        o_mod, t_mod = d_ours.modified.get(name, ()), d_theirs.modified.get(name, ())

        if o_add is not None or t_add is not None:
            if o_add is not None and t_add is not None:
                if o_add == t_add:
                    added[name] = o_add
                else:
                    for change in _gate_field_changes(o_add, t_add):
                        conflicts.append(
                            Conflict(name, change.path, change.before, change.after)
                        )
            else:
                added[name] = o_add if o_add is not None else t_add
            continue
        if o_rem or t_rem:
            other_mods = t_mod if o_rem else o_mod
            if other_mods:
                for change in other_mods:
                    if o_rem:
                        conflicts.append(Conflict(name, change.path, None, change.after))
                    else:
                        conflicts.append(Conflict(name, change.path, change.after, None))
            else:
                removed[name] = (d_ours.removed if o_rem else d_theirs.removed)[name]
            continue
        # a whole-gate replacement (type change) conflicts with any other edit
        o_whole = any(c.path == "" for c in o_mod)
        t_whole = any(c.path == "" for c in t_mod)
        if o_whole or t_whole:
            if o_mod == t_mod:
                for change in o_mod:
                    add_modification(name, change)
            elif o_whole and not t_mod:
                for change in o_mod:
                    add_modification(name, change)
            elif t_whole and not o_mod:
                for change in t_mod:
                    add_modification(name, change)
            else:
                o_after = next((c.after for c in o_mod if c.path == ""), None)
                t_after = next((c.after for c in t_mod if c.path == ""), None)
                conflicts.append(Conflict(name, "", o_after, t_after))
            continue
        for change in o_mod:
            add_modification(name, change)
        for change in t_mod:
            add_modification(name, change)

    section_changes: dict[str, FieldChange] = {}
    for change in d_ours.section_changes:
        section_changes[change.path] = change
    for change in d_theirs.section_changes:
        existing = section_changes.get(change.path)
        if existing is None:
            section_changes[change.path] = change
        elif existing.after != change.after:
            conflicts.append(Conflict(change.path, "", existing.after, change.after))

    if conflicts:
        raise MergeConflicts(sorted(conflicts, key=lambda c: (c.name, c.field_path)))

    merged_set = ChangeSet(
        added=added,
        removed=removed,
        modified={n: tuple(che for _, che in sorted(slots.items())) for n, slots in modified.items()},
        section_changes=tuple(section_changes[p] for p in sorted(section_changes)),
    )
    merged = apply(base, merged_set)
    merged = merged.with_version(ours.version)
    report = validate(merged)
    if not report.ok:
        raise PostMergeInvalid(report.findings)
    return merged


# ---------------------------------------------------------------------------
# Pull
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PullResult:
    repo: TemplateRepository
    pulled: tuple[str, ...]
    empty: bool


def pull(dk: TemplateRepository, query: TagQuery) -> PullResult:
    """Derive an application repository from a design-knowledge repository.

    The result carries the full collection skeleton and supplementary
    sections, every leaf matched by the query, and the transitive leaf
    inputs of each pulled leaf so nothing dangles. References to gates left
    behind are pruned. ``empty`` flags a query that matched no leaf.
    """
    if dk.kind != RepositoryKind.DESIGN_KNOWLEDGE:
        raise NotDesignKnowledge(f"cannot pull from a {dk.kind.value} repository")
    report = validate(dk)
    if not report.ok:
        raise NotDesignKnowledge(
            "design-knowledge repository must validate cleanly before a pull: "
            + "; ".join(str(f) for f in report.findings)
        )

    matched = find_by_tags(dk, query)
    keep: set[str] = set(matched)
    stack = list(matched)
    while stack:
        gate = dk.gates[stack.pop()]
        if not isinstance(gate, LeafQg):
            continue
        for ref in gate.inputs:
            if is_system_ref(ref):
                continue
            if isinstance(dk.gates.get(ref), LeafQg) and ref not in keep:
                keep.add(ref)
                stack.append(ref)

    kept_names = {
        name
        for name, gate in dk.gates.items()
        if isinstance(gate, CollectionQg) or name in keep
    }
    gates: dict[str, model.Gate] = {}
    for name in kept_names:
        gate = dk.gates[name]
        if isinstance(gate, CollectionQg):
            gates[name] = model.CollectionQg(
                name=gate.name,
                stage=gate.stage,
                description=gate.description,
                children=tuple(c for c in gate.children if c in kept_names),
            )
        else:
            gates[name] = model.LeafQg(
                name=gate.name,
                tags=gate.tags,
                content=gate.content,
                method=gate.method,
                inputs=gate.inputs,
                outputs=tuple(
                    ref for ref in gate.outputs if is_system_ref(ref) or ref in kept_names
                ),
                monitoring_hooks=gate.monitoring_hooks,
                representation=gate.representation,
                evaluation_notes=gate.evaluation_notes,
                risk_links=gate.risk_links,
                explanation_config=gate.explanation_config,
            )

    risks = tuple(
        model.Risk(
            id=r.id,
            title=r.title,
            description=r.description,
            tai_criterion=r.tai_criterion,
            subsection=r.subsection,
            source=r.source,
            events=r.events,
            harm=r.harm,
            likelihood=r.likelihood,
            severity=r.severity,
            controlled_by=tuple(ref for ref in r.controlled_by if ref in kept_names),
            status=r.status,
        )
        for r in dk.risk_register
    )

    note = "pulled with views={} keywords={} match={}".format(
        sorted(query.views), sorted(query.keywords), query.match_mode
    )
    repo = TemplateRepository(
        kind=RepositoryKind.APPLICATION,
        system_info=dk.system_info,
        risk_register=risks,
        gates=gates,
        version=VersionMeta(
            version_id="v0",
            phase=VersionPhase.PRE_SELECTION,
            branch_name="main",
            parent=None,
            note=note,
        ),
    )
    return PullResult(repo=repo, pulled=tuple(matched), empty=not matched)


# ---------------------------------------------------------------------------
# Branches and the lineage store
# ---------------------------------------------------------------------------

def derive_branch(repo: TemplateRepository, name: str, version_id: str) -> TemplateRepository:
    """Same content under a new branch; the source version becomes the parent."""
    if not name:
        raise ValueError("branch name must be non-empty")
    return repo.with_version(
        VersionMeta(
            version_id=version_id,
            phase=repo.version.phase,
            branch_name=name,
            parent=repo.version.version_id,
            note=f"branched from {repo.version.branch_name}",
        )
    )


class LineageStore:
    """A directory of saved repository versions plus a branch index.

    Layout: ``<dir>/index`` maps branches to head version ids; each version
    lives under ``<dir>/<version_id>/`` as a saved repository. Single writer;
    concurrent readers are safe.
    """

    INDEX_FILE = "index"

    def __init__(self, path: str | Path):
        self.path = Path(path)

    # -- index ------------------------------------------------------------

    def _index_path(self) -> Path:
        return self.path / self.INDEX_FILE

    def _read_index(self) -> dict:
        if not self._index_path().is_file():
            return {"branches": {}, "next": 0}
        data = yaml.safe_load(self._index_path().read_text(encoding="utf-8"))
        if not isinstance(data, dict):
            raise RepoSyntaxError(self._index_path(), "corrupt lineage index")
        return {"branches": dict(data.get("branches") or {}), "next": int(data.get("next") or 0)}

    def _write_index(self, index: dict) -> None:
        self.path.mkdir(parents=True, exist_ok=True)
        payload = {
            "branches": {k: index["branches"][k] for k in sorted(index["branches"])},
            "next": index["next"],
        }
        self._index_path().write_text(store.dump_yaml(payload), encoding="utf-8")

    # -- queries ------------------------------------------------------------

    def branches(self) -> dict[str, str]:
        return self._read_index()["branches"]

    def head(self, branch: str) -> TemplateRepository:
        index = self._read_index()
        if branch not in index["branches"]:
            raise UnknownBranch(branch)
        return store.load(self.path / index["branches"][branch])

    def load_version(self, version_id: str) -> TemplateRepository:
        return store.load(self.path / version_id)

    # -- writes ------------------------------------------------------------

    def init(self, repo: TemplateRepository) -> TemplateRepository:
        """Store ``repo`` as the head of its own branch in a fresh store."""
        index = self._read_index()
        if index["branches"]:
            raise DuplicateBranch(next(iter(index["branches"])))
        return self._store(repo, index)

    def commit(self, repo: TemplateRepository, branch: str) -> TemplateRepository:
        """Advance ``branch`` to a new version holding ``repo``'s content."""
        index = self._read_index()
        if branch not in index["branches"]:
            raise UnknownBranch(branch)
        parent = index["branches"][branch]
        versioned = repo.with_version(
            VersionMeta(
                version_id=f"v{index['next']}",
                phase=repo.version.phase,
                branch_name=branch,
                parent=parent,
                note=repo.version.note,
            )
        )
        return self._store(versioned, index)

    def branch(self, new_name: str, from_branch: str) -> TemplateRepository:
        """Create ``new_name`` from the head of ``from_branch``."""
        index = self._read_index()
        if new_name in index["branches"]:
            raise DuplicateBranch(new_name)
        if from_branch not in index["branches"]:
            raise UnknownBranch(from_branch)
        source = store.load(self.path / index["branches"][from_branch])
        branched = derive_branch(source, new_name, f"v{index['next']}")
        return self._store(branched, index)

    def _store(self, repo: TemplateRepository, index: dict) -> TemplateRepository:
        vid = repo.version.version_id
        expected = f"v{index['next']}"
        if vid != expected:
            repo = repo.with_version(
                VersionMeta(
                    version_id=expected,
                    phase=repo.version.phase,
                    branch_name=repo.version.branch_name,
                    parent=repo.version.parent,
                    note=repo.version.note,
                )
            )
        store.save(repo, self.path / repo.version.version_id)
        index["branches"][repo.version.branch_name] = repo.version.version_id
        index["next"] += 1
        self._write_index(index)
        return repo


def changes_between(versions: Iterable[TemplateRepository]) -> list[ChangeSet]:
    """Pairwise diffs along a sequence of versions, oldest first."""
    versions = list(versions)
    return [diff(a, b) for a, b in zip(versions, versions[1:])]
