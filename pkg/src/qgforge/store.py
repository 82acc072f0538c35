"""Directory persistence for template repositories.

Layout::

    <root>/
      manifest                  kind + version metadata (YAML)
      system/<section>.txt      one plain-text file per prose section
      system/stakeholders.yaml  structured stakeholder list
      risks/<id>.yaml           one file per risk record
      lifecycle/...             one YAML file per gate; collection gates are
                                directories holding a collection.yaml plus
                                their children, mirroring the hierarchy

Serialization is canonical: fixed key order, UTF-8, LF line endings, no
timestamps. Saving the same repository twice produces byte-identical trees,
and load(save(R)) == R.
"""

from __future__ import annotations

import shutil
from pathlib import Path
from typing import Mapping

import yaml

from . import model
from .errors import DuplicateGateFile, MissingManifest, RepoSyntaxError
from .model import CollectionQg, Gate, TemplateRepository

MANIFEST_FILE = "manifest"
SYSTEM_DIR = "system"
RISKS_DIR = "risks"
LIFECYCLE_DIR = "lifecycle"
COLLECTION_FILE = "collection.yaml"

_TEXT_SECTIONS = tuple(s for s in model.SYSTEM_SECTIONS if s != "stakeholders")


# ---------------------------------------------------------------------------
# Canonical YAML
# ---------------------------------------------------------------------------

_BaseDumper = getattr(yaml, "CSafeDumper", yaml.SafeDumper)
_BaseLoader = getattr(yaml, "CSafeLoader", yaml.SafeLoader)


class _Dumper(_BaseDumper):
    pass


def _block_style_ok(value: str) -> bool:
    # literal blocks keep prose diffs readable, but only when the emitter can
    # reproduce the exact string (no trailing spaces, no carriage returns)
    if "\r" in value:
        return False
    return all(line == line.rstrip(" \t") for line in value.split("\n"))


def _represent_str(dumper: yaml.SafeDumper, value: str):
    if "\n" in value and _block_style_ok(value):
        return dumper.represent_scalar("tag:yaml.org,2002:str", value, style="|")
    return dumper.represent_scalar("tag:yaml.org,2002:str", value)


_Dumper.add_representer(str, _represent_str)


def dump_yaml(data) -> str:
    return yaml.dump(
        data,
        Dumper=_Dumper,
        sort_keys=False,
        allow_unicode=True,
        default_flow_style=False,
    )


def load_yaml(path: Path):
    try:
        return yaml.load(path.read_text(encoding="utf-8"), Loader=_BaseLoader)
    except yaml.YAMLError as exc:
        line = None
        mark = getattr(exc, "problem_mark", None)
        if mark is not None:
            line = mark.line + 1
        raise RepoSyntaxError(path, f"invalid YAML: {exc}", line) from exc


# ---------------------------------------------------------------------------
# Save
# ---------------------------------------------------------------------------

def save(repo: TemplateRepository, path: str | Path) -> None:
    """Write ``repo`` under ``path``, replacing any previous repository files.

    Precondition: the repository has no MalformedName or DuplicateName
    findings (gate names must be usable as file names). OS failures
    propagate as OSError.
    """
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    for entry in (MANIFEST_FILE, SYSTEM_DIR, RISKS_DIR, LIFECYCLE_DIR):
        target = root / entry
        if target.is_dir():
            shutil.rmtree(target)
        elif target.exists():
            target.unlink()

    manifest = {
        "kind": repo.kind.value,
        "version": model.version_to_dict(repo.version),
    }
    _write_text(root / MANIFEST_FILE, dump_yaml(manifest))

    system_dir = root / SYSTEM_DIR
    system_dir.mkdir()
    for section in _TEXT_SECTIONS:
        _write_text(system_dir / f"{section}.txt", repo.system_info.section_text(section))
    stakeholders = [model.stakeholder_to_dict(s) for s in repo.system_info.stakeholders]
    _write_text(system_dir / "stakeholders.yaml", dump_yaml(stakeholders))

    risks_dir = root / RISKS_DIR
    risks_dir.mkdir()
    for risk in repo.risk_register:
        _write_text(risks_dir / f"{risk.id}.yaml", dump_yaml(model.risk_to_dict(risk)))

    lifecycle_dir = root / LIFECYCLE_DIR
    lifecycle_dir.mkdir()
    _write_lifecycle(repo, lifecycle_dir)


def _write_text(path: Path, text: str) -> None:
    path.write_bytes(text.encode("utf-8"))


def _write_lifecycle(repo: TemplateRepository, lifecycle_dir: Path) -> None:
    parent: dict[str, str] = {}
    for name, gate in repo.gates.items():
        if isinstance(gate, CollectionQg):
            for child in gate.children:
                parent.setdefault(child, name)

    written: set[str] = set()

    def write_gate(name: str, directory: Path) -> None:
        if name in written:
            return
        written.add(name)
        gate = repo.gates[name]
        if isinstance(gate, CollectionQg):
            gate_dir = directory / name
            gate_dir.mkdir()
            _write_text(gate_dir / COLLECTION_FILE, dump_yaml(model.gate_to_dict(gate)))
            for child in gate.children:
                if child in repo.gates:
                    write_gate(child, gate_dir)
        else:
            _write_text(directory / f"{name}.yaml", dump_yaml(model.gate_to_dict(gate)))

    # forest roots first (the root gate plus any parentless gate), then any
    # gate a tree walk cannot reach (e.g. members of a hierarchy cycle)
    for name in repo.gates:
        if name not in parent:
            write_gate(name, lifecycle_dir)
    for name in repo.gates:
        write_gate(name, lifecycle_dir)


# ---------------------------------------------------------------------------
# Load
# ---------------------------------------------------------------------------

def load(path: str | Path) -> TemplateRepository:
    """Read a repository from disk.

    Structural problems raise (MissingManifest, RepoSyntaxError,
    DuplicateGateFile); semantic problems such as dangling references are
    deferred to :func:`qgforge.model.validate`.
    """
    root = Path(path)
    manifest_path = root / MANIFEST_FILE
    if not manifest_path.is_file():
        raise MissingManifest(root)

    manifest = _expect_mapping(load_yaml(manifest_path), manifest_path)
    try:
        kind = model.RepositoryKind(manifest.get("kind"))
        version = model.version_from_dict(_as_mapping(manifest.get("version"), "version"))
    except (ValueError, KeyError) as exc:
        raise RepoSyntaxError(manifest_path, str(exc)) from exc

    system_dir = root / SYSTEM_DIR
    sections = {}
    for section in _TEXT_SECTIONS:
        file = system_dir / f"{section}.txt"
        sections[section] = file.read_text(encoding="utf-8") if file.is_file() else ""
    stakeholders: list[model.Stakeholder] = []
    stakeholders_path = system_dir / "stakeholders.yaml"
    if stakeholders_path.is_file():
        raw = load_yaml(stakeholders_path) or []
        if not isinstance(raw, list):
            raise RepoSyntaxError(stakeholders_path, "expected a list of stakeholders")
        for entry in raw:
            stakeholders.append(
                _convert(model.stakeholder_from_dict, entry, stakeholders_path)
            )
    system_info = model.SystemInfo(stakeholders=tuple(stakeholders), **sections)

    risks = []
    risks_dir = root / RISKS_DIR
    if risks_dir.is_dir():
        for file in sorted(risks_dir.glob("*.yaml")):
            data = _expect_mapping(load_yaml(file), file)
            risk = _convert(model.risk_from_dict, data, file)
            if risk.id != file.stem:
                raise RepoSyntaxError(file, f"risk id {risk.id!r} does not match file name")
            risks.append(risk)

    gates: dict[str, Gate] = {}
    origins: dict[str, Path] = {}
    lifecycle_dir = root / LIFECYCLE_DIR
    if lifecycle_dir.is_dir():
        for file in sorted(lifecycle_dir.rglob("*.yaml")):
            data = _expect_mapping(load_yaml(file), file)
            gate = _convert(model.gate_from_dict, data, file)
            expected = file.parent.name if file.name == COLLECTION_FILE else file.stem
            if gate.name != expected:
                raise RepoSyntaxError(
                    file, f"gate name {gate.name!r} does not match path {expected!r}"
                )
            if isinstance(gate, CollectionQg) != (file.name == COLLECTION_FILE):
                raise RepoSyntaxError(
                    file, "collection gates live in collection.yaml files, leaves in <name>.yaml"
                )
            if gate.name in gates:
                raise DuplicateGateFile(gate.name, origins[gate.name], file)
            gates[gate.name] = gate
            origins[gate.name] = file

    return TemplateRepository(
        kind=kind,
        system_info=system_info,
        risk_register=tuple(risks),
        gates=gates,
        version=version,
    )


def _expect_mapping(data, path: Path) -> Mapping:
    if not isinstance(data, Mapping):
        raise RepoSyntaxError(path, "expected a YAML mapping at the top level")
    return data


def _as_mapping(value, name: str) -> Mapping:
    if not isinstance(value, Mapping):
        raise ValueError(f"field {name!r} must be a mapping")
    return value


def _convert(converter, data, path: Path):
    if not isinstance(data, Mapping):
        raise RepoSyntaxError(path, "expected a YAML mapping")
    try:
        return converter(data)
    except (ValueError, KeyError, TypeError) as exc:
        raise RepoSyntaxError(path, str(exc)) from exc
