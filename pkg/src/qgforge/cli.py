"""Command-line surface for quality-gate repositories and explanation scoring.

Exit codes: 0 success, 1 findings/conflicts/empty results, 2 usage errors
(including malformed bundles), 3 I/O errors (missing or unreadable paths).
With ``--output json`` every command writes a single JSON document to stdout;
diagnostics go to stderr. The repository path defaults to ``$QGFORGE_REPO``.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from . import graph as graph_ops
from . import model, store
from . import version as version_ops
from .errors import (
    BundleError,
    DuplicateBranch,
    EmptyScope,
    MergeConflicts,
    NotACollection,
    NotDesignKnowledge,
    PostMergeInvalid,
    QgError,
    StoreError,
    UnknownBranch,
    UnknownGate,
)
from .xai import bundle as bundle_io
from .xai import scoring, synth

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_USAGE = 2
EXIT_IO = 3

_output_option = click.option(
    "--output",
    type=click.Choice(["human", "json"]),
    default="human",
    show_default=True,
    help="Output format.",
)

_repo_option = click.option(
    "--repo",
    "repo_path",
    type=click.Path(path_type=Path),
    envvar="QGFORGE_REPO",
    required=True,
    help="Repository directory (defaults to $QGFORGE_REPO).",
)


def _emit(payload: dict, output: str, human_lines) -> None:
    if output == "json":
        click.echo(json.dumps(payload, indent=2))
    else:
        for line in human_lines:
            click.echo(line)


def _fail_io(message: str) -> "click.exceptions.Exit":
    click.echo(f"error: {message}", err=True)
    return SystemExit(EXIT_IO)


def _load_repo(path: Path) -> model.TemplateRepository:
    try:
        return store.load(path)
    except StoreError as exc:
        raise _fail_io(str(exc))
    except OSError as exc:
        raise _fail_io(str(exc))


@click.group()
def main() -> None:
    """Manage quality-gate template repositories and score explanations."""


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------

@main.command()
@_repo_option
@_output_option
def validate(repo_path: Path, output: str) -> None:
    """Check the repository's structural rules; exit 1 if findings exist."""
    repo = _load_repo(repo_path)
    report = model.validate(repo)
    payload = {
        "ok": report.ok,
        "findings": [
            {"code": f.code.value, "subject": f.subject, "detail": f.detail}
            for f in report.findings
        ],
    }
    lines = [str(f) for f in report.findings] or ["ok: no findings"]
    _emit(payload, output, lines)
    if not report.ok:
        sys.exit(EXIT_FINDINGS)


# ---------------------------------------------------------------------------
# pull
# ---------------------------------------------------------------------------

@main.command()
@click.argument("dk_path", type=click.Path(path_type=Path))
@click.option("--view", "views", multiple=True, help="Match leaves with this name view.")
@click.option("--keyword", "keywords", multiple=True, help="Match leaves with this tag keyword.")
@click.option(
    "--match-mode",
    type=click.Choice(["any", "all"]),
    default="any",
    show_default=True,
    help="Keyword matching: any overlap or all keywords present.",
)
@click.option("--out", "out_path", type=click.Path(path_type=Path), required=True)
@_output_option
def pull(dk_path, views, keywords, match_mode, out_path, output):
    """Derive an application repository from a design-knowledge repository."""
    if not views and not keywords:
        raise click.UsageError("give at least one --view or --keyword")
    dk = _load_repo(dk_path)
    if out_path.exists() and any(out_path.iterdir()):
        raise _fail_io(f"output path {out_path} exists and is not empty")
    try:
        query = graph_ops.TagQuery(
            views=frozenset(views), keywords=frozenset(keywords), match_mode=match_mode
        )
        result = version_ops.pull(dk, query)
    except NotDesignKnowledge as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_USAGE)
    store.save(result.repo, out_path)
    payload = {
        "out": str(out_path),
        "pulled": list(result.pulled),
        "empty_pull": result.empty,
    }
    lines = [f"pulled {len(result.pulled)} leaf gate(s) into {out_path}"]
    lines += [f"  {name}" for name in result.pulled]
    if result.empty:
        lines.append("warning: no leaf gate matched the query; wrote the skeleton only")
    _emit(payload, output, lines)
    if result.empty:
        sys.exit(EXIT_FINDINGS)


# ---------------------------------------------------------------------------
# versioning
# ---------------------------------------------------------------------------

@main.command()
@click.argument("name")
@click.option("--store", "store_path", type=click.Path(path_type=Path), required=True,
              help="Lineage store directory.")
@click.option("--from", "from_branch", default="main", show_default=True,
              help="Branch to fork from.")
@click.option("--repo", "repo_path", type=click.Path(path_type=Path), envvar="QGFORGE_REPO",
              default=None, help="Bootstrap an empty store with this repository first.")
@_output_option
def branch(name, store_path, from_branch, repo_path, output):
    """Create a branch from the head of another branch in a lineage store."""
    lineage = version_ops.LineageStore(store_path)
    try:
        if repo_path is not None and not lineage.branches():
            lineage.init(_load_repo(repo_path))
        branched = lineage.branch(name, from_branch)
    except (DuplicateBranch, UnknownBranch) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_FINDINGS)
    except StoreError as exc:
        raise _fail_io(str(exc))
    meta = branched.version
    payload = {
        "branch": meta.branch_name,
        "version_id": meta.version_id,
        "parent": meta.parent,
    }
    _emit(payload, output, [f"branch {meta.branch_name} at {meta.version_id} (parent {meta.parent})"])


@main.command()
@click.argument("a_path", type=click.Path(path_type=Path))
@click.argument("b_path", type=click.Path(path_type=Path))
@_output_option
def diff(a_path, b_path, output):
    """Field-level change set between two saved repositories."""
    a = _load_repo(a_path)
    b = _load_repo(b_path)
    changes = version_ops.diff(a, b)
    payload = changes.to_json_dict()
    lines = []
    for name in sorted(changes.added):
        lines.append(f"added    {name}")
    for name in sorted(changes.removed):
        lines.append(f"removed  {name}")
    for name, field_changes in sorted(changes.modified.items()):
        for change in field_changes:
            lines.append(f"modified {name} :: {change.path or '(gate)'}")
    for change in changes.section_changes:
        lines.append(f"modified {change.path}")
    _emit(payload, output, lines or ["no changes"])


@main.command()
@click.argument("base_path", type=click.Path(path_type=Path))
@click.argument("ours_path", type=click.Path(path_type=Path))
@click.argument("theirs_path", type=click.Path(path_type=Path))
@click.option("--out", "out_path", type=click.Path(path_type=Path), required=True)
@_output_option
def merge(base_path, ours_path, theirs_path, out_path, output):
    """Three-way merge; non-overlapping field edits combine."""
    base = _load_repo(base_path)
    ours = _load_repo(ours_path)
    theirs = _load_repo(theirs_path)
    if out_path.exists() and any(out_path.iterdir()):
        raise _fail_io(f"output path {out_path} exists and is not empty")
    try:
        merged = version_ops.merge(base, ours, theirs)
    except MergeConflicts as exc:
        payload = {
            "status": "conflicts",
            "conflicts": [c.to_json_dict() for c in exc.conflicts],
        }
        lines = ["merge conflicts:"] + [
            f"  {c.name} :: {c.field_path or '(gate)'}" for c in exc.conflicts
        ]
        _emit(payload, output, lines)
        sys.exit(EXIT_FINDINGS)
    except PostMergeInvalid as exc:
        payload = {
            "status": "invalid",
            "findings": [
                {"code": f.code.value, "subject": f.subject, "detail": f.detail}
                for f in exc.findings
            ],
        }
        _emit(payload, output, ["merged repository failed validation:"]
              + [f"  {f}" for f in exc.findings])
        sys.exit(EXIT_FINDINGS)
    store.save(merged, out_path)
    _emit({"status": "merged", "out": str(out_path)}, output, [f"merged into {out_path}"])


# ---------------------------------------------------------------------------
# scores and reports
# ---------------------------------------------------------------------------

@main.group()
def score() -> None:
    """Repository-level scores."""


@score.command("participation")
@_repo_option
@click.option("--scope", required=True, help="Collection gate bounding the analysis.")
@click.option(
    "--role",
    type=click.Choice([r.value for r in model.StakeholderRole]),
    required=True,
)
@_output_option
def score_participation(repo_path, scope, role, output):
    """Fraction of leaves under a collection whose representation reaches a role."""
    repo = _load_repo(repo_path)
    try:
        value = graph_ops.stakeholder_participation_score(
            repo, scope, model.StakeholderRole(role)
        )
    except (UnknownGate, NotACollection, EmptyScope) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_USAGE)
    payload = {"scope": scope, "role": role, "score": value}
    _emit(payload, output, [f"participation({scope}, {role}) = {value:.4f}"])


@main.command("risk-coverage")
@_repo_option
@_output_option
def risk_coverage(repo_path, output):
    """List uncontrolled risks and the controls attached to each risk."""
    repo = _load_repo(repo_path)
    coverage = graph_ops.risk_coverage(repo)
    payload = coverage.to_json_dict()
    lines = []
    for rid, controls in coverage.controls_per_risk.items():
        status = ", ".join(controls) if controls else "UNCONTROLLED"
        lines.append(f"{rid}: {status}")
    _emit(payload, output, lines or ["no risks in the register"])
    if coverage.uncontrolled:
        sys.exit(EXIT_FINDINGS)


@main.group()
def graph() -> None:
    """Graph exports."""


@graph.command("dot")
@_repo_option
@_output_option
def graph_dot(repo_path, output):
    """Emit the gate graph as DOT text."""
    repo = _load_repo(repo_path)
    try:
        text = graph_ops.to_dot(repo)
    except QgError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_USAGE)
    if output == "json":
        click.echo(json.dumps({"dot": text}, indent=2))
    else:
        click.echo(text, nl=False)


@main.command()
@click.argument("gate")
@_repo_option
@click.option(
    "--role",
    type=click.Choice([r.value for r in model.StakeholderRole]),
    required=True,
)
@_output_option
def report(gate, repo_path, role, output):
    """Render a gate's representation entries for stakeholders of a role."""
    repo = _load_repo(repo_path)
    found = repo.gates.get(gate)
    if found is None:
        click.echo(f"error: no gate named {gate!r}", err=True)
        sys.exit(EXIT_USAGE)
    if not isinstance(found, model.LeafQg):
        click.echo(f"error: {gate!r} is a collection; only leaves carry representations", err=True)
        sys.exit(EXIT_USAGE)
    wanted = model.StakeholderRole(role)
    by_id = {s.id: s for s in repo.system_info.stakeholders}
    entries = [
        {"stakeholder": sid, "text": text}
        for sid, text in sorted(found.representation.items())
        if sid in by_id and by_id[sid].role == wanted
    ]
    payload = {"gate": gate, "role": role, "entries": entries}
    lines = []
    for entry in entries:
        lines.append(f"[{entry['stakeholder']}]")
        lines.append(entry["text"])
    _emit(payload, output, lines or [f"no {role} representation on {gate}"])


# ---------------------------------------------------------------------------
# explanation scoring
# ---------------------------------------------------------------------------

def _score_config(config_path: Path | None) -> scoring.ScoreConfig:
    if config_path is None:
        return scoring.ScoreConfig()
    try:
        raw = json.loads(config_path.read_text(encoding="utf-8"))
        return scoring.ScoreConfig(**raw)
    except OSError as exc:
        raise _fail_io(str(exc))
    except (ValueError, TypeError) as exc:
        click.echo(f"error: bad score config: {exc}", err=True)
        sys.exit(EXIT_USAGE)


@main.command("xai-score")
@click.argument("bundle_path", type=click.Path(path_type=Path))
@click.option("--config", "config_path", type=click.Path(path_type=Path), default=None,
              help="JSON file with ScoreConfig fields.")
@_output_option
def xai_score(bundle_path, config_path, output):
    """Score an explanation bundle; the score itself is data, so exit 0."""
    config = _score_config(config_path)
    try:
        text = Path(bundle_path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _fail_io(str(exc))
    try:
        parsed = bundle_io.bundle_from_json(text)
        result = scoring.score(parsed, config)
    except QgError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_USAGE)
    payload = result.to_json_dict()
    lines = [
        f"fidelity        {result.fidelity}",
        f"ndcg_data_rand  {result.ndcg_data_rand:.4f}",
        f"ndcg_model_rand {result.ndcg_model_rand:.4f}",
        f"robustness      {result.robustness:.4f}",
        f"final_score     {result.final_score:.4f}",
        f"verdict         {result.verdict}",
    ]
    if result.null_threshold_used is not None:
        lines.insert(3, f"null_threshold  {result.null_threshold_used:.4f}")
    _emit(payload, output, lines)


@main.command("xai-synth")
@click.option("--seed", type=int, required=True)
@click.option("--mode", type=click.Choice([synth.MODE_COEFFICIENT, synth.MODE_NOISE]),
              default=synth.MODE_COEFFICIENT, show_default=True)
@click.option("--instances", type=int, default=synth.SynthSpec.n, show_default=True)
@click.option("--features", type=int, default=synth.SynthSpec.d, show_default=True)
@click.option("--noise", type=float, default=synth.SynthSpec.noise, show_default=True)
@click.option("--splits", type=int, default=synth.SynthSpec.splits, show_default=True)
@click.option("--out", "out_path", type=click.Path(path_type=Path), required=True)
@_output_option
def xai_synth(seed, mode, instances, features, noise, splits, out_path, output):
    """Generate a deterministic synthetic explanation bundle."""
    try:
        spec = synth.SynthSpec(
            n=instances, d=features, noise=noise, splits=splits, importance_mode=mode
        )
        generated = synth.synth_generate(seed, spec)
    except (ValueError, QgError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_USAGE)
    try:
        bundle_io.write_bundle(generated, out_path)
    except OSError as exc:
        raise _fail_io(str(exc))
    payload = {
        "out": str(out_path),
        "seed": seed,
        "mode": mode,
        "instances": instances,
        "features": features,
        "splits": splits,
    }
    _emit(payload, output, [f"wrote {mode} bundle for seed {seed} to {out_path}"])


if __name__ == "__main__":
    main()
