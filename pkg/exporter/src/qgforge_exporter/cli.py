"""Export command: run the scenarios and write a bundle for `qg xai-score`."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .data import BUNDLED
from .explainers import EXPLAINERS
from .export import ExportJob, export
from .models import MODELS


@click.command()
@click.option("--dataset", default=BUNDLED, show_default=True,
              help=f"'{BUNDLED}' or a path to a CSV (last column = binary label).")
@click.option("--model", type=click.Choice(MODELS), default="logistic", show_default=True)
@click.option("--explainer", type=click.Choice(EXPLAINERS), default="SHAP", show_default=True)
@click.option("--splits", type=int, default=5, show_default=True,
              help="Number of resampled train/test splits (minimum 2).")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", type=click.Path(path_type=Path), required=True)
def main(dataset, model, explainer, splits, seed, out_path) -> None:
    """Run base, label-shuffle, random-init and resplit scenarios; write a bundle."""
    try:
        job = ExportJob(
            dataset=dataset, model=model, explainer=explainer, splits=splits, seed=seed
        )
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    try:
        written = export(job, out_path)
    except Exception as exc:
        click.echo(f"error: export failed: {exc}", err=True)
        sys.exit(1)
    click.echo(f"wrote {explainer} bundle to {written}")


if __name__ == "__main__":
    main()
