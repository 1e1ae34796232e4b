"""Command-line entry points: ingest, train, evaluate, explain, rules, label,
registry, serve, report, synth."""

from __future__ import annotations

import json
import sys
from collections import Counter
from pathlib import Path

import click
import numpy as np

from .config import RunConfig, resolve_data_path
from .encoding import KddEncoder
from .labeling import LabelRegistry
from .nslkdd import load_file
from .pipeline import (
    Explainer,
    evaluate_on,
    load_artifacts,
    save_artifacts,
    train_pipeline,
)
from .rules import GreedyDnfLearner, builtin_nslkdd_rules, eval_ruleset


def _require_file(path: str | Path) -> Path:
    resolved = resolve_data_path(path)
    if not resolved.exists():
        click.echo(f"error: cannot read data file {resolved}", err=True)
        sys.exit(2)
    return resolved


@click.group()
def main():
    """Explainable intrusion detection toolkit."""


@main.command()
@click.option("--out", "out_dir", default="data/sample", show_default=True)
@click.option("--n-train", default=4000, show_default=True)
@click.option("--n-test", default=1000, show_default=True)
@click.option("--seed", default=0, show_default=True)
def synth(out_dir, n_train, n_test, seed):
    """Generate a synthetic NSL-KDD-format sample dataset."""
    from .synthetic import write_dataset

    train, test = write_dataset(out_dir, n_train=n_train, n_test=n_test, seed=seed)
    click.echo(f"wrote {train} and {test}")


@main.command()
@click.argument("path")
def ingest(path):
    """Parse a flow file and print label/family statistics."""
    records = load_file(_require_file(path), on_error="collect")
    families = Counter(r.family for r in records)
    labels = Counter(r.attack_label for r in records)
    click.echo(f"records: {len(records)}")
    click.echo(f"parse errors: {len(records.errors)}")
    click.echo(f"attack fraction: {sum(r.is_attack for r in records) / max(1, len(records)):.3f}")
    click.echo("families: " + ", ".join(f"{k}={v}" for k, v in sorted(families.items())))
    click.echo("top labels: " + ", ".join(f"{k}={v}" for k, v in labels.most_common(8)))


def _config_options(fn):
    options = [
        click.option("--subsample-size", type=int, default=None),
        click.option("--subsample-normal", type=int, default=None),
        click.option("--subsample-attack", type=int, default=None),
        click.option("--subsample-seed", type=int, default=7, show_default=True),
        click.option("--trees", "n_trees", type=int, default=100, show_default=True),
        click.option("--psi", "subsample_psi", type=int, default=256, show_default=True),
        click.option("--forest-seed", type=int, default=11, show_default=True),
        click.option("--background-size", type=int, default=100, show_default=True),
        click.option("--background-seed", type=int, default=13, show_default=True),
        click.option("--n-coalitions", type=int, default=None),
        click.option("--shap-seed", type=int, default=17, show_default=True),
        click.option("--granularity", type=click.Choice(["collapsed", "raw"]), default="collapsed"),
        click.option("--label-k", type=int, default=3, show_default=True),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


@main.command()
@click.option("--train", "train_path", required=True)
@click.option("--test", "test_path", default=None)
@click.option("--out", "out_dir", default="artifacts", show_default=True)
@_config_options
def train(train_path, test_path, out_dir, **params):
    """Fit schema + isolation forest, calibrate, and write artifacts."""
    _require_file(train_path)
    config = RunConfig(train_path=train_path, test_path=test_path, out_dir=out_dir, **params)
    arts = train_pipeline(config)
    out = save_artifacts(arts)
    click.echo(arts.report.to_text())
    click.echo(f"\nconfig hash: {config.content_hash()[:16]}")
    click.echo(f"threshold: {arts.model.threshold_:.6f}")
    click.echo(f"artifacts written to {out}")


@main.command()
@click.option("--artifacts", "artifacts_dir", default="artifacts", show_default=True)
@click.option("--data", "data_path", required=True)
@click.option("--json", "as_json", is_flag=True)
def evaluate(artifacts_dir, data_path, as_json):
    """Score a labeled file against saved artifacts and print the report."""
    arts = load_artifacts(artifacts_dir)
    records = load_file(_require_file(data_path))
    report = evaluate_on(arts, records)
    click.echo(report.to_json() if as_json else report.to_text())


@main.command()
@click.option("--artifacts", "artifacts_dir", default="artifacts", show_default=True)
@click.option("--data", "data_path", required=True)
@click.option("--rows", type=int, default=10, show_default=True, help="explain the first N rows")
@click.option("--exact/--sampled", default=False, help="exact enumeration (collapsed games of <= 20 players)")
@click.option("--k", "label_k", type=int, default=None, help="override label component count")
@click.option("--explain-normals", is_flag=True)
@click.option("--registry", "registry_path", default=None)
@click.option("--players", default=None, help="comma-separated feature subset for the game")
@click.option("--out", "out_path", default=None, help="write JSON lines here instead of stdout")
def explain(artifacts_dir, data_path, rows, exact, label_k, explain_normals,
            registry_path, players, out_path):
    """Per-row JSON: score, class, attribution, auto-label, resolution."""
    arts = load_artifacts(artifacts_dir)
    explainer = Explainer(arts.model, arts.schema, arts.background, arts.config)
    if label_k is not None:
        explainer.config = _override(arts.config, label_k=label_k)
    registry = LabelRegistry(registry_path) if registry_path else None
    records = load_file(_require_file(data_path))[:rows]
    player_list = players.split(",") if players else None
    lines = []
    for i, record in enumerate(records):
        result = explainer.explain_record(
            record, registry=registry, exact=exact,
            explain_normals=explain_normals, players=player_list,
        )
        result["row"] = i
        lines.append(json.dumps(result, sort_keys=True))
    text = "\n".join(lines) + "\n"
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
        click.echo(f"wrote {len(lines)} explanations to {out_path}")
    else:
        click.echo(text, nl=False)


def _override(config: RunConfig, **changes) -> RunConfig:
    from dataclasses import replace

    return replace(config, **changes)


@main.command()
@click.option("--train", "train_path", required=True)
@click.option("--test", "test_path", default=None)
@click.option("--builtin-rules/--learn", "use_builtin", default=True)
@click.option("--max-clauses", type=int, default=5, show_default=True)
@click.option("--max-literals", type=int, default=3, show_default=True)
@click.option("--subsample-size", type=int, default=None)
@click.option("--subsample-normal", type=int, default=None)
@click.option("--subsample-attack", type=int, default=None)
@click.option("--subsample-seed", type=int, default=7, show_default=True)
def rules(train_path, test_path, use_builtin, max_clauses, max_literals,
          subsample_size, subsample_normal, subsample_attack, subsample_seed):
    """Print a DNF ruleset and its accuracy on the given data."""
    from .pipeline import load_training_records

    _require_file(train_path)
    config = RunConfig(
        train_path=train_path, test_path=test_path,
        subsample_size=subsample_size, subsample_normal=subsample_normal,
        subsample_attack=subsample_attack, subsample_seed=subsample_seed,
    )
    records = load_training_records(config)
    encoder = KddEncoder().fit(records)
    data = encoder.transform(records)
    if use_builtin:
        ruleset = builtin_nslkdd_rules()
    else:
        learner = GreedyDnfLearner(max_clauses=max_clauses, max_literals=max_literals)
        learner.fit(data.X, data.y, feature_names=encoder.schema.columns)
        ruleset = learner.ruleset_
    click.echo("Predict attack if ANY of:")
    click.echo(ruleset.to_text() or "(no clauses: always predict normal)")
    train_eval = eval_ruleset(ruleset, data.X, data.y, encoder.schema.columns)
    click.echo(f"\ntraining accuracy = {train_eval.accuracy:.4f}")
    if test_path:
        test_records = load_file(_require_file(test_path))
        test_data = encoder.transform(test_records)
        test_eval = eval_ruleset(ruleset, test_data.X, test_data.y, encoder.schema.columns)
        click.echo(f"test accuracy = {test_eval.accuracy:.4f}")


@main.command()
@click.option("--registry", "registry_path", required=True)
@click.argument("auto_label")
@click.argument("analyst_label")
@click.option("--analyst", default="")
@click.option("--note", default="")
def label(registry_path, auto_label, analyst_label, analyst, note):
    """Map an auto-label to an analyst attack name (journaled upsert)."""
    registry = LabelRegistry(registry_path)
    registry.register(auto_label, analyst_label, analyst=analyst, note=note)
    click.echo(f"{auto_label} -> {analyst_label}")


@main.command(name="registry")
@click.option("--registry", "registry_path", required=True)
@click.option("--history", "history_key", default=None)
def registry_cmd(registry_path, history_key):
    """Show the current registry state (or one key's history)."""
    registry = LabelRegistry(registry_path)
    if history_key:
        for entry in registry.history(history_key):
            click.echo(json.dumps({
                "analyst_label": entry.analyst_label,
                "analyst": entry.analyst,
                "note": entry.note,
                "timestamp": entry.timestamp,
            }, sort_keys=True))
    else:
        click.echo(json.dumps(registry.to_dict(), indent=2, sort_keys=True))


@main.command()
@click.option("--artifacts", "artifacts_dir", default="artifacts", show_default=True)
@click.option("--registry", "registry_path", default="artifacts/registry.jsonl", show_default=True)
@click.option("--alerts", "alerts_path", default="artifacts/alerts.jsonl", show_default=True)
@click.option("--frontend", "frontend_dir", default=None)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8787, show_default=True)
def serve(artifacts_dir, registry_path, alerts_path, frontend_dir, host, port):
    """Run the HTTP gateway."""
    import uvicorn

    from .service import create_app

    app = create_app(
        artifacts_dir, registry_path=registry_path,
        alerts_path=alerts_path, frontend_dir=frontend_dir,
    )
    uvicorn.run(app, host=host, port=port)


@main.command()
@click.option("--artifacts", "artifacts_dir", default="artifacts", show_default=True)
@click.option("--json", "as_json", is_flag=True)
def report(artifacts_dir, as_json):
    """Re-emit the stored classification report."""
    out = Path(artifacts_dir)
    if as_json:
        click.echo((out / "report.json").read_text(encoding="utf-8"))
    else:
        click.echo((out / "report.txt").read_text(encoding="utf-8"), nl=False)


if __name__ == "__main__":
    main()
