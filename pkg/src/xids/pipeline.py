"""Train and explain pipelines over persisted artifacts.

A training run writes five primary outputs into the config's out_dir:
config.json, schema.json, model.json, background.json and report.{txt,json}.
Every file embeds the config hash (directly or via the schema/model
fingerprints), carries no wall-clock state, and is byte-reproducible for a
fixed RunConfig.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import RunConfig, resolve_data_path
from .encoding import EncodedDataset, FeatureSchema, KddEncoder, encode_record
from .forest import IsolationForestDetector
from .labeling import AutoLabel, LabelRegistry, auto_label
from .metrics import ClassificationReport, classification_report
from .nslkdd import FlowRecord, load_file, stratified_subsample
from .shapley import (
    Attribution,
    Background,
    PlayerGrouping,
    exact_shapley,
    kernel_shap,
    player_inputs,
    select_background,
)


@dataclass
class TrainedArtifacts:
    config: RunConfig
    schema: FeatureSchema
    model: IsolationForestDetector
    background: Background
    report: ClassificationReport
    train_data: EncodedDataset


def load_training_records(config: RunConfig) -> list[FlowRecord]:
    records = load_file(resolve_data_path(config.train_path))
    if config.subsample_size:
        class_counts = None
        if config.subsample_normal is not None:
            class_counts = {
                "normal": config.subsample_normal,
                "attack": config.subsample_attack,
            }
        records = stratified_subsample(
            records, config.subsample_size, seed=config.subsample_seed,
            class_counts=class_counts,
        )
    return records


def train_pipeline(config: RunConfig) -> TrainedArtifacts:
    records = load_training_records(config)
    encoder = KddEncoder().fit(records)
    schema = encoder.schema
    data = encoder.transform(records)
    psi = min(config.subsample_psi, data.X.shape[0])
    model = IsolationForestDetector(
        n_trees=config.n_trees, subsample_size=psi, seed=config.forest_seed,
    ).fit(data.X, data.y, schema_fingerprint=schema.fingerprint)
    report = model.report(data.X, data.y)
    background = select_background(
        data.X, data.y, size=config.background_size, seed=config.background_seed,
        schema_fingerprint=schema.fingerprint,
    )
    return TrainedArtifacts(
        config=config, schema=schema, model=model,
        background=background, report=report, train_data=data,
    )


def save_artifacts(arts: TrainedArtifacts, out_dir: str | Path | None = None) -> Path:
    """Write the primary artifacts; every JSON document embeds the config
    hash so any output can be traced to the run that produced it."""
    out = Path(out_dir if out_dir is not None else arts.config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    config_hash = arts.config.content_hash()
    arts.config.save(out / "config.json")

    def write_with_hash(name: str, doc: dict, indent: int | None = None):
        doc = {**doc, "config_hash": config_hash}
        (out / name).write_text(
            json.dumps(doc, indent=indent, sort_keys=True), encoding="utf-8"
        )

    write_with_hash("schema.json", json.loads(arts.schema.to_json()), indent=2)
    write_with_hash("model.json", arts.model.to_dict())
    write_with_hash("background.json", {
        "schema_fingerprint": arts.schema.fingerprint,
        "rows": arts.background.X.tolist(),
    })
    write_with_hash("report.json", arts.report.to_dict(), indent=2)
    (out / "report.txt").write_text(arts.report.to_text() + "\n", encoding="utf-8")
    return out


@dataclass
class LoadedArtifacts:
    config: RunConfig
    schema: FeatureSchema
    model: IsolationForestDetector
    background: Background
    report_doc: dict


def load_artifacts(out_dir: str | Path) -> LoadedArtifacts:
    out = Path(out_dir)
    config = RunConfig.load(out / "config.json")
    schema = FeatureSchema.load(out / "schema.json")
    model = IsolationForestDetector.load(out / "model.json", schema_fingerprint=schema.fingerprint)
    bg_doc = json.loads((out / "background.json").read_text(encoding="utf-8"))
    if bg_doc["schema_fingerprint"] != schema.fingerprint:
        raise ValueError("background set was built against a different schema")
    background = Background(
        X=np.asarray(bg_doc["rows"], dtype=float), schema_fingerprint=schema.fingerprint,
    )
    report_doc = json.loads((out / "report.json").read_text(encoding="utf-8"))
    return LoadedArtifacts(
        config=config, schema=schema, model=model,
        background=background, report_doc=report_doc,
    )


class Explainer:
    """Attribution + auto-labeling around a fitted detector."""

    def __init__(self, model: IsolationForestDetector, schema: FeatureSchema,
                 background: Background, config: RunConfig):
        self.model = model
        self.schema = schema
        self.background = background
        self.config = config
        self.grouping = (
            PlayerGrouping.collapsed(schema)
            if config.granularity == "collapsed"
            else PlayerGrouping.raw(schema.columns)
        )

    def score(self, x: np.ndarray) -> tuple[float, int]:
        score = self.model.score_one(x)
        label = int(score >= self.model.threshold_)
        return score, label

    def attribute(self, x: np.ndarray, exact: bool = False,
                  players: list[str] | None = None) -> Attribution:
        grouping = self.grouping if players is None else self.grouping.subset(players)
        # players whose columns match every background row are exact dummies
        # (phi = 0); dropping them shrinks the game and its sampling variance
        active = [
            name
            for name, cols in zip(grouping.names, grouping.column_groups)
            if np.any(self.background.X[:, list(cols)] != x[list(cols)])
        ]
        game = grouping.subset(active) if 0 < len(active) < grouping.n_players else grouping
        if len(active) == 0:
            fx = self.model.score_one(x)
            return Attribution(
                columns=grouping.names, values=np.zeros(grouping.n_players),
                base_value=fx, prediction=fx, mode="exact", n_coalitions=0,
                seed=self.config.shap_seed, granularity=self.config.granularity,
                inputs=player_inputs(x, grouping),
            )
        if exact:
            attr = exact_shapley(self.model.score_samples, x, self.background, grouping=game)
        else:
            attr = kernel_shap(
                self.model.score_samples, x, self.background,
                n_coalitions=self.config.n_coalitions, seed=self.config.shap_seed,
                grouping=game,
            )
        if game is grouping:
            return attr
        values = np.zeros(grouping.n_players)
        index = {name: i for i, name in enumerate(grouping.names)}
        for name, v in zip(attr.columns, attr.values):
            values[index[name]] = v
        return Attribution(
            columns=grouping.names, values=values, base_value=attr.base_value,
            prediction=attr.prediction, mode=attr.mode,
            n_coalitions=attr.n_coalitions, seed=attr.seed,
            granularity=self.config.granularity, inputs=player_inputs(x, grouping),
        )

    def explain_vector(self, x: np.ndarray, registry: LabelRegistry | None = None,
                       exact: bool = False, explain_normals: bool = False,
                       players: list[str] | None = None) -> dict:
        """Per-row explanation record: score, class, phi, auto-label, resolution."""
        score, label = self.score(x)
        out: dict = {"score": score, "class": label}
        if label == 0 and not explain_normals:
            return out
        attr = self.attribute(x, exact=exact, players=players)
        label_obj = auto_label(attr, k=self.config.label_k, rank_by=self.config.rank_by)
        out["phi"] = attr.as_dict()
        out["base_value"] = attr.base_value
        out["mode"] = attr.mode
        out["auto_label"] = label_obj.label
        out["label_fallback"] = label_obj.fallback_used
        if registry is not None:
            resolution = registry.resolve(label_obj)
            out["resolution"] = {
                "kind": resolution.kind,
                "analyst_label": resolution.analyst_label,
            }
        return out

    def explain_record(self, record: FlowRecord, **kwargs) -> dict:
        x, unknown = encode_record(record, self.schema)
        out = self.explain_vector(x, **kwargs)
        out["unknown_category"] = bool(unknown)
        out["attack_label"] = record.attack_label
        return out

    def make_auto_label(self, attr: Attribution) -> AutoLabel:
        return auto_label(attr, k=self.config.label_k, rank_by=self.config.rank_by)


def evaluate_on(arts: LoadedArtifacts, records: list[FlowRecord]) -> ClassificationReport:
    encoder = KddEncoder()
    encoder.schema_ = arts.schema
    data = encoder.transform(records)
    return classification_report(data.y, arts.model.predict(data.X))
