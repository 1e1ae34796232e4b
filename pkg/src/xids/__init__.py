"""Explainable intrusion detection: isolation-forest anomaly detection,
Shapley attributions, zero-shot attack labels, and an analyst review
gateway."""

from .config import RunConfig
from .contrastive import ContrastiveResult, pertinent_negative, pertinent_positive
from .encoding import FeatureSchema, KddEncoder, encode_record, fit_schema
from .forest import IsolationForestDetector, average_path_length, calibrate_threshold
from .labeling import AutoLabel, LabelRegistry, auto_label, purity_report
from .local_surrogate import LocalSurrogate, PrototypeSet, lime_explain, similar_instances
from .metrics import ClassificationReport, classification_report
from .nslkdd import FlowRecord, attack_family, load_file, parse_records, stratified_subsample
from .pipeline import Explainer, load_artifacts, save_artifacts, train_pipeline
from .rules import GreedyDnfLearner, RuleSet, builtin_nslkdd_rules, eval_ruleset
from .shapley import (
    Attribution,
    Background,
    PlayerGrouping,
    exact_shapley,
    kernel_shap,
    kernel_weight,
    masked_eval,
    summarize,
)

__version__ = "0.1.0"

__all__ = [
    "Attribution",
    "AutoLabel",
    "Background",
    "ClassificationReport",
    "ContrastiveResult",
    "Explainer",
    "FeatureSchema",
    "FlowRecord",
    "GreedyDnfLearner",
    "IsolationForestDetector",
    "KddEncoder",
    "LabelRegistry",
    "LocalSurrogate",
    "PlayerGrouping",
    "PrototypeSet",
    "RuleSet",
    "RunConfig",
    "attack_family",
    "auto_label",
    "average_path_length",
    "builtin_nslkdd_rules",
    "calibrate_threshold",
    "classification_report",
    "encode_record",
    "eval_ruleset",
    "exact_shapley",
    "fit_schema",
    "kernel_shap",
    "kernel_weight",
    "lime_explain",
    "load_artifacts",
    "load_file",
    "masked_eval",
    "parse_records",
    "pertinent_negative",
    "pertinent_positive",
    "purity_report",
    "save_artifacts",
    "similar_instances",
    "stratified_subsample",
    "summarize",
    "train_pipeline",
]
