"""Gradient-boosted regression trees for binary logistic classification with
sparsity-aware default directions and exact TreeSHAP attribution."""

from .io import load_ensemble, save_ensemble, write_attribution_csv
from .shap import exact_shap_oracle, global_importance, tree_shap
from .train import (
    GbdtConfig, RoundRecord, TrainResult, cross_validate, stratified_folds,
    train_gbdt,
)
from .trees import Ensemble, Tree, TreeBuilder

__all__ = [
    "Ensemble", "GbdtConfig", "RoundRecord", "TrainResult", "Tree",
    "TreeBuilder", "cross_validate", "exact_shap_oracle", "global_importance",
    "load_ensemble", "save_ensemble", "stratified_folds", "train_gbdt",
    "tree_shap", "write_attribution_csv",
]
