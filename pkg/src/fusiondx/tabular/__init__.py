"""Clinical table ingestion, replayable preprocessing, synthetic cohorts."""

from .preprocess import (
    DesignMatrix, PrepConfig, PreprocessorModel, apply_preprocessor,
    fit_preprocessor,
)
from .synth import CohortSpec, synth_cohort
from .table import ColumnSpec, FeatureTable, load_table, save_table

__all__ = [
    "CohortSpec", "ColumnSpec", "DesignMatrix", "FeatureTable", "PrepConfig",
    "PreprocessorModel", "apply_preprocessor", "fit_preprocessor", "load_table",
    "save_table", "synth_cohort",
]
