"""Decision-quality machinery: confusion metrics, ROC/AUC, calibration,
thresholding, expected calibration error."""

from .calibrate import (
    CalibrationModel, apply_ovr, calibrate_ovr, ece, fit_calibrator,
    isotonic_fit, platt_fit,
)
from .confusion import (
    ConfusionMatrix, EvaluationReport, classification_metrics, confusion_matrix,
    macro_f1_score,
)
from .report import (
    flag_metric_claims, load_report, report_from_dict, report_to_dict, save_report,
)
from .roc import RocCurve, binary_auc, binary_roc, roc_auc_ovr
from .thresholds import ThresholdPolicy, precision_target_threshold, youden_threshold

__all__ = [
    "CalibrationModel", "ConfusionMatrix", "EvaluationReport", "RocCurve",
    "ThresholdPolicy", "apply_ovr", "binary_auc", "binary_roc",
    "calibrate_ovr", "classification_metrics", "confusion_matrix", "ece",
    "fit_calibrator", "flag_metric_claims", "isotonic_fit", "load_report",
    "macro_f1_score", "platt_fit", "precision_target_threshold",
    "report_from_dict", "report_to_dict", "roc_auc_ovr", "save_report",
    "youden_threshold",
]
