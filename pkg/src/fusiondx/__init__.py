"""fusiondx: multimodal histology + clinical-tabular diagnosis pipeline.

Subpackages:
  autodiff    reverse-mode tensor engine, Adam, gradient checking, checkpoints
  patches     annotation parsing, patch extraction, augmentation, synthetic slides
  tabular     clinical table preprocessing and synthetic cohorts
  gbdt        second-order gradient-boosted trees with exact TreeSHAP
  models      CNN / MLP / fusion builders, training loop, Grad-CAM
  evaluation  confusion metrics, ROC/AUC, calibration, thresholds
  cli         stage orchestration and the `fusiondx` command
"""

__version__ = "0.1.0"
