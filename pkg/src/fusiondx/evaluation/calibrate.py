"""Probability calibration: Platt scaling, isotonic regression (PAVA), ECE.

Calibrators carry a `fitted_on` split tag so the pipeline can assert that a
model calibrated on validation scores is the one applied to test scores.
Multi-class outputs are calibrated one-vs-rest and renormalized to the simplex.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import DataError

log = logging.getLogger(__name__)

SLOPE_CAP = 1e3


@dataclass
class CalibrationModel:
    kind: str                      # "platt" | "isotonic"
    fitted_on: str = "val"
    a: float = 0.0                 # platt slope
    b: float = 0.0                 # platt intercept
    capped: bool = False
    xs: np.ndarray = field(default_factory=lambda: np.zeros(0))  # isotonic steps
    ys: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def apply(self, scores) -> np.ndarray:
        scores = np.asarray(scores, dtype=np.float64)
        if self.kind == "platt":
            z = np.clip(self.a * scores + self.b, -700, 700)
            return 1.0 / (1.0 + np.exp(-z))
        if self.kind == "isotonic":
            idx = np.searchsorted(self.xs, scores, side="right") - 1
            return self.ys[np.clip(idx, 0, self.ys.size - 1)]
        raise DataError(f"unknown calibration kind '{self.kind}'")

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "fitted_on": self.fitted_on}
        if self.kind == "platt":
            out.update(a=self.a, b=self.b, capped=self.capped)
        else:
            out.update(xs=self.xs.tolist(), ys=self.ys.tolist())
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "CalibrationModel":
        if d["kind"] == "platt":
            return cls("platt", d["fitted_on"], a=d["a"], b=d["b"],
                       capped=d.get("capped", False))
        return cls("isotonic", d["fitted_on"],
                   xs=np.asarray(d["xs"]), ys=np.asarray(d["ys"]))


def _logit(p: float) -> float:
    return float(np.log(p / (1.0 - p)))


def _nll(scores, labels, a, b) -> float:
    z = a * scores + b
    # -sum[y*log(sig(z)) + (1-y)*log(1-sig(z))], written stably
    return float(np.sum(np.maximum(z, 0) - z * labels + np.log1p(np.exp(-np.abs(z)))))


def platt_fit(scores, labels, fitted_on: str = "val",
              max_iter: int = 100, tol: float = 1e-10) -> CalibrationModel:
    """Maximum-likelihood logistic fit of labels on raw margins (damped Newton).

    Constant scores resolve to the closed-form degenerate MLE (slope 0,
    intercept at the prevalence log-odds). Separable inputs push the slope to
    infinity; it is capped at +-1e3 and flagged.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise DataError("platt_fit needs equal-length score/label vectors")
    n_pos = labels.sum()
    if n_pos == 0 or n_pos == labels.size:
        raise DataError("platt_fit needs both classes present")
    prevalence = float(n_pos / labels.size)

    if np.all(scores == scores[0]):
        return CalibrationModel("platt", fitted_on, a=0.0, b=_logit(prevalence))

    # separable scores have no finite MLE: emit the capped-slope fit directly,
    # with the decision boundary at the separating gap midpoint
    lo_pos, hi_pos = scores[labels == 1].min(), scores[labels == 1].max()
    lo_neg, hi_neg = scores[labels == 0].min(), scores[labels == 0].max()
    direction = 0
    if hi_neg < lo_pos:
        direction = 1
        mid = (hi_neg + lo_pos) / 2.0
    elif hi_pos < lo_neg:
        direction = -1
        mid = (hi_pos + lo_neg) / 2.0
    if direction:
        log.warning("platt_fit: separable scores, slope capped at %g", SLOPE_CAP)
        a = direction * SLOPE_CAP
        return CalibrationModel("platt", fitted_on, a=float(a), b=float(-a * mid),
                                capped=True)

    a, b = 0.0, _logit(prevalence)
    nll = _nll(scores, labels, a, b)
    capped = False
    for _ in range(max_iter):
        z = np.clip(a * scores + b, -700, 700)
        p = 1.0 / (1.0 + np.exp(-z))
        resid = p - labels
        grad = np.array([np.dot(resid, scores), resid.sum()])
        if np.max(np.abs(grad)) < tol * labels.size:
            break
        w = p * (1.0 - p)
        h11 = np.dot(w, scores * scores)
        h12 = np.dot(w, scores)
        h22 = w.sum()
        det = h11 * h22 - h12 * h12
        if det <= 1e-300:
            break
        step_a = (h22 * grad[0] - h12 * grad[1]) / det
        step_b = (h11 * grad[1] - h12 * grad[0]) / det
        lam = 1.0
        for _ in range(40):
            cand = _nll(scores, labels, a - lam * step_a, b - lam * step_b)
            if cand <= nll:
                break
            lam *= 0.5
        a -= lam * step_a
        b -= lam * step_b
        nll = _nll(scores, labels, a, b)
        if abs(a) > SLOPE_CAP:
            a = float(np.sign(a) * SLOPE_CAP)
            capped = True
            log.warning("platt_fit: separable scores, slope capped at %g", SLOPE_CAP)
            break
    return CalibrationModel("platt", fitted_on, a=float(a), b=float(b), capped=capped)


def isotonic_fit(scores, targets, weights=None,
                 fitted_on: str = "val") -> CalibrationModel:
    """Weighted least-squares nondecreasing step fit via pool-adjacent-violators.

    Tied scores are pre-pooled (they must share a fitted value), then adjacent
    blocks merge while their weighted means decrease. Application is stepwise
    constant with end clamping.
    """
    scores = np.asarray(scores, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if scores.shape != targets.shape or scores.ndim != 1:
        raise DataError("isotonic_fit needs equal-length score/target vectors")
    if scores.size < 2:
        raise DataError("isotonic_fit needs n >= 2")
    weights = (np.ones_like(scores) if weights is None
               else np.asarray(weights, dtype=np.float64))
    if np.any(weights <= 0):
        raise DataError("weights must be positive")

    order = np.argsort(scores, kind="stable")
    s, t, w = scores[order], targets[order], weights[order]
    xs, wsum, wysum = [], [], []
    for i in range(s.size):
        if xs and s[i] == xs[-1]:
            wsum[-1] += w[i]
            wysum[-1] += w[i] * t[i]
        else:
            xs.append(s[i])
            wsum.append(w[i])
            wysum.append(w[i] * t[i])

    # blocks as (start-index-into-xs, weight, weighted target sum)
    starts: list[int] = []
    bw: list[float] = []
    bwy: list[float] = []
    for i in range(len(xs)):
        starts.append(i)
        bw.append(wsum[i])
        bwy.append(wysum[i])
        while len(starts) >= 2 and bwy[-2] * bw[-1] > bwy[-1] * bw[-2]:
            bw[-2] += bw[-1]
            bwy[-2] += bwy[-1]
            starts.pop(), bw.pop(), bwy.pop()

    fitted = np.empty(len(xs))
    bounds = starts + [len(xs)]
    for k in range(len(starts)):
        fitted[bounds[k]:bounds[k + 1]] = bwy[k] / bw[k]
    return CalibrationModel("isotonic", fitted_on,
                            xs=np.asarray(xs), ys=fitted)


def fit_calibrator(method: str, scores, labels, fitted_on: str = "val") -> CalibrationModel:
    if method == "platt":
        return platt_fit(scores, labels, fitted_on=fitted_on)
    if method == "isotonic":
        return isotonic_fit(scores, labels, fitted_on=fitted_on)
    raise DataError(f"unknown calibration method '{method}'")


def calibrate_ovr(method: str, probs: np.ndarray, labels,
                  fitted_on: str = "val") -> list[CalibrationModel]:
    """One calibrator per class column against the class indicator."""
    probs = np.asarray(probs, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    return [
        fit_calibrator(method, probs[:, c], (labels == c).astype(np.float64),
                       fitted_on=fitted_on)
        for c in range(probs.shape[1])
    ]


def apply_ovr(models: list[CalibrationModel], probs: np.ndarray) -> np.ndarray:
    """Apply per-class calibrators, then renormalize rows to the simplex."""
    probs = np.asarray(probs, dtype=np.float64)
    out = np.column_stack([m.apply(probs[:, c]) for c, m in enumerate(models)])
    totals = out.sum(axis=1, keepdims=True)
    flat = totals[:, 0] <= 0
    if np.any(flat):
        out[flat] = 1.0 / out.shape[1]
        totals[flat] = 1.0
    return out / totals


def ece(probs, labels, bins: int = 10) -> float:
    """Expected calibration error over equal-width confidence bins."""
    probs = np.asarray(probs, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    if probs.size == 0:
        return 0.0
    if probs.min() < 0 or probs.max() > 1:
        raise DataError("probabilities must lie in [0, 1]")
    idx = np.minimum((probs * bins).astype(np.int64), bins - 1)
    total = 0.0
    for b in range(bins):
        mask = idx == b
        n = int(mask.sum())
        if n == 0:
            continue
        conf = probs[mask].mean()
        acc = labels[mask].mean()
        total += (n / probs.size) * abs(acc - conf)
    return float(total)
