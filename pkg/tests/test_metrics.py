"""Confusion matrix and classification metric contracts."""

import numpy as np
import pytest

from fusiondx.errors import DataError
from fusiondx.evaluation import (
    ConfusionMatrix, classification_metrics, confusion_matrix,
    flag_metric_claims, report_from_dict, report_to_dict,
)

# Reference confusion counts for the two reported image models, rows = true
# (tumour, non_tumour, mitosis), columns = predicted.
RESNET_COUNTS = np.array([
    [22091, 1578, 0],
    [9, 1796, 0],
    [15, 176, 163],
])
FUSION_COUNTS = np.array([
    [23682, 0, 5],
    [0, 1747, 4],
    [0, 359, 31],
])
NAMES = ["tumour", "non_tumour", "mitosis"]


class TestConfusionMatrix:
    def test_perfect_predictions_are_diagonal(self):
        y = np.array([0, 1, 2, 2, 1, 0])
        cm = confusion_matrix(y, y, 3)
        np.testing.assert_array_equal(cm.counts, np.diag([2, 2, 2]))

    def test_empty_input_gives_zero_matrix(self):
        cm = confusion_matrix([], [], 3)
        np.testing.assert_array_equal(cm.counts, 0)
        assert cm.total == 0

    def test_out_of_range_label_rejected(self):
        with pytest.raises(DataError):
            confusion_matrix([0, 3], [0, 0], 3)

    def test_counts_replay_from_label_pairs(self):
        y_true, y_pred = [], []
        for i in range(3):
            for j in range(3):
                y_true += [i] * FUSION_COUNTS[i, j]
                y_pred += [j] * FUSION_COUNTS[i, j]
        cm = confusion_matrix(y_true, y_pred, 3, NAMES)
        np.testing.assert_array_equal(cm.counts, FUSION_COUNTS)


class TestClassificationMetrics:
    def test_reference_image_model_counts(self):
        rep = classification_metrics(ConfusionMatrix(RESNET_COUNTS, NAMES))
        assert rep.per_class[0]["recall"] == pytest.approx(22091 / 23669, abs=1e-12)
        assert rep.per_class[2]["recall"] == pytest.approx(163 / 354, abs=1e-12)
        assert rep.per_class[0]["recall"] == pytest.approx(0.9333, abs=1e-4)
        assert rep.per_class[2]["recall"] == pytest.approx(0.4605, abs=1e-4)

    def test_reference_fusion_counts(self):
        rep = classification_metrics(ConfusionMatrix(FUSION_COUNTS, NAMES))
        assert rep.per_class[2]["recall"] == pytest.approx(31 / 390, abs=1e-12)
        assert rep.accuracy == pytest.approx(25460 / 25828, abs=1e-12)
        assert rep.per_class[2]["recall"] == pytest.approx(0.0795, abs=1e-4)
        assert rep.accuracy == pytest.approx(0.9858, abs=1e-4)

    def test_identity_two_class_all_ones(self):
        rep = classification_metrics(
            ConfusionMatrix(np.diag([50, 50]), ["a", "b"])
        )
        assert rep.accuracy == 1.0
        assert rep.macro_f1 == 1.0
        assert all(c["precision"] == 1.0 and c["recall"] == 1.0
                   for c in rep.per_class)

    def test_never_predicted_class_precision_zero(self):
        counts = np.array([[5, 0], [3, 0]])
        rep = classification_metrics(ConfusionMatrix(counts, ["a", "b"]))
        assert rep.per_class[1]["precision"] == 0.0
        assert rep.per_class[1]["f1"] == 0.0

    def test_empty_matrix_rejected(self):
        with pytest.raises(DataError):
            classification_metrics(ConfusionMatrix(np.zeros((2, 2)), ["a", "b"]))

    def test_permutation_relabeling_permutes_metrics(self):
        rng = np.random.default_rng(0)
        counts = rng.integers(0, 40, size=(3, 3))
        perm = np.array([2, 0, 1])
        base = classification_metrics(ConfusionMatrix(counts, NAMES))
        permuted = classification_metrics(
            ConfusionMatrix(counts[np.ix_(perm, perm)],
                            [NAMES[i] for i in perm])
        )
        for i, p in enumerate(perm):
            for key in ("precision", "recall", "f1"):
                assert permuted.per_class[i][key] == pytest.approx(
                    base.per_class[p][key], abs=1e-12
                )
        assert permuted.macro_f1 == pytest.approx(base.macro_f1, abs=1e-12)
        assert permuted.accuracy == pytest.approx(base.accuracy, abs=1e-12)


class TestClaimFlags:
    def test_consistent_claims_produce_no_notes(self):
        rep = classification_metrics(ConfusionMatrix(FUSION_COUNTS, NAMES))
        assert flag_metric_claims(rep, {"accuracy": 25460 / 25828}) == []

    def test_inconsistent_accuracy_claim_is_flagged(self):
        rep = classification_metrics(ConfusionMatrix(FUSION_COUNTS, NAMES))
        notes = flag_metric_claims(rep, {"accuracy": 0.997})
        assert len(notes) == 1
        assert "inconsistent accuracy" in notes[0]

    def test_report_dict_roundtrip(self):
        rep = classification_metrics(ConfusionMatrix(RESNET_COUNTS, NAMES))
        rep.notes.append("example note")
        again = report_from_dict(report_to_dict(rep))
        assert again.accuracy == rep.accuracy
        assert again.notes == ["example note"]
        np.testing.assert_array_equal(again.confusion.counts, RESNET_COUNTS)
