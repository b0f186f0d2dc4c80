"""ROC/AUC contracts against the pair-counting oracle."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _oracles import auc_pair_counting
from fusiondx.errors import DataError
from fusiondx.evaluation import binary_auc, binary_roc, roc_auc_ovr


class TestBinaryRoc:
    def test_perfectly_ranked_scores(self):
        assert binary_auc([0.1, 0.2, 0.8, 0.9], [0, 0, 1, 1]) == 1.0

    def test_all_equal_scores(self):
        assert binary_auc([0.5] * 6, [0, 1, 0, 1, 0, 1]) == 0.5

    def test_six_sample_hand_case(self):
        scores = np.array([0.9, 0.4, 0.4, 0.3, 0.2, 0.1])
        labels = np.array([1, 1, 0, 0, 1, 0])
        assert binary_auc(scores, labels) == pytest.approx(
            auc_pair_counting(scores, labels), abs=1e-15
        )

    def test_curve_starts_and_ends_correctly(self):
        curve = binary_roc([0.1, 0.5, 0.3], [0, 1, 1])
        assert curve.fpr[0] == 0.0 and curve.tpr[0] == 0.0
        assert curve.fpr[-1] == 1.0 and curve.tpr[-1] == 1.0
        assert np.all(np.diff(curve.fpr) >= 0)
        assert np.all(np.diff(curve.tpr) >= 0)
        assert curve.thresholds[0] == np.inf

    def test_single_class_rejected(self):
        with pytest.raises(DataError):
            binary_auc([0.1, 0.2], [1, 1])

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.tuples(st.integers(0, 4), st.booleans()),
                    min_size=2, max_size=30))
    def test_matches_pair_counting_on_tied_grids(self, pairs):
        scores = np.array([p[0] for p in pairs], dtype=float)
        labels = np.array([int(p[1]) for p in pairs])
        if labels.min() == labels.max():
            return
        assert binary_auc(scores, labels) == pytest.approx(
            auc_pair_counting(scores, labels), abs=1e-12
        )

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 2**31 - 1))
    def test_invariant_under_strictly_increasing_transform(self, seed):
        rng = np.random.default_rng(seed)
        scores = rng.standard_normal(40)
        labels = rng.integers(0, 2, size=40)
        if labels.min() == labels.max():
            return
        base = binary_auc(scores, labels)
        for transform in (np.exp, np.tanh, lambda s: 3 * s - 7):
            assert binary_auc(transform(scores), labels) == pytest.approx(
                base, abs=1e-12
            )


class TestOvr:
    def test_per_class_and_macro(self):
        scores = np.array([
            [0.8, 0.1, 0.1],
            [0.1, 0.8, 0.1],
            [0.2, 0.2, 0.6],
            [0.7, 0.2, 0.1],
        ])
        labels = np.array([0, 1, 2, 0])
        curves, macro, warnings = roc_auc_ovr(scores, labels)
        assert set(curves) == {"0", "1", "2"}
        assert warnings == []
        assert macro == pytest.approx(
            np.mean([curves[c].auc for c in curves]), abs=1e-15
        )
        assert all(curves[c].auc == 1.0 for c in curves)

    def test_absent_class_excluded_with_warning(self):
        scores = np.array([[0.9, 0.05, 0.05], [0.2, 0.7, 0.1]])
        labels = np.array([0, 1])
        curves, macro, warnings = roc_auc_ovr(scores, labels)
        assert "2" not in curves
        assert len(warnings) == 1
        assert "class 2" in warnings[0]
