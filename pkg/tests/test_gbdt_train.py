"""Boosting behavior: weighting, splits, early stopping, prediction, CV."""

import numpy as np
import pytest

from fusiondx.errors import DataError
from fusiondx.evaluation import binary_auc
from fusiondx.gbdt import (
    Ensemble, GbdtConfig, cross_validate, stratified_folds, train_gbdt,
)
from fusiondx.gbdt.io import load_ensemble, save_ensemble


def quick_config(**kw):
    base = dict(max_depth=3, learning_rate=0.3, max_rounds=20,
                row_subsample=1.0, col_subsample=1.0, seed=0)
    base.update(kw)
    return GbdtConfig(**base)


class TestScalePosWeight:
    def test_balanced_auto_weight_is_one(self):
        rng = np.random.default_rng(0)
        X = rng.standard_normal((40, 3))
        y = np.array([0, 1] * 20, dtype=float)
        result = train_gbdt(X, y, quick_config(max_rounds=2))
        assert result.scale_pos_weight == 1.0

    def test_nine_to_one_auto_weight(self):
        rng = np.random.default_rng(1)
        X = rng.standard_normal((100, 3))
        y = np.array([0.0] * 90 + [1.0] * 10)
        result = train_gbdt(X, y, quick_config(max_rounds=2))
        assert result.scale_pos_weight == pytest.approx(9.0)

    def test_integer_weight_equals_duplicated_positives(self):
        rng = np.random.default_rng(2)
        X = rng.standard_normal((30, 4))
        y = (rng.random(30) < 0.4).astype(float)
        w = 3
        cfg = quick_config(max_rounds=1, scale_pos_weight=float(w))
        weighted = train_gbdt(X, y, cfg)

        dup_rows = np.concatenate([np.nonzero(y == 0)[0]]
                                  + [np.nonzero(y == 1)[0]] * w)
        cfg_dup = quick_config(max_rounds=1, scale_pos_weight=1.0)
        duplicated = train_gbdt(X[dup_rows], y[dup_rows], cfg_dup)

        t1, t2 = weighted.ensemble.trees[0], duplicated.ensemble.trees[0]
        np.testing.assert_array_equal(t1.feature, t2.feature)
        np.testing.assert_array_equal(t1.threshold, t2.threshold)
        np.testing.assert_allclose(t1.value, t2.value, atol=1e-12)
        np.testing.assert_allclose(t1.cover, t2.cover, atol=1e-9)
        assert weighted.ensemble.base_score == pytest.approx(
            duplicated.ensemble.base_score, abs=1e-12
        )


class TestTraining:
    def test_separable_feature_reaches_perfect_auc(self):
        rng = np.random.default_rng(3)
        X = rng.standard_normal((80, 5))
        y = (X[:, 2] > 0).astype(float)
        result = train_gbdt(X, y, quick_config(max_depth=1, max_rounds=10))
        auc = binary_auc(result.ensemble.predict_margin(X), y)
        assert auc == 1.0

    def test_training_loss_monotone_without_subsampling(self):
        rng = np.random.default_rng(4)
        X = rng.standard_normal((60, 4))
        y = (X[:, 0] + 0.5 * rng.standard_normal(60) > 0).astype(float)
        result = train_gbdt(X, y, quick_config(max_rounds=30))
        losses = [r.train_loss for r in result.history]
        assert all(b <= a + 1e-12 for a, b in zip(losses, losses[1:]))

    def test_single_class_rejected(self):
        with pytest.raises(DataError):
            train_gbdt(np.zeros((4, 2)), np.ones(4), quick_config())

    def test_nan_labels_rejected(self):
        with pytest.raises(DataError):
            train_gbdt(np.zeros((4, 2)), np.array([0, 1, np.nan, 0]),
                       quick_config())

    def test_missing_values_learn_default_directions(self):
        # informative missingness: NaN rows are mostly positive
        rng = np.random.default_rng(5)
        n = 400
        y = (rng.random(n) < 0.5).astype(float)
        x0 = np.where(y == 1, 1.0, -1.0) + 0.3 * rng.standard_normal(n)
        miss = (y == 1) & (rng.random(n) < 0.8)
        x0[miss] = np.nan
        X = np.column_stack([x0, rng.standard_normal(n)])
        result = train_gbdt(X, y, quick_config(max_rounds=10))
        auc = binary_auc(result.ensemble.predict_margin(X), y)
        assert auc > 0.9

    def test_cover_additivity(self):
        rng = np.random.default_rng(6)
        X = rng.standard_normal((50, 3))
        y = (X[:, 0] > 0).astype(float)
        result = train_gbdt(X, y, quick_config(max_rounds=3))
        for tree in result.ensemble.trees:
            for node in range(tree.n_nodes):
                if tree.feature[node] >= 0:
                    got = tree.cover[tree.left[node]] + tree.cover[tree.right[node]]
                    assert got == pytest.approx(tree.cover[node], abs=1e-9)

    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(7)
        X = rng.standard_normal((60, 4))
        y = (rng.random(60) < 0.5).astype(float)
        cfg = quick_config(row_subsample=0.8, col_subsample=0.8, max_rounds=5)
        a = train_gbdt(X, y, cfg)
        b = train_gbdt(X, y, cfg)
        np.testing.assert_array_equal(a.ensemble.predict_margin(X),
                                      b.ensemble.predict_margin(X))


class TestEarlyStopping:
    def make_data(self, seed=8, n=300):
        rng = np.random.default_rng(seed)
        X = rng.standard_normal((n, 4))
        z = X[:, 0] + X[:, 1] * X[:, 2]
        y = (rng.random(n) < 1 / (1 + np.exp(-z))).astype(float)
        return X, y

    def test_prefix_metric_equals_recorded_best(self):
        X, y = self.make_data()
        Xv, yv = self.make_data(seed=9, n=150)
        cfg = quick_config(max_rounds=60, patience=5, learning_rate=0.2)
        result = train_gbdt(X, y, cfg, valid=(Xv, yv))
        assert result.best_round is not None
        assert len(result.ensemble.trees) == result.best_round + 1
        replay = binary_auc(result.ensemble.predict_margin(Xv), yv)
        assert replay == result.best_metric

    def test_stops_before_max_rounds_when_plateaued(self):
        X, y = self.make_data()
        Xv, yv = self.make_data(seed=10, n=150)
        cfg = quick_config(max_rounds=200, patience=5, learning_rate=0.5)
        result = train_gbdt(X, y, cfg, valid=(Xv, yv))
        assert len(result.history) < 200

    def test_macro_f1_metric_supported(self):
        X, y = self.make_data()
        Xv, yv = self.make_data(seed=11, n=150)
        cfg = quick_config(max_rounds=20, patience=10, metric="macro-f1")
        result = train_gbdt(X, y, cfg, valid=(Xv, yv))
        assert result.best_metric is not None
        assert 0.0 <= result.best_metric <= 1.0


class TestPredict:
    def test_empty_ensemble_gives_half(self):
        ens = Ensemble(trees=[], base_score=0.0, learning_rate=0.1,
                       num_features=2)
        np.testing.assert_allclose(ens.predict_proba(np.zeros((3, 2))), 0.5)

    def test_single_stump_hand_computed(self):
        rng = np.random.default_rng(12)
        X = rng.standard_normal((200, 1))
        y = (X[:, 0] > 0).astype(float)
        cfg = quick_config(max_depth=1, max_rounds=1, learning_rate=0.5)
        result = train_gbdt(X, y, cfg)
        tree = result.ensemble.trees[0]
        x = np.array([[tree.threshold[0] + 1.0]])
        leaf = tree.value[tree.right[0]]
        expected = 1 / (1 + np.exp(-(result.ensemble.base_score + 0.5 * leaf)))
        assert result.ensemble.predict_proba(x)[0] == pytest.approx(expected,
                                                                    abs=1e-12)

    def test_missing_row_equals_any_default_side_value(self):
        rng = np.random.default_rng(13)
        X = rng.standard_normal((100, 2))
        y = (X[:, 0] > 0).astype(float)
        result = train_gbdt(X, y, quick_config(max_depth=1, max_rounds=3))
        tree = result.ensemble.trees[0]
        assert tree.feature[0] == 0
        side = tree.left[0] if tree.default_left[0] else tree.right[0]
        offset = -1.0 if tree.default_left[0] else 1.0
        probe_value = tree.threshold[0] + offset
        row_missing = np.array([[np.nan, 0.3]])
        row_value = np.array([[probe_value, 0.3]])
        np.testing.assert_allclose(
            result.ensemble.predict_margin(row_missing),
            result.ensemble.predict_margin(row_value),
        )
        assert side >= 0

    def test_feature_count_mismatch_rejected(self):
        ens = Ensemble(trees=[], base_score=0.0, learning_rate=0.1,
                       num_features=3)
        with pytest.raises(DataError):
            ens.predict_margin(np.zeros((2, 4)))


class TestCrossValidation:
    def test_fold_proportions_within_one(self):
        y = np.array([0] * 90 + [1] * 15, dtype=float)
        folds = stratified_folds(y, 5, seed=0)
        for f in range(5):
            pos = np.sum((folds == f) & (y == 1))
            neg = np.sum((folds == f) & (y == 0))
            assert abs(pos - 3) <= 1
            assert abs(neg - 18) <= 1

    def test_same_seed_same_folds(self):
        y = np.array([0, 1] * 30, dtype=float)
        np.testing.assert_array_equal(stratified_folds(y, 5, 3),
                                      stratified_folds(y, 5, 3))

    def test_small_class_rejected(self):
        with pytest.raises(DataError):
            stratified_folds(np.array([0, 0, 0, 1, 1]), 5, 0)

    def test_separable_data_high_auc(self):
        rng = np.random.default_rng(14)
        X = rng.standard_normal((150, 3))
        y = (X[:, 1] > 0).astype(float)
        out = cross_validate(X, y, quick_config(max_depth=1, max_rounds=10), k=5)
        assert out["auc_mean"] > 0.99
        assert len(out["folds"]) == 5


class TestEnsembleIO:
    def test_json_roundtrip_preserves_predictions(self, tmp_path):
        rng = np.random.default_rng(15)
        X = rng.standard_normal((80, 3))
        X[rng.random(X.shape) < 0.1] = np.nan
        y = (np.nan_to_num(X[:, 0]) > 0).astype(float)
        result = train_gbdt(X, y, quick_config(max_rounds=5))
        path = tmp_path / "model.json"
        save_ensemble(path, result.ensemble, feature_names=["a", "b", "c"])
        loaded, doc = load_ensemble(path)
        np.testing.assert_array_equal(loaded.predict_margin(X),
                                      result.ensemble.predict_margin(X))
        assert doc["feature_names"] == ["a", "b", "c"]
