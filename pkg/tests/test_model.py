import numpy as np
import pytest

import compclass as cc
from compclass.errors import ValidationError


def draw_many(model, n, seed):
    rng = np.random.default_rng(seed)
    labels = np.empty(n, dtype=int)
    xs = np.empty((n, model.ambient_dim))
    for k in range(n):
        labels[k], xs[k] = cc.sample(model, rng)
    return labels, xs


class TestSourceModelValidation:
    def test_priors_must_sum_to_one(self):
        with pytest.raises(ValidationError):
            cc.build_source_model([0.5, 0.4], [np.eye(2)] * 2)

    def test_priors_must_be_nonnegative(self):
        with pytest.raises(ValidationError):
            cc.build_source_model([1.5, -0.5], [np.eye(2)] * 2)

    def test_dimension_mismatch(self):
        with pytest.raises(ValidationError):
            cc.build_source_model([0.5, 0.5], [np.eye(2), np.eye(3)])

    def test_unequal_ranks_warn(self):
        with pytest.warns(UserWarning, match="unequal"):
            model = cc.build_source_model(
                [0.5, 0.5], [np.diag([1.0, 0.0]), np.eye(2)]
            )
        assert model.class_rank in (1, 2)


class TestSample:
    def test_zero_covariance_gives_zero_vector(self):
        model = cc.build_source_model([1.0], [np.zeros((3, 3))])
        rng = np.random.default_rng(0)
        for _ in range(20):
            label, x = cc.sample(model, rng)
            assert label == 1
            assert np.all(x == 0.0)

    def test_zero_prior_class_never_drawn(self):
        model = cc.build_source_model([1.0, 0.0], [np.eye(2), np.eye(2)])
        rng = np.random.default_rng(1)
        labels = [cc.sample(model, rng)[0] for _ in range(500)]
        assert set(labels) == {1}

    def test_second_moments(self):
        model = cc.build_source_model([1.0], [np.diag([4.0, 0.0])])
        _, xs = draw_many(model, 100_000, seed=2)
        # Var(x^2) = 2 sigma^4 = 32, so 3 sigma band around 4 is +-0.054
        band = 3 * np.sqrt(32.0 / 100_000)
        assert abs(np.mean(xs[:, 0] ** 2) - 4.0) < band
        assert np.all(xs[:, 1] == 0.0)

    def test_empirical_mean_is_small(self):
        model = cc.synthetic_model(16, 3, 5, np.random.default_rng(3))
        _, xs = draw_many(model, 4000, seed=4)
        trace = np.trace(sum(p * c for p, c in zip(model.priors, model.covariances)))
        assert np.linalg.norm(xs.mean(axis=0)) <= 5 * np.sqrt(trace / 4000)


class TestFitMl:
    def test_plus_minus_unit_vectors(self):
        data = cc.LabeledDataset(
            labels=np.array([1, 1]),
            vectors=np.array([[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]]),
        )
        model = cc.fit_ml(data, num_classes=1, ambient_dim=3)
        assert np.allclose(model.covariances[0], np.diag([1.0, 0.0, 0.0]))

    def test_priors_are_class_frequencies(self):
        data = cc.LabeledDataset(
            labels=np.array([1, 1, 2, 2, 2]),
            vectors=np.ones((5, 2)),
        )
        model = cc.fit_ml(data, num_classes=2, ambient_dim=2)
        assert np.allclose(model.priors, [0.4, 0.6])

    def test_consistency_on_sampled_data(self):
        truth = cc.build_source_model(
            [1.0],
            [np.diag([3.0, 1.0, 0.0, 0.0])],
        )
        labels, xs = draw_many(truth, 10_000, seed=5)
        fitted = cc.fit_ml(
            cc.LabeledDataset(labels, xs), num_classes=1, ambient_dim=4
        )
        err = np.linalg.norm(fitted.covariances[0] - truth.covariances[0])
        assert err / np.linalg.norm(truth.covariances[0]) <= 0.1

    def test_error_decreases_with_samples(self):
        truth = cc.synthetic_model(8, 2, 3, np.random.default_rng(6))
        errors = []
        for n in (400, 6400):
            labels, xs = draw_many(truth, n, seed=7)
            fitted = cc.fit_ml(cc.LabeledDataset(labels, xs), 2, 8)
            errors.append(
                sum(
                    np.linalg.norm(f - t)
                    for f, t in zip(fitted.covariances, truth.covariances)
                )
            )
        assert errors[1] < errors[0]

    def test_missing_class_is_named(self):
        data = cc.LabeledDataset(labels=np.array([1, 1]), vectors=np.ones((2, 2)))
        with pytest.raises(ValidationError, match="class 2"):
            cc.fit_ml(data, num_classes=2, ambient_dim=2)

    def test_ridge_fills_rank(self):
        data = cc.LabeledDataset(
            labels=np.array([1, 1]),
            vectors=np.array([[1.0, 0.0], [-1.0, 0.0]]),
        )
        model = cc.fit_ml(data, 1, 2, ridge=1e-3)
        assert cc.numerical_rank(model.covariances[0]) == 2


class TestGeometrySummary:
    def test_identical_images_have_zero_gap(self):
        cov = cc.random_subspace_covariance(8, 3, np.random.default_rng(8))
        model = cc.build_source_model([0.5, 0.5], [cov, 2.0 * cov])
        summary = cc.geometry_summary(model)
        assert summary.rank_gaps[0, 1] == 0

    def test_generic_pair_gap(self, two_class_model):
        summary = cc.geometry_summary(two_class_model)
        assert summary.rank_gaps[0, 1] == 28
        # oracle via rank arithmetic on the summed covariance
        joint = cc.numerical_rank(
            two_class_model.covariances[0] + two_class_model.covariances[1]
        )
        assert 2 * joint - 28 == 2 * 14

    def test_high_rank_pair_gap(self):
        model = cc.synthetic_model(64, 2, 40, np.random.default_rng(9))
        summary = cc.geometry_summary(model)
        assert summary.rank_gaps[0, 1] == 48
        joint = cc.numerical_rank(model.covariances[0] + model.covariances[1])
        assert summary.rank_gaps[0, 1] == 2 * joint - 2 * 40

    def test_symmetric(self, case_ii_model):
        summary = cc.geometry_summary(case_ii_model)
        assert np.array_equal(summary.rank_gaps, summary.rank_gaps.T)
        assert np.array_equal(summary.intersection_dims, summary.intersection_dims.T)


class TestStratifiedSplit:
    def _dataset(self, counts, dim=3, seed=0):
        rng = np.random.default_rng(seed)
        labels = np.concatenate(
            [np.full(n, label) for label, n in enumerate(counts, start=1)]
        )
        return cc.LabeledDataset(labels, rng.standard_normal((labels.size, dim)))

    def test_half_split_counts(self):
        data = self._dataset([40, 30, 30])
        train, test = cc.stratified_split(data, 0.5, seed=1)
        assert train.num_samples == 50 and test.num_samples == 50
        for label, n in ((1, 40), (2, 30), (3, 30)):
            got = int((train.labels == label).sum())
            assert abs(got - 0.5 * n) <= 1

    def test_disjoint_and_complete(self):
        data = self._dataset([11, 13])
        train, test = cc.stratified_split(data, 0.3, seed=2)
        assert train.num_samples + test.num_samples == 24

    def test_fraction_bounds(self):
        data = self._dataset([4, 4])
        for bad in (0.0, 1.0, -0.2, 1.5):
            with pytest.raises(ValidationError):
                cc.stratified_split(data, bad, seed=0)

    def test_deterministic(self):
        data = self._dataset([20, 20])
        a_train, _ = cc.stratified_split(data, 0.5, seed=3)
        b_train, _ = cc.stratified_split(data, 0.5, seed=3)
        assert np.array_equal(a_train.vectors, b_train.vectors)
