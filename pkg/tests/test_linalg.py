import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import compclass as cc
from compclass.errors import ValidationError


def planted_covariance(eigenvalues, seed, dim=None):
    """PSD matrix with a planted spectrum in a random orthonormal basis."""
    eigenvalues = np.asarray(eigenvalues, dtype=float)
    dim = dim or eigenvalues.size
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    cov = (q[:, : eigenvalues.size] * eigenvalues) @ q[:, : eigenvalues.size].T
    return (cov + cov.T) / 2


class TestNumericalRank:
    def test_identity(self):
        assert cc.numerical_rank(np.eye(3)) == 3

    def test_below_threshold_discarded(self):
        assert cc.numerical_rank(np.diag([1.0, 1e-14, 0.0])) == 1

    def test_random_covariance_matches_eigensolver(self):
        cov = cc.random_subspace_covariance(64, 14, np.random.default_rng(0))
        # independent oracle: count eigenvalues from a dense solve directly
        lam = np.linalg.eigvalsh(cov)
        oracle = int((lam > 1e-10 * lam.max()).sum())
        assert oracle == 14
        assert cc.numerical_rank(cov) == 14

    def test_rejects_asymmetric(self):
        with pytest.raises(ValidationError):
            cc.numerical_rank(np.array([[1.0, 2.0], [0.0, 1.0]]))

    def test_rejects_nonsquare(self):
        with pytest.raises(ValidationError):
            cc.numerical_rank(np.ones((2, 3)))


class TestPseudoDeterminant:
    def test_diagonal(self):
        assert cc.pseudo_determinant(np.diag([2.0, 3.0, 0.0])) == pytest.approx(6.0)

    def test_identity(self):
        assert cc.pseudo_determinant(np.eye(5)) == pytest.approx(1.0)

    def test_planted_spectrum(self):
        cov = planted_covariance([4.0, 2.0, 0.5, 0.0, 0.0], seed=3)
        assert cc.pseudo_determinant(cov) == pytest.approx(4.0, rel=1e-10)

    def test_zero_matrix_is_empty_product(self):
        assert cc.pseudo_determinant(np.zeros((4, 4))) == 1.0

    def test_log_form_matches(self):
        cov = planted_covariance([4.0, 2.0, 0.5], seed=5)
        assert cc.log_pseudo_determinant(cov) == pytest.approx(np.log(4.0), rel=1e-10)


class TestBases:
    def test_null_space_of_diag(self):
        basis = cc.null_space_basis(np.diag([1.0, 1.0, 0.0]))
        assert basis.shape == (3, 1)
        assert abs(basis[2, 0]) == pytest.approx(1.0)

    def test_null_space_of_zero_matrix_is_everything(self):
        basis = cc.null_space_basis(np.zeros((4, 4)))
        assert basis.shape == (4, 4)
        assert np.allclose(basis.T @ basis, np.eye(4), atol=1e-12)

    def test_null_space_orthogonal_to_planted_image(self):
        rng = np.random.default_rng(9)
        u, _ = np.linalg.qr(rng.standard_normal((4, 2)))
        cov = u @ u.T
        basis = cc.null_space_basis((cov + cov.T) / 2)
        assert basis.shape == (4, 2)
        assert np.max(np.abs(u.T @ basis)) < 1e-10

    def test_image_of_diag(self):
        basis = cc.image_basis(np.diag([1.0, 1.0, 0.0]))
        assert basis.shape == (3, 2)
        assert np.max(np.abs(basis[2, :])) < 1e-12

    def test_image_of_identity_is_full(self):
        assert cc.image_basis(np.eye(3)).shape == (3, 3)

    def test_image_matches_planted_projector(self):
        rng = np.random.default_rng(10)
        u, _ = np.linalg.qr(rng.standard_normal((6, 3)))
        cov = planted_covariance([1.0, 2.0, 3.0], seed=11, dim=6)
        img = cc.image_basis(cov)
        null = cc.null_space_basis(cov)
        p_img = img @ img.T
        p_null = null @ null.T
        assert np.allclose(p_img + p_null, np.eye(6), atol=1e-8)
        assert np.max(np.abs(p_img @ p_null)) < 1e-8


class TestRandomSubspaceCovariance:
    def test_rank_one_projector_trace(self):
        spec = cc.EigenvalueSpec(kind="fixed", values=(1.0,))
        cov = cc.random_subspace_covariance(4, 1, np.random.default_rng(1), spec)
        assert np.trace(cov) == pytest.approx(1.0)
        assert cc.numerical_rank(cov) == 1

    def test_requested_rank(self):
        cov = cc.random_subspace_covariance(64, 14, np.random.default_rng(2))
        assert cc.numerical_rank(cov) == 14

    def test_independent_draws_span_sum(self):
        rng = np.random.default_rng(3)
        a = cc.random_subspace_covariance(64, 14, rng)
        b = cc.random_subspace_covariance(64, 14, rng)
        assert cc.numerical_rank(a + b) == 28

    def test_rank_must_be_below_dim(self):
        with pytest.raises(ValidationError):
            cc.random_subspace_covariance(4, 4, np.random.default_rng(0))


class TestSubspaceIntersection:
    def test_same_line(self):
        e1 = np.eye(3)[:, :1]
        assert cc.subspace_intersection_dim(e1, e1) == 1

    def test_orthogonal_lines(self):
        e = np.eye(3)
        assert cc.subspace_intersection_dim(e[:, :1], e[:, 1:2]) == 0

    def test_generic_subspaces_do_not_meet(self):
        rng = np.random.default_rng(4)
        a, _ = np.linalg.qr(rng.standard_normal((64, 14)))
        b, _ = np.linalg.qr(rng.standard_normal((64, 14)))
        assert cc.subspace_intersection_dim(a, b) == 0
        # oracle: principal angles via singular values of A^T B
        sv = np.linalg.svd(a.T @ b, compute_uv=False)
        assert int((sv > 1 - 1e-8).sum()) == 0

    def test_shared_directions_counted(self):
        rng = np.random.default_rng(5)
        shared, _ = np.linalg.qr(rng.standard_normal((10, 2)))
        extra_a, _ = np.linalg.qr(rng.standard_normal((10, 5)))
        a = np.linalg.qr(np.hstack([shared, extra_a[:, :2]]))[0][:, :4]
        b = np.linalg.qr(np.hstack([shared, extra_a[:, 2:4]]))[0][:, :4]
        assert cc.subspace_intersection_dim(a, b) == 2

    def test_rejects_non_orthonormal(self):
        with pytest.raises(ValidationError):
            cc.subspace_intersection_dim(np.ones((3, 2)), np.eye(3))


class TestSpectralDecomposition:
    def test_invariants(self):
        cov = planted_covariance([3.0, 1.0, 0.5, 0.0], seed=6)
        dec = cc.spectral_decomposition(cov)
        assert np.all(np.diff(dec.eigenvalues) <= 0)
        gram = dec.eigenvectors.T @ dec.eigenvectors
        assert np.max(np.abs(gram - np.eye(4))) < 1e-10
        rebuilt = (dec.eigenvectors * dec.eigenvalues) @ dec.eigenvectors.T
        assert np.linalg.norm(rebuilt - cov) <= 1e-10 * np.linalg.norm(cov)


@settings(max_examples=25, deadline=None)
@given(
    dim=st.integers(2, 24),
    seed=st.integers(0, 2**31),
    data=st.data(),
)
def test_rank_plus_nullity_is_dim(dim, seed, data):
    rank = data.draw(st.integers(1, dim - 1))
    cov = cc.random_subspace_covariance(dim, rank, np.random.default_rng(seed))
    assert cc.numerical_rank(cov) + cc.null_space_basis(cov).shape[1] == dim


@settings(max_examples=25, deadline=None)
@given(
    seed=st.integers(0, 2**31),
    scale=st.floats(1e-6, 1e6),
)
def test_pseudo_determinant_scaling(seed, scale):
    cov = cc.random_subspace_covariance(10, 4, np.random.default_rng(seed))
    base = cc.pseudo_determinant(cov)
    scaled = cc.pseudo_determinant(scale * cov)
    assert scaled == pytest.approx(scale**4 * base, rel=1e-8)


@settings(max_examples=25, deadline=None)
@given(dim=st.integers(2, 16), seed=st.integers(0, 2**31), data=st.data())
def test_projectors_complementary(dim, seed, data):
    rank = data.draw(st.integers(1, dim - 1))
    cov = cc.random_subspace_covariance(dim, rank, np.random.default_rng(seed))
    img = cc.image_basis(cov)
    null = cc.null_space_basis(cov)
    assert np.allclose(img @ img.T + null @ null.T, np.eye(dim), atol=1e-8)
