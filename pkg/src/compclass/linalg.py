"""Dense primitives for low-rank PSD geometry.

Numerical rank, pseudo-determinant, null/image bases, subspace
intersection, and random low-rank covariance generation. All rank
decisions go through a single relative-threshold policy (``RankTolerance``)
so that design and analysis code agree on the same geometry.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

# Relative asymmetry allowed before an input is rejected as non-symmetric.
SYMMETRY_RTOL = 1e-12


@dataclass(frozen=True)
class RankTolerance:
    """Relative eigenvalue cutoff: lambda counts toward rank iff
    lambda > relative_threshold * lambda_max (and lambda_max > 0)."""

    relative_threshold: float = 1e-10

    def __post_init__(self):
        if not self.relative_threshold > 0:
            raise ValidationError(
                f"relative_threshold must be positive, got {self.relative_threshold}"
            )

    def keep_mask(self, eigenvalues: np.ndarray) -> np.ndarray:
        """Boolean mask of eigenvalues that count toward the rank."""
        eigenvalues = np.asarray(eigenvalues, dtype=float)
        if eigenvalues.size == 0:
            return np.zeros(0, dtype=bool)
        lam_max = float(eigenvalues.max())
        if lam_max <= 0.0:
            return np.zeros(eigenvalues.shape, dtype=bool)
        return eigenvalues > self.relative_threshold * lam_max

    def count(self, eigenvalues: np.ndarray) -> int:
        return int(self.keep_mask(eigenvalues).sum())


DEFAULT_TOL = RankTolerance()


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigendecomposition of a symmetric matrix, eigenvalues descending,
    eigenvector columns orthonormal and aligned with the eigenvalues."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


@dataclass(frozen=True)
class EigenvalueSpec:
    """How to draw the nonzero spectrum of a synthetic covariance.

    ``uniform`` draws i.i.d. from [low, high]; ``fixed`` uses the given
    values verbatim (length must match the requested rank).
    """

    kind: str = "uniform"
    low: float = 0.5
    high: float = 1.5
    values: tuple[float, ...] | None = None

    def draw(self, rank: int, rng: np.random.Generator) -> np.ndarray:
        if self.kind == "uniform":
            if not 0 < self.low <= self.high:
                raise ValidationError(
                    f"uniform eigenvalue range must satisfy 0 < low <= high, "
                    f"got [{self.low}, {self.high}]"
                )
            return rng.uniform(self.low, self.high, size=rank)
        if self.kind == "fixed":
            if self.values is None or len(self.values) != rank:
                raise ValidationError(
                    f"fixed eigenvalue spec needs exactly {rank} values"
                )
            values = np.asarray(self.values, dtype=float)
            if np.any(values <= 0):
                raise ValidationError("fixed eigenvalues must be positive")
            return values
        raise ValidationError(f"unknown eigenvalue spec kind {self.kind!r}")


def check_symmetric(matrix: np.ndarray) -> np.ndarray:
    """Validate that a matrix is square and symmetric to within
    SYMMETRY_RTOL relative asymmetry; returns it as a float array."""
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {a.shape}")
    scale = np.linalg.norm(a)
    if scale > 0 and np.linalg.norm(a - a.T) > SYMMETRY_RTOL * scale:
        raise ValidationError("matrix is not symmetric within tolerance")
    return a


def spectral_decomposition(matrix: np.ndarray) -> SpectralDecomposition:
    """Eigendecomposition of a symmetric matrix with descending eigenvalues."""
    a = check_symmetric(matrix)
    lam, u = np.linalg.eigh(a)
    order = np.argsort(lam)[::-1]
    return SpectralDecomposition(eigenvalues=lam[order], eigenvectors=u[:, order])


def numerical_rank(matrix: np.ndarray, tol: RankTolerance = DEFAULT_TOL) -> int:
    """Number of eigenvalues of a symmetric PSD matrix above the cutoff."""
    a = check_symmetric(matrix)
    return tol.count(np.linalg.eigvalsh(a))


def pseudo_determinant(matrix: np.ndarray, tol: RankTolerance = DEFAULT_TOL) -> float:
    """Product of the eigenvalues above the cutoff (1.0 for the zero matrix)."""
    a = check_symmetric(matrix)
    lam = np.linalg.eigvalsh(a)
    kept = lam[tol.keep_mask(lam)]
    return float(np.prod(kept)) if kept.size else 1.0


def log_pseudo_determinant(matrix: np.ndarray, tol: RankTolerance = DEFAULT_TOL) -> float:
    """log of the pseudo-determinant, computed as a sum of logs."""
    a = check_symmetric(matrix)
    lam = np.linalg.eigvalsh(a)
    kept = lam[tol.keep_mask(lam)]
    return float(np.log(kept).sum()) if kept.size else 0.0


def null_space_basis(matrix: np.ndarray, tol: RankTolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the null space of a symmetric PSD matrix."""
    dec = spectral_decomposition(matrix)
    mask = tol.keep_mask(dec.eigenvalues)
    return dec.eigenvectors[:, ~mask]


def image_basis(matrix: np.ndarray, tol: RankTolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the image of a symmetric PSD matrix."""
    dec = spectral_decomposition(matrix)
    mask = tol.keep_mask(dec.eigenvalues)
    return dec.eigenvectors[:, mask]


def random_subspace_covariance(
    ambient_dim: int,
    rank: int,
    rng: np.random.Generator,
    eig_spec: EigenvalueSpec | None = None,
) -> np.ndarray:
    """Random PSD matrix of the given rank whose image is uniform over
    the Grassmann manifold (orthonormalized i.i.d. Gaussian columns)."""
    if not 1 <= rank < ambient_dim:
        raise ValidationError(
            f"rank must satisfy 1 <= rank < ambient_dim, got rank={rank}, "
            f"ambient_dim={ambient_dim}"
        )
    eig_spec = eig_spec or EigenvalueSpec()
    basis, _ = np.linalg.qr(rng.standard_normal((ambient_dim, rank)))
    lam = eig_spec.draw(rank, rng)
    cov = (basis * lam) @ basis.T
    return (cov + cov.T) / 2.0


def _check_orthonormal(basis: np.ndarray, name: str) -> np.ndarray:
    b = np.asarray(basis, dtype=float)
    if b.ndim != 2:
        raise ValidationError(f"{name} must be a 2-d array, got shape {b.shape}")
    if b.shape[1] == 0:
        return b
    gram = b.T @ b
    if np.max(np.abs(gram - np.eye(b.shape[1]))) > 1e-8:
        raise ValidationError(f"{name} columns are not orthonormal")
    return b


def _gram_rank(matrix: np.ndarray, tol: RankTolerance) -> int:
    # Rank of a general (possibly non-square) matrix via its Gram matrix,
    # reusing the PSD threshold policy on squared singular values.
    if matrix.shape[1] == 0:
        return 0
    return tol.count(np.linalg.eigvalsh(matrix.T @ matrix))


def subspace_intersection_dim(
    basis_a: np.ndarray,
    basis_b: np.ndarray,
    tol: RankTolerance = DEFAULT_TOL,
) -> int:
    """Dimension of the intersection of two subspaces given orthonormal bases.

    Computed as rank(A) + rank(B) - rank([A B]).
    """
    a = _check_orthonormal(basis_a, "basis_a")
    b = _check_orthonormal(basis_b, "basis_b")
    if a.shape[0] != b.shape[0]:
        raise ValidationError(
            f"bases live in different ambient dimensions: {a.shape[0]} vs {b.shape[0]}"
        )
    if a.shape[1] == 0 or b.shape[1] == 0:
        return 0
    return a.shape[1] + b.shape[1] - _gram_rank(np.hstack([a, b]), tol)


def orthonormal_completion(
    inner: np.ndarray,
    enclosing: np.ndarray,
    tol: RankTolerance = DEFAULT_TOL,
) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of span(inner) inside
    span(enclosing); ``inner`` must be a subspace of ``enclosing``."""
    inner = _check_orthonormal(inner, "inner")
    enclosing = _check_orthonormal(enclosing, "enclosing")
    if enclosing.shape[1] == 0:
        return enclosing
    residual = enclosing - inner @ (inner.T @ enclosing) if inner.shape[1] else enclosing
    u, s, _ = np.linalg.svd(residual, full_matrices=False)
    if s.size == 0:
        return np.zeros((enclosing.shape[0], 0))
    keep = s > np.sqrt(tol.relative_threshold) * s[0] if s[0] > 0 else s > 0
    return u[:, keep]
