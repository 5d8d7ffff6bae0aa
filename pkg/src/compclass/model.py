"""L-class zero-mean low-rank Gaussian source: construction, sampling,
maximum-likelihood fitting, and pairwise subspace geometry."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .linalg import (
    DEFAULT_TOL,
    EigenvalueSpec,
    RankTolerance,
    check_symmetric,
    image_basis,
    numerical_rank,
    random_subspace_covariance,
    spectral_decomposition,
    subspace_intersection_dim,
)

PRIOR_SUM_ATOL = 1e-12


@dataclass(frozen=True)
class SourceModel:
    """Class priors plus one zero-mean Gaussian covariance per class.

    ``class_rank`` records the modal numerical rank across classes; models
    whose classes disagree on rank are accepted with a warning.
    """

    priors: np.ndarray
    covariances: tuple[np.ndarray, ...]
    ambient_dim: int
    class_rank: int

    @property
    def num_classes(self) -> int:
        return len(self.covariances)


@dataclass(frozen=True)
class LabeledDataset:
    """Vectors with integer class labels in 1..L, one row per sample."""

    labels: np.ndarray
    vectors: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=int)
        vectors = np.asarray(self.vectors, dtype=float)
        if vectors.ndim != 2 or labels.ndim != 1:
            raise ValidationError("expected labels (n,) and vectors (n, N)")
        if labels.shape[0] != vectors.shape[0]:
            raise ValidationError(
                f"{labels.shape[0]} labels for {vectors.shape[0]} vectors"
            )
        if labels.size and labels.min() < 1:
            raise ValidationError("labels must be positive integers (1-based)")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "vectors", vectors)

    @property
    def num_samples(self) -> int:
        return int(self.labels.shape[0])

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])


@dataclass(frozen=True)
class GeometrySummary:
    """Per-class image dimensions and per-pair intersection dimensions.

    ``rank_gaps[i, j]`` is dim(R_i) + dim(R_j) - 2 dim(R_i cap R_j), the
    quantity whose quarter bounds the best achievable decay exponent.
    """

    image_dims: np.ndarray
    intersection_dims: np.ndarray
    rank_gaps: np.ndarray


def build_source_model(
    priors,
    covariances,
    tol: RankTolerance = DEFAULT_TOL,
) -> SourceModel:
    """Validate inputs and assemble a SourceModel."""
    priors = np.asarray(priors, dtype=float)
    if priors.ndim != 1 or priors.size == 0:
        raise ValidationError("priors must be a nonempty 1-d array")
    if np.any(priors < 0):
        raise ValidationError("priors must be nonnegative")
    if abs(priors.sum() - 1.0) > PRIOR_SUM_ATOL:
        raise ValidationError(f"priors must sum to 1, got {priors.sum()!r}")
    if len(covariances) != priors.size:
        raise ValidationError(
            f"{priors.size} priors for {len(covariances)} covariances"
        )
    covs = tuple(check_symmetric(c) for c in covariances)
    ambient_dim = covs[0].shape[0]
    for c in covs:
        if c.shape[0] != ambient_dim:
            raise ValidationError("covariances must share one ambient dimension")
    ranks = [numerical_rank(c, tol) for c in covs]
    values, counts = np.unique(ranks, return_counts=True)
    class_rank = int(values[np.argmax(counts)])
    if len(values) > 1:
        warnings.warn(
            f"class covariance ranks are unequal ({ranks}); recording the "
            f"modal rank {class_rank}",
            stacklevel=2,
        )
    return SourceModel(
        priors=priors,
        covariances=covs,
        ambient_dim=ambient_dim,
        class_rank=class_rank,
    )


def synthetic_model(
    ambient_dim: int,
    num_classes: int,
    class_rank: int,
    rng: np.random.Generator,
    eig_spec: EigenvalueSpec | None = None,
    priors=None,
    tol: RankTolerance = DEFAULT_TOL,
) -> SourceModel:
    """Equal-rank model with class images drawn independently and uniformly
    over the Grassmann manifold; priors default to uniform."""
    if num_classes < 1:
        raise ValidationError(f"num_classes must be >= 1, got {num_classes}")
    covs = [
        random_subspace_covariance(ambient_dim, class_rank, rng, eig_spec)
        for _ in range(num_classes)
    ]
    if priors is None:
        priors = np.full(num_classes, 1.0 / num_classes)
    return build_source_model(priors, covs, tol)


def sqrt_factors(
    model: SourceModel, tol: RankTolerance = DEFAULT_TOL
) -> list[np.ndarray]:
    """Per-class spectral square roots A_i (N x r_i) with A_i A_i^T = Sigma_i."""
    factors = []
    for cov in model.covariances:
        dec = spectral_decomposition(cov)
        mask = tol.keep_mask(dec.eigenvalues)
        factors.append(dec.eigenvectors[:, mask] * np.sqrt(dec.eigenvalues[mask]))
    return factors


def draw_label(priors_cumsum: np.ndarray, rng: np.random.Generator) -> int:
    """Draw a 0-based class index from cumulative priors."""
    idx = int(np.searchsorted(priors_cumsum, rng.random(), side="right"))
    return min(idx, priors_cumsum.size - 1)


def sample(
    model: SourceModel,
    rng: np.random.Generator,
    tol: RankTolerance = DEFAULT_TOL,
) -> tuple[int, np.ndarray]:
    """Draw (label, vector): label ~ priors, vector ~ N(0, Sigma_label).

    The vector is generated through the spectral square root of the class
    covariance, so exact zero eigenvalues contribute exactly zero.
    """
    label0 = draw_label(np.cumsum(model.priors), rng)
    dec = spectral_decomposition(model.covariances[label0])
    mask = tol.keep_mask(dec.eigenvalues)
    factor = dec.eigenvectors[:, mask] * np.sqrt(dec.eigenvalues[mask])
    x = factor @ rng.standard_normal(factor.shape[1]) if factor.shape[1] else np.zeros(
        model.ambient_dim
    )
    return label0 + 1, x


def fit_ml(
    dataset: LabeledDataset,
    num_classes: int,
    ambient_dim: int,
    ridge: float = 0.0,
    tol: RankTolerance = DEFAULT_TOL,
) -> SourceModel:
    """Maximum-likelihood fit of the zero-mean model from labeled data.

    Priors are empirical class frequencies; each covariance is the plain
    second moment (1/n_i) sum x x^T with no mean subtraction. ``ridge``
    adds ridge * I to every fitted covariance (default off).
    """
    if dataset.num_samples == 0:
        raise ValidationError("dataset is empty")
    if dataset.dim != ambient_dim:
        raise ValidationError(
            f"dataset dimension {dataset.dim} != ambient_dim {ambient_dim}"
        )
    if dataset.labels.max() > num_classes:
        raise ValidationError(
            f"label {dataset.labels.max()} exceeds num_classes {num_classes}"
        )
    priors = np.zeros(num_classes)
    covs = []
    for label in range(1, num_classes + 1):
        rows = dataset.vectors[dataset.labels == label]
        if rows.shape[0] == 0:
            raise ValidationError(f"class {label} has no samples")
        priors[label - 1] = rows.shape[0] / dataset.num_samples
        cov = rows.T @ rows / rows.shape[0]
        if ridge > 0.0:
            cov = cov + ridge * np.eye(ambient_dim)
        covs.append((cov + cov.T) / 2.0)
    return build_source_model(priors, covs, tol)


def stratified_split(
    dataset: LabeledDataset, fraction: float, seed: int
) -> tuple[LabeledDataset, LabeledDataset]:
    """Split into (train, test) with the given training fraction per class.

    Each class is shuffled and split independently, so training counts stay
    within one sample of proportional.
    """
    if not 0.0 < fraction < 1.0:
        raise ValidationError(f"split fraction must be in (0, 1), got {fraction}")
    rng = np.random.default_rng(seed)
    train_idx = []
    test_idx = []
    for label in np.unique(dataset.labels):
        idx = np.flatnonzero(dataset.labels == label)
        idx = idx[rng.permutation(idx.size)]
        n_train = int(round(fraction * idx.size))
        train_idx.append(idx[:n_train])
        test_idx.append(idx[n_train:])
    train_idx = np.sort(np.concatenate(train_idx))
    test_idx = np.sort(np.concatenate(test_idx))
    return (
        LabeledDataset(dataset.labels[train_idx], dataset.vectors[train_idx]),
        LabeledDataset(dataset.labels[test_idx], dataset.vectors[test_idx]),
    )


def geometry_summary(
    model: SourceModel, tol: RankTolerance = DEFAULT_TOL
) -> GeometrySummary:
    """Image dimensions, pairwise intersection dimensions, and rank gaps."""
    bases = [image_basis(c, tol) for c in model.covariances]
    dims = np.array([b.shape[1] for b in bases], dtype=int)
    n = model.num_classes
    inter = np.zeros((n, n), dtype=int)
    gaps = np.zeros((n, n), dtype=int)
    for i in range(n):
        inter[i, i] = dims[i]
        for j in range(i + 1, n):
            dij = subspace_intersection_dim(bases[i], bases[j], tol)
            inter[i, j] = inter[j, i] = dij
            gaps[i, j] = gaps[j, i] = dims[i] + dims[j] - 2 * dij
    return GeometrySummary(image_dims=dims, intersection_dims=inter, rank_gaps=gaps)
