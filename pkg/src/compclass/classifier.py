"""MAP classification of compressive measurements.

Gaussian log-likelihoods are evaluated through per-class eigendecompositions
of the measured covariances with sigma^2-shifted eigenvalues; the dense
inverse is never formed, which keeps the scores stable down to noise levels
where direct inversion fails.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .design import MeasurementKernel
from .errors import ValidationError
from .linalg import spectral_decomposition
from .model import SourceModel

_LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True)
class ClassifierContext:
    """Precomputed per-class spectra of Phi Sigma_i Phi^T plus log-priors.

    ``eigenvalues`` is (L, M) with rows descending and clipped at zero;
    ``eigenvectors`` is (L, M, M) with columns matching the eigenvalues.
    ``inv_shifted`` caches 1 / (lambda + sigma^2) and ``log_norms`` the
    y-independent part of each log-density.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    log_priors: np.ndarray
    sigma2: float
    num_measurements: int
    inv_shifted: np.ndarray
    log_norms: np.ndarray

    @property
    def num_classes(self) -> int:
        return int(self.log_priors.shape[0])


def build_context(
    model: SourceModel, kernel: MeasurementKernel, sigma2: float
) -> ClassifierContext:
    """Assemble the classifier state for a (model, kernel, noise) triple."""
    if not sigma2 > 0:
        raise ValidationError(f"sigma2 must be positive, got {sigma2}")
    if kernel.ambient_dim != model.ambient_dim:
        raise ValidationError(
            f"kernel dimension {kernel.ambient_dim} != model dimension "
            f"{model.ambient_dim}"
        )
    m = kernel.num_measurements
    eigenvalues = np.empty((model.num_classes, m))
    eigenvectors = np.empty((model.num_classes, m, m))
    for i, cov in enumerate(model.covariances):
        s = kernel.matrix @ cov @ kernel.matrix.T
        dec = spectral_decomposition((s + s.T) / 2.0)
        eigenvalues[i] = np.clip(dec.eigenvalues, 0.0, None)
        eigenvectors[i] = dec.eigenvectors
    with np.errstate(divide="ignore"):
        log_priors = np.where(
            model.priors > 0,
            np.log(np.where(model.priors > 0, model.priors, 1.0)),
            -np.inf,
        )
    shifted = eigenvalues + sigma2
    return ClassifierContext(
        eigenvalues=eigenvalues,
        eigenvectors=eigenvectors,
        log_priors=log_priors,
        sigma2=sigma2,
        num_measurements=m,
        inv_shifted=1.0 / shifted,
        log_norms=-0.5 * np.log(shifted).sum(axis=1) - 0.5 * m * _LOG_2PI,
    )


def _check_measurement(context: ClassifierContext, y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.shape != (context.num_measurements,):
        raise ValidationError(
            f"measurement shape {y.shape} != ({context.num_measurements},)"
        )
    return y


def log_likelihood(context: ClassifierContext, y, label: int) -> float:
    """Gaussian log-density of y under class ``label`` (1-based)."""
    y = _check_measurement(context, y)
    if not 1 <= label <= context.num_classes:
        raise ValidationError(f"label {label} out of range 1..{context.num_classes}")
    i = label - 1
    proj = context.eigenvectors[i].T @ y
    quad = float((proj**2 * context.inv_shifted[i]).sum())
    return -0.5 * quad + float(context.log_norms[i])


def class_scores(context: ClassifierContext, y) -> np.ndarray:
    """log p_i + log-likelihood for every class, as a length-L array."""
    y = _check_measurement(context, y)
    proj = np.einsum("lmk,m->lk", context.eigenvectors, y)
    quad = (proj**2 * context.inv_shifted).sum(axis=1)
    return context.log_priors + context.log_norms - 0.5 * quad


def classify(context: ClassifierContext, y) -> int:
    """MAP class label (1-based); ties break to the lowest index."""
    return int(np.argmax(class_scores(context, y))) + 1
