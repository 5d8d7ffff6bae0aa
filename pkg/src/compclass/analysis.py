"""Misclassification bound and low-noise decay analysis.

The pairwise exponent K of the union bound is evaluated through the
eigenvalues of the measured covariances rather than raw determinants:
the factored form isolates the (sigma^2)^(r_i + r_j - 2 r_ij) term
symbolically, which raw determinants underflow on long before the noise
levels of interest. All bound arithmetic is done in the log domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .design import MeasurementKernel
from .errors import DesignInfeasibleError, ValidationError
from .linalg import DEFAULT_TOL, RankTolerance, spectral_decomposition
from .model import SourceModel

FLOOR = "floor"
VANISHES = "vanishes"

REGIMES = ("random_pt", "random_rate", "twoclass_pt", "twoclass_rate", "multiclass_pt")


@dataclass(frozen=True)
class PairGeometry:
    """Measured-domain geometry of one class pair at a given noise level.

    Ranks r and pseudo-determinant volumes v of Phi Sigma_i Phi^T,
    Phi Sigma_j Phi^T, and Phi (Sigma_i + Sigma_j) Phi^T, plus the
    Bhattacharyya exponent k_ij and the decay exponent
    d_ij = (2 r_ij - r_i - r_j) / 4.
    """

    r_i: int
    r_j: int
    r_ij: int
    v_i: float
    v_j: float
    v_ij: float
    k_ij: float
    d_ij: float


@dataclass(frozen=True)
class ExponentReport:
    """Global decay exponent d, expansion constant g, and the set of
    ordered class pairs attaining d."""

    d: float
    g: float
    minimizing_pairs: frozenset[tuple[int, int]]


def _measured_spectrum(kernel: MeasurementKernel, cov: np.ndarray) -> np.ndarray:
    s = kernel.matrix @ cov @ kernel.matrix.T
    dec = spectral_decomposition((s + s.T) / 2.0)
    return dec.eigenvalues


def _pair_spectra(kernel, cov_i, cov_j, tol: RankTolerance):
    """Eigenvalues of the three measured covariances of a pair that count
    toward rank.

    The cutoff is relative to the joint spectral scale of the pair (the
    summed matrix dominates both classes), not to each matrix alone: a
    measured covariance that is exactly zero in exact arithmetic shows up
    as roundoff noise whose own largest eigenvalue would otherwise promote
    it to full rank.
    """
    lam_i = _measured_spectrum(kernel, cov_i)
    lam_j = _measured_spectrum(kernel, cov_j)
    lam_ij = _measured_spectrum(kernel, np.asarray(cov_i) + np.asarray(cov_j))
    scale = max(lam_i.max(), lam_j.max(), lam_ij.max(), 0.0)
    if scale <= 0.0:
        empty = np.zeros(0)
        return empty, empty, empty
    cutoff = tol.relative_threshold * scale
    return lam_i[lam_i > cutoff], lam_j[lam_j > cutoff], lam_ij[lam_ij > cutoff]


def _k_from_spectra(lam_i, lam_j, lam_ij, sigma2: float) -> float:
    r_i, r_j, r_ij = lam_i.size, lam_j.size, lam_ij.size
    log_value = (
        -2.0 * r_ij * math.log(2.0)
        + (r_i + r_j - 2 * r_ij) * math.log(sigma2)
        + 2.0 * np.log(lam_ij + 2.0 * sigma2).sum()
        - np.log(lam_i + sigma2).sum()
        - np.log(lam_j + sigma2).sum()
    )
    # Mathematically >= 0 (Bhattacharyya coefficient <= 1); clamp roundoff.
    return max(0.25 * float(log_value), 0.0)


def bhattacharyya_exponent(
    kernel: MeasurementKernel,
    cov_i: np.ndarray,
    cov_j: np.ndarray,
    sigma2: float,
    tol: RankTolerance = DEFAULT_TOL,
) -> float:
    """Pairwise exponent K of the union bound at noise level sigma2."""
    if not sigma2 > 0:
        raise ValidationError(f"sigma2 must be positive, got {sigma2}")
    lam_i, lam_j, lam_ij = _pair_spectra(kernel, cov_i, cov_j, tol)
    return _k_from_spectra(lam_i, lam_j, lam_ij, sigma2)


def pair_geometry(
    kernel: MeasurementKernel,
    cov_i: np.ndarray,
    cov_j: np.ndarray,
    sigma2: float,
    tol: RankTolerance = DEFAULT_TOL,
) -> PairGeometry:
    """Full measured-domain geometry record for one class pair."""
    if not sigma2 > 0:
        raise ValidationError(f"sigma2 must be positive, got {sigma2}")
    lam_i, lam_j, lam_ij = _pair_spectra(kernel, cov_i, cov_j, tol)
    r_i, r_j, r_ij = lam_i.size, lam_j.size, lam_ij.size
    return PairGeometry(
        r_i=r_i,
        r_j=r_j,
        r_ij=r_ij,
        v_i=float(np.prod(lam_i)) if r_i else 1.0,
        v_j=float(np.prod(lam_j)) if r_j else 1.0,
        v_ij=float(np.prod(lam_ij)) if r_ij else 1.0,
        k_ij=_k_from_spectra(lam_i, lam_j, lam_ij, sigma2),
        d_ij=(2 * r_ij - r_i - r_j) / 4.0,
    )


def pairwise_exponent(
    kernel: MeasurementKernel,
    cov_i: np.ndarray,
    cov_j: np.ndarray,
    tol: RankTolerance = DEFAULT_TOL,
) -> float:
    """Decay exponent d(i,j) = (2 r_ij - r_i - r_j) / 4 from measured ranks."""
    lam_i, lam_j, lam_ij = _pair_spectra(kernel, cov_i, cov_j, tol)
    return (2 * lam_ij.size - lam_i.size - lam_j.size) / 4.0


def _log_priors(priors: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.where(priors > 0, np.log(np.where(priors > 0, priors, 1.0)), -np.inf)


def _logsumexp(terms: np.ndarray) -> float:
    finite = terms[np.isfinite(terms)]
    if finite.size == 0:
        return -np.inf
    peak = finite.max()
    return float(peak + np.log(np.exp(finite - peak).sum()))


def log_union_bhattacharyya_bound(
    model: SourceModel,
    kernel: MeasurementKernel,
    sigma2: float,
    tol: RankTolerance = DEFAULT_TOL,
) -> float:
    """log of the union bound: logsumexp over ordered pairs i != j of
    log sqrt(p_i p_j) - K_ij. Returns -inf for a single-class model."""
    if not sigma2 > 0:
        raise ValidationError(f"sigma2 must be positive, got {sigma2}")
    logp = _log_priors(model.priors)
    terms = []
    for i in range(model.num_classes):
        for j in range(i + 1, model.num_classes):
            k = bhattacharyya_exponent(
                kernel, model.covariances[i], model.covariances[j], sigma2, tol
            )
            # K is symmetric, so the (i,j) and (j,i) terms coincide.
            terms.append(math.log(2.0) + 0.5 * (logp[i] + logp[j]) - k)
    return _logsumexp(np.asarray(terms))


def union_bhattacharyya_bound(
    model: SourceModel,
    kernel: MeasurementKernel,
    sigma2: float,
    tol: RankTolerance = DEFAULT_TOL,
) -> float:
    """Union bound on the misclassification probability (linear form)."""
    return float(np.exp(log_union_bhattacharyya_bound(model, kernel, sigma2, tol)))


def _pair_exponent_numerators(model, kernel, tol) -> dict[tuple[int, int], int]:
    # 4 * d(i,j) as an exact integer, per unordered 0-based pair.
    numerators = {}
    for i in range(model.num_classes):
        for j in range(i + 1, model.num_classes):
            lam_i, lam_j, lam_ij = _pair_spectra(
                kernel, model.covariances[i], model.covariances[j], tol
            )
            numerators[(i, j)] = 2 * lam_ij.size - lam_i.size - lam_j.size
    return numerators


def global_exponent(
    model: SourceModel,
    kernel: MeasurementKernel,
    tol: RankTolerance = DEFAULT_TOL,
) -> float:
    """Global decay exponent d = min over pairs of d(i,j)."""
    numerators = _pair_exponent_numerators(model, kernel, tol)
    if not numerators:
        raise ValidationError("exponent needs at least two classes")
    return min(numerators.values()) / 4.0


def expansion_constant(
    model: SourceModel,
    kernel: MeasurementKernel,
    tol: RankTolerance = DEFAULT_TOL,
) -> ExponentReport:
    """Low-noise expansion of the union bound: bound = g * (sigma^2)^d + o(...).

    g sums sqrt(p_i p_j) 2^(r_ij / 2) (sqrt(v_i v_j) / v_ij)^(1/2) over the
    ordered pairs attaining the minimal exponent, with volumes computed in
    the log domain.
    """
    numerators = _pair_exponent_numerators(model, kernel, tol)
    if not numerators:
        raise ValidationError("expansion needs at least two classes")
    min_num = min(numerators.values())
    logp = _log_priors(model.priors)
    log_terms = []
    pairs: set[tuple[int, int]] = set()
    for (i, j), numerator in numerators.items():
        if numerator != min_num:
            continue
        pairs.update({(i + 1, j + 1), (j + 1, i + 1)})
        lam_i, lam_j, lam_ij = _pair_spectra(
            kernel, model.covariances[i], model.covariances[j], tol
        )
        log_v_i = float(np.log(lam_i).sum())
        log_v_j = float(np.log(lam_j).sum())
        log_v_ij = float(np.log(lam_ij).sum())
        log_terms.append(
            math.log(2.0)  # both orders of the pair contribute equally
            + 0.5 * (logp[i] + logp[j])
            + 0.5 * lam_ij.size * math.log(2.0)
            + 0.25 * (log_v_i + log_v_j)
            - 0.5 * log_v_ij
        )
    g = float(np.exp(_logsumexp(np.asarray(log_terms))))
    return ExponentReport(d=min_num / 4.0, g=g, minimizing_pairs=frozenset(pairs))


def check_corollary1(
    model: SourceModel,
    kernel: MeasurementKernel,
    tol: RankTolerance = DEFAULT_TOL,
) -> str:
    """``floor`` if some pair has r_i + r_j = 2 r_ij (the bound tends to a
    positive constant), else ``vanishes``."""
    numerators = _pair_exponent_numerators(model, kernel, tol)
    if not numerators:
        return VANISHES
    return FLOOR if min(numerators.values()) == 0 else VANISHES


def predicted_measurements(
    regime: str,
    num_classes: int | None = None,
    class_rank: int | None = None,
    ambient_dim: int | None = None,
    target_exponent: float | None = None,
) -> int:
    """Closed-form measurement counts for the supported regimes.

    random_pt:      r + 1
    random_rate:    floor(2 d0 + r) + 1,  requires d0 < rank_gap / 4
    twoclass_pt:    1
    twoclass_rate:  floor(4 d0) + 1,      requires d0 < rank_gap / 4
    multiclass_pt:  min(L - 1, r + 1)
    """
    if regime not in REGIMES:
        raise ValidationError(f"unknown regime {regime!r}; expected one of {REGIMES}")

    def need(value, name):
        if value is None:
            raise ValidationError(f"regime {regime!r} requires {name}")
        return value

    if regime in ("random_rate", "twoclass_rate"):
        d0 = need(target_exponent, "target_exponent")
        r = need(class_rank, "class_rank")
        n = need(ambient_dim, "ambient_dim")
        rank_gap = 2 * min(n - r, r)
        if d0 >= rank_gap / 4:
            raise DesignInfeasibleError(
                f"target exponent {d0} is not achievable: the model caps the "
                f"exponent at {rank_gap / 4}"
            )
        if regime == "random_rate":
            return int(math.floor(2 * d0 + r)) + 1
        return int(math.floor(4 * d0)) + 1
    if regime == "random_pt":
        return need(class_rank, "class_rank") + 1
    if regime == "twoclass_pt":
        return 1
    # multiclass_pt
    return min(need(num_classes, "num_classes") - 1, need(class_rank, "class_rank") + 1)
