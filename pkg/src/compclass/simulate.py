"""Seeded Monte Carlo estimation of the misclassification probability,
noise and measurement-count sweeps, slope extraction, and transition search.

Reproducibility contract: every trial draws from its own counter-based
substream keyed by (seed, trial index), so estimates are bit-identical
regardless of execution order or parallelism. Trial t consumes, in order:
one uniform (class label), r_label standard normals (signal coefficients),
and M standard normals (noise).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import analysis
from .classifier import build_context, classify
from .design import MeasurementKernel, prop5_kernel, random_kernel
from .errors import ValidationError
from .linalg import DEFAULT_TOL, RankTolerance
from .model import SourceModel, sqrt_factors
from .rngs import derive_seed, trial_generator

SWEEP_AXES = ("noise_db", "measurements")
TRANSITION_CRITERIA = ("exponent_positive", "pe_below")
SWEEP_DESIGNS = ("random", "prop5")


@dataclass(frozen=True)
class SweepPoint:
    """One sweep sample: axis value, Monte Carlo estimate with its standard
    error, the analytic bound, and the decay exponent of the configuration."""

    axis_value: float
    pe: float
    se: float
    bound: float
    exponent: float


@dataclass(frozen=True)
class SweepResult:
    """Points sorted by axis value, plus the trial count and master seed."""

    axis: str
    points: tuple[SweepPoint, ...]
    trials: int
    seed: int


@dataclass(frozen=True)
class TransitionReport:
    """Smallest measurement count meeting a criterion; ``found`` is False
    when no count up to the scan limit qualifies (``m`` then reports the
    limit)."""

    m: int
    criterion: str
    found: bool
    threshold: float | None = None


def db_to_sigma2(noise_db: float) -> float:
    """Noise level in dB to linear variance: -60 dB -> 1e-6."""
    return 10.0 ** (noise_db / 10.0)


def estimate_pe(
    model: SourceModel,
    kernel: MeasurementKernel,
    sigma2: float,
    trials: int,
    seed: int,
    tol: RankTolerance = DEFAULT_TOL,
) -> tuple[float, float]:
    """Monte Carlo misclassification estimate and its standard error.

    The standard error is sqrt(pe (1 - pe) / trials); an estimate of
    exactly zero is reported with the one-sided 95% bound 3 / trials so
    log-scale plots stay drawable.
    """
    if trials < 1:
        raise ValidationError(f"trials must be >= 1, got {trials}")
    context = build_context(model, kernel, sigma2)
    projected = [kernel.matrix @ a for a in sqrt_factors(model, tol)]
    cumulative = np.cumsum(model.priors)
    noise_scale = math.sqrt(sigma2)
    m = kernel.num_measurements
    errors = 0
    for trial in range(trials):
        rng = trial_generator(seed, trial)
        label0 = min(
            int(np.searchsorted(cumulative, rng.random(), side="right")),
            model.num_classes - 1,
        )
        factor = projected[label0]
        signal = factor @ rng.standard_normal(factor.shape[1])
        y = signal + noise_scale * rng.standard_normal(m)
        if classify(context, y) != label0 + 1:
            errors += 1
    pe = errors / trials
    se = math.sqrt(pe * (1.0 - pe) / trials) if errors else 3.0 / trials
    return pe, se


def sweep_noise(
    model: SourceModel,
    kernel: MeasurementKernel,
    noise_db_list,
    trials: int,
    seed: int,
    tol: RankTolerance = DEFAULT_TOL,
) -> SweepResult:
    """Estimate pe and the bound at each noise level (dB), one fixed kernel."""
    levels = sorted(float(db) for db in noise_db_list)
    if not levels:
        raise ValidationError("noise grid is empty")
    exponent = analysis.global_exponent(model, kernel, tol)
    points = []
    for index, db in enumerate(levels):
        sigma2 = db_to_sigma2(db)
        pe, se = estimate_pe(model, kernel, sigma2, trials, derive_seed(seed, index))
        bound = analysis.union_bhattacharyya_bound(model, kernel, sigma2, tol)
        points.append(
            SweepPoint(axis_value=db, pe=pe, se=se, bound=bound, exponent=exponent)
        )
    return SweepResult(axis="noise_db", points=tuple(points), trials=trials, seed=seed)


def _kernel_for(
    design: str,
    model: SourceModel,
    m: int,
    seed: int,
    tol: RankTolerance,
) -> MeasurementKernel:
    if design == "random":
        return random_kernel(m, model.ambient_dim, seed)
    if design == "prop5":
        return prop5_kernel(model, m, seed, tol)
    raise ValidationError(f"unknown design {design!r}; expected one of {SWEEP_DESIGNS}")


def sweep_measurements(
    model: SourceModel,
    design: str,
    m_list,
    sigma2: float,
    trials: int,
    seed: int,
    tol: RankTolerance = DEFAULT_TOL,
) -> SweepResult:
    """Estimate pe versus measurement count, building a fresh seeded kernel
    (random or one-vs-all) for every count."""
    counts = sorted(int(m) for m in m_list)
    if not counts:
        raise ValidationError("measurement grid is empty")
    if counts[0] < 1:
        raise ValidationError(f"measurement counts must be >= 1, got {counts[0]}")
    points = []
    for m in counts:
        kernel = _kernel_for(design, model, m, derive_seed(seed, m, 0), tol)
        pe, se = estimate_pe(model, kernel, sigma2, trials, derive_seed(seed, m, 1))
        bound = analysis.union_bhattacharyya_bound(model, kernel, sigma2, tol)
        exponent = analysis.global_exponent(model, kernel, tol)
        points.append(
            SweepPoint(
                axis_value=float(m), pe=pe, se=se, bound=bound, exponent=exponent
            )
        )
    return SweepResult(
        axis="measurements", points=tuple(points), trials=trials, seed=seed
    )


def empirical_slope(sigma2_values, curve_values) -> float:
    """Least-squares slope of log(value) against log(1 / sigma^2), negated
    so a curve proportional to (sigma^2)^a yields a."""
    x = np.asarray(sigma2_values, dtype=float)
    y = np.asarray(curve_values, dtype=float)
    if x.size != y.size or x.size < 2:
        raise ValidationError("need at least two matching points")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValidationError("noise levels and curve values must be positive")
    slope = np.polyfit(np.log(1.0 / x), np.log(y), 1)[0]
    return float(-slope)


def find_transition(
    model: SourceModel,
    design: str,
    m_max: int,
    criterion: str,
    seed: int,
    sigma2: float | None = None,
    trials: int | None = None,
    threshold: float | None = None,
    tol: RankTolerance = DEFAULT_TOL,
) -> TransitionReport:
    """Smallest measurement count in 1..m_max meeting the criterion.

    ``exponent_positive`` uses rank arithmetic only (no simulation);
    ``pe_below`` runs estimate_pe at the given sigma2/trials and compares
    against ``threshold``. One-vs-all kernels cap the scan at L rows.
    """
    if criterion not in TRANSITION_CRITERIA:
        raise ValidationError(
            f"unknown criterion {criterion!r}; expected one of {TRANSITION_CRITERIA}"
        )
    if m_max < 1:
        raise ValidationError(f"m_max must be >= 1, got {m_max}")
    if criterion == "pe_below":
        if threshold is None or sigma2 is None or trials is None:
            raise ValidationError(
                "pe_below needs threshold, sigma2, and trials"
            )
    limit = min(m_max, model.num_classes) if design == "prop5" else m_max
    for m in range(1, limit + 1):
        kernel = _kernel_for(design, model, m, derive_seed(seed, m, 0), tol)
        if criterion == "exponent_positive":
            met = analysis.global_exponent(model, kernel, tol) > 0
        else:
            pe, _ = estimate_pe(
                model, kernel, sigma2, trials, derive_seed(seed, m, 1)
            )
            met = pe < threshold
        if met:
            return TransitionReport(
                m=m, criterion=criterion, found=True, threshold=threshold
            )
    return TransitionReport(
        m=m_max, criterion=criterion, found=False, threshold=threshold
    )
