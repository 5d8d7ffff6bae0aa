"""Compressive classification of low-rank zero-mean Gaussian sources.

Measurement kernel designs, union-Bhattacharyya misclassification bounds,
low-noise decay exponents, and seeded Monte Carlo phase-transition
experiments.
"""

from .analysis import (
    ExponentReport,
    PairGeometry,
    bhattacharyya_exponent,
    check_corollary1,
    expansion_constant,
    global_exponent,
    log_union_bhattacharyya_bound,
    pair_geometry,
    pairwise_exponent,
    predicted_measurements,
    union_bhattacharyya_bound,
)
from .classifier import ClassifierContext, build_context, class_scores, classify, log_likelihood
from .design import (
    DesignAllocation,
    MeasurementKernel,
    Phi0Construction,
    allocation_constraints_hold,
    build_phi0,
    normalize_kernel,
    null_space_rows,
    prop3_kernel,
    prop4_kernel,
    prop5_kernel,
    random_kernel,
    solve_measurement_ip,
)
from .errors import CompclassError, DesignInfeasibleError, ValidationError
from .linalg import (
    EigenvalueSpec,
    RankTolerance,
    SpectralDecomposition,
    image_basis,
    log_pseudo_determinant,
    null_space_basis,
    numerical_rank,
    orthonormal_completion,
    pseudo_determinant,
    random_subspace_covariance,
    spectral_decomposition,
    subspace_intersection_dim,
)
from .model import (
    GeometrySummary,
    LabeledDataset,
    SourceModel,
    build_source_model,
    fit_ml,
    geometry_summary,
    sample,
    sqrt_factors,
    stratified_split,
    synthetic_model,
)
from .rngs import derive_seed, trial_generator
from .simulate import (
    SweepPoint,
    SweepResult,
    TransitionReport,
    db_to_sigma2,
    empirical_slope,
    estimate_pe,
    find_transition,
    sweep_measurements,
    sweep_noise,
)

__version__ = "0.1.0"
