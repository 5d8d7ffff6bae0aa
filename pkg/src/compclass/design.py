"""Measurement kernel construction.

Random Gaussian kernels, the two-class null-space designs (single probe
and the rate-targeted row selection from the paired null-space completion
matrix), the multiclass one-vs-all design, and the integer-program
measurement allocator. Kernel rows built from null spaces are unit
vectors, so every constructor returns a kernel with trace(Phi^T Phi) <= M.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DesignInfeasibleError, ValidationError
from .linalg import (
    DEFAULT_TOL,
    RankTolerance,
    null_space_basis,
    orthonormal_completion,
)
from .model import SourceModel

DESIGN_TAGS = ("random", "prop3", "prop4", "prop5", "custom")


@dataclass(frozen=True)
class MeasurementKernel:
    """An M x N measurement matrix with a design tag and the seed used."""

    matrix: np.ndarray
    design_tag: str
    seed: int | None = None

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] < 1:
            raise ValidationError(
                f"kernel matrix must be 2-d with at least one row, got {matrix.shape}"
            )
        if self.design_tag not in DESIGN_TAGS:
            raise ValidationError(f"unknown design tag {self.design_tag!r}")
        object.__setattr__(self, "matrix", matrix)

    @property
    def num_measurements(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def ambient_dim(self) -> int:
        return int(self.matrix.shape[1])


@dataclass(frozen=True)
class Phi0Construction:
    """Blocks of the two-class paired null-space completion matrix.

    ``u_block`` spans N_1 cap N_2; ``v_block`` completes it inside N_1 and
    ``w_block`` inside N_2. The stacked rows [v w]^T form the maximal-rate
    design matrix with rank_gap = 2 * n_sigma rows.
    """

    u_block: np.ndarray
    v_block: np.ndarray
    w_block: np.ndarray
    n12: int
    n_sigma: int

    @property
    def rank_gap(self) -> int:
        return 2 * self.n_sigma

    def stacked_rows(self) -> np.ndarray:
        """The (rank_gap x N) matrix whose rows are the v then w vectors."""
        return np.vstack([self.v_block.T, self.w_block.T])


@dataclass(frozen=True)
class DesignAllocation:
    """Per-class measurement counts returned by the integer program.

    Classes are exchangeable in the constraints, so counts are reported in
    nonincreasing order.
    """

    per_class_counts: tuple[int, ...]
    total: int
    target_exponent: float


def normalize_kernel(kernel: MeasurementKernel) -> MeasurementKernel:
    """Rescale so trace(Phi^T Phi) equals the number of measurements."""
    power = float(np.sum(kernel.matrix**2))
    if power == 0.0:
        raise ValidationError("cannot normalize a zero kernel")
    scale = np.sqrt(kernel.num_measurements / power)
    return MeasurementKernel(
        matrix=kernel.matrix * scale,
        design_tag=kernel.design_tag,
        seed=kernel.seed,
    )


def random_kernel(num_measurements: int, ambient_dim: int, seed: int) -> MeasurementKernel:
    """Kernel with i.i.d. standard normal entries, trace-normalized."""
    if num_measurements < 1 or ambient_dim < 1:
        raise ValidationError("kernel dimensions must be >= 1")
    rng = np.random.default_rng(seed)
    matrix = rng.standard_normal((num_measurements, ambient_dim))
    return normalize_kernel(
        MeasurementKernel(matrix=matrix, design_tag="random", seed=seed)
    )


def _require_two_classes(model: SourceModel):
    if model.num_classes != 2:
        raise ValidationError(
            f"this design needs exactly 2 classes, got {model.num_classes}"
        )


def _random_unit_combination(basis: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    vec = basis @ rng.standard_normal(basis.shape[1])
    return vec / np.linalg.norm(vec)


def build_phi0(model: SourceModel, tol: RankTolerance = DEFAULT_TOL) -> Phi0Construction:
    """Build the paired null-space completion blocks for a 2-class model."""
    _require_two_classes(model)
    cov1, cov2 = model.covariances
    u_block = null_space_basis(cov1 + cov2, tol)
    basis1 = null_space_basis(cov1, tol)
    basis2 = null_space_basis(cov2, tol)
    v_block = orthonormal_completion(u_block, basis1, tol)
    w_block = orthonormal_completion(u_block, basis2, tol)
    if v_block.shape[1] == 0 or w_block.shape[1] == 0:
        raise DesignInfeasibleError(
            "class null spaces coincide; no discriminating direction exists"
        )
    if v_block.shape[1] != w_block.shape[1]:
        raise DesignInfeasibleError(
            "class null spaces have unequal completions; the paired design "
            "requires equal class ranks"
        )
    return Phi0Construction(
        u_block=u_block,
        v_block=v_block,
        w_block=w_block,
        n12=u_block.shape[1],
        n_sigma=v_block.shape[1],
    )


def prop3_kernel(
    model: SourceModel, seed: int, tol: RankTolerance = DEFAULT_TOL
) -> MeasurementKernel:
    """Single measurement inside the class-1 null space but outside the
    shared null space, so it reacts to class 2 and not to class 1."""
    phi0 = build_phi0(model, tol)
    rng = np.random.default_rng(seed)
    row = _random_unit_combination(phi0.v_block, rng)
    return MeasurementKernel(matrix=row[None, :], design_tag="prop3", seed=seed)


def prop4_kernel(
    model: SourceModel,
    target_exponent: float,
    seed: int,
    tol: RankTolerance = DEFAULT_TOL,
) -> MeasurementKernel:
    """floor(4 d0) + 1 rows drawn from the paired null-space completion.

    The split between v-rows and w-rows is chosen uniformly at random among
    valid splits; the achieved decay exponent is M / 4 > d0.
    """
    if target_exponent < 0:
        raise ValidationError(f"target exponent must be >= 0, got {target_exponent}")
    phi0 = build_phi0(model, tol)
    if target_exponent >= phi0.rank_gap / 4:
        raise DesignInfeasibleError(
            f"target exponent {target_exponent} is not achievable: the model "
            f"caps the exponent at {phi0.rank_gap / 4}"
        )
    m = int(np.floor(4 * target_exponent)) + 1
    rng = np.random.default_rng(seed)
    lo = max(0, m - phi0.n_sigma)
    hi = min(phi0.n_sigma, m)
    m1 = int(rng.integers(lo, hi + 1))
    m2 = m - m1
    v_rows = rng.choice(phi0.n_sigma, size=m1, replace=False)
    w_rows = rng.choice(phi0.n_sigma, size=m2, replace=False)
    matrix = np.vstack([phi0.v_block[:, v_rows].T, phi0.w_block[:, w_rows].T])
    return MeasurementKernel(matrix=matrix, design_tag="prop4", seed=seed)


def prop5_kernel(
    model: SourceModel,
    num_measurements: int,
    seed: int,
    tol: RankTolerance = DEFAULT_TOL,
) -> MeasurementKernel:
    """One-vs-all design: row k is a random unit vector in the null space
    of class pi(k), for a seeded random permutation pi."""
    if num_measurements < 1:
        raise ValidationError("need at least one measurement")
    if num_measurements > model.num_classes:
        raise ValidationError(
            f"at most one row per class: M={num_measurements} exceeds "
            f"L={model.num_classes}"
        )
    rng = np.random.default_rng(seed)
    perm = rng.permutation(model.num_classes)
    rows = []
    for k in range(num_measurements):
        basis = null_space_basis(model.covariances[perm[k]], tol)
        if basis.shape[1] == 0:
            raise DesignInfeasibleError(
                f"class {perm[k] + 1} has a trivial null space; one-vs-all "
                "rows require rank-deficient covariances"
            )
        rows.append(_random_unit_combination(basis, rng))
    return MeasurementKernel(matrix=np.vstack(rows), design_tag="prop5", seed=seed)


def null_space_rows(
    model: SourceModel,
    counts,
    seed: int,
    tol: RankTolerance = DEFAULT_TOL,
) -> MeasurementKernel:
    """Kernel with counts[i] random unit rows from the null space of class i.

    Generalizes the one-vs-all construction to arbitrary per-class counts,
    e.g. those returned by the integer-program allocator.
    """
    counts = [int(c) for c in counts]
    if len(counts) != model.num_classes:
        raise ValidationError(
            f"{len(counts)} counts for {model.num_classes} classes"
        )
    if min(counts) < 0 or sum(counts) < 1:
        raise ValidationError("counts must be nonnegative and sum to >= 1")
    rng = np.random.default_rng(seed)
    rows = []
    for i, count in enumerate(counts):
        if count == 0:
            continue
        basis = null_space_basis(model.covariances[i], tol)
        if count > basis.shape[1]:
            raise ValidationError(
                f"class {i + 1} null space has dimension {basis.shape[1]}, "
                f"cannot take {count} independent rows"
            )
        for _ in range(count):
            rows.append(_random_unit_combination(basis, rng))
    return MeasurementKernel(matrix=np.vstack(rows), design_tag="custom", seed=seed)


def allocation_constraints_hold(
    counts, class_rank: int, target_exponent: float
) -> bool:
    """Check the pairwise strict design constraints for an allocation.

    With f = max(M - r, M_i) + max(M - r, M_j), every pair i != j must
    satisfy f - 2(M - 2r) > d0, f - 2(M_i - r) > d0, f - 2(M_j - r) > d0,
    and f > d0.
    """
    counts = list(counts)
    total = sum(counts)
    r = class_rank
    d0 = target_exponent
    for i in range(len(counts)):
        for j in range(i + 1, len(counts)):
            mi, mj = counts[i], counts[j]
            f = max(total - r, mi) + max(total - r, mj)
            if not (
                f - 2 * (total - 2 * r) > d0
                and f - 2 * (mi - r) > d0
                and f - 2 * (mj - r) > d0
                and f > d0
            ):
                return False
    return True


def solve_measurement_ip(
    num_classes: int,
    ambient_dim: int,
    class_rank: int,
    target_exponent: float,
) -> DesignAllocation:
    """Minimize the total measurement count subject to the pairwise design
    constraints and per-class caps M_i <= N - r.

    Branch and bound over nonincreasing count vectors (classes are
    exchangeable, so sorted allocations cover every case), driven by an
    ascending bound on the total.
    """
    if num_classes < 2:
        raise ValidationError("the allocation problem needs at least 2 classes")
    if not 1 <= class_rank < ambient_dim:
        raise ValidationError(
            f"need 1 <= class_rank < ambient_dim, got {class_rank}, {ambient_dim}"
        )
    rank_gap = 2 * min(ambient_dim - class_rank, class_rank)
    if target_exponent >= rank_gap / 4:
        raise DesignInfeasibleError(
            f"target exponent {target_exponent} is not achievable: the model "
            f"caps the exponent at {rank_gap / 4}"
        )
    cap = ambient_dim - class_rank

    def search(total: int) -> tuple[int, ...] | None:
        # DFS over nonincreasing vectors summing exactly to `total`.
        def extend(prefix: list[int], prev: int, remaining: int):
            slots_left = num_classes - len(prefix)
            if slots_left == 0:
                if remaining == 0 and allocation_constraints_hold(
                    prefix, class_rank, target_exponent
                ):
                    return tuple(prefix)
                return None
            hi = min(prev, cap, remaining)
            lo = -(-remaining // slots_left)  # ceil: later slots are <= current
            for value in range(hi, lo - 1, -1):
                found = extend(prefix + [value], value, remaining - value)
                if found is not None:
                    return found
            return None

        return extend([], cap, total)

    for total in range(0, num_classes * cap + 1):
        counts = search(total)
        if counts is not None:
            return DesignAllocation(
                per_class_counts=counts,
                total=total,
                target_exponent=target_exponent,
            )
    raise DesignInfeasibleError(
        "no allocation satisfies the design constraints within the caps"
    )
