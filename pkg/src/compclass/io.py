"""Serialization: model and kernel text files, dataset CSV, sweep CSV.

Matrices are written as plain decimal text at 17 significant digits, which
round-trips float64 exactly. Curves go to CSV, configs and reports to JSON,
and every output file carries its config hash and seed as comment lines
(or JSON fields) for provenance.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

import numpy as np

from .design import DESIGN_TAGS, MeasurementKernel
from .errors import ValidationError
from .linalg import DEFAULT_TOL, RankTolerance
from .model import LabeledDataset, SourceModel, build_source_model
from .simulate import SweepResult

MODEL_MAGIC = "# compclass model v1"
KERNEL_MAGIC = "# compclass kernel v1"
SWEEP_MAGIC = "# compclass sweep v1"


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def config_hash(config) -> str:
    """Stable 16-hex-digit hash of a JSON-serializable config."""
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def _provenance_lines(hash_value: str | None, seed: int | None) -> list[str]:
    return [
        f"# config_hash {hash_value if hash_value is not None else '-'}",
        f"# seed {seed if seed is not None else '-'}",
    ]


def _matrix_lines(matrix: np.ndarray) -> list[str]:
    return [" ".join(fmt(v) for v in row) for row in np.atleast_2d(matrix)]


def write_model(
    path,
    model: SourceModel,
    hash_value: str | None = None,
    seed: int | None = None,
) -> None:
    lines = [MODEL_MAGIC]
    lines += _provenance_lines(hash_value, seed)
    lines.append(f"ambient_dim {model.ambient_dim}")
    lines.append(f"num_classes {model.num_classes}")
    lines.append(f"class_rank {model.class_rank}")
    lines.append("priors " + " ".join(fmt(p) for p in model.priors))
    for i, cov in enumerate(model.covariances, start=1):
        lines.append(f"covariance {i}")
        lines += _matrix_lines(cov)
    Path(path).write_text("\n".join(lines) + "\n")


class _LineReader:
    """Sequential reader that skips comments and reports line numbers."""

    def __init__(self, path):
        self.path = str(path)
        self.lines = Path(path).read_text().splitlines()
        self.pos = 0

    def next(self) -> tuple[int, str]:
        while self.pos < len(self.lines):
            self.pos += 1
            line = self.lines[self.pos - 1].strip()
            if line and not line.startswith("#"):
                return self.pos, line
        raise ValidationError(f"{self.path}: unexpected end of file")

    def fail(self, lineno: int, message: str):
        raise ValidationError(f"{self.path}:{lineno}: {message}")


def _read_keyword(reader: _LineReader, keyword: str) -> list[str]:
    lineno, line = reader.next()
    parts = line.split()
    if parts[0] != keyword:
        reader.fail(lineno, f"expected {keyword!r}, found {parts[0]!r}")
    return parts[1:]


def _read_matrix(reader: _LineReader, rows: int, cols: int) -> np.ndarray:
    matrix = np.empty((rows, cols))
    for r in range(rows):
        lineno, line = reader.next()
        values = line.split()
        if len(values) != cols:
            reader.fail(lineno, f"expected {cols} values, found {len(values)}")
        try:
            matrix[r] = [float(v) for v in values]
        except ValueError as exc:
            reader.fail(lineno, f"bad number: {exc}")
    return matrix


def read_model(path, tol: RankTolerance = DEFAULT_TOL) -> SourceModel:
    reader = _LineReader(path)
    ambient_dim = int(_read_keyword(reader, "ambient_dim")[0])
    num_classes = int(_read_keyword(reader, "num_classes")[0])
    _read_keyword(reader, "class_rank")
    prior_values = _read_keyword(reader, "priors")
    if len(prior_values) != num_classes:
        raise ValidationError(
            f"{reader.path}: expected {num_classes} priors, found {len(prior_values)}"
        )
    priors = np.array([float(p) for p in prior_values])
    covs = []
    for i in range(1, num_classes + 1):
        index = _read_keyword(reader, "covariance")
        if int(index[0]) != i:
            raise ValidationError(f"{reader.path}: covariance blocks out of order")
        covs.append(_read_matrix(reader, ambient_dim, ambient_dim))
    return build_source_model(priors, covs, tol)


def write_kernel(
    path,
    kernel: MeasurementKernel,
    hash_value: str | None = None,
) -> None:
    lines = [KERNEL_MAGIC]
    lines += _provenance_lines(hash_value, kernel.seed)
    lines.append(f"rows {kernel.num_measurements}")
    lines.append(f"cols {kernel.ambient_dim}")
    lines.append(f"design {kernel.design_tag}")
    lines += _matrix_lines(kernel.matrix)
    Path(path).write_text("\n".join(lines) + "\n")


def read_kernel(path) -> MeasurementKernel:
    reader = _LineReader(path)
    rows = int(_read_keyword(reader, "rows")[0])
    cols = int(_read_keyword(reader, "cols")[0])
    tag = _read_keyword(reader, "design")[0]
    if tag not in DESIGN_TAGS:
        raise ValidationError(f"{reader.path}: unknown design tag {tag!r}")
    seed = None
    for line in reader.lines:
        if line.startswith("# seed "):
            value = line.split()[2]
            seed = None if value == "-" else int(value)
            break
    matrix = _read_matrix(reader, rows, cols)
    return MeasurementKernel(matrix=matrix, design_tag=tag, seed=seed)


def read_dataset(path) -> LabeledDataset:
    """Read a label,f1,...,fN CSV; comment lines starting with # are skipped
    and parse failures name the offending physical line."""
    path = str(path)
    labels = []
    rows = []
    width = None
    with open(path, newline="") as handle:
        for lineno, record in enumerate(csv.reader(handle), start=1):
            if not record or record[0].lstrip().startswith("#"):
                continue
            if width is None:
                if record[0].strip() != "label":
                    raise ValidationError(
                        f"{path}:{lineno}: header must start with 'label'"
                    )
                width = len(record) - 1
                if width < 1:
                    raise ValidationError(f"{path}:{lineno}: no feature columns")
                continue
            if len(record) != width + 1:
                raise ValidationError(
                    f"{path}:{lineno}: expected {width + 1} columns, found "
                    f"{len(record)}"
                )
            try:
                labels.append(int(record[0]))
                rows.append([float(v) for v in record[1:]])
            except ValueError as exc:
                raise ValidationError(f"{path}:{lineno}: bad value: {exc}") from exc
    if width is None:
        raise ValidationError(f"{path}: missing header row")
    if not rows:
        raise ValidationError(f"{path}: no data rows")
    return LabeledDataset(labels=np.array(labels), vectors=np.array(rows))


def write_dataset(
    path,
    dataset: LabeledDataset,
    hash_value: str | None = None,
    seed: int | None = None,
) -> None:
    lines = _provenance_lines(hash_value, seed)
    lines.append("label," + ",".join(f"f{k}" for k in range(1, dataset.dim + 1)))
    for label, row in zip(dataset.labels, dataset.vectors):
        lines.append(f"{int(label)}," + ",".join(fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def write_sweep_csv(
    path,
    result: SweepResult,
    hash_value: str | None = None,
) -> None:
    lines = [SWEEP_MAGIC]
    lines += _provenance_lines(hash_value, result.seed)
    lines.append("axis,pe,se,bound,d")
    for p in result.points:
        lines.append(
            ",".join([fmt(p.axis_value), fmt(p.pe), fmt(p.se), fmt(p.bound), fmt(p.exponent)])
        )
    Path(path).write_text("\n".join(lines) + "\n")


def write_json_sidecar(path, payload) -> None:
    """Write the full config + seed record next to a result file."""
    Path(str(path) + ".json").write_text(
        json.dumps(payload, sort_keys=True, indent=2) + "\n"
    )
