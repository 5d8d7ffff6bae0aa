"""Command-line entry points.

Subcommands: synth-gen, design, sweep, fit, solve-ip. Exit codes: 0 on
success, 2 on input or validation errors, 3 when a requested design is
infeasible.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import analysis, io, simulate
from .design import (
    MeasurementKernel,
    prop3_kernel,
    prop4_kernel,
    prop5_kernel,
    random_kernel,
    solve_measurement_ip,
)
from .errors import DesignInfeasibleError, ValidationError
from .linalg import DEFAULT_TOL, EigenvalueSpec
from .model import SourceModel, fit_ml, geometry_summary, stratified_split, synthetic_model


def _cfg_get(cfg: dict, key: str, context: str):
    if key not in cfg:
        raise ValidationError(f"{context}: missing required key {key!r}")
    return cfg[key]


def _load_json(path) -> dict:
    try:
        with open(path) as handle:
            return json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from exc


def _eig_spec_from(cfg: dict | None) -> EigenvalueSpec:
    if cfg is None:
        return EigenvalueSpec()
    values = cfg.get("values")
    return EigenvalueSpec(
        kind=cfg.get("kind", "uniform"),
        low=cfg.get("low", 0.5),
        high=cfg.get("high", 1.5),
        values=tuple(values) if values is not None else None,
    )


def _synthetic_from(cfg: dict, seed_override: int | None) -> SourceModel:
    seed = seed_override if seed_override is not None else _cfg_get(cfg, "seed", "synthetic model")
    rng = np.random.default_rng(seed)
    return synthetic_model(
        ambient_dim=_cfg_get(cfg, "ambient_dim", "synthetic model"),
        num_classes=_cfg_get(cfg, "num_classes", "synthetic model"),
        class_rank=_cfg_get(cfg, "class_rank", "synthetic model"),
        rng=rng,
        eig_spec=_eig_spec_from(cfg.get("eigenvalues")),
        priors=cfg.get("priors"),
    )


def _model_from_config(cfg: dict) -> SourceModel:
    sources = [k for k in ("synthetic", "path", "dataset") if k in cfg]
    if len(sources) != 1:
        raise ValidationError(
            "model config must have exactly one of 'synthetic', 'path', 'dataset'"
        )
    if "synthetic" in cfg:
        return _synthetic_from(cfg["synthetic"], None)
    if "path" in cfg:
        return io.read_model(cfg["path"])
    ds_cfg = cfg["dataset"]
    dataset = io.read_dataset(_cfg_get(ds_cfg, "path", "dataset model"))
    train, _ = stratified_split(
        dataset,
        _cfg_get(ds_cfg, "split_fraction", "dataset model"),
        _cfg_get(ds_cfg, "split_seed", "dataset model"),
    )
    return fit_ml(
        train,
        _cfg_get(ds_cfg, "num_classes", "dataset model"),
        dataset.dim,
        ridge=ds_cfg.get("ridge", 0.0),
    )


def _kernel_from_spec(
    model: SourceModel, kind: str, m: int | None, d0: float | None, seed: int
) -> MeasurementKernel:
    if kind == "random":
        if m is None:
            raise ValidationError("random design needs a measurement count (--m)")
        return random_kernel(m, model.ambient_dim, seed)
    if kind == "prop3":
        return prop3_kernel(model, seed)
    if kind == "prop4":
        if d0 is None:
            raise ValidationError("prop4 design needs a target exponent (--d0)")
        return prop4_kernel(model, d0, seed)
    if kind == "prop5":
        if m is None:
            raise ValidationError("prop5 design needs a measurement count (--m)")
        return prop5_kernel(model, m, seed)
    raise ValidationError(f"unknown design kind {kind!r}")


def cmd_synth_gen(args) -> int:
    cfg = _load_json(args.config)
    model = _synthetic_from(cfg, args.seed)
    seed = args.seed if args.seed is not None else cfg.get("seed")
    io.write_model(args.out, model, hash_value=io.config_hash(cfg), seed=seed)
    summary = geometry_summary(model)
    print(
        json.dumps(
            {
                "out": args.out,
                "ambient_dim": model.ambient_dim,
                "num_classes": model.num_classes,
                "class_rank": model.class_rank,
                "rank_gaps": summary.rank_gaps.tolist(),
            },
            sort_keys=True,
        )
    )
    return 0


def cmd_design(args) -> int:
    model = io.read_model(args.model)
    kernel = _kernel_from_spec(model, args.design, args.m, args.d0, args.seed)
    spec = {
        "design": args.design,
        "m": args.m,
        "d0": args.d0,
        "seed": args.seed,
        "model": args.model,
    }
    if args.out:
        io.write_kernel(args.out, kernel, hash_value=io.config_hash(spec))
    report = analysis.expansion_constant(model, kernel)
    pair_exponents = [
        {
            "i": i + 1,
            "j": j + 1,
            "d": analysis.pairwise_exponent(
                kernel, model.covariances[i], model.covariances[j]
            ),
        }
        for i in range(model.num_classes)
        for j in range(i + 1, model.num_classes)
    ]
    print(
        json.dumps(
            {
                "design": kernel.design_tag,
                "m": kernel.num_measurements,
                "pairwise_exponents": pair_exponents,
                "d": report.d,
                "g": report.g,
                "verdict": analysis.check_corollary1(model, kernel),
                "out": args.out,
            },
            sort_keys=True,
        )
    )
    return 0


def cmd_sweep(args) -> int:
    cfg = _load_json(args.config)
    if args.trials is not None:
        cfg["trials"] = args.trials
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.noise_db is not None:
        cfg["noise_db"] = args.noise_db
    out = args.out if args.out is not None else cfg.get("out")
    if out is None:
        raise ValidationError("no output path: pass --out or set 'out' in the config")

    model = _model_from_config(_cfg_get(cfg, "model", "sweep config"))
    design_cfg = _cfg_get(cfg, "design", "sweep config")
    trials = int(_cfg_get(cfg, "trials", "sweep config"))
    seed = int(_cfg_get(cfg, "seed", "sweep config"))
    axis = cfg.get("axis", "noise_db")
    noise_db = _cfg_get(cfg, "noise_db", "sweep config")

    if axis == "noise_db":
        if not isinstance(noise_db, (list, tuple)) or not noise_db:
            raise ValidationError("noise_db must be a nonempty list of dB levels")
        if "path" in design_cfg:
            kernel = io.read_kernel(design_cfg["path"])
        else:
            kernel = _kernel_from_spec(
                model,
                _cfg_get(design_cfg, "kind", "design config"),
                design_cfg.get("m"),
                design_cfg.get("d0"),
                design_cfg.get("seed", seed),
            )
        result = simulate.sweep_noise(model, kernel, noise_db, trials, seed)
    elif axis == "measurements":
        m_list = _cfg_get(cfg, "m_list", "sweep config")
        if not isinstance(m_list, (list, tuple)) or not m_list:
            raise ValidationError("m_list must be a nonempty list of counts")
        if isinstance(noise_db, (list, tuple)):
            raise ValidationError("measurement sweeps need a scalar noise_db")
        result = simulate.sweep_measurements(
            model,
            _cfg_get(design_cfg, "kind", "design config"),
            m_list,
            simulate.db_to_sigma2(float(noise_db)),
            trials,
            seed,
        )
    else:
        raise ValidationError(f"unknown sweep axis {axis!r}")

    hash_value = io.config_hash(cfg)
    io.write_sweep_csv(out, result, hash_value=hash_value)
    io.write_json_sidecar(out, {"config": cfg, "config_hash": hash_value, "seed": seed})
    print(json.dumps({"out": out, "points": len(result.points)}, sort_keys=True))
    return 0


def cmd_fit(args) -> int:
    dataset = io.read_dataset(args.dataset)
    train, test = stratified_split(dataset, args.split, args.seed)
    model = fit_ml(train, args.l, dataset.dim, ridge=args.ridge)
    spec = {
        "dataset": args.dataset,
        "num_classes": args.l,
        "split_fraction": args.split,
        "seed": args.seed,
        "ridge": args.ridge,
    }
    hash_value = io.config_hash(spec)
    io.write_model(args.out, model, hash_value=hash_value, seed=args.seed)
    test_out = args.test_out if args.test_out else args.out + ".test.csv"
    io.write_dataset(test_out, test, hash_value=hash_value, seed=args.seed)
    print(
        json.dumps(
            {
                "out": args.out,
                "test_out": test_out,
                "train_samples": train.num_samples,
                "test_samples": test.num_samples,
                "class_rank": model.class_rank,
                "priors": model.priors.tolist(),
            },
            sort_keys=True,
        )
    )
    return 0


def cmd_solve_ip(args) -> int:
    allocation = solve_measurement_ip(args.l, args.n, args.r_sigma, args.d0)
    print(
        json.dumps(
            {
                "per_class_counts": list(allocation.per_class_counts),
                "total": allocation.total,
                "target_exponent": allocation.target_exponent,
            },
            sort_keys=True,
        )
    )
    return 0


def _parse_noise_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ValidationError(f"bad --noise-db list {text!r}: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="compclass",
        description="Compressive classification experiments for low-rank "
        "Gaussian sources",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth-gen", help="generate a synthetic source model")
    p.add_argument("--config", required=True, help="JSON model spec")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--out", required=True, help="model file to write")
    p.set_defaults(func=cmd_synth_gen)

    p = sub.add_parser("design", help="build a measurement kernel and report exponents")
    p.add_argument("model", help="model file")
    p.add_argument(
        "--design",
        required=True,
        choices=["random", "prop3", "prop4", "prop5"],
    )
    p.add_argument("--m", type=int, default=None, help="measurement count")
    p.add_argument("--d0", type=float, default=None, help="target decay exponent")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="kernel file to write")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("sweep", help="Monte Carlo sweep over noise or measurements")
    p.add_argument("--config", required=True, help="JSON experiment config")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument(
        "--noise-db",
        type=_parse_noise_list,
        default=None,
        help="comma-separated dB levels (use --noise-db=-10,-20,... )",
    )
    p.add_argument("--out", default=None, help="CSV output path")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fit", help="fit a model from labeled data with a train/test split")
    p.add_argument("dataset", help="CSV dataset (label,f1,...,fN)")
    p.add_argument("--l", type=int, required=True, help="number of classes")
    p.add_argument("--split", type=float, required=True, help="training fraction in (0,1)")
    p.add_argument("--seed", type=int, required=True, help="split seed")
    p.add_argument("--ridge", type=float, default=0.0, help="ridge added to fitted covariances")
    p.add_argument("--out", required=True, help="model file to write")
    p.add_argument("--test-out", default=None, help="held-out rows CSV (default: <out>.test.csv)")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("solve-ip", help="minimal measurement allocation for a target exponent")
    p.add_argument("--l", type=int, required=True, help="number of classes")
    p.add_argument("--n", type=int, required=True, help="ambient dimension")
    p.add_argument("--r-sigma", type=int, required=True, help="class rank")
    p.add_argument("--d0", type=float, required=True, help="target decay exponent")
    p.set_defaults(func=cmd_solve_ip)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DesignInfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
