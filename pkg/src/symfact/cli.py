"""Batch front end.

Loads a similarity matrix (or builds one from features), folds in the
Laplacian regularizer, runs the configured solver once per seed, and writes
per-seed traces, factors, labels, and an aggregate JSON report.

Exit codes: 0 success, 2 invalid configuration, 3 input parse failure,
4 numeric failure inside the solver.
"""

import argparse
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path

from .clustering import accuracy, assign_labels, nmi
from .exceptions import ConfigError, InputDataError, NumericError
from .graph import SIMILARITY_KINDS, build_similarity, regularized_target
from .io import (
    load_dense_matrix_csv,
    load_features_csv,
    load_matrix_market_symmetric,
    write_json,
    write_labels_csv,
    write_matrix_csv,
    write_trace_csv,
)
from .solver import (
    CONSTRAINT_KINDS,
    NONNEGATIVE,
    ROW_SPARSITY,
    UNCONSTRAINED,
    Constraint,
    SolverConfig,
    solve_columnwise,
    solve_pgd,
)
from .validation import check_symmetric

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PARSE = 3
EXIT_NUMERIC = 4

FORMATS = ("dense_csv", "features_csv", "matrix_market_symmetric")
ALGORITHMS = ("columnwise", "pgd")


@dataclass
class ExperimentConfig:
    """One batch run: input, target construction, solver, and outputs."""

    input: str
    out: str
    k: int
    format: str = "dense_csv"
    similarity: str = "inner_product"
    rbf_sigma: float | None = None
    lambda_reg: float = 0.0
    algorithm: str = "columnwise"
    constraint: str = UNCONSTRAINED
    sparsity_s: int | None = None
    mu: float | None = None
    mu_margin: float = 1.01
    max_iter: int = 1000
    rel_tol: float = 1e-8
    seed: int = 0
    repeats: int = 1
    nonneg_columns: bool = False
    timing: bool = False


def build_parser():
    p = argparse.ArgumentParser(
        prog="symfact",
        description="Factorize a similarity matrix as H H^T and report the clustering.",
    )
    p.add_argument("--config", metavar="FILE",
                   help="flat key=value file with the same keys as the flags; flags override it")
    p.add_argument("--input", help="path to the input data file")
    p.add_argument("--format", choices=FORMATS, help="input file format")
    p.add_argument("--similarity", choices=SIMILARITY_KINDS,
                   help="similarity kind for features input")
    p.add_argument("--rbf-sigma", type=float, help="bandwidth for the rbf similarity")
    p.add_argument("--lambda-reg", type=float, help="Laplacian regularization weight (>= 0)")
    p.add_argument("--k", type=int, help="number of clusters / factor columns")
    p.add_argument("--algorithm", choices=ALGORITHMS, help="solver to run")
    p.add_argument("--constraint", choices=CONSTRAINT_KINDS, help="feasible set (pgd)")
    p.add_argument("--sparsity-s", type=int, help="per-row nonzeros for row_sparsity")
    p.add_argument("--mu", type=float, help="splitting penalty; omit for the automatic bound")
    p.add_argument("--mu-margin", type=float, help="multiplier on the automatic penalty bound")
    p.add_argument("--max-iter", type=int, help="iteration / sweep budget")
    p.add_argument("--rel-tol", type=float, help="relative objective-change stopping tolerance")
    p.add_argument("--seed", type=int, help="base seed; repeats use seed, seed+1, ...")
    p.add_argument("--repeats", type=int, help="number of seeded runs")
    p.add_argument("--out", help="output directory")
    p.add_argument("--nonneg-columns", action="store_const", const=True, default=None,
                   help="clip columnwise updates at zero")
    p.add_argument("--timing", action="store_const", const=True, default=None,
                   help="fill the wall_ms trace column (breaks byte-identical reruns)")
    return p


def _cast_bool(value, key):
    if value in ("true", "1", "yes"):
        return True
    if value in ("false", "0", "no"):
        return False
    raise ConfigError(f"{key}: expected true/false, got {value!r}")


def load_config_file(path):
    """Flat ``key=value`` lines; blank lines and #-comments ignored."""
    values = {}
    try:
        fh = open(path, encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"config: cannot read {path}: {e.strerror}") from None
    with fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"config {path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            key = key.strip().replace("_", "-")
            if key not in _KEYS:
                raise ConfigError(f"config {path}:{lineno}: unknown key {key!r}")
            values[key] = value.strip()
    return values


def _cast(key, value):
    kind = _KEYS[key]
    if isinstance(value, str):
        if kind is bool:
            return _cast_bool(value, key)
        try:
            return kind(value)
        except ValueError:
            raise ConfigError(f"{key}: expected {kind.__name__}, got {value!r}") from None
    return value


# key -> type used when the value arrives as a config-file string
_KEYS = {
    "input": str, "format": str, "similarity": str, "rbf-sigma": float,
    "lambda-reg": float, "k": int, "algorithm": str, "constraint": str,
    "sparsity-s": int, "mu": float, "mu-margin": float, "max-iter": int,
    "rel-tol": float, "seed": int, "repeats": int, "out": str,
    "nonneg-columns": bool, "timing": bool,
}

_DEFAULTS = {
    "format": "dense_csv", "similarity": "inner_product", "lambda-reg": 0.0,
    "algorithm": "columnwise", "constraint": UNCONSTRAINED, "mu-margin": 1.01,
    "max-iter": 1000, "rel-tol": 1e-8, "seed": 0, "repeats": 1,
    "nonneg-columns": False, "timing": False,
}


def build_config(args):
    """Merge flags over config-file values over defaults and validate."""
    file_values = load_config_file(args.config) if args.config else {}
    merged = {}
    for key in _KEYS:
        flag_value = getattr(args, key.replace("-", "_"))
        if flag_value is not None:
            merged[key] = flag_value
        elif key in file_values:
            merged[key] = _cast(key, file_values[key])
        else:
            merged[key] = _DEFAULTS.get(key)
    for required in ("input", "k", "out"):
        if merged[required] is None:
            raise ConfigError(f"{required}: required (flag --{required} or config key)")
    cfg = ExperimentConfig(
        input=merged["input"], out=merged["out"], k=merged["k"],
        format=merged["format"], similarity=merged["similarity"],
        rbf_sigma=merged["rbf-sigma"], lambda_reg=merged["lambda-reg"],
        algorithm=merged["algorithm"], constraint=merged["constraint"],
        sparsity_s=merged["sparsity-s"], mu=merged["mu"],
        mu_margin=merged["mu-margin"], max_iter=merged["max-iter"],
        rel_tol=merged["rel-tol"], seed=merged["seed"], repeats=merged["repeats"],
        nonneg_columns=merged["nonneg-columns"], timing=merged["timing"],
    )
    _validate(cfg)
    return cfg


def _validate(cfg):
    if cfg.format not in FORMATS:
        raise ConfigError(f"format: must be one of {FORMATS}, got {cfg.format!r}")
    if cfg.similarity not in SIMILARITY_KINDS:
        raise ConfigError(f"similarity: must be one of {SIMILARITY_KINDS}, got {cfg.similarity!r}")
    if cfg.format == "features_csv" and cfg.similarity == "rbf":
        if cfg.rbf_sigma is None or not cfg.rbf_sigma > 0.0:
            raise ConfigError(f"rbf-sigma: must be > 0 for rbf similarity, got {cfg.rbf_sigma}")
    if not cfg.lambda_reg >= 0.0:
        raise ConfigError(f"lambda-reg: must be >= 0, got {cfg.lambda_reg}")
    if cfg.k < 1:
        raise ConfigError(f"k: must be >= 1, got {cfg.k}")
    if cfg.algorithm not in ALGORITHMS:
        raise ConfigError(f"algorithm: must be one of {ALGORITHMS}, got {cfg.algorithm!r}")
    if cfg.constraint not in CONSTRAINT_KINDS:
        raise ConfigError(f"constraint: must be one of {CONSTRAINT_KINDS}, got {cfg.constraint!r}")
    if cfg.algorithm == "columnwise" and cfg.constraint not in (UNCONSTRAINED, NONNEGATIVE):
        raise ConfigError(
            f"constraint: columnwise supports only unconstrained or nonnegative, got {cfg.constraint!r}"
        )
    if cfg.constraint == ROW_SPARSITY:
        if cfg.sparsity_s is None:
            raise ConfigError("sparsity-s: required for the row_sparsity constraint")
        if not 1 <= cfg.sparsity_s <= cfg.k:
            raise ConfigError(f"sparsity-s: must satisfy 1 <= s <= k={cfg.k}, got {cfg.sparsity_s}")
    elif cfg.sparsity_s is not None:
        raise ConfigError("sparsity-s: only valid with the row_sparsity constraint")
    if cfg.mu is not None and not cfg.mu > 0.0:
        raise ConfigError(f"mu: must be > 0, got {cfg.mu}")
    if not cfg.mu_margin > 1.0:
        raise ConfigError(f"mu-margin: must be > 1, got {cfg.mu_margin}")
    if cfg.max_iter < 1:
        raise ConfigError(f"max-iter: must be >= 1, got {cfg.max_iter}")
    if not cfg.rel_tol > 0.0:
        raise ConfigError(f"rel-tol: must be > 0, got {cfg.rel_tol}")
    if cfg.repeats < 1:
        raise ConfigError(f"repeats: must be >= 1, got {cfg.repeats}")


def _load_input(cfg):
    if cfg.format == "dense_csv":
        A = load_dense_matrix_csv(cfg.input)
        try:
            A = check_symmetric(A, "similarity matrix")
        except ValueError as e:
            raise InputDataError(str(e), path=cfg.input) from None
        return A, None
    if cfg.format == "features_csv":
        X, truth = load_features_csv(cfg.input)
        sigma = cfg.rbf_sigma if cfg.similarity == "rbf" else None
        return build_similarity(X, cfg.similarity, sigma=sigma), truth
    return load_matrix_market_symmetric(cfg.input), None


def run_experiment(cfg):
    """Execute every seeded repeat and write the output files."""
    A, truth = _load_input(cfg)
    if cfg.k > A.shape[0]:
        raise ConfigError(f"k: must be <= matrix size {A.shape[0]}, got {cfg.k}")
    target = regularized_target(A, cfg.lambda_reg)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    runs = []
    for r in range(cfg.repeats):
        seed = cfg.seed + r
        solver_cfg = SolverConfig(
            mu_penalty=cfg.mu,
            mu_margin=cfg.mu_margin,
            max_iter=cfg.max_iter,
            rel_tol=cfg.rel_tol,
            seed=seed,
            nonneg_columns=cfg.nonneg_columns or cfg.constraint == NONNEGATIVE,
        )
        if cfg.algorithm == "columnwise":
            pair, trace = solve_columnwise(target.M, cfg.k, solver_cfg)
            H = pair.H
        else:
            constraint = Constraint(
                cfg.constraint,
                s=cfg.sparsity_s if cfg.constraint == ROW_SPARSITY else None,
            )
            H, trace = solve_pgd(target.M, cfg.k, constraint, solver_cfg)
        labels = assign_labels(H)
        write_trace_csv(out / f"trace_{seed}.csv", trace, timing=cfg.timing)
        write_matrix_csv(out / f"H_{seed}.csv", H)
        write_labels_csv(out / f"labels_{seed}.csv", labels)
        entry = {
            "seed": seed,
            "final_objective": trace.objective[-1],
            "final_rel_error": trace.rel_error[-1],
            "iters": trace.n_iter,
            "converged": trace.converged,
            "mu_used": trace.mu_penalty,
            "lambda_reg": cfg.lambda_reg,
        }
        if truth is not None:
            ac, _ = accuracy(labels, truth)
            entry["ac"] = ac
            entry["nmi"] = nmi(labels, truth)
        runs.append(entry)
    report = {
        "algorithm": cfg.algorithm,
        "constraint": cfg.constraint,
        "k": cfg.k,
        "lambda_reg": cfg.lambda_reg,
        "repeats": cfg.repeats,
        "runs": runs,
    }
    write_json(out / "report.json", report)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        # Divergence surfaces as a NumericError with its own exit code; the
        # numpy overflow warnings leading up to it would only clutter stderr.
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            cfg = build_config(args)
            run_experiment(cfg)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except InputDataError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except NumericError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
