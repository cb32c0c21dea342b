"""Command-line interface: ``nonparanormal <command> [options]``."""

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .estimator import DataMatrix, DegenerateColumnError, fit_transforms
from .experiments import (
    REAL_DATA_GRID,
    ExperimentConfig,
    LambdaGrid,
    fit_path,
    replicate_rows,
    run_benchmark,
    summary_rows,
)
from .glasso import SingularCovarianceError, edge_set
from .io import (
    DataParseError,
    read_data_csv,
    read_edges_tsv,
    write_data_csv,
    write_edges_tsv,
    write_json,
    write_matrix_csv,
    write_tsv,
)
from .metrics import DegenerateTruthError, oracle_scan, path_counts, roc_point
from .synthetic import TransformSpec, make_rng, npn_sample, synthetic_problem

log = logging.getLogger("nonparanormal")


def _add_common(p, synthetic=True):
    p.add_argument("--config", help="JSON file mirroring ExperimentConfig")
    p.add_argument("--seed", type=int)
    p.add_argument("--output-dir", "-o")
    p.add_argument("--method", choices=["nonparanormal", "gaussian", "both"])
    p.add_argument("--lambda-min", type=float)
    p.add_argument("--lambda-max", type=float)
    p.add_argument("--lambda-count", type=int)
    p.add_argument("--lambda-scale", choices=["linear", "log"])
    p.add_argument("--zero-tol", type=float)
    if synthetic:
        p.add_argument("--p", type=int, dest="dim")
        p.add_argument("--n", type=int, nargs="+", dest="n_list")
        p.add_argument("--reps", type=int)
        p.add_argument("--transform", choices=["identity", "gaussian_cdf", "power"])
        p.add_argument("--s", type=float)


def _config(args, default_grid=None):
    """Config file first, command-line flags override."""
    config = ExperimentConfig.from_json(args.config) if args.config else ExperimentConfig()
    d = config.to_dict()
    grid = dict(d["grid"])
    if default_grid is not None and not args.config:
        grid.update(default_grid.__dict__)
    overrides = {
        "seed": args.seed, "output_dir": args.output_dir, "method": args.method,
        "zero_tol": args.zero_tol, "p": getattr(args, "dim", None),
        "n_list": getattr(args, "n_list", None), "repetitions": getattr(args, "reps", None),
        "s": getattr(args, "s", None),
    }
    d.update({k: v for k, v in overrides.items() if v is not None})
    if getattr(args, "transform", None):
        d["transform"] = dict(d["transform"], kind=args.transform)
    for key, flag in (("min", "lambda_min"), ("max", "lambda_max"),
                      ("count", "lambda_count"), ("scale", "lambda_scale")):
        value = getattr(args, flag)
        if value is not None:
            grid[key] = value
    d["grid"] = grid
    return ExperimentConfig.from_dict(d)


def _manifest(out, command, config, **extra):
    write_json(out / "manifest.json", {
        "command": command,
        "version": __version__,
        "config": config.to_dict(),
        "config_hash": config.config_hash(),
        **extra,
    })


def cmd_generate(args):
    config = _config(args)
    out = Path(config.output_dir)
    n = config.n_list[0]
    rng = make_rng(config.seed)
    problem = synthetic_problem(config.generator(), rng)
    data = npn_sample(n, problem.mu0, problem.sigma0, config.transform, rng)
    write_edges_tsv(out / "graph.tsv", problem.graph)
    write_matrix_csv(out / "omega0.csv", problem.omega0)
    write_data_csv(out / "data.csv", data)
    _manifest(out, "generate", config, seeds=[config.seed], n=n,
              removed_edges=[[j + 1, k + 1] for j, k in problem.removed])
    log.info("wrote %d x %d data and %d true edges to %s", n, config.p, len(problem.graph), out)


def _fit_grid(args, config):
    if args.lam is not None:
        return LambdaGrid(min=args.lam, max=args.lam, count=1)
    return config.grid


def cmd_fit(args):
    config = _config(args, default_grid=REAL_DATA_GRID)
    out = Path(config.output_dir)
    data = read_data_csv(args.data)
    grid = _fit_grid(args, config)
    for method in config.methods:
        try:
            path = fit_path(data, method, grid)
        except SingularCovarianceError as exc:
            raise SystemExit(f"error: {exc}. A zero penalty needs n > p; "
                             "choose --lambda-min > 0") from exc
        rows = []
        for idx, (lam, est) in enumerate(zip(path.lambdas, path.estimates)):
            graph = edge_set(est, config.zero_tol)
            write_matrix_csv(out / f"{method}_omega_{idx:03d}.csv", est.omega)
            write_edges_tsv(out / f"{method}_edges_{idx:03d}.tsv", graph)
            rows.append([idx, lam, len(graph), est.iterations, est.converged,
                         est.max_kkt_violation])
        write_tsv(out / f"{method}_path.tsv",
                  ["index", "lambda", "edges", "sweeps", "converged", "max_kkt"], rows)
    _manifest(out, "fit", config, data=str(args.data), n=data.n, p=data.p)


def cmd_benchmark(args):
    config = _config(args)
    out = Path(config.output_dir)
    record = run_benchmark(config, workers=args.workers)
    header, rows = replicate_rows(record, config.methods)
    write_tsv(out / "replicates.tsv", header, rows)
    header, rows = summary_rows(record, config.methods, config.n_list)
    write_tsv(out / "summary.tsv", header, rows)
    if args.timings:
        write_tsv(out / "timings.tsv", ["n", "replicate", "method", "seconds"],
                  [[r.n, r.replicate, m, r.seconds[m]]
                   for r in record.results for m in config.methods])
    _manifest(out, "benchmark", config, seeds=record.seeds(), failures=record.failures,
              failed_replicates=len(record.failures))
    for row in rows:
        log.info("\t".join(str(v) for v in row))


def cmd_roc(args):
    config = _config(args)
    out = Path(config.output_dir)
    if args.data:
        data = read_data_csv(args.data)
        if not args.truth:
            raise SystemExit("error: --truth is required with --data")
        truth = read_edges_tsv(args.truth, data.p)
    else:
        rng = make_rng(config.seed)
        problem = synthetic_problem(config.generator(), rng)
        data = npn_sample(config.n_list[0], problem.mu0, problem.sigma0, config.transform, rng)
        truth = problem.graph
    results = {}
    for method in config.methods:
        path = fit_path(data, method, config.grid)
        counts = path_counts(path, truth, config.zero_tol)
        try:
            points = [roc_point(c, truth) for c in counts]
        except DegenerateTruthError as exc:
            raise SystemExit(f"error: {exc}") from exc
        write_tsv(out / f"roc_{method}.tsv", ["sensitivity", "specificity"], points)
        write_tsv(out / f"roc_{method}_levels.tsv", ["lambda", "fp", "fn"],
                  [[c.lam, c.fp, c.fn] for c in counts])
        best = oracle_scan(path, truth, config.zero_tol)
        results[method] = {"lambda_star": best.lambda_star, "score": best.score}
    _manifest(out, "roc", config, oracle=results)


def _select_columns(data, spec):
    if not spec:
        return list(range(data.p))
    chosen = []
    for token in spec.split(","):
        token = token.strip()
        if token in data.names:
            chosen.append(data.names.index(token))
        elif token.isdigit() and 1 <= int(token) <= data.p:
            chosen.append(int(token) - 1)
        else:
            raise SystemExit(f"error: unknown column {token!r}")
    return chosen


def cmd_transform_dump(args):
    data = read_data_csv(args.data)
    columns = _select_columns(data, args.columns)
    if args.grid_size < 2:
        raise SystemExit("error: --grid-size must be at least 2")
    transforms = fit_transforms(data)
    rows = []
    for j in columns:
        column = data.values[:, j]
        grid = np.linspace(column.min(), column.max(), args.grid_size)
        for x, fx in zip(grid, transforms[j](grid)):
            rows.append([data.names[j], x, fx])
    write_tsv(args.output, ["column", "x", "f_tilde"], rows)


def cmd_ingest(args):
    data = read_data_csv(args.input)
    values = data.values.copy()
    if args.log:
        bad = np.argwhere(values <= 0)
        if bad.size:
            i, j = bad[0]
            raise SystemExit(f"error: log transform needs positive values; "
                             f"row {i + 1}, column {data.names[j]!r} is {values[i, j]!r}")
        values = np.log(values)
    if args.standardize:
        for j in range(values.shape[1]):
            if np.ptp(values[:, j]) == 0:
                raise DegenerateColumnError(data.names[j])
        mu = values.mean(axis=0)
        values = values - mu
        values = values / np.sqrt(np.mean(values ** 2, axis=0))
    write_data_csv(args.output, DataMatrix(values, names=data.names))


def build_parser():
    parser = argparse.ArgumentParser(
        prog="nonparanormal",
        description="Sparse graph estimation for non-Gaussian data via Winsorized "
                    "normal-score transforms and the graphical lasso.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="synthetic graph, precision matrix and data")
    _add_common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("fit", help="regularization path for a data file")
    _add_common(p, synthetic=False)
    p.add_argument("--data", required=True)
    p.add_argument("--lambda", type=float, dest="lam", help="single penalty level")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("benchmark", help="Monte Carlo oracle-score tables")
    _add_common(p)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timings", action="store_true", help="also write wall-clock times")
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("roc", help="ROC points along the path")
    _add_common(p)
    p.add_argument("--data")
    p.add_argument("--truth", help="edge list TSV (vertices numbered from 1)")
    p.set_defaults(func=cmd_roc)

    p = sub.add_parser("transform-dump", help="estimated marginal transforms on a grid")
    p.add_argument("--data", required=True)
    p.add_argument("--columns", help="comma-separated names or 1-based indices")
    p.add_argument("--grid-size", type=int, default=100)
    p.add_argument("--output", "-o", required=True)
    p.set_defaults(func=cmd_transform_dump)

    p = sub.add_parser("ingest", help="log-transform and standardize a CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--output", "-o", required=True)
    p.add_argument("--log", action="store_true")
    p.add_argument("--standardize", action="store_true")
    p.set_defaults(func=cmd_ingest)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        args.func(args)
    except (DataParseError, DegenerateColumnError, FileNotFoundError) as exc:
        raise SystemExit(f"error: {exc}") from exc
    return 0


if __name__ == "__main__":
    sys.exit(main())
