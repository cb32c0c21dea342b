"""Monte Carlo structure-recovery experiments: configuration, replicate
runner and summary tables."""

import dataclasses
import hashlib
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .estimator import sample_covariance, transformed_covariance
from .glasso import DEFAULT_ZERO_TOL, lambda_max, regularization_path
from .metrics import oracle_scan
from .synthetic import GeneratorConfig, TransformSpec, make_rng, npn_sample, synthetic_problem

log = logging.getLogger(__name__)

METHODS = ("nonparanormal", "gaussian")


@dataclass(frozen=True)
class LambdaGrid:
    """Penalty grid. Unset bounds are taken from the covariance being fitted:
    the upper bound is its largest off-diagonal magnitude and the lower bound
    ``lower_ratio`` times that."""

    min: float = None
    max: float = None
    count: int = 50
    scale: str = "log"
    lower_ratio: float = 0.01

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("grid count must be at least 1")
        if self.scale not in ("linear", "log"):
            raise ValueError(f"unknown grid scale {self.scale!r}")

    def values(self, S=None):
        hi = self.max
        if hi is None:
            if S is None:
                raise ValueError("grid upper bound unset and no covariance given")
            hi = lambda_max(S)
        lo = self.min if self.min is not None else self.lower_ratio * hi
        if self.count == 1:
            return np.array([hi])
        if not hi > lo:
            raise ValueError(f"grid bounds must satisfy max > min, got [{lo}, {hi}]")
        if self.scale == "log":
            if lo <= 0:
                raise ValueError("log-spaced grid needs a positive lower bound")
            return np.geomspace(hi, lo, self.count)
        return np.linspace(hi, lo, self.count)


REAL_DATA_GRID = LambdaGrid(min=0.16, max=1.2, count=50, scale="linear")


@dataclass(frozen=True)
class ExperimentConfig:
    p: int = 40
    n_list: tuple = (1000,)
    transform: TransformSpec = TransformSpec()
    repetitions: int = 100
    grid: LambdaGrid = LambdaGrid()
    seed: int = 0
    method: str = "both"
    output_dir: str = "out"
    s: float = 0.125
    max_degree: int = 4
    mu0: float = 1.5
    zero_tol: float = DEFAULT_ZERO_TOL

    def __post_init__(self):
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")
        if not self.n_list or min(self.n_list) < 2:
            raise ValueError("every sample size must be at least 2")
        if self.method not in METHODS + ("both",):
            raise ValueError(f"unknown method {self.method!r}")

    @property
    def methods(self):
        return METHODS if self.method == "both" else (self.method,)

    def generator(self):
        return GeneratorConfig(p=self.p, s=self.s, max_degree=self.max_degree,
                               mu0=self.mu0, seed=self.seed)

    def to_dict(self):
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if isinstance(d.get("transform"), dict):
            d["transform"] = TransformSpec(**d["transform"])
        if isinstance(d.get("grid"), dict):
            d["grid"] = LambdaGrid(**d["grid"])
        if "n_list" in d:
            d["n_list"] = tuple(d["n_list"])
        return cls(**d)

    @classmethod
    def from_json(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def config_hash(self):
        """Digest of everything that affects results (not where they are written)."""
        d = self.to_dict()
        d.pop("output_dir")
        blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def method_covariance(data, method):
    if method == "nonparanormal":
        return transformed_covariance(data)
    if method == "gaussian":
        return sample_covariance(data)
    raise ValueError(f"unknown method {method!r}")


def fit_path(data, method, grid, **solver):
    """Covariance for ``method`` and the warm-started path over ``grid``."""
    S = method_covariance(data, method)
    return regularization_path(S, grid.values(S), **solver)


@dataclass(frozen=True)
class ReplicateResult:
    n: int
    replicate: int
    entropy: tuple
    oracle: dict = field(default_factory=dict)
    seconds: dict = field(default_factory=dict)


def run_replicate(config, n, replicate):
    """One synthetic draw at sample size ``n`` scored by every configured method.

    The replicate owns a Philox stream keyed by ``(seed, n, replicate)``;
    each replicate draws its own graph.
    """
    entropy = (config.seed, n, replicate)
    rng = make_rng(*entropy)
    problem = synthetic_problem(config.generator(), rng)
    data = npn_sample(n, problem.mu0, problem.sigma0, config.transform, rng)
    oracle, seconds = {}, {}
    for method in config.methods:
        start = time.perf_counter()
        path = fit_path(data, method, config.grid)
        oracle[method] = oracle_scan(path, problem.graph, config.zero_tol)
        seconds[method] = time.perf_counter() - start
    return ReplicateResult(n=n, replicate=replicate, entropy=entropy,
                           oracle=oracle, seconds=seconds)


def _run_one(args):
    config, n, rep = args
    try:
        return run_replicate(config, n, rep)
    except Exception as exc:  # counted and reported, never averaged over
        return (n, rep, f"{type(exc).__name__}: {exc}")


@dataclass
class RunRecord:
    config_hash: str
    results: list
    failures: list

    def seeds(self):
        return [list(r.entropy) for r in self.results]


def run_benchmark(config, workers=1):
    """All replicates for every sample size, in a deterministic order."""
    jobs = [(config, n, rep) for n in config.n_list for rep in range(config.repetitions)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_one, jobs))
    else:
        outcomes = [_run_one(job) for job in jobs]
    results, failures = [], []
    for out in outcomes:
        if isinstance(out, ReplicateResult):
            results.append(out)
        else:
            n, rep, msg = out
            log.warning("replicate n=%d rep=%d skipped: %s", n, rep, msg)
            failures.append({"n": n, "replicate": rep, "error": msg})
    return RunRecord(config_hash=config.config_hash(), results=results, failures=failures)


def _mean_sd(values):
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        return float("nan"), float("nan")
    sd = float(values.std(ddof=1)) if values.size > 1 else 0.0
    return float(values.mean()), sd


def replicate_rows(record, methods):
    header = ["n", "replicate", "method", "lambda_star", "fpe", "fne", "score"]
    rows = []
    for r in record.results:
        for m in methods:
            o = r.oracle[m]
            rows.append([r.n, r.replicate, m, o.lambda_star, o.fp, o.fn, o.score])
    return header, rows


def summary_rows(record, methods, n_list):
    """Rows per ``n``; per method the mean and sd of FPE and FNE."""
    header = ["n", "reps"]
    for m in methods:
        header += [f"{m}_FPE", f"{m}_sd_FPE", f"{m}_FNE", f"{m}_sd_FNE"]
    rows = []
    for n in n_list:
        subset = [r for r in record.results if r.n == n]
        row = [n, len(subset)]
        for m in methods:
            row += [*_mean_sd([r.oracle[m].fp for r in subset]),
                    *_mean_sd([r.oracle[m].fn for r in subset])]
        rows.append(row)
    return header, rows


def mean_scores(record, method, n=None):
    scores = [r.oracle[method].score for r in record.results if n is None or r.n == n]
    return float(np.mean(scores))
