"""Kernel-approximation experiments: Gram matrices, errors, confidence intervals, timings."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from quadfeat._random import as_generator, derive_seed
from quadfeat.baselines import BASELINE_KINDS, build_baseline_map
from quadfeat.data import SYNTHETIC, Dataset, load_dataset
from quadfeat.kernels import KERNEL_NAMES, Kernel, KernelDomainError, gaussian
from quadfeat.quadrature import build_feature_map, feature_dim

SR_METHODS = {"sr33-butterfly": "butterfly", "sr33-haar": "haar"}
METHODS = tuple(SR_METHODS) + BASELINE_KINDS
SCHEMA_VERSION = 1


class ConfigError(ValueError):
    pass


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("QUADFEAT_THREADS", "1")))
    except ValueError:
        return 1


def sr_blocks_for(D: int, d: int) -> int:
    """n with ``2n(d+1)+1 == D``; ValueError when D is not of that form."""
    n, rem = divmod(D - 1, 2 * (d + 1))
    if rem or n < 1:
        raise ValueError(f"D={D} is not of the form 2n(d+1)+1 for d={d}")
    return n


def make_mapper(method: str, kernel: Kernel, d: int, D: int, seed: int):
    """Feature map of output dimension D for any method name in ``METHODS``."""
    if method in SR_METHODS:
        return build_feature_map(kernel, d, sr_blocks_for(D, d), seed, SR_METHODS[method])
    if method in BASELINE_KINDS:
        return build_baseline_map(method, kernel, d, D, seed)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


# ---------------------------------------------------------------------------
# Gram matrices and the error metric
# ---------------------------------------------------------------------------


def gram_exact(k: Kernel, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError(f"need at least two rows, got shape {X.shape}")
    if k.name == "gaussian":
        sq = (X * X).sum(axis=1)
        dist = np.maximum(sq[:, None] + sq[None, :] - 2 * X @ X.T, 0.0)
        np.fill_diagonal(dist, 0.0)
        return np.exp(-k.gamma * dist)
    norms = np.linalg.norm(X, axis=1)
    if np.any(norms == 0):
        raise KernelDomainError("arc-cosine Gram matrix with a zero row")
    cos = np.clip((X @ X.T) / np.outer(norms, norms), -1.0, 1.0)
    np.fill_diagonal(cos, 1.0)
    theta = np.arccos(cos)
    if k.name == "arccos0":
        return 1.0 - theta / np.pi
    return np.outer(norms, norms) / np.pi * (np.sin(theta) + (np.pi - theta) * cos)


def relative_frobenius_error(K, K_hat) -> float:
    K = np.asarray(K, dtype=float)
    K_hat = np.asarray(K_hat, dtype=float)
    if K.shape != K_hat.shape:
        raise ValueError(f"shape mismatch {K.shape} vs {K_hat.shape}")
    ref = np.linalg.norm(K)
    if ref == 0:
        raise ValueError("exact kernel matrix has zero norm")
    return float(np.linalg.norm(K - K_hat) / ref)


# ---------------------------------------------------------------------------
# Experiment configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentConfig:
    kernels: tuple = ("gaussian",)
    methods: tuple = ("sr33-butterfly", "g")
    n_values: tuple = (1, 2, 3, 4, 5)
    subset_size: int = 200
    runs: int = 10
    seed: int = 0
    gamma: float | str = "default"
    dataset: dict | None = None

    def __post_init__(self):
        def bad(name, why):
            raise ConfigError(f"{name}: {why}")

        if not self.kernels or any(k not in KERNEL_NAMES for k in self.kernels):
            bad("kernels", f"expected a non-empty list drawn from {KERNEL_NAMES}")
        if not self.methods or any(m not in METHODS for m in self.methods):
            bad("methods", f"expected a non-empty list drawn from {METHODS}")
        if not self.n_values or any(not isinstance(n, int) or isinstance(n, bool) or n < 1 for n in self.n_values):
            bad("n_values", "expected a non-empty list of positive integers")
        if not isinstance(self.subset_size, int) or self.subset_size < 2:
            bad("subset_size", "expected an integer >= 2")
        if not isinstance(self.runs, int) or self.runs < 1:
            bad("runs", "expected an integer >= 1")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or self.seed < 0:
            bad("seed", "expected a nonnegative integer")
        if self.gamma != "default" and not (
            isinstance(self.gamma, (int, float)) and not isinstance(self.gamma, bool) and self.gamma > 0
        ):
            bad("gamma", "expected \"default\" or a positive number")
        if self.dataset is not None and not isinstance(self.dataset, dict):
            bad("dataset", "expected an object")

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config: expected a JSON object")
        known = {f for f in cls.__dataclass_fields__} | {"schema"}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ConfigError(f"{unknown[0]}: unknown field")
        if raw.get("schema", SCHEMA_VERSION) != SCHEMA_VERSION:
            raise ConfigError(f"schema: unsupported version {raw['schema']!r}")
        kwargs = {}
        for name in ("kernels", "methods", "n_values"):
            if name in raw:
                if not isinstance(raw[name], list):
                    raise ConfigError(f"{name}: expected a list")
                kwargs[name] = tuple(raw[name])
        for name in ("subset_size", "runs", "seed", "gamma", "dataset"):
            if name in raw:
                kwargs[name] = raw[name]
        return cls(**kwargs)

    def kernel(self, name: str, d: int) -> Kernel:
        if name == "gaussian":
            return gaussian(1.0 / d if self.gamma == "default" else float(self.gamma))
        return Kernel(name)


def load_config_dataset(spec: dict, base_dir=".") -> Dataset:
    """Dataset from a config ``dataset`` entry: a synthetic generator or a file."""
    spec = dict(spec)
    if "synthetic" in spec:
        name = spec.pop("synthetic")
        if name not in SYNTHETIC:
            raise ConfigError(f"dataset.synthetic: unknown generator {name!r}")
        try:
            return SYNTHETIC[name](int(spec.pop("N")), int(spec.pop("d")), int(spec.pop("seed", 0)), **spec)
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"dataset: bad synthetic parameters ({exc})") from None
    if "path" in spec:
        path = os.path.join(base_dir, spec.pop("path"))
        return load_dataset(path, spec.pop("format", "csv"), **spec)
    raise ConfigError("dataset: expected 'synthetic' or 'path'")


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ErrorRow:
    dataset: str
    kernel: str
    method: str
    n: int
    D: int
    run: int
    relative_frobenius_error: float
    map_wall_time: float


def mean_ci95(values) -> tuple[float, float]:
    """Mean and half-width of the Student-t 95% interval (0 for one value)."""
    v = np.asarray(values, dtype=float)
    mean = float(v.mean())
    if v.size < 2:
        return mean, 0.0
    half = stats.t.ppf(0.975, v.size - 1) * v.std(ddof=1) / math.sqrt(v.size)
    return mean, float(half)


@dataclass
class ErrorReport:
    rows: list = field(default_factory=list)

    def cells(self) -> dict:
        """``(dataset, kernel, method, n) -> list of rows`` in insertion order."""
        out: dict = {}
        for r in self.rows:
            out.setdefault((r.dataset, r.kernel, r.method, r.n), []).append(r)
        return out

    def summary(self) -> dict:
        """``(dataset, kernel, method, n) -> {"D", "runs", "mean", "ci95", "mean_map_time"}``."""
        out = {}
        for key, rows in self.cells().items():
            mean, half = mean_ci95([r.relative_frobenius_error for r in rows])
            out[key] = {
                "D": rows[0].D,
                "runs": len(rows),
                "mean": mean,
                "ci95": half,
                "mean_map_time": float(np.mean([r.map_wall_time for r in rows])),
            }
        return out

    def to_csv(self, include_timing: bool = True) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        header = ["dataset", "kernel", "method", "n", "D", "run", "relative_frobenius_error"]
        writer.writerow(header + (["map_wall_time"] if include_timing else []))
        for r in self.rows:
            row = [r.dataset, r.kernel, r.method, r.n, r.D, r.run, repr(r.relative_frobenius_error)]
            writer.writerow(row + ([repr(r.map_wall_time)] if include_timing else []))
        return buf.getvalue()

    def to_json(self, include_timing: bool = True) -> str:
        results: dict = {}
        for (ds, kern, meth, n), cell in self.summary().items():
            if not include_timing:
                cell = {k: v for k, v in cell.items() if k != "mean_map_time"}
            results.setdefault(ds, {}).setdefault(kern, {}).setdefault(meth, {})[str(n)] = cell
        return json.dumps({"schema": SCHEMA_VERSION, "results": results}, indent=2) + "\n"


# ---------------------------------------------------------------------------
# Experiment loop
# ---------------------------------------------------------------------------


def _one_run(cfg, data, kernels, n_idx, n, run):
    """All (kernel, method) rows for one subset draw."""
    rng = as_generator(derive_seed(cfg.seed, 0, n_idx, run))
    idx = np.sort(rng.choice(data.N, size=cfg.subset_size, replace=False))
    X = data.X[idx]
    D = feature_dim(n, data.d)
    rows = []
    for k_idx, kernel in enumerate(kernels):
        K = gram_exact(kernel, X)
        for m_idx, method in enumerate(cfg.methods):
            mapper = make_mapper(method, kernel, data.d, D, derive_seed(cfg.seed, 1, k_idx, n_idx, run, m_idx))
            start = time.perf_counter()
            Phi = mapper.transform(X)
            elapsed = time.perf_counter() - start
            err = relative_frobenius_error(K, Phi @ Phi.T)
            rows.append(ErrorRow(data.name, str(kernel), method, n, D, run, err, elapsed))
    return rows


def run_experiment(cfg: ExperimentConfig, data: Dataset) -> ErrorReport:
    """Relative Frobenius errors for every (kernel, method, n, run).

    Every method sees the same subset and the same D = 2n(d+1)+1 within a
    run. Runs may execute on ``QUADFEAT_THREADS`` worker threads; each one
    owns its seed stream, so the report does not depend on the thread count.
    """
    if cfg.subset_size > data.N:
        raise ConfigError(f"subset_size: {cfg.subset_size} exceeds dataset size {data.N}")
    kernels = [cfg.kernel(name, data.d) for name in cfg.kernels]
    slots: dict = {}
    jobs = [(n_idx, n, run) for n_idx, n in enumerate(cfg.n_values) for run in range(cfg.runs)]
    threads = worker_count()
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            futures = {job: pool.submit(_one_run, cfg, data, kernels, *job) for job in jobs}
            for job, fut in futures.items():
                slots[job] = fut.result()
    else:
        for job in jobs:
            slots[job] = _one_run(cfg, data, kernels, *job)

    rows = []
    for k_idx in range(len(kernels)):
        for m_idx in range(len(cfg.methods)):
            for job in jobs:
                rows.append(slots[job][k_idx * len(cfg.methods) + m_idx])
    return ErrorReport(rows)


# ---------------------------------------------------------------------------
# Walltime
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TimingStats:
    median: float
    mean: float
    times: tuple = field(repr=False)


def walltime_mapping(
    method: str,
    d: int,
    D: int,
    batch: int,
    repeats: int = 50,
    seed: int = 0,
    kernel: Kernel | None = None,
) -> TimingStats:
    """Time ``transform`` on ``batch`` random points; the warm-up call is discarded."""
    kernel = kernel or gaussian(1.0 / d)
    mapper = make_mapper(method, kernel, d, D, seed)
    X = as_generator(derive_seed(seed, 7)).standard_normal((batch, d))
    mapper.transform(X)
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        mapper.transform(X)
        times.append(time.perf_counter() - start)
    return TimingStats(float(np.median(times)), float(np.mean(times)), tuple(times))
