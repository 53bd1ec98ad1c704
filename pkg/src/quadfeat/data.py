"""Dataset ingestion (CSV, libsvm) and bundled synthetic generators."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from quadfeat._random import as_generator


class DatasetError(ValueError):
    pass


@dataclass(frozen=True)
class Dataset:
    name: str
    X: np.ndarray
    y: np.ndarray | None = None

    def __post_init__(self):
        X = self.X
        if X.ndim != 2 or X.shape[0] < 2 or X.shape[1] < 1:
            raise DatasetError(f"{self.name}: need an N x d matrix with N >= 2, d >= 1, got {X.shape}")
        if not np.all(np.isfinite(X)):
            raise DatasetError(f"{self.name}: non-finite values")

    @property
    def N(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]


def _parse_float(token: str, lineno: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise DatasetError(f"line {lineno}: cannot parse {token!r} as a number") from None
    if not math.isfinite(value):
        raise DatasetError(f"line {lineno}: non-finite value {token!r}")
    return value


def _read_csv(lines, label_column):
    rows, labels = [], []
    width = None
    for lineno, line in lines:
        fields = [f.strip() for f in line.split(",")]
        if not rows and width is None:
            try:
                [float(f) for f in fields]
            except ValueError:
                width = len(fields)  # header
                continue
        if width is not None and len(fields) != width:
            raise DatasetError(f"line {lineno}: expected {width} fields, got {len(fields)}")
        width = len(fields)
        values = [_parse_float(f, lineno) for f in fields]
        if label_column is not None:
            labels.append(values.pop(label_column))
        rows.append(values)
    return np.array(rows, dtype=float), (np.array(labels) if label_column is not None else None)


def _read_libsvm(lines, dim):
    entries, labels = [], []
    max_index = 0
    for lineno, line in lines:
        tokens = line.split()
        labels.append(_parse_float(tokens[0], lineno))
        row = {}
        for tok in tokens[1:]:
            idx, sep, val = tok.partition(":")
            if not sep or not idx.isdigit() or int(idx) < 1:
                raise DatasetError(f"line {lineno}: malformed feature {tok!r}")
            row[int(idx)] = _parse_float(val, lineno)
            max_index = max(max_index, int(idx))
        entries.append(row)
    d = dim if dim is not None else max_index
    if max_index > d:
        raise DatasetError(f"feature index {max_index} exceeds dimension {d}")
    X = np.zeros((len(entries), d))
    for i, row in enumerate(entries):
        for idx, val in row.items():
            X[i, idx - 1] = val
    return X, np.array(labels)


def load_dataset(
    path,
    format: str = "csv",
    *,
    dim: int | None = None,
    label_column: int | None = None,
    standardize: bool = False,
) -> Dataset:
    """Read a dataset file.

    CSV files are comma-separated; a first line that does not parse as
    numbers is treated as a header. libsvm lines are ``label idx:value ...``
    with 1-based indices; ``dim`` fixes the width, otherwise the largest
    index seen is used.

    Raises
    ------
    DatasetError
        Empty file, unparsable field (the message names the line) or
        inconsistent row width.
    """
    path = Path(path)
    text = path.read_text()
    lines = [(i + 1, ln) for i, ln in enumerate(text.splitlines()) if ln.strip()]
    if not lines:
        raise DatasetError(f"{path}: empty file")
    if format == "csv":
        X, y = _read_csv(lines, label_column)
    elif format == "libsvm":
        X, y = _read_libsvm(lines, dim)
    else:
        raise DatasetError(f"unknown format {format!r}")
    if X.size == 0:
        raise DatasetError(f"{path}: no data rows")
    if standardize:
        sd = X.std(axis=0)
        X = (X - X.mean(axis=0)) / np.where(sd > 0, sd, 1.0)
    return Dataset(path.stem, X, y)


def gaussian_clusters(
    N: int,
    d: int,
    seed: int,
    clusters: int = 10,
    center_scale: float = 0.5,
    spread: float = 0.5,
) -> Dataset:
    """Isotropic Gaussian blobs around ``clusters`` normally distributed centres."""
    rng = as_generator(seed)
    centers = center_scale * rng.standard_normal((clusters, d))
    labels = rng.integers(0, clusters, size=N)
    X = centers[labels] + spread * rng.standard_normal((N, d))
    return Dataset(f"clusters{d}", X, labels.astype(float))


def uniform_cube(N: int, d: int, seed: int) -> Dataset:
    rng = as_generator(seed)
    return Dataset(f"cube{d}", rng.uniform(-1.0, 1.0, size=(N, d)))


SYNTHETIC = {"gaussian_clusters": gaussian_clusters, "uniform_cube": uniform_cube}
