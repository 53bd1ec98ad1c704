"""Stochastic spherical-radial quadrature rules and the feature maps built on them.

One degree-(3, 3) rule evaluates the integrand at the origin and at
``+-rho_j Q v_j`` for the d+1 vertices ``v_j`` of a regular simplex::

    SR(f) = (1 - sum_j d / ((d+1) rho_j^2)) f(0)
            + d/(d+1) sum_j [f(-rho_j Q v_j) + f(rho_j Q v_j)] / (2 rho_j^2)

with ``rho_j ~ chi(d+2)`` and Q a random orthogonal matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from quadfeat._random import as_generator, derive_seed, sample_chi
from quadfeat.kernels import Kernel, integrand
from quadfeat.linalg import (
    InvalidDimensionError,
    OrthogonalSampler,
    haar_qr_batch,
    sample_butterfly,
    simplex_project,
    simplex_vertices,
)

MAX_RADIUS_DRAWS = 1000


class SamplingError(RuntimeError):
    pass


class KernelMisuseError(ValueError):
    pass


def _check_sr33_dim(d) -> int:
    if int(d) != d or d <= 2:
        raise InvalidDimensionError(f"SR(3,3) rules need d >= 3, got {d!r}")
    return int(d)


def _orthogonal(d: int, seed: int, q_source):
    if isinstance(q_source, OrthogonalSampler):
        return q_source.sample(d)
    return OrthogonalSampler(q_source, seed).sample(d)


def _draw_radii(rng, d, resample, shared_rho, max_draws=MAX_RADIUS_DRAWS):
    draws = 0
    while True:
        draws += 1
        if shared_rho:
            rho = np.full(d + 1, sample_chi(rng, d + 2, 1)[0])
        else:
            rho = sample_chi(rng, d + 2, d + 1)
        a0_sq = 1.0 - float(np.sum(d / ((d + 1) * rho**2)))
        if not resample or a0_sq >= 0.0:
            return rho, a0_sq, draws
        if draws >= max_draws:
            raise SamplingError(f"no admissible radius vector after {draws} draws")


@dataclass(frozen=True)
class SRSample:
    """One sampled degree-(3, 3) rule.

    ``a0_sq`` is the weight of ``f(0)``. It is nonnegative whenever the
    sample was drawn with resampling; ``draws`` counts radius vectors drawn.
    """

    Q: object = field(repr=False)
    rho: np.ndarray = field(repr=False)
    a0_sq: float
    draws: int = 1

    @property
    def dim(self) -> int:
        return self.rho.shape[0] - 1

    @property
    def a0(self) -> float:
        if self.a0_sq < 0:
            raise ValueError("a0 is imaginary for this sample (a0^2 < 0)")
        return math.sqrt(self.a0_sq)

    @property
    def a(self) -> np.ndarray:
        d = self.dim
        return math.sqrt(d / (2.0 * (d + 1))) / self.rho

    @property
    def directions(self) -> np.ndarray:
        """Rotated vertices ``Q v_j`` as rows, shape ``(d+1, d)``."""
        return self.Q.apply(simplex_vertices(self.dim).vertices)


def sample_sr33(
    d: int,
    seed: int,
    q_source="butterfly",
    *,
    resample: bool = True,
    shared_rho: bool = False,
) -> SRSample:
    """Draw one SR(3,3) rule.

    Parameters
    ----------
    d : int
        Input dimension, at least 3.
    seed : int
        Seed; the rotation and the radii use independent child streams.
    q_source : {"butterfly", "haar"} or OrthogonalSampler
        Where the rotation comes from.
    resample : bool
        Redraw the whole radius vector until ``a0^2 >= 0``. Needed for a
        real-valued feature map, but conditioning on the event shifts the
        radius law, so the resampled rule is no longer unbiased.
    shared_rho : bool
        Use a single radius for all vertices instead of one per vertex.
    """
    d = _check_sr33_dim(d)
    Q = _orthogonal(d, derive_seed(seed, 0), q_source)
    rng = as_generator(derive_seed(seed, 1))
    rho, a0_sq, draws = _draw_radii(rng, d, resample, shared_rho)
    return SRSample(Q, rho, a0_sq, draws)


def sr33_nodes(sample: SRSample):
    """Points and weights of the rule: origin, ``+rho_j Q v_j``, ``-rho_j Q v_j``."""
    d = sample.dim
    pts = sample.rho[:, None] * sample.directions
    w = d / (2.0 * (d + 1) * sample.rho**2)
    points = np.concatenate((np.zeros((1, d)), pts, -pts))
    weights = np.concatenate(([sample.a0_sq], w, w))
    return points, weights


def sr33_rule(sample: SRSample, f) -> float:
    """Apply the rule to a callable evaluated on a ``(m, d)`` batch of points."""
    points, weights = sr33_nodes(sample)
    return float(weights @ np.asarray(f(points), dtype=float))


def sr33_estimate(sample: SRSample, k: Kernel, x, y) -> float:
    return sr33_rule(sample, lambda w: integrand(k, x, y, w))


def sr33_estimate_even(sample: SRSample, k: Kernel, x, y) -> float:
    """Rule for integrands with ``f(w) == f(-w)``: half the evaluations."""
    if not k.is_even:
        raise KernelMisuseError(f"{k.name} integrand is not even in w")
    d = sample.dim
    pts = sample.rho[:, None] * sample.directions
    w = d / ((d + 1) * sample.rho**2)
    return float(sample.a0_sq * k.value_at_origin + w @ integrand(k, x, y, pts))


def sr11_estimate(d: int, seed, k: Kernel, x, y) -> float:
    """Degree-(1, 1) rule: one Gaussian draw, i.e. a single random Fourier feature."""
    rng = as_generator(seed)
    return float(integrand(k, x, y, rng.standard_normal(int(d))))


# ---------------------------------------------------------------------------
# Vectorized batches, for simulation studies
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SRBatch:
    rho: np.ndarray  # (count, d+1)
    directions: np.ndarray  # (count, d+1, d)
    a0_sq: np.ndarray  # (count,)
    draws: np.ndarray  # (count,)

    @property
    def dim(self) -> int:
        return self.rho.shape[1] - 1

    def __len__(self):
        return self.rho.shape[0]


def sample_sr33_batch(d: int, count: int, seed: int, q_source: str = "haar", *, resample: bool = True) -> SRBatch:
    """``count`` independent rules, drawn with array operations."""
    d = _check_sr33_dim(d)
    rng = as_generator(seed)
    V = simplex_vertices(d).vertices
    if q_source == "haar":
        Q = haar_qr_batch(d, count, rng)
        directions = np.einsum("cab,jb->cja", Q, V)
    elif q_source == "butterfly":
        seeds = rng.integers(0, 2**63, size=count)
        directions = np.stack([sample_butterfly(d, int(s)).apply(V) for s in seeds])
    else:
        raise ValueError(f"unknown orthogonal sampler {q_source!r}")

    rho = sample_chi(rng, d + 2, (count, d + 1))
    draws = np.ones(count, dtype=np.int64)
    a0_sq = 1.0 - (d / ((d + 1) * rho**2)).sum(axis=1)
    if resample:
        bad = a0_sq < 0
        while bad.any():
            if draws.max() >= MAX_RADIUS_DRAWS:
                raise SamplingError("radius resampling did not terminate")
            rho[bad] = sample_chi(rng, d + 2, (int(bad.sum()), d + 1))
            draws[bad] += 1
            a0_sq[bad] = 1.0 - (d / ((d + 1) * rho[bad] ** 2)).sum(axis=1)
            bad = a0_sq < 0
    return SRBatch(rho, directions, a0_sq, draws)


def sr33_estimate_batch(batch: SRBatch, k: Kernel, x, y) -> np.ndarray:
    """Per-rule estimates of ``k(x, y)``, shape ``(count,)``."""
    d = batch.dim
    pts = batch.rho[..., None] * batch.directions
    w = d / (2.0 * (d + 1) * batch.rho**2)
    vals = integrand(k, x, y, pts) + integrand(k, x, y, -pts)
    return batch.a0_sq * k.value_at_origin + (w * vals).sum(axis=1)


# ---------------------------------------------------------------------------
# Explicit feature map
# ---------------------------------------------------------------------------


def feature_dim(n: int, d: int) -> int:
    return 2 * n * (d + 1) + 1


@dataclass(frozen=True)
class FeatureMap:
    """Stacked SR(3,3) rules as an explicit feature map of dimension 2n(d+1)+1.

    Column 0 is the pooled constant feature ``sqrt(mean_k a0_k^2) * phi(0)``;
    then each block contributes 2(d+1) columns scaled by ``1/sqrt(n)``: the
    cosine and sine of the d+1 projections for the (even) Gaussian
    integrand, or ``phi(+w.x)`` and ``phi(-w.x)`` for the arc-cosine ones.
    ``psi(x) @ psi(y)`` is then exactly the mean of the n rule values.
    """

    kernel: Kernel
    d: int
    blocks: tuple = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.blocks)

    @property
    def D(self) -> int:
        return feature_dim(self.n, self.d)

    def projections(self, X: np.ndarray) -> list[np.ndarray]:
        """``rho_j (Q v_j) . x`` for every block, each of shape ``(N, d+1)``."""
        Xs = X * self.kernel.scale
        return [b.rho * simplex_project(b.Q.apply_transpose(Xs), self.d) for b in self.blocks]

    def transform(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        single = X.ndim == 1
        X = np.atleast_2d(X)
        if X.shape[1] != self.d:
            raise InvalidDimensionError(f"expected inputs of dimension {self.d}, got {X.shape[1]}")
        k = self.kernel
        d, n = self.d, self.n
        out = np.empty((X.shape[0], self.D))
        mean_a0_sq = float(np.mean([b.a0_sq for b in self.blocks]))
        out[:, 0] = math.sqrt(max(mean_a0_sq, 0.0) * k.value_at_origin)
        width = 2 * (d + 1)
        for i, (b, p) in enumerate(zip(self.blocks, self.projections(X))):
            # even rule: weight d/((d+1) rho^2) on cos/sin; odd: half of that
            # on each of phi(+p), phi(-p) times the integrand factor 2
            scale = np.tile(b.a * math.sqrt(2.0 / n), 2)
            cols = slice(1 + i * width, 1 + (i + 1) * width)
            if k.is_even:
                out[:, cols] = np.concatenate((np.cos(p), np.sin(p)), axis=1) * scale
            else:
                phi = k.nonlinearity
                out[:, cols] = np.concatenate((phi(p), phi(-p)), axis=1) * scale
        return out[0] if single else out

    __call__ = transform


def build_feature_map(k: Kernel, d: int, n: int, seed: int, q_source="butterfly") -> FeatureMap:
    """n independently sampled SR(3,3) rules (each resampled to ``a0^2 >= 0``)."""
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    d = _check_sr33_dim(d)
    blocks = tuple(sample_sr33(d, derive_seed(seed, i), q_source) for i in range(int(n)))
    return FeatureMap(k, d, blocks)


def map_point(F: FeatureMap, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise InvalidDimensionError("map_point takes a single vector")
    return F.transform(x)
