"""Structured orthogonal operators and regular-simplex geometry.

Butterfly matrices are stored as rotation layers and applied in
O(d log d); every operator can also be materialized densely, which the
test-suite uses as the reference.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from quadfeat._random import as_generator, derive_seed

DENSE_LIMIT = 4096


class InvalidDimensionError(ValueError):
    pass


def _check_dim(d) -> int:
    if isinstance(d, bool) or int(d) != d or d < 1:
        raise InvalidDimensionError(f"dimension must be a positive integer, got {d!r}")
    return int(d)


def is_power_of_two(d: int) -> bool:
    return d >= 1 and d & (d - 1) == 0


def next_power_of_two(d: int) -> int:
    return 1 << (int(d) - 1).bit_length()


def _as_rows(x: np.ndarray, dim: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 0 or x.shape[-1] != dim:
        raise InvalidDimensionError(
            f"expected trailing dimension {dim}, got shape {x.shape}"
        )
    return x


# ---------------------------------------------------------------------------
# Regular simplex
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SimplexVertices:
    """The d+1 unit vertices of a regular simplex centred at the origin.

    Vertex ``j`` is the normalized image of ``e_j - 1/(d+1)`` under a
    Helmert basis of the hyperplane orthogonal to the all-ones vector, so
    ``vertices[i] @ vertices[j] == -1/d`` for ``i != j``.
    """

    dim: int
    vertices: np.ndarray = field(repr=False)

    def project(self, z: np.ndarray) -> np.ndarray:
        """Inner products ``vertices @ z`` along the last axis in O(d)."""
        return simplex_project(z, self.dim)


def simplex_project(z: np.ndarray, d: int) -> np.ndarray:
    """``simplex_vertices(d).vertices @ z`` without forming the vertices.

    Coordinate ``k`` of every Helmert vertex takes only two nonzero values,
    so a suffix sum gives all d+1 products in O(d).
    """
    z = _as_rows(z, d)
    k = np.arange(1, d + 1, dtype=float)
    a = z / np.sqrt(k * (k + 1))
    suffix = np.cumsum(a[..., ::-1], axis=-1)[..., ::-1]
    out = np.zeros(z.shape[:-1] + (d + 1,))
    out[..., :d] = suffix
    out[..., 1:] -= k * a
    return out * math.sqrt((d + 1) / d)


@functools.lru_cache(maxsize=8)
def simplex_vertices(d: int) -> SimplexVertices:
    """Deterministic regular d-simplex with unit vertices.

    Returns
    -------
    SimplexVertices
        ``vertices`` has shape ``(d + 1, d)`` and is read-only.
    """
    d = _check_dim(d)
    k = np.arange(1, d + 1, dtype=float)
    j = np.arange(d + 1)
    helmert = (j[None, :] < k[:, None]) - k[:, None] * (j[None, :] == k[:, None])
    helmert = helmert / np.sqrt(k * (k + 1))[:, None]
    vertices = math.sqrt((d + 1) / d) * helmert.T
    vertices.setflags(write=False)
    return SimplexVertices(d, vertices)


# ---------------------------------------------------------------------------
# Butterfly matrices
# ---------------------------------------------------------------------------


def _fang_li_angles(u: np.ndarray) -> list[np.ndarray]:
    """Layer angles (top layer first) of a butterfly whose first column is ``u``.

    Only the leaf layer carries sign information; every coarser layer splits
    the norm of a block between its two halves with an angle in [0, pi/2].
    """
    p = u.shape[0]
    levels = []
    m = p // 2
    while m >= 1:
        blocks = u.reshape(p // (2 * m), 2, m)
        if m == 1:
            theta = np.arctan2(blocks[:, 1, 0], blocks[:, 0, 0])
        else:
            theta = np.arctan2(
                np.linalg.norm(blocks[:, 1, :], axis=1),
                np.linalg.norm(blocks[:, 0, :], axis=1),
            )
        levels.append(theta)
        m //= 2
    return levels


def _layer_coefficients(angles: list[np.ndarray], dim: int, padded: int):
    """Expand per-block angles into per-pair (cos, sin), truncated to ``dim``."""
    layers = []
    m = padded // 2
    for theta in angles:
        nblocks = padded // (2 * m)
        c = np.repeat(np.cos(theta)[:, None], m, axis=1)
        s = np.repeat(np.sin(theta)[:, None], m, axis=1)
        bottom = (np.arange(nblocks)[:, None] * 2 * m + m + np.arange(m)[None, :])
        # partner row/column deleted: the surviving index is left untouched
        cut = bottom >= dim
        c[cut] = 1.0
        s[cut] = 0.0
        layers.append((m, c, s))
        m //= 2
    return layers


@dataclass(frozen=True)
class ButterflyOrthogonal:
    """Product ``(B P)_1 ... (B P)_t`` of butterfly factors and permutations.

    For power-of-two ``dim`` there is a single factor and no permutation.
    Each factor is ``ceil(log2 dim)`` rotation layers; ``angles[f][l]`` holds
    one angle per block of layer ``l`` (top layer first) of factor ``f``.
    """

    dim: int
    angles: tuple = field(repr=False)
    permutations: tuple | None = field(default=None, repr=False)
    _layers: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        padded = next_power_of_two(self.dim)
        layers = tuple(
            tuple(_layer_coefficients(list(a), self.dim, padded)) for a in self.angles
        )
        object.__setattr__(self, "_layers", layers)
        if self.permutations is not None and len(self.permutations) != len(self.angles):
            raise ValueError("one permutation per butterfly factor is required")

    @property
    def padded_dim(self) -> int:
        return next_power_of_two(self.dim)

    @property
    def t(self) -> int:
        return len(self.angles)

    @property
    def n_multiply_adds(self) -> int:
        """Scalar multiply-adds of one apply (4 per rotated pair)."""
        p = self.padded_dim
        return self.t * 4 * (p // 2) * int(math.log2(p))

    def _rotate(self, x: np.ndarray, layers, transpose: bool) -> np.ndarray:
        p = self.padded_dim
        lead = x.shape[:-1]
        order = reversed(layers) if transpose else layers
        for m, c, s in order:
            xr = x.reshape(lead + (p // (2 * m), 2, m))
            top, bot = xr[..., 0, :], xr[..., 1, :]
            if transpose:
                new_top, new_bot = c * top + s * bot, c * bot - s * top
            else:
                new_top, new_bot = c * top - s * bot, s * top + c * bot
            x = np.stack((new_top, new_bot), axis=-2).reshape(lead + (p,))
        return x

    def _pad(self, x: np.ndarray) -> np.ndarray:
        x = _as_rows(x, self.dim)
        p = self.padded_dim
        if p == self.dim:
            return x
        out = np.zeros(x.shape[:-1] + (p,))
        out[..., : self.dim] = x
        return out

    def apply(self, x: np.ndarray) -> np.ndarray:
        """``B @ x`` along the last axis (batched over leading axes)."""
        y = self._pad(x)
        for f in reversed(range(self.t)):
            if self.permutations is not None:
                perm = self.permutations[f]
                y = y.copy()
                y[..., : self.dim] = y[..., perm]
            y = self._rotate(y, self._layers[f], transpose=False)
        return y[..., : self.dim]

    def apply_transpose(self, x: np.ndarray) -> np.ndarray:
        """``B.T @ x`` along the last axis."""
        y = self._pad(x)
        for f in range(self.t):
            y = self._rotate(y, self._layers[f], transpose=True)
            if self.permutations is not None:
                inv = np.empty_like(self.permutations[f])
                inv[self.permutations[f]] = np.arange(self.dim)
                y = y.copy()
                y[..., : self.dim] = y[..., inv]
        return y[..., : self.dim]

    def dense(self) -> np.ndarray:
        if self.dim > DENSE_LIMIT:
            raise ValueError(f"dense materialization limited to d <= {DENSE_LIMIT}")
        return self.apply(np.eye(self.dim)).T


def butterfly_from_angles(angles) -> ButterflyOrthogonal:
    """Butterfly for power-of-two ``d`` from ``d - 1`` angles in recursive order.

    Angle ``theta_i`` (1-based) is the one used by the recursive definition
    ``B(2m) = [[B(m) c_m, -B(m) s_m], [B^(m) s_m, B^(m) c_m]]``: the middle
    index of a block is its top rotation, lower indices the left sub-butterfly
    and higher indices the right one.
    """
    angles = np.asarray(angles, dtype=float)
    d = angles.size + 1
    if not is_power_of_two(d):
        raise InvalidDimensionError(f"d - 1 angles with d a power of two required, got {angles.size}")
    levels = []
    m = d // 2
    while m >= 1:
        idx = np.arange(d // (2 * m)) * 2 * m + m - 1
        levels.append(angles[idx])
        m //= 2
    return ButterflyOrthogonal(d, (tuple(levels),))


def sample_butterfly(d: int, seed, t: int = 3) -> ButterflyOrthogonal:
    """Random butterfly whose first column is uniform on the sphere.

    Angles come from a uniform point on the sphere of the padded dimension.
    When ``d`` is not a power of two the truncated factor leaves some
    columns with structural zeros, so ``t`` independently sampled factors
    are interleaved with uniform random permutations.
    """
    d = _check_dim(d)
    rng = as_generator(seed)
    p = next_power_of_two(d)
    if d == 1:
        return ButterflyOrthogonal(1, ((),))
    reps = 1 if p == d else t
    angles = []
    perms = [] if p != d else None
    for _ in range(reps):
        u = rng.standard_normal(p)
        u /= np.linalg.norm(u)
        angles.append(tuple(_fang_li_angles(u)))
        if perms is not None:
            perms.append(rng.permutation(d))
    return ButterflyOrthogonal(d, tuple(angles), None if perms is None else tuple(perms))


# ---------------------------------------------------------------------------
# Dense Haar matrices and the Hadamard transform
# ---------------------------------------------------------------------------


def haar_qr_orthogonal(d: int, seed) -> np.ndarray:
    """``Q @ diag(signs)`` with Q from the QR factorization of a Gaussian matrix."""
    d = _check_dim(d)
    rng = as_generator(seed)
    q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    signs = rng.choice((-1.0, 1.0), size=d)
    return q * signs


def haar_qr_batch(d: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` independent Haar matrices, shape ``(count, d, d)``."""
    q, _ = np.linalg.qr(rng.standard_normal((count, d, d)))
    signs = rng.choice((-1.0, 1.0), size=(count, 1, d))
    return q * signs


@dataclass(frozen=True)
class DenseOrthogonal:
    """An explicit orthogonal matrix with the structured-operator interface."""

    matrix: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def apply(self, x):
        return _as_rows(x, self.dim) @ self.matrix.T

    def apply_transpose(self, x):
        return _as_rows(x, self.dim) @ self.matrix

    def dense(self):
        return self.matrix.copy()


ORTHOGONAL_KINDS = ("butterfly", "haar")


@dataclass(frozen=True)
class OrthogonalSampler:
    """Seeded source of orthogonal operators (``"butterfly"`` or ``"haar"``)."""

    kind: str = "butterfly"
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ORTHOGONAL_KINDS:
            raise ValueError(f"unknown orthogonal sampler {self.kind!r}")

    def sample(self, d: int, index: int = 0):
        seed = derive_seed(self.seed, index)
        if self.kind == "butterfly":
            return sample_butterfly(d, seed)
        return DenseOrthogonal(haar_qr_orthogonal(d, seed))


def fwht_normalized(x: np.ndarray) -> np.ndarray:
    """Orthonormal Walsh-Hadamard transform along the last axis.

    >>> fwht_normalized(np.array([1.0, 1.0]))
    array([1.41421356, 0.        ])
    """
    x = np.array(x, dtype=float)
    p = x.shape[-1] if x.ndim else 0
    if not is_power_of_two(p):
        raise InvalidDimensionError(f"length must be a power of two, got {p}")
    lead = x.shape[:-1]
    h = 1
    while h < p:
        xr = x.reshape(lead + (p // (2 * h), 2, h))
        a, b = xr[..., 0, :], xr[..., 1, :]
        x = np.stack((a + b, a - b), axis=-2).reshape(lead + (p,))
        h *= 2
    return x / math.sqrt(p)
