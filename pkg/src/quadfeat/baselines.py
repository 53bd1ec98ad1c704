"""Monte-Carlo and quasi-Monte-Carlo random-feature baselines.

All baselines estimate ``k(x, y) ~ (c/m) phi(Mx) . phi(My)`` with an
``m x d`` frequency matrix M:

* ``g``    -- i.i.d. standard normal entries (random Fourier features);
* ``gort`` -- stacked blocks ``diag(s) Q``, Q Haar, ``s_i ~ chi(d)``;
* ``rom``  -- stacked ``sqrt(p) S D1 S D2 S D3`` blocks, S the normalized
  Hadamard matrix of the padded dimension p and D_i random signs;
* ``qmc``  -- Halton points pushed through the inverse normal CDF.

D counts output columns. The Gaussian kernel emits a cosine and a sine per
frequency, so it uses ``m = D // 2`` frequencies (plus an all-zero column
when D is odd); the arc-cosine kernels use ``m = D``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erf, erfc

from quadfeat._random import as_generator, derive_seed, sample_chi
from quadfeat.kernels import Kernel
from quadfeat.linalg import (
    fwht_normalized,
    haar_qr_orthogonal,
    next_power_of_two,
)

BASELINE_KINDS = ("g", "gort", "rom", "qmc")
QMC_SKIP = 100


def _first_primes(count: int) -> list[int]:
    primes = []
    candidate = 2
    while len(primes) < count:
        if all(candidate % p for p in primes if p * p <= candidate):
            primes.append(candidate)
        candidate += 1
    return primes


HALTON_PRIMES = tuple(_first_primes(64))


def radical_inverse(index: np.ndarray, base: int) -> np.ndarray:
    """Van der Corput radical inverse of nonnegative integer indices."""
    index = np.asarray(index, dtype=np.int64).copy()
    out = np.zeros(index.shape)
    scale = 1.0 / base
    while np.any(index > 0):
        index, digit = np.divmod(index, base)
        out += digit * scale
        scale /= base
    return out


def halton_sequence(d: int, count: int, skip: int = 0) -> np.ndarray:
    """Halton points in (0, 1)^d, rows ``skip+1 .. skip+count`` of the sequence."""
    if d < 1 or d > len(HALTON_PRIMES):
        raise ValueError(f"Halton sequence supports 1 <= d <= {len(HALTON_PRIMES)}, got {d}")
    idx = np.arange(skip + 1, skip + count + 1)
    return np.column_stack([radical_inverse(idx, b) for b in HALTON_PRIMES[:d]])


# Acklam's rational approximation to the standard normal quantile.
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425


def norm_ppf(p) -> np.ndarray:
    """Inverse standard normal CDF: Acklam's approximation plus one Halley step."""
    p = np.asarray(p, dtype=float)
    if np.any((p <= 0) | (p >= 1)):
        raise ValueError("probabilities must lie strictly inside (0, 1)")
    x = np.empty_like(p)
    lo = p < _P_LOW
    hi = p > 1 - _P_LOW
    mid = ~(lo | hi)

    q = np.sqrt(-2 * np.log(np.where(lo, p, 1 - p)))
    tail = (((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) / (
        (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1
    )
    x[lo] = tail[lo]
    x[hi] = -tail[hi]

    q = p[mid] - 0.5
    r = q * q
    x[mid] = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q / (
        ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1
    )

    # Phi(x) - p, written to avoid cancellation near the median and the upper tail
    r = x / math.sqrt(2)
    e = np.where(mid, 0.5 * erf(r) - (p - 0.5), 0.5 * erfc(-r) - p)
    e = np.where(hi, (1 - p) - 0.5 * erfc(r), e)
    u = e * math.sqrt(2 * math.pi) * np.exp(x * x / 2)
    return x - u / (1 + x * u / 2)


def _rows(kernel: Kernel, D: int) -> int:
    m = D // 2 if kernel.is_even else D
    if m < 1:
        raise ValueError(f"D={D} is too small for the {kernel.name} kernel")
    return m


@dataclass(frozen=True)
class RandomFeatureMap:
    """A baseline feature map with ``transform(X) -> (N, D)``."""

    kind: str
    kernel: Kernel
    d: int
    D: int
    params: dict = field(repr=False)

    @property
    def rows(self) -> int:
        return _rows(self.kernel, self.D)

    @property
    def padded_dim(self) -> int:
        return next_power_of_two(self.d) if self.kind == "rom" else self.d

    def project(self, X: np.ndarray) -> np.ndarray:
        """``X @ M.T`` for the frequency matrix M, shape ``(N, rows)``."""
        if self.kind != "rom":
            return X @ self.params["M"].T
        p = self.padded_dim
        Xp = np.zeros((X.shape[0], p))
        Xp[:, : self.d] = X
        out = []
        for signs in self.params["signs"]:
            y = Xp
            for s in signs[::-1]:
                y = fwht_normalized(y * s)
            out.append(y)
        return math.sqrt(p) * np.concatenate(out, axis=1)[:, : self.rows]

    @property
    def weights(self) -> np.ndarray:
        """Dense frequency matrix (over the padded dimension for ROM)."""
        if self.kind != "rom":
            return self.params["M"]
        p = self.padded_dim
        full = RandomFeatureMap(self.kind, self.kernel, p, self.D, self.params)
        return full.project(np.eye(p)).T

    def transform(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        single = X.ndim == 1
        X = np.atleast_2d(X)
        if X.shape[1] != self.d:
            raise ValueError(f"expected inputs of dimension {self.d}, got {X.shape[1]}")
        P = self.project(X * self.kernel.scale)
        m = self.rows
        if self.kernel.is_even:
            out = np.zeros((X.shape[0], self.D))
            out[:, :m] = np.cos(P)
            out[:, m : 2 * m] = np.sin(P)
            out /= math.sqrt(m)
        else:
            out = self.kernel.nonlinearity(P) * math.sqrt(self.kernel.integrand_factor / m)
        return out[0] if single else out

    __call__ = transform


def build_baseline_map(kind: str, kernel: Kernel, d: int, D: int, seed: int) -> RandomFeatureMap:
    """Baseline feature map of output dimension D.

    ``qmc`` is deterministic and ignores ``seed``.
    """
    if kind not in BASELINE_KINDS:
        raise ValueError(f"unknown baseline {kind!r}; expected one of {BASELINE_KINDS}")
    if d < 1:
        raise ValueError(f"invalid dimension {d}")
    m = _rows(kernel, D)
    rng = as_generator(seed)
    if kind == "g":
        params = {"M": rng.standard_normal((m, d))}
    elif kind == "gort":
        blocks = []
        for b in range(-(-m // d)):
            Q = haar_qr_orthogonal(d, derive_seed(seed, b))
            blocks.append(sample_chi(rng, d, d)[:, None] * Q)
        params = {"M": np.concatenate(blocks)[:m]}
    elif kind == "rom":
        p = next_power_of_two(d)
        nblocks = -(-m // p)
        params = {"signs": rng.choice((-1.0, 1.0), size=(nblocks, 3, p))}
    else:
        params = {"M": norm_ppf(halton_sequence(d, m, skip=QMC_SKIP))}
    return RandomFeatureMap(kind, kernel, d, int(D), params)
