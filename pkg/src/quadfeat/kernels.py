"""Exact kernels, their pointwise nonlinearities and integrands.

Every kernel here is an expectation over a standard normal ``w``::

    k(x, y) = E[f_xy(w)],  f_xy(w) = c * phi(w.x) . phi(w.y)

with ``c = 1`` for the Gaussian kernel (inputs pre-scaled by sqrt(2 gamma))
and ``c = 2`` for the arc-cosine kernels.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from quadfeat._random import as_generator

KERNEL_NAMES = ("gaussian", "arccos0", "arccos1")


class KernelDomainError(ValueError):
    pass


class Nonlinearity(enum.Enum):
    COSSIN = "cossin"
    HEAVISIDE = "heaviside"
    RELU = "relu"

    def __call__(self, t):
        """Evaluate elementwise. ``COSSIN`` stacks (cos, sin) on a new last axis."""
        t = np.asarray(t, dtype=float)
        if self is Nonlinearity.COSSIN:
            return np.stack((np.cos(t), np.sin(t)), axis=-1)
        if self is Nonlinearity.HEAVISIDE:
            return np.heaviside(t, 0.5)
        return np.maximum(t, 0.0)

    @property
    def value_at_zero(self):
        return {
            Nonlinearity.COSSIN: (1.0, 0.0),
            Nonlinearity.HEAVISIDE: 0.5,
            Nonlinearity.RELU: 0.0,
        }[self]


@dataclass(frozen=True)
class Kernel:
    """Kernel kind: ``gaussian`` (with bandwidth ``gamma``), ``arccos0`` or ``arccos1``."""

    name: str
    gamma: float | None = None

    def __post_init__(self):
        if self.name not in KERNEL_NAMES:
            raise ValueError(f"unknown kernel {self.name!r}; expected one of {KERNEL_NAMES}")
        if self.name == "gaussian":
            if self.gamma is None or not self.gamma > 0 or not math.isfinite(self.gamma):
                raise ValueError(f"gaussian kernel needs gamma > 0, got {self.gamma!r}")
        elif self.gamma is not None:
            raise ValueError(f"{self.name} kernel takes no gamma")

    @property
    def nonlinearity(self) -> Nonlinearity:
        return {
            "gaussian": Nonlinearity.COSSIN,
            "arccos0": Nonlinearity.HEAVISIDE,
            "arccos1": Nonlinearity.RELU,
        }[self.name]

    @property
    def scale(self) -> float:
        """Multiplier applied to inputs before projection."""
        return math.sqrt(2.0 * self.gamma) if self.name == "gaussian" else 1.0

    @property
    def integrand_factor(self) -> float:
        return 1.0 if self.name == "gaussian" else 2.0

    @property
    def is_even(self) -> bool:
        return self.name == "gaussian"

    @property
    def value_at_origin(self) -> float:
        """``f_xy(0)``, the same for every ``x, y``."""
        phi0 = self.nonlinearity.value_at_zero
        if self.name == "gaussian":
            return 1.0
        return self.integrand_factor * phi0 * phi0

    def __str__(self):
        return f"gaussian:{self.gamma:g}" if self.name == "gaussian" else self.name


def gaussian(gamma: float) -> Kernel:
    return Kernel("gaussian", float(gamma))


ARCCOS0 = Kernel("arccos0")
ARCCOS1 = Kernel("arccos1")


def parse_kernel(spec: str, d: int | None = None) -> Kernel:
    """Parse ``"gaussian"``, ``"gaussian:0.25"``, ``"arccos0"`` or ``"arccos1"``.

    A bare ``"gaussian"`` takes the default bandwidth ``1/d``.
    """
    name, _, arg = spec.strip().lower().partition(":")
    if name == "gaussian":
        if arg:
            return gaussian(float(arg))
        if d is None:
            raise ValueError("default gaussian bandwidth 1/d needs the input dimension")
        return gaussian(1.0 / d)
    if arg:
        raise ValueError(f"{name} kernel takes no parameter")
    return Kernel(name)


def _pair(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError(f"x and y must be vectors of equal length, got {x.shape} and {y.shape}")
    return x, y


def _angle(x, y) -> float:
    nx, ny = np.linalg.norm(x), np.linalg.norm(y)
    if nx == 0 or ny == 0:
        raise KernelDomainError("arc-cosine kernels are undefined at the zero vector")
    cos = float(np.clip(x @ y / (nx * ny), -1.0, 1.0))
    return math.acos(cos)


def kernel_exact(k: Kernel, x, y) -> float:
    """Closed-form kernel value."""
    x, y = _pair(x, y)
    if k.name == "gaussian":
        diff = x - y
        return math.exp(-k.gamma * float(diff @ diff))
    theta = _angle(x, y)
    if k.name == "arccos0":
        return 1.0 - theta / math.pi
    nx, ny = np.linalg.norm(x), np.linalg.norm(y)
    return nx * ny / math.pi * (math.sin(theta) + (math.pi - theta) * math.cos(theta))


def integrand(k: Kernel, x, y, w) -> np.ndarray:
    """``f_xy(w)``; ``w`` may carry leading batch axes."""
    x, y = _pair(x, y)
    w = np.asarray(w, dtype=float)
    if w.shape[-1] != x.shape[0]:
        raise ValueError(f"w has trailing dimension {w.shape[-1]}, expected {x.shape[0]}")
    if k.name == "gaussian":
        return np.cos(w @ ((x - y) * k.scale))
    phi = k.nonlinearity
    return k.integrand_factor * phi(w @ x) * phi(w @ y)


def mc_oracle(k: Kernel, x, y, samples: int, seed, chunk: int = 1 << 16):
    """Plain Monte-Carlo estimate of ``E f_xy(w)``.

    Returns
    -------
    mean, stderr : float
        Sample mean and its standard error (0 for a single sample).
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    x, _ = _pair(x, y)
    rng = as_generator(seed)
    total = total_sq = 0.0
    left = samples
    while left:
        m = min(chunk, left)
        vals = integrand(k, x, y, rng.standard_normal((m, x.shape[0])))
        total += vals.sum()
        total_sq += (vals * vals).sum()
        left -= m
    mean = total / samples
    if samples == 1:
        return mean, 0.0
    var = max(total_sq / samples - mean * mean, 0.0) * samples / (samples - 1)
    return mean, math.sqrt(var / samples)
