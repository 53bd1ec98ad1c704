"""Closed-form error bounds for quadrature-based and random Fourier features."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np


@dataclass(frozen=True)
class BoundInputs:
    """Inputs to the feature-count bounds.

    ``sigma_p * l`` enters only as a product; ``kappa``, ``mu`` bound
    ``|phi|`` and ``|phi'|``; ``M`` bounds ``|(1 - f(rho z)) / rho^2|``;
    ``lambda0 = lambda / n`` and ``sigma_y`` are only used by the ridge
    regression bound.
    """

    d: int
    eps: float
    delta: float
    l: float = 1.0
    sigma_p: float = 1.0
    kappa: float = 1.0
    mu: float = 1.0
    M: float = 0.5
    lambda0: float = 1.0
    sigma_y: float = 1.0

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"d must be a positive integer, got {self.d!r}")
        for name in ("eps", "l", "sigma_p", "kappa", "mu", "M", "lambda0"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        if not 0 < self.delta < 1:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta!r}")
        if not (self.sigma_y >= 0 and math.isfinite(self.sigma_y)):
            raise ValueError(f"sigma_y must be nonnegative, got {self.sigma_y!r}")


def rbf_inputs(d: int, eps: float, delta: float, l: float = 1.0, sigma_p: float = 1.0, **kw) -> BoundInputs:
    """Inputs with the Gaussian-kernel constants ``M = 1/2``, ``kappa = mu = 1``."""
    return BoundInputs(d, eps, delta, l=l, sigma_p=sigma_p, kappa=1.0, mu=1.0, M=0.5, **kw)


@dataclass(frozen=True)
class RequiredFeatures:
    """``D`` is the smallest admissible feature count, 0 when the bound is vacuous."""

    D: int
    vacuous: bool
    bracket: float
    value: float


def log_beta_d(d) -> float:
    d = float(d)
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    e = d / (d + 1)
    return float(
        np.logaddexp(-e * math.log(d), math.log(d) / (d + 1))
        + (6 * d + 1) / (d + 1) * math.log(2.0)
        + e * (math.log(d) - math.log1p(d))
    )


def beta_d(d) -> float:
    """Dimension constant of the uniform error bound; peaks near 64.7 at d = 86."""
    return math.exp(log_beta_d(d))


def _finish(prefactor_log: float, bracket: float) -> RequiredFeatures:
    bracket = float(bracket)
    if not bracket > 0:
        return RequiredFeatures(0, True, bracket, 0.0)
    value = math.exp(prefactor_log + math.log(bracket))
    return RequiredFeatures(int(math.ceil(value)), False, bracket, value)


def _growth(d: int) -> float:
    return 2.0 / (1.0 + 1.0 / d)


def required_D_quadrature(b: BoundInputs) -> RequiredFeatures:
    """Features needed for ``sup |k_hat - k| < eps`` with probability ``1 - delta``."""
    d = b.d
    bracket = _growth(d) * (
        math.log(b.sigma_p) + math.log(b.l) + math.log(b.kappa) + math.log(b.mu) - math.log(b.eps)
    ) + log_beta_d(d) - math.log(b.delta)
    prefactor = math.log(8.0) + 2 * math.log(b.M) + math.log(d + 1) - 2 * math.log(b.eps)
    return _finish(prefactor, bracket)


def required_D_rff(b: BoundInputs) -> RequiredFeatures:
    """Random Fourier feature counterpart of :func:`required_D_quadrature`.

    Only ``d``, ``eps``, ``delta`` and ``sigma_p * l`` are used.
    """
    d = b.d
    bracket = (
        _growth(d) * (math.log(b.sigma_p) + math.log(b.l) - math.log(b.eps))
        + log_beta_d(d)
        - math.log(b.delta)
        + d / (d + 1) * math.log((3 * d + 3) / (2 * d))
    )
    prefactor = math.log(8.0) + math.log(d + 1) - 2 * math.log(b.eps)
    return _finish(prefactor, bracket)


def required_D_krr(b: BoundInputs) -> RequiredFeatures:
    """Features needed for kernel ridge predictions within ``eps`` w.p. ``1 - delta``.

    ``sigma_y == 0`` makes every prediction zero; reported as a vacuous bound.
    """
    if b.sigma_y == 0:
        return RequiredFeatures(0, True, float("nan"), 0.0)
    d = b.d
    ratio_log = math.log(b.lambda0 + 1) - 2 * math.log(b.lambda0) - math.log(b.eps)
    bracket = _growth(d) * (
        math.log(b.sigma_y) + math.log(b.sigma_p) + math.log(b.l)
        + math.log(b.kappa) + math.log(b.mu) + ratio_log
    ) + log_beta_d(d) - math.log(b.delta)
    prefactor = (
        math.log(8.0) + 2 * math.log(b.M) + math.log(d + 1)
        + 2 * math.log(b.sigma_y) + 2 * ratio_log
    )
    return _finish(prefactor, bracket)


def variance_bound_sr33(d: int, n: int, kappa: float = 1.0) -> float:
    """Upper bound on the variance of the mean of n SR(3,3) rule values."""
    if d <= 2:
        raise ValueError(f"variance bound needs d > 2, got {d}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return (2 + kappa**4 + kappa**2) / (n * (d - 2))


def with_rbf_constants(b: BoundInputs) -> BoundInputs:
    return replace(b, kappa=1.0, mu=1.0, M=0.5)
