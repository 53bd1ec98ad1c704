"""Seed plumbing: splitmix64 child streams and chi sampling."""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1


def splitmix64(state: int) -> tuple[int, int]:
    """One splitmix64 step. Returns ``(new_state, output)``."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return state, z ^ (z >> 31)


def derive_seed(master: int, *keys: int) -> int:
    """Child seed for the path ``keys`` below ``master``.

    Each key is folded into the state before one splitmix64 step, so
    ``derive_seed(s, 1, 2)`` and ``derive_seed(s, 2, 1)`` are unrelated
    streams. Pure function of its arguments.
    """
    state = int(master) & _MASK
    state, out = splitmix64(state)
    for key in keys:
        state, out = splitmix64(out ^ (int(key) & _MASK))
    return out


def as_generator(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(int(seed) & _MASK)


def sample_chi(rng: np.random.Generator, dof: int, size) -> np.ndarray:
    """Draw chi(dof) variates.

    Exact sum-of-squares for ``dof <= 64``; gamma-based above that.
    """
    if dof <= 0:
        raise ValueError(f"chi degrees of freedom must be positive, got {dof}")
    size = (size,) if np.isscalar(size) else tuple(size)
    if dof <= 64:
        z = rng.standard_normal(size + (dof,))
        return np.sqrt(np.einsum("...i,...i->...", z, z))
    return np.sqrt(2.0 * rng.standard_gamma(dof / 2.0, size=size))
