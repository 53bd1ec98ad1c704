"""Fast invariant checks behind ``quadfeat selftest``."""

from __future__ import annotations

import itertools

import numpy as np

from quadfeat._random import as_generator, derive_seed
from quadfeat.kernels import ARCCOS0, ARCCOS1, gaussian
from quadfeat.linalg import fwht_normalized, haar_qr_orthogonal, sample_butterfly, simplex_vertices
from quadfeat.quadrature import (
    build_feature_map,
    sample_sr33,
    sr33_estimate,
    sr33_estimate_even,
    sr33_nodes,
)


def gaussian_moment(powers) -> float:
    """``E[prod_i w_i^{p_i}]`` for standard normal w."""
    out = 1.0
    for p in powers:
        if p % 2:
            return 0.0
        out *= float(np.prod(np.arange(p - 1, 0, -2))) if p else 1.0
    return out


def monomial_error(sample, max_degree: int = 3) -> float:
    """Largest rule error over all monomials of degree <= max_degree."""
    points, weights = sr33_nodes(sample)
    d = sample.dim
    worst = 0.0
    for deg in range(max_degree + 1):
        for idx in itertools.combinations_with_replacement(range(d), deg):
            vals = np.prod(points[:, list(idx)], axis=1) if idx else np.ones(len(points))
            powers = np.bincount(np.array(idx, dtype=int), minlength=d)
            worst = max(worst, abs(weights @ vals - gaussian_moment(powers)))
    return worst


def _orthogonality(seed):
    worst = 0.0
    for k in range(1, 9):
        d = 2**k
        B = sample_butterfly(d, derive_seed(seed, d)).dense()
        Q = haar_qr_orthogonal(d, derive_seed(seed, d))
        for M in (B, Q):
            worst = max(worst, np.linalg.norm(M.T @ M - np.eye(d)))
    return worst <= 1e-10, f"max ||M^T M - I||_F = {worst:.1e} for d = 2..256"


def _simplex(seed):
    worst = 0.0
    for d in range(1, 65):
        V = simplex_vertices(d).vertices
        G = V @ V.T
        target = np.full((d + 1, d + 1), -1.0 / d)
        np.fill_diagonal(target, 1.0)
        worst = max(
            worst,
            np.abs(G - target).max(),
            np.abs(V.sum(axis=0)).max(),
            np.abs(V.T @ V - (d + 1) / d * np.eye(d)).max(),
        )
    return worst <= 1e-12, f"max identity error {worst:.1e} for d = 1..64"


def _fwht(seed):
    x = as_generator(seed).standard_normal(8)
    H = np.array([[1.0]])
    for _ in range(3):
        H = np.block([[H, H], [H, -H]])
    err = np.abs(fwht_normalized(x) - H @ x / np.sqrt(8)).max()
    return err <= 1e-12, f"dense Hadamard error {err:.1e}"


def _exactness(seed):
    worst = 0.0
    for d in (3, 4, 7, 8):
        for q in ("butterfly", "haar"):
            for i in range(5):
                worst = max(worst, monomial_error(sample_sr33(d, derive_seed(seed, d, i), q)))
    return worst <= 1e-10, f"max monomial error {worst:.1e} (degree <= 3)"


def _even_rule(seed):
    rng = as_generator(seed)
    worst = 0.0
    for i in range(200):
        d = int(rng.integers(3, 17))
        k = gaussian(1.0 / d)
        s = sample_sr33(d, derive_seed(seed, 2, i))
        x, y = rng.standard_normal((2, d))
        worst = max(worst, abs(sr33_estimate(s, k, x, y) - sr33_estimate_even(s, k, x, y)))
    return worst <= 1e-12, f"max |full - reduced| {worst:.1e} over 200 cases"


def _feature_rule(seed):
    rng = as_generator(seed)
    worst = 0.0
    for i, k in enumerate((gaussian(0.125), ARCCOS0, ARCCOS1)):
        F = build_feature_map(k, 8, 3, derive_seed(seed, 3, i))
        x, y = rng.standard_normal((2, 8))
        rule = np.mean([sr33_estimate(b, k, x, y) for b in F.blocks])
        worst = max(worst, abs(F(x) @ F(y) - rule))
    return worst <= 1e-10, f"max |psi(x).psi(y) - rule| {worst:.1e}"


CHECKS = (
    ("orthogonality", _orthogonality),
    ("simplex-identities", _simplex),
    ("fwht", _fwht),
    ("polynomial-exactness", _exactness),
    ("even-rule-equivalence", _even_rule),
    ("feature-rule-consistency", _feature_rule),
)


def run_selftest(seed: int = 0):
    """``[(name, passed, detail), ...]``; no timings, so the output is reproducible."""
    out = []
    for name, check in CHECKS:
        try:
            ok, detail = check(seed)
        except Exception as exc:  # report, don't abort the suite
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append((name, bool(ok), detail))
    return out
