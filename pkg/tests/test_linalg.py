import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from quadfeat.linalg import (
    ButterflyOrthogonal,
    InvalidDimensionError,
    OrthogonalSampler,
    butterfly_from_angles,
    fwht_normalized,
    haar_qr_orthogonal,
    sample_butterfly,
    simplex_project,
    simplex_vertices,
)

seeds = st.integers(0, 2**63 - 1)


def hadamard(p):
    H = np.array([[1.0]])
    while H.shape[0] < p:
        H = np.block([[H, H], [H, -H]])
    return H / math.sqrt(p)


def gram_target(d):
    G = np.full((d + 1, d + 1), -1.0 / d)
    np.fill_diagonal(G, 1.0)
    return G


class TestSimplex:
    @pytest.mark.parametrize("d", range(1, 65))
    def test_identities(self, d):
        V = simplex_vertices(d).vertices
        assert V.shape == (d + 1, d)
        np.testing.assert_allclose(V @ V.T, gram_target(d), atol=1e-12)
        np.testing.assert_allclose(V.sum(axis=0), 0, atol=1e-12)
        np.testing.assert_allclose(V.T @ V, (d + 1) / d * np.eye(d), atol=1e-12)

    def test_small_cases(self):
        np.testing.assert_array_equal(simplex_vertices(1).vertices, [[1.0], [-1.0]])
        V = simplex_vertices(2).vertices
        s = math.sqrt(3) / 2
        np.testing.assert_allclose(V, [[s, 0.5], [-s, 0.5], [0, -1]], atol=1e-15)

    def test_d5_gram(self):
        V = simplex_vertices(5).vertices
        off = (V @ V.T)[~np.eye(6, dtype=bool)]
        np.testing.assert_allclose(off, -0.2, atol=1e-12)

    def test_deterministic(self):
        np.testing.assert_array_equal(simplex_vertices(7).vertices, simplex_vertices(7).vertices.copy())

    @pytest.mark.parametrize("d", [0, -1, 2.5])
    def test_invalid(self, d):
        with pytest.raises(InvalidDimensionError):
            simplex_vertices(d)

    @given(st.integers(1, 40), seeds)
    def test_fast_projection(self, d, seed):
        z = np.random.default_rng(seed).standard_normal((3, d))
        np.testing.assert_allclose(simplex_project(z, d), z @ simplex_vertices(d).vertices.T, atol=1e-12)


class TestButterfly:
    def test_d1_identity(self):
        B = sample_butterfly(1, 3)
        np.testing.assert_array_equal(B.dense(), [[1.0]])

    def test_d2_rotation(self):
        theta = 0.3
        B = butterfly_from_angles([theta])
        c, s = math.cos(theta), math.sin(theta)
        np.testing.assert_allclose(B.dense(), [[c, -s], [s, c]], atol=1e-15)

    def test_d4_matches_printed_product(self):
        t1, t2, t3 = 0.4, -1.1, 2.0
        c1, s1, c2, s2, c3, s3 = (f(t) for t in (t1, t2, t3) for f in (math.cos, math.sin))
        expected = np.array(
            [
                [c1 * c2, -s1 * c2, -c1 * s2, s1 * s2],
                [s1 * c2, c1 * c2, -s1 * s2, -c1 * s2],
                [c3 * s2, -s3 * s2, c3 * c2, -s3 * c2],
                [s3 * s2, c3 * s2, s3 * c2, c3 * c2],
            ]
        )
        np.testing.assert_allclose(butterfly_from_angles([t1, t2, t3]).dense(), expected, atol=1e-15)

    def test_zero_angles_identity(self):
        x = np.random.default_rng(0).standard_normal(16)
        np.testing.assert_array_equal(butterfly_from_angles(np.zeros(15)).apply(x), x)

    @pytest.mark.parametrize("k", range(1, 9))
    @pytest.mark.parametrize("kind", ["butterfly", "haar"])
    def test_orthogonal(self, k, kind):
        d = 2**k
        M = OrthogonalSampler(kind, 11).sample(d).dense()
        assert np.linalg.norm(M.T @ M - np.eye(d)) <= 1e-10

    @pytest.mark.parametrize("d", [3, 5, 6, 12, 15, 33, 100])
    def test_orthogonal_any_d(self, d):
        M = sample_butterfly(d, d).dense()
        assert np.linalg.norm(M.T @ M - np.eye(d)) <= 1e-10

    def test_apply_matches_dense_1000_pairs(self):
        rng = np.random.default_rng(1)
        worst = 0.0
        for i in range(1000):
            d = int(rng.integers(1, 70))
            B = sample_butterfly(d, i)
            x = rng.standard_normal(d)
            ref = B.dense() @ x
            worst = max(worst, np.linalg.norm(B.apply(x) - ref) / np.linalg.norm(ref))
        assert worst <= 1e-10

    def test_first_column_d64(self):
        B = sample_butterfly(64, 5)
        e1 = np.zeros(64)
        e1[0] = 1
        np.testing.assert_allclose(B.apply(e1), B.dense()[:, 0], rtol=1e-12)

    @given(st.integers(1, 48), seeds)
    def test_transpose_inverts(self, d, seed):
        B = sample_butterfly(d, seed)
        x = np.random.default_rng(seed).standard_normal((2, d))
        np.testing.assert_allclose(B.apply_transpose(B.apply(x)), x, atol=1e-12)
        np.testing.assert_allclose(B.apply_transpose(x), x @ B.dense(), atol=1e-12)

    def test_batched_apply(self):
        B = sample_butterfly(10, 2)
        X = np.random.default_rng(2).standard_normal((4, 3, 10))
        np.testing.assert_allclose(B.apply(X), X @ B.dense().T, atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            sample_butterfly(8, 0).apply(np.ones(7))

    def test_d15_fix_removes_zero_columns(self):
        single = sample_butterfly(15, 0, t=1).dense()
        assert (single == 0).any(axis=0).sum() >= 1
        composite = sample_butterfly(15, 0, t=3).dense()
        assert np.all(composite != 0)

    def test_storage_and_cost(self):
        B = sample_butterfly(1024, 0)
        n_angles = sum(a.size for f in B.angles for a in f)
        assert n_angles == 1023
        assert B.n_multiply_adds == 4 * 512 * 10

    def test_fang_li_first_column_is_sphere_point(self):
        rng = np.random.default_rng(9)
        u = rng.standard_normal(32)
        u /= np.linalg.norm(u)
        from quadfeat.linalg import _fang_li_angles

        B = ButterflyOrthogonal(32, (tuple(_fang_li_angles(u)),))
        np.testing.assert_allclose(B.dense()[:, 0], u, atol=1e-12)

    def test_first_column_uniform(self):
        # e1 -> uniform on the sphere: first coordinate of d=4 has E[u1^2] = 1/4
        # and the angle of (u1, u2)/|.| is uniform.
        cols = np.array([sample_butterfly(4, s).apply(np.eye(4)[0]) for s in range(20000)])
        np.testing.assert_allclose((cols**2).mean(axis=0), 0.25, atol=0.01)
        angle = np.arctan2(cols[:, 1], cols[:, 0])
        counts, _ = np.histogram(angle, bins=16, range=(-np.pi, np.pi))
        from scipy.stats import chisquare

        assert chisquare(counts).pvalue > 0.01

    def test_same_seed_bit_identical(self):
        for kind in ("butterfly", "haar"):
            a = OrthogonalSampler(kind, 42).sample(24).dense()
            b = OrthogonalSampler(kind, 42).sample(24).dense()
            np.testing.assert_array_equal(a, b)


class TestHaar:
    @given(st.integers(1, 40), seeds)
    def test_orthogonal(self, d, seed):
        Q = haar_qr_orthogonal(d, seed)
        assert np.linalg.norm(Q.T @ Q - np.eye(d)) <= 1e-10

    def test_deterministic(self):
        np.testing.assert_array_equal(haar_qr_orthogonal(6, 1), haar_qr_orthogonal(6, 1))

    def test_d2_first_column_angle_uniform(self):
        from scipy.stats import chisquare

        from quadfeat.linalg import haar_qr_batch

        Q = haar_qr_batch(2, 100_000, np.random.default_rng(0))
        angle = np.mod(np.arctan2(Q[:, 1, 0], Q[:, 0, 0]), 2 * np.pi)
        counts, _ = np.histogram(angle, bins=36, range=(0, 2 * np.pi))
        assert chisquare(counts).pvalue > 0.01

    def test_batch_orthogonal(self):
        from quadfeat.linalg import haar_qr_batch

        Q = haar_qr_batch(5, 10, np.random.default_rng(1))
        np.testing.assert_allclose(np.einsum("cji,cjk->cik", Q, Q), np.broadcast_to(np.eye(5), (10, 5, 5)), atol=1e-12)


class TestFWHT:
    def test_first_column(self):
        np.testing.assert_allclose(fwht_normalized(np.array([1.0, 0, 0, 0])), [0.5] * 4)

    def test_two(self):
        np.testing.assert_allclose(fwht_normalized(np.array([1.0, 1.0])), [math.sqrt(2), 0], atol=1e-15)

    @pytest.mark.parametrize("p", [1, 2, 8, 64])
    def test_dense(self, p):
        x = np.random.default_rng(p).standard_normal((3, p))
        np.testing.assert_allclose(fwht_normalized(x), x @ hadamard(p).T, atol=1e-12)

    def test_non_power_of_two(self):
        with pytest.raises(ValueError):
            fwht_normalized(np.ones(6))

    @given(st.integers(0, 8), seeds)
    def test_involution(self, k, seed):
        x = np.random.default_rng(seed).standard_normal(2**k)
        np.testing.assert_allclose(fwht_normalized(fwht_normalized(x)), x, atol=1e-12)
