import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gruss_lab.errors import BNotInvertible, DimensionMismatch, NotHermitian, NotPSD, NotSquare, PreconditionError
from gruss_lab.matcore import (
    ToleranceConfig,
    hermitian_eigen,
    loewner_leq,
    matrix_abs,
    operator_norm,
    psd_sqrt,
    real_part_accretive,
    schur_block_psd,
)
from gruss_lab.gruss_core import c_operator
from helpers import cmat, dims, herm, psd, seeds
from oracles import EIG_3_HALF, GOLDEN_NORM, opnorm


class TestHermitianEigen:
    def test_diagonal(self):
        res = hermitian_eigen(np.diag([2.0, 1.0]))
        np.testing.assert_allclose(res.eigenvalues, [1.0, 2.0])
        np.testing.assert_allclose(np.abs(res.eigenvectors), [[0, 1], [1, 0]], atol=1e-15)

    def test_closed_form_2x2(self):
        res = hermitian_eigen([[3, 0.5], [0.5, 2]])
        np.testing.assert_allclose(res.eigenvalues, EIG_3_HALF, atol=1e-12)

    def test_complex_entries(self):
        res = hermitian_eigen([[1, 1j], [-1j, 1]])
        np.testing.assert_allclose(res.eigenvalues, [0.0, 2.0], atol=1e-12)

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitian):
            hermitian_eigen([[1, 2], [0, 1]])

    def test_rejects_rectangular(self):
        with pytest.raises(NotSquare):
            hermitian_eigen(np.ones((2, 3)))

    @given(seeds, dims)
    def test_reconstruction(self, seed, n):
        M = herm(seed, n)
        w, V = hermitian_eigen(M)
        assert np.all(np.diff(w) >= 0)
        assert opnorm(V @ np.diag(w) @ V.conj().T - M) <= 1e-8 * max(1, opnorm(M))
        assert opnorm(V.conj().T @ V - np.eye(n)) <= 1e-10


class TestAbsAndSqrt:
    def test_transpose_defect(self):
        np.testing.assert_allclose(matrix_abs([[0, -6], [6, 0]]), np.diag([6, 6]), atol=1e-12)

    def test_zero(self):
        np.testing.assert_array_equal(matrix_abs(np.zeros((3, 3))), np.zeros((3, 3)))

    @given(seeds, dims)
    def test_psd_fixed_point(self, seed, n):
        P = psd(seed, n)
        np.testing.assert_allclose(matrix_abs(P), P, atol=1e-9 * opnorm(P))

    @given(seeds, dims)
    def test_abs_squares_to_gram(self, seed, n):
        M = cmat(seed, n)
        R = matrix_abs(M)
        assert np.linalg.eigvalsh(R)[0] >= -1e-10 * opnorm(M)
        assert opnorm(R @ R - M.conj().T @ M) <= 1e-9 * max(1, opnorm(M) ** 2)
        assert abs(opnorm(R) - opnorm(M)) <= 1e-10 * max(1, opnorm(M))

    def test_sqrt_example(self):
        np.testing.assert_allclose(psd_sqrt(np.diag([2.25, 2.25])), np.diag([1.5, 1.5]))

    def test_sqrt_identity(self):
        np.testing.assert_allclose(psd_sqrt(np.eye(4)), np.eye(4))

    @given(seeds, dims)
    def test_sqrt_reconstruction(self, seed, n):
        P = psd(seed, n)
        S = psd_sqrt(P)
        assert opnorm(S @ S - P) <= 1e-8 * max(1, opnorm(P))

    def test_sqrt_clamps_roundoff(self):
        S = psd_sqrt(np.diag([1.0, -1e-14]))
        np.testing.assert_allclose(S, np.diag([1.0, 0.0]))

    @given(seeds, st.integers(1, 3), st.integers(1, 3))
    def test_sqrt_of_rank_deficient_gram_matches_abs(self, seed, m, extra):
        # d*d has rank m < k; its root must agree with the SVD-based |d| to rounding.
        d = cmat(seed, m, m + extra)
        _, s, Vh = np.linalg.svd(d, full_matrices=False)
        ref = (Vh.conj().T * s) @ Vh
        assert opnorm(psd_sqrt(d.conj().T @ d) - ref) <= 1e-12 * max(1, opnorm(d))

    @given(seeds, st.integers(1, 3), st.integers(1, 3))
    def test_sqrt_after_cancellation(self, seed, m, extra):
        d = 0.1 * cmat(seed, m, m + extra)
        S = 10 * psd(seed + 1, m + extra)
        M = (d.conj().T @ d + S) - S  # small rank-deficient result of a large difference
        _, s, Vh = np.linalg.svd(d, full_matrices=False)
        ref = (Vh.conj().T * s) @ Vh
        root = psd_sqrt(M, scale=2 * opnorm(S))
        assert opnorm(root - ref) <= 1e-7 * max(1, opnorm(S))
        null = np.linalg.svd(d)[2][m:].conj().T
        assert opnorm(root @ null) <= 1e-12 * max(1, opnorm(S))

    def test_sqrt_rejects_negative(self):
        with pytest.raises(NotPSD):
            psd_sqrt(np.diag([1.0, -0.1]))


class TestOperatorNorm:
    def test_example_T(self):
        assert operator_norm([[1, -0.1], [-0.1, 1]]) == pytest.approx(1.1, abs=1e-12)

    def test_golden(self):
        assert operator_norm([[1, -1], [-1, 2]]) == pytest.approx(GOLDEN_NORM, abs=1e-12)

    @pytest.mark.parametrize("n", [1, 3, 7])
    def test_identity(self, n):
        assert operator_norm(np.eye(n)) == pytest.approx(1.0)

    @given(seeds, dims)
    def test_matches_svd(self, seed, n):
        M = cmat(seed, n)
        assert operator_norm(M) == pytest.approx(np.linalg.svd(M, compute_uv=False)[0], rel=1e-10)


class TestLoewner:
    def test_counterexample_direction(self):
        res = loewner_leq(np.diag([6.0, 6.0]), np.diag([3.75, 3.75]))
        assert not res.holds
        assert res.margin == pytest.approx(-2.25)

    def test_reflexive(self):
        A = np.diag([1.0, 2.0])
        assert loewner_leq(A, A) == (True, 0.0)

    @given(seeds, dims)
    def test_wishart_nonnegative(self, seed, n):
        assert loewner_leq(np.zeros((n, n)), psd(seed, n)).holds

    @given(seeds, dims, st.floats(0, 1e-10))
    def test_antisymmetry(self, seed, n, eps):
        A = herm(seed, n)
        B = A + eps * herm(seed + 1, n)
        cfg = ToleranceConfig()
        if loewner_leq(A, B, cfg).holds and loewner_leq(B, A, cfg).holds:
            assert opnorm(A - B) <= 2 * cfg.scale(max(opnorm(A), opnorm(B)))

    def test_errors(self):
        with pytest.raises(DimensionMismatch):
            loewner_leq(np.eye(2), np.eye(3))
        with pytest.raises(NotHermitian):
            loewner_leq([[0, 1], [0, 0]], np.eye(2))


class TestAccretive:
    @given(seeds, dims)
    def test_psd_accretive(self, seed, n):
        assert real_part_accretive(psd(seed, n)).accretive

    def test_skew(self):
        H = herm(3, 3)
        res = real_part_accretive(1j * H)
        assert res.accretive
        assert abs(res.margin) <= 1e-12
        np.testing.assert_allclose(res.re, 0, atol=1e-12)

    @given(seeds, dims)
    def test_interval_operator(self, seed, n):
        A = herm(seed, n)
        w = np.linalg.eigvalsh(A)
        assert real_part_accretive(c_operator(A, w[0], w[-1])).accretive

    @given(seeds, dims, st.complex_numbers(max_magnitude=5), st.complex_numbers(max_magnitude=5))
    def test_accretivity_identity(self, seed, n, S, T):
        A = cmat(seed, n)
        lhs = np.linalg.eigvalsh((lambda C: (C + C.conj().T) / 2)(c_operator(A, S, T)))[0]
        D = A - (S + T) / 2 * np.eye(n)
        rhs = np.linalg.eigvalsh(0.25 * abs(T - S) ** 2 * np.eye(n) - D.conj().T @ D)[0]
        assert lhs == pytest.approx(rhs, abs=1e-9 * max(1, opnorm(A) ** 2, abs(S) ** 2, abs(T) ** 2))


class TestSchur:
    def test_trivial(self):
        res = schur_block_psd(np.eye(2), np.zeros((2, 2)), np.eye(2))
        assert res.direct and res.schur

    def test_too_large_offdiagonal(self):
        res = schur_block_psd(np.eye(2), 2 * np.eye(2), np.eye(2))
        assert not res.direct and not res.schur

    def test_corner_block_from_example(self):
        # [[Phi(A*A), Phi(A*B), Phi(A*)], ..., [Phi(A), Phi(B), Phi(I)]] for the corner functional.
        A = np.array([[1.0, 2.0], [2.0, 4.0]])
        B = np.diag([1.0, 4.0])
        f = lambda X: X[0, 0]
        M = np.array([[f(A.T @ A), f(A.T @ B), f(A.T)], [f(B.T @ A), f(B.T @ B), f(B.T)], [f(A), f(B), 1.0]])
        res = schur_block_psd(M[:2, :2], M[:2, 2:], M[2:, 2:])
        assert res.direct and res.schur

    def test_singular_B(self):
        with pytest.raises(BNotInvertible):
            schur_block_psd(np.eye(2), np.zeros((2, 2)), np.diag([1.0, 0.0]))

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            schur_block_psd(np.eye(2), np.zeros((3, 2)), np.eye(2))

    @given(seeds, st.integers(1, 4), st.integers(1, 4))
    def test_agreement(self, seed, p, q):
        r = np.random.default_rng(seed)
        A = psd(seed, p) * r.random()
        B = psd(seed + 1, q) + 0.1 * np.eye(q)
        X = cmat(seed + 2, p, q) * r.random()
        res = schur_block_psd(A, X, B)
        assert res.direct == res.schur or min(abs(res.direct_margin), abs(res.schur_margin)) < 1e-8


def test_tolerance_validation():
    with pytest.raises(PreconditionError):
        ToleranceConfig(rel=-1.0)
    assert ToleranceConfig.from_json({"rel": 1e-6}).abs == 1e-12
    assert ToleranceConfig().scale(10.0) == pytest.approx(1e-12 + 1e-8)
