import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gruss_lab.errors import (
    AccretivityFailed,
    MapIdentityNotInvertible,
    NotStarLinear,
    NotUnital,
    PositivityUncertified,
)
from gruss_lab.gruss_core import (
    INEQUALITY_IDS,
    check_accretive_covariance,
    check_accretive_variance,
    check_covariance_bound,
    check_nonunital_covariance,
    check_nonunital_variance,
    check_refined_norm_bound,
    check_variance_bound,
    covariance_block_check,
    variance_gap,
)
from gruss_lab.matcore import min_eig
from gruss_lab.posmaps import BuiltinMap, ChoiMap, KrausMap, choi_matrix, corner, identity_map, tomiyama, trace_density, transpose
from gruss_lab.scalar_center import center_of, distance_to_scalars
from helpers import cmat, herm, psd, seeds, unitary
from oracles import (
    PRINTED_TRANSPOSE,
    PRINTED_VARIANCE,
    TOMIYAMA_NONUNITAL_MARGIN,
    TOMIYAMA_UNITAL_FORM_MARGIN,
    opnorm,
    unit,
)
from test_posmaps import random_kraus

A_EX = np.array([[1.0, 2.0], [2.0, 4.0]])
B_EX = np.diag([1.0, 4.0])


def unital_cp(seed, n, count=3):
    return random_kraus(seed, n, count=count, unital=True)


def test_ids():
    assert len(INEQUALITY_IDS) == len(set(INEQUALITY_IDS)) == 9


class TestVarianceGap:
    def test_corner_example(self):
        assert variance_gap(corner(2), A_EX)[0, 0] == pytest.approx(PRINTED_VARIANCE["gap"])

    @given(seeds)
    def test_identity_zero(self, seed):
        assert opnorm(variance_gap(identity_map(3), cmat(seed, 3))) <= 1e-10

    @given(seeds)
    def test_trace_density_oracle(self, seed):
        T = psd(seed, 3)
        T = 3 * T / np.trace(T).real
        A = herm(seed + 1, 3)
        got = variance_gap(trace_density(T), A)[0, 0].real
        tau = lambda X: np.trace(X).real / 3
        assert got == pytest.approx(tau(T @ A @ A) - tau(T @ A) ** 2, abs=1e-9 * max(1, opnorm(A) ** 2))
        assert got >= -1e-10


class TestVarianceBound:
    def test_example_tiers(self):
        rep = check_variance_bound(corner(2), A_EX, 0.0)
        assert rep.inequality_id == "variance.chain" and rep.satisfied
        lemma, chain, norm = rep.tiers
        assert (lemma.lhs[0, 0].real, lemma.rhs[0, 0].real) == (pytest.approx(4, abs=1e-9), pytest.approx(5, abs=1e-9))
        assert chain.lhs[0, 0].real == pytest.approx(5, abs=1e-9)
        assert chain.rhs[0, 0].real == pytest.approx(25, abs=1e-9)  # ||A||^2 at alpha = 0
        assert norm.rhs[0, 0].real == pytest.approx(6.25, abs=1e-9)

    def test_lemma_only_id(self):
        rep = check_variance_bound(corner(2), A_EX, 0.0, chain=False)
        assert rep.inequality_id == "variance" and len(rep.tiers) == 1

    @given(seeds, st.complex_numbers(max_magnitude=5))
    def test_identity_margin(self, seed, alpha):
        A = cmat(seed, 3)
        rep = check_variance_bound(identity_map(3), A, alpha)
        D = A - alpha * np.eye(3)
        assert rep.tiers[0].margin == pytest.approx(min_eig(D.conj().T @ D), abs=1e-9 * max(1, opnorm(D) ** 2))

    @settings(max_examples=15)
    @given(seeds)
    def test_random_unital(self, seed):
        A = cmat(seed, 3)
        assert check_variance_bound(unital_cp(seed, 3), A, distance_to_scalars(A).gamma).satisfied

    def test_preconditions(self):
        with pytest.raises(NotUnital):
            check_variance_bound(tomiyama(), np.eye(3), 0.0)
        # X -> X + (i/2)(X - X^T): unital but not *-preserving.
        C = choi_matrix(identity_map(2)).matrix
        C = C + 0.5j * (C - choi_matrix(transpose(2)).matrix)
        with pytest.raises(NotStarLinear):
            check_variance_bound(ChoiMap(C, 2, 2), A_EX, 0)

    @given(seeds, st.integers(2, 4))
    def test_alpha_freedom(self, seed, n):
        A = cmat(seed, n)
        phi = unital_cp(seed, n)
        R = 3 * opnorm(A)
        r = np.random.default_rng(seed)
        for _ in range(25):
            a = R * np.sqrt(r.random()) * np.exp(2j * np.pi * r.random())
            assert check_variance_bound(phi, A, a, chain=False, center=0.0).satisfied

    def test_optimality_over_grid(self):
        A = herm(11, 4)
        g = center_of(A)
        R = 3 * opnorm(A)
        xs = np.linspace(-R, R, 41)
        spacing = xs[1] - xs[0]
        grid = [complex(x, y) for x in xs for y in xs if abs(complex(x, y)) <= R]
        vals = [check_variance_bound(identity_map(4), A, a).values["alpha_bound"] for a in grid]
        best = grid[int(np.argmin(vals))]
        assert min(vals) >= g.radius**2 - 1e-9
        assert abs(best - g.gamma) <= spacing


class TestAccretiveVariance:
    @given(seeds)
    def test_bhatia_davis(self, seed):
        A = herm(seed, 3)
        w = np.linalg.eigvalsh(A)
        rep = check_accretive_variance(corner(3), A, w[0], w[-1])
        assert rep.satisfied
        assert rep.tiers[0].lhs[0, 0].real <= 0.25 * (w[-1] - w[0]) ** 2 + 1e-9

    def test_scalar(self):
        rep = check_accretive_variance(corner(2), 3 * np.eye(2), 3, 3)
        assert rep.satisfied
        assert opnorm(rep.tiers[0].lhs) <= 1e-12 and opnorm(rep.tiers[1].rhs) <= 1e-12

    @settings(max_examples=15)
    @given(seeds, st.integers(2, 4))
    def test_disk_construction(self, seed, n):
        A = cmat(seed, n)
        g = distance_to_scalars(A)
        rep = check_accretive_variance(unital_cp(seed, n), A, g.gamma - g.radius * 1.000001, g.gamma + g.radius * 1.000001)
        assert rep.satisfied

    def test_accretivity_failure(self):
        with pytest.raises(AccretivityFailed):
            check_accretive_variance(identity_map(2), A_EX, 0, 0)


class TestBlock:
    def test_identity_zero(self):
        rep = covariance_block_check(identity_map(2), A_EX, B_EX)
        assert rep.margin == pytest.approx(0, abs=1e-12) and rep.satisfied

    def test_corner_psd(self):
        rep = covariance_block_check(corner(2), A_EX, B_EX)
        assert rep.satisfied and rep.margin >= 0

    def test_transpose_fails(self):
        rep = covariance_block_check(transpose(2), A_EX, B_EX, assume_positive=3)
        assert not rep.satisfied and rep.margin < 0

    def test_positivity_required(self):
        with pytest.raises(PositivityUncertified):
            covariance_block_check(transpose(2), A_EX, B_EX)
        with pytest.raises(PositivityUncertified):
            covariance_block_check(transpose(2), A_EX, B_EX, assume_positive=2)


class TestCovariance:
    def test_transpose_counterexample(self):
        rep = check_covariance_bound(transpose(2), A_EX, B_EX, 2.5, 2.5, assume_positive=3)
        np.testing.assert_allclose(rep.lhs, PRINTED_TRANSPOSE["lhs"] * np.eye(2), atol=1e-9)
        np.testing.assert_allclose(rep.rhs, PRINTED_TRANSPOSE["rhs"] * np.eye(2), atol=1e-9)
        assert not rep.satisfied
        assert rep.margin == pytest.approx(PRINTED_TRANSPOSE["margin"], abs=1e-9)

    def test_counterexample_stable(self):
        runs = [check_covariance_bound(transpose(2), A_EX, B_EX, 2.5, 2.5, assume_positive=3).margin for _ in range(3)]
        assert runs[0] == runs[1] == runs[2]

    @given(seeds)
    def test_identity(self, seed):
        rep = check_covariance_bound(identity_map(3), cmat(seed, 3), cmat(seed + 1, 3), 1.0, 1j)
        assert opnorm(rep.lhs) <= 1e-10 * max(1, opnorm(rep.rhs)) and rep.satisfied

    @settings(max_examples=15)
    @given(seeds)
    def test_random_cp(self, seed):
        A, B = cmat(seed, 3), cmat(seed + 1, 3)
        assert check_covariance_bound(unital_cp(seed, 3), A, B).satisfied

    def test_tomiyama_unital_form(self):
        rep = check_covariance_bound(
            tomiyama(), unit(3, 3, 1), unit(3, 1, 2), 0, 0, assume_positive=3, assume_unital=True
        )
        assert not rep.satisfied
        assert rep.margin == pytest.approx(TOMIYAMA_UNITAL_FORM_MARGIN, abs=1e-9)

    def test_tomiyama_nonunital_form(self):
        rep = check_nonunital_covariance(tomiyama(), unit(3, 3, 1), unit(3, 1, 2), 0, 0, assume_positive=3)
        assert rep.satisfied
        assert rep.margin == pytest.approx(TOMIYAMA_NONUNITAL_MARGIN, abs=1e-9)

    def test_tomiyama_needs_override(self):
        with pytest.raises(PositivityUncertified):
            check_nonunital_covariance(tomiyama(), unit(3, 3, 1), unit(3, 1, 2), 0, 0)

    @settings(max_examples=15)
    @given(seeds, st.integers(2, 4))
    def test_monotone_tightening(self, seed, n):
        A, B = cmat(seed, n), cmat(seed + 1, n)
        phi = unital_cp(seed, n)
        gA, gB = center_of(A).gamma, center_of(B).gamma
        cov = check_covariance_bound(phi, A, B, np.conj(gA), gB)
        norm = check_refined_norm_bound(phi, A, B, centers={"A": gA, "B": gB})
        assert min_eig(norm.rhs * np.eye(n) - cov.rhs) >= -1e-9 * max(1, norm.rhs)


class TestRefinedNorm:
    def test_corner(self):
        rep = check_refined_norm_bound(corner(2), A_EX, B_EX)
        assert rep.lhs == pytest.approx(0, abs=1e-12)
        assert rep.rhs == pytest.approx(3.75, abs=1e-7)

    def test_scalar_input(self):
        rep = check_refined_norm_bound(unital_cp(1, 3), 2 * np.eye(3), cmat(2, 3))
        assert rep.lhs == pytest.approx(0, abs=1e-10) and rep.rhs == pytest.approx(0, abs=1e-7)

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_random(self, n):
        rep = check_refined_norm_bound(unital_cp(n, n), cmat(n, n), cmat(n + 1, n))
        assert rep.satisfied and 0 <= rep.tightness <= 1 + 1e-9


class TestAccretiveCovariance:
    def test_identity(self):
        rep = check_accretive_covariance(identity_map(2), A_EX, B_EX, 0, 5, 1, 4)
        assert opnorm(rep.lhs) <= 1e-12 and rep.satisfied

    @given(seeds)
    def test_corner_bhatia_davis(self, seed):
        A, B = herm(seed, 3), herm(seed + 1, 3)
        a, b = np.linalg.eigvalsh(A), np.linalg.eigvalsh(B)
        assert check_accretive_covariance(corner(3), A, B, a[0], a[-1], b[0], b[-1]).satisfied

    @settings(max_examples=15)
    @given(seeds)
    def test_random_disks(self, seed):
        A, B = cmat(seed, 3), cmat(seed + 1, 3)
        gA, gB = distance_to_scalars(A.conj().T), distance_to_scalars(B)
        s = 1 + 1e-6
        rep = check_accretive_covariance(
            unital_cp(seed, 3), A, B,
            gA.gamma - s * gA.radius, gA.gamma + s * gA.radius,
            gB.gamma - s * gB.radius, gB.gamma + s * gB.radius,
        )
        assert rep.satisfied

    def test_names_failing_hypothesis(self):
        with pytest.raises(AccretivityFailed) as exc:
            check_accretive_covariance(identity_map(2), A_EX, B_EX, 0, 5, 2, 2)
        assert "gamma,Gamma" in exc.value.hypothesis


class TestNonunital:
    def test_scaled_corner(self):
        phi = BuiltinMap("corner", {"n": 2, "index": (1, 1)})
        double = KrausMap((np.sqrt(2) * np.array([[1.0, 0.0]]),))
        rep = check_nonunital_variance(double, A_EX, 0)
        # Phi(I) = 2, Phi(A*A) = 10, Phi(A) = 2: lhs = 10 - 2 * 2 / 2 = 8, rhs = 10.
        assert rep.lhs[0, 0].real == pytest.approx(8) and rep.rhs[0, 0].real == pytest.approx(10)
        assert rep.satisfied
        assert check_variance_bound(phi, A_EX, 0).satisfied

    @settings(max_examples=15)
    @given(seeds)
    def test_unital_reduces(self, seed):
        A = cmat(seed, 3)
        phi = unital_cp(seed, 3)
        a = center_of(A).gamma
        nu = check_nonunital_variance(phi, A, a)
        u = check_variance_bound(phi, A, a, chain=False)
        np.testing.assert_allclose(nu.lhs, u.lhs, atol=1e-9 * max(1, opnorm(A) ** 2))
        np.testing.assert_allclose(nu.rhs, u.rhs, atol=1e-9 * max(1, opnorm(A) ** 2))

    @settings(max_examples=15)
    @given(seeds)
    def test_tomiyama(self, seed):
        A = cmat(seed, 3)
        assert check_nonunital_variance(tomiyama(), A, distance_to_scalars(A).gamma).satisfied

    @given(seeds)
    def test_covariance_unital_reduces(self, seed):
        A, B = cmat(seed, 3), cmat(seed + 1, 3)
        phi = unital_cp(seed, 3)
        a = check_covariance_bound(phi, A, B, 0.5, 1j)
        b = check_nonunital_covariance(phi, A, B, 0.5, 1j)
        assert abs(a.margin - b.margin) <= 1e-8 * max(1, opnorm(a.rhs))

    @settings(max_examples=15)
    @given(seeds, st.floats(0.1, 10))
    def test_scaled_cp(self, seed, c):
        phi = random_kraus(seed, 3)
        phi = KrausMap(tuple(np.sqrt(c) * K for K in phi.ops))
        assert check_nonunital_covariance(phi, cmat(seed + 1, 3), cmat(seed + 2, 3)).satisfied

    def test_singular_identity(self):
        with pytest.raises(MapIdentityNotInvertible):
            check_nonunital_variance(KrausMap((np.array([[1.0, 0.0], [0.0, 0.0]]),)), A_EX, 0)


class TestZeroGap:
    @given(seeds, st.integers(2, 4))
    def test_unitary_conjugation(self, seed, n):
        phi = KrausMap((unitary(seed, n),))
        A, B = cmat(seed + 1, n), cmat(seed + 2, n)
        centers = {"A": 0.5, "B": -1j}
        for rep in (
            check_variance_bound(phi, A, 0.5, center=0.5),
            check_covariance_bound(phi, A, B, 0.5, -1j),
            check_refined_norm_bound(phi, A, B, centers=centers),
            check_nonunital_covariance(phi, A, B, 0.5, -1j),
        ):
            assert opnorm(np.atleast_2d(rep.lhs)) <= 1e-10 * max(1, opnorm(A) * opnorm(B), opnorm(A) ** 2)
