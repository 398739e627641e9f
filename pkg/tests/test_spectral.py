import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from optact.brunovsky import BrunovskyMap, gram
from optact.errors import DimensionError, InvalidInputError
from optact.spectral import (
    ObjectiveEvaluator,
    jacobi_spectrum,
    objective,
    power_largest,
    power_largest_batch,
    smallest_eig_shifted,
    smallest_eig_shifted_batch,
)
from optact.verification import random_spd

SQ = np.sqrt(2) / 2
R2 = 2 * np.sqrt(2)


class TestPowerLargest:
    def test_diagonal(self):
        assert power_largest(np.diag([1.0, 4.0])).value == pytest.approx(4.0, rel=1e-12)

    def test_2x2(self):
        assert power_largest([[5.0, 2.0], [2.0, 1.0]]).value == pytest.approx(3 + R2, rel=1e-12)

    def test_identity_one_step(self):
        res = power_largest(np.eye(4))
        assert res.value == pytest.approx(1.0, abs=1e-15)
        assert res.iterations == 1 and res.converged

    def test_residual_when_converged(self, rng):
        for _ in range(20):
            G = rng.standard_normal((6, 6))
            M = G @ G.T
            res = power_largest(M)
            assert res.converged
            assert np.linalg.norm(M @ res.vector - res.value * res.vector) <= 1e-12 * np.linalg.norm(M)
            assert np.linalg.norm(res.vector) == pytest.approx(1.0, abs=1e-14)

    def test_iteration_cap_reports_non_convergence(self):
        res = power_largest([[2.0, 1.0], [1.0, 2.0]], max_iter=1)
        assert not res.converged

    def test_textbook_iteration_still_converges(self):
        vals, _, _, conv = power_largest_batch([[5.0, 2.0], [2.0, 1.0]], squarings=0)
        assert conv[0] and vals[0] == pytest.approx(3 + R2, rel=1e-11)

    def test_rejects_bad_tol(self):
        with pytest.raises(InvalidInputError):
            power_largest(np.eye(2), tol=0.0)

    def test_rejects_non_square(self):
        with pytest.raises(DimensionError):
            power_largest(np.ones((2, 3)))


class TestSmallest:
    def test_2x2(self):
        assert smallest_eig_shifted([[5.0, 2.0], [2.0, 1.0]]).value == pytest.approx(3 - R2, rel=1e-12)

    def test_identity(self):
        assert smallest_eig_shifted(np.eye(3)).value == pytest.approx(1.0, abs=1e-14)

    def test_singular_gram(self, heat2):
        assert abs(smallest_eig_shifted(gram(heat2, [SQ, SQ])).value) <= 1e-10

    @settings(max_examples=40, deadline=None)
    @given(c=st.floats(0, 1e6, allow_nan=False), n=st.integers(1, 8))
    def test_shift_of_scaled_identity(self, c, n):
        assert smallest_eig_shifted(c * np.eye(n)).value == pytest.approx(c, rel=1e-12, abs=1e-300)

    def test_oracle_agreement(self):
        mats = random_spd(np.random.default_rng(77), 1000)
        worst = max(abs(smallest_eig_shifted(M).value - jacobi_spectrum(M)[0]) / max(1.0, np.linalg.norm(M))
                    for M in mats)
        assert worst <= 1e-8

    def test_near_degenerate_shifted_stage(self):
        # lambda_1 and lambda_2 are both tiny against lambda_max, so the shifted
        # matrix has an eigenvalue ratio within 1e-10 of one
        M = np.diag([1e6, 9.3e-5, 4e-6])
        Q, _ = np.linalg.qr(np.random.default_rng(1).standard_normal((3, 3)))
        res = smallest_eig_shifted(Q @ M @ Q.T)
        assert res.converged
        assert abs(res.value - 4e-6) <= 1e-9

    def test_batch_independent_of_neighbours(self, rng):
        mats = np.array(random_spd(np.random.default_rng(5), 1, max_n=1) * 0 + [np.eye(1)])
        stack = np.array([G @ G.T for G in rng.standard_normal((12, 5, 5))])
        full = smallest_eig_shifted_batch(stack)[0]
        for i in range(12):
            assert smallest_eig_shifted_batch(stack[i])[0][0] == full[i]
        assert mats.shape == (1, 1, 1)


class TestJacobi:
    def test_2x2(self):
        np.testing.assert_allclose(jacobi_spectrum([[5.0, 2.0], [2.0, 1.0]]), [3 - R2, 3 + R2], rtol=1e-14)

    def test_diagonal_sorted(self):
        np.testing.assert_array_equal(jacobi_spectrum(np.diag([3.0, 1.0, 2.0])), [1.0, 2.0, 3.0])

    def test_zero(self):
        np.testing.assert_array_equal(jacobi_spectrum(np.zeros((4, 4))), np.zeros(4))

    def test_stack(self, rng):
        stack = np.array([G + G.T for G in rng.standard_normal((5, 6, 6))])
        got = jacobi_spectrum(stack)
        for M, row in zip(stack, got):
            np.testing.assert_allclose(row, np.linalg.eigvalsh(M), atol=1e-12 * np.linalg.norm(M))


class TestObjective:
    def test_axis(self, heat2):
        assert objective(heat2, [1.0, 0.0]) == pytest.approx(3 - R2, rel=1e-12)

    def test_non_cyclic_is_zero(self, heat2):
        assert objective(heat2, [SQ, SQ]) == pytest.approx(0.0, abs=1e-12)

    def test_maximizer(self, heat2):
        b = np.array([0.97891, -0.20431])
        assert objective(heat2, b / np.linalg.norm(b)) == pytest.approx(0.2, abs=1e-5)

    def test_requires_unit_vector(self, heat2):
        with pytest.raises(InvalidInputError):
            objective(heat2, [2.0, 0.0])

    def test_dimension_mismatch(self, heat2):
        with pytest.raises(DimensionError):
            objective(heat2, [1.0, 0.0, 0.0])

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 10_000), n=st.integers(2, 6))
    def test_sign_symmetry(self, seed, n):
        rng = np.random.default_rng(seed)
        A = rng.standard_normal((n, n))
        b = rng.standard_normal(n)
        b /= np.linalg.norm(b)
        assert objective(A, b) == objective(A, -b)

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 10_000), n=st.integers(2, 6))
    def test_rayleigh_bound(self, seed, n):
        rng = np.random.default_rng(seed)
        A = rng.standard_normal((n, n))
        b = rng.standard_normal(n)
        b /= np.linalg.norm(b)
        M = gram(A, b)
        x = rng.standard_normal(n)
        lam = objective(A, b)
        assert lam >= 0.0
        assert lam <= x @ M @ x / (x @ x) + 1e-12 * np.linalg.norm(M)

    def test_evaluator_with_embedding(self):
        A = np.array([[0.0, 1.0], [-1.0, 0.0]])
        E = np.array([[0.0], [1.0]])
        ev = ObjectiveEvaluator(BrunovskyMap(A), embedding=E)
        assert ev.dim == 1
        np.testing.assert_array_equal(ev.lift([[2.0]]), [[0.0, 2.0]])
