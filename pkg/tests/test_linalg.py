import math

import numpy as np
import pytest

from conftest import random_hermitian, random_unitary
from zenopure import (
    NotHermitian,
    NumericallyDefective,
    general_eigendecompose,
    hermitian_eigendecompose,
    nullspace,
    unitary_evolution,
)
from zenopure.linalg import as_matrix, fix_phase
from zenopure.qubits import SIGMA_1, HamiltonianSpec, build_hamiltonian


def taylor_exp(H, t, order=40):
    # shift by the mean eigenvalue so the truncated series converges
    n = H.shape[0]
    shift = np.trace(H).real / n
    A = -1j * t * (H - shift * np.eye(n))
    term = np.eye(n, dtype=complex)
    out = term.copy()
    for k in range(1, order + 1):
        term = term @ A / k
        out = out + term
    return np.exp(-1j * t * shift) * out


class TestHermitian:
    def test_identity(self):
        es = hermitian_eigendecompose(np.eye(2))
        np.testing.assert_allclose(es.eigenvalues, [1, 1])
        np.testing.assert_allclose(es.reconstruct(), np.eye(2), atol=1e-14)

    def test_sigma1(self):
        es = hermitian_eigendecompose(SIGMA_1)
        np.testing.assert_allclose(es.eigenvalues, [-1, 1], atol=1e-14)
        s = 1 / math.sqrt(2)
        np.testing.assert_allclose(es.eigenvectors[:, 1], [s, s], atol=1e-14)

    def test_single_pair_spectrum(self):
        # 0, (11 -+ sqrt(5)) / 2, 11
        H = build_hamiltonian(HamiltonianSpec("single_pair", (5, 6), (1,)))
        es = hermitian_eigendecompose(H)
        expected = sorted([0.0, 5.5 - math.sqrt(1.25), 5.5 + math.sqrt(1.25), 11.0])
        np.testing.assert_allclose(es.eigenvalues, expected, atol=1e-12)

    def test_not_hermitian(self):
        with pytest.raises(NotHermitian) as info:
            hermitian_eigendecompose(np.array([[0, 1], [0, 0]]))
        assert info.value.violation == pytest.approx(1.0)

    def test_ascending_and_orthonormal(self, rng):
        for n in (1, 2, 4, 8):
            es = hermitian_eigendecompose(random_hermitian(rng, n))
            assert np.all(np.diff(es.eigenvalues) >= 0)
            np.testing.assert_allclose(es.eigenvectors.conj().T @ es.eigenvectors, np.eye(n), atol=1e-12)

    def test_reconstruction_random(self, rng):
        for _ in range(100):
            n = int(rng.integers(1, 9))
            H = random_hermitian(rng, n)
            err = np.abs(hermitian_eigendecompose(H).reconstruct() - H).max()
            assert err <= 1e-9 * max(1.0, np.linalg.norm(H, 2))

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            as_matrix(np.ones((2, 3)))

    def test_fix_phase(self):
        v = np.array([0.1j, -0.9, 0.3])
        w = fix_phase(v)
        assert w[1].real > 0 and abs(w[1].imag) < 1e-15
        assert abs(abs(np.vdot(v, w)) - np.linalg.norm(v) ** 2) < 1e-14


class TestUnitaryEvolution:
    def test_zero_time(self, rng):
        np.testing.assert_allclose(unitary_evolution(random_hermitian(rng, 4), 0.0), np.eye(4), atol=1e-14)

    def test_diagonal(self):
        U = unitary_evolution(np.diag([0.0, 1.0, 3.0]), 0.7)
        np.testing.assert_allclose(np.diag(U), np.exp(-0.7j * np.array([0, 1, 3])), atol=1e-14)

    def test_matches_series_on_single_pair(self):
        H = build_hamiltonian(HamiltonianSpec("single_pair", (5, 6), (1,)))
        t = 1.4050
        np.testing.assert_allclose(unitary_evolution(H, t), taylor_exp(H, t), atol=1e-9)

    def test_matches_series_random(self, rng):
        for _ in range(20):
            H = random_hermitian(rng, 4)
            t = float(rng.uniform(-1, 1))
            np.testing.assert_allclose(unitary_evolution(H, t), taylor_exp(H, t), atol=1e-9)

    def test_unitarity(self, rng):
        for _ in range(50):
            n = int(rng.integers(1, 9))
            U = unitary_evolution(random_hermitian(rng, n), float(rng.uniform(-5, 5)))
            np.testing.assert_allclose(U.conj().T @ U, np.eye(n), atol=1e-10)
            assert abs(abs(np.linalg.det(U)) - 1) <= 1e-10
            np.testing.assert_allclose(np.abs(np.linalg.eigvals(U)), 1.0, atol=1e-10)

    def test_non_finite_time(self):
        with pytest.raises(ValueError):
            unitary_evolution(np.eye(2), float("nan"))


class TestNullspace:
    def test_zero(self):
        assert len(nullspace(np.zeros((3, 3)))) == 3

    def test_full_rank(self):
        assert nullspace(np.eye(3)) == []

    def test_rank_one(self):
        basis = nullspace(np.array([[1.0, 1.0], [1.0, 1.0]]))
        assert len(basis) == 1
        s = 1 / math.sqrt(2)
        assert abs(abs(np.vdot(basis[0], [s, -s])) - 1) < 1e-12

    def test_projected_shift_kernel(self):
        # V - lam0 I for the single pair probed along |up> has kernel |up>
        from zenopure.closed_forms import single_eigenvalues, single_projected

        V = single_projected(5, 6, 1, 1.0, 0.0)
        lam0, _ = single_eigenvalues(5, 6, 1, 1.0)
        basis = nullspace(V - lam0 * np.eye(2))
        assert len(basis) == 1
        np.testing.assert_allclose(np.abs(basis[0]), [1, 0], atol=1e-12)


def check_biorthonormal(es, V, atol=1e-10):
    n = V.shape[0]
    np.testing.assert_allclose(es.left_vectors @ es.right_vectors, np.eye(n), atol=atol)
    np.testing.assert_allclose(es.reconstruct(), V, atol=atol * max(1.0, np.linalg.norm(V, 2)))
    total = sum(es.projector(k) for k in range(len(es.clusters)))
    np.testing.assert_allclose(total, np.eye(n), atol=atol)


class TestGeneral:
    def test_diagonal(self):
        es = general_eigendecompose(np.diag([1.0, 0.5j]))
        np.testing.assert_allclose(es.eigenvalues, [1.0, 0.5j])
        assert es.diagonalizable
        np.testing.assert_allclose(es.right_vectors, np.eye(2))
        np.testing.assert_allclose(es.left_vectors, np.eye(2))

    def test_jordan_block(self):
        V = np.array([[0.5, 1.0], [0.0, 0.5]])
        es = general_eigendecompose(V)
        assert not es.diagonalizable
        assert es.eigenspace_dims == (1,)
        assert es.clusters == ((0, 1),)
        np.testing.assert_allclose(es.eigenvalues, [0.5, 0.5])
        u1, u2 = es.right(0), es.right(1)
        np.testing.assert_allclose(V @ u1, 0.5 * u1, atol=1e-14)
        np.testing.assert_allclose(V @ u2, 0.5 * u2 + u1, atol=1e-14)
        check_biorthonormal(es, V)

    def test_hidden_three_block(self, rng):
        J = np.array([[0.3j, 1, 0], [0, 0.3j, 1], [0, 0, 0.3j]])
        Q = random_unitary(rng, 3)
        V = Q @ J @ Q.conj().T
        es = general_eigendecompose(V)
        assert [len(c) for c in es.chains] == [3]
        np.testing.assert_allclose(es.eigenvalues, [0.3j] * 3, atol=1e-6)
        check_biorthonormal(es, V, atol=1e-9)

    def test_mixed_cluster(self, rng):
        # one 2-block and one plain eigenvector at the same eigenvalue, plus a distinct one
        J = np.zeros((4, 4), dtype=complex)
        np.fill_diagonal(J, [0.8, 0.8, 0.8, 0.2])
        J[0, 1] = 1.0
        Q = random_unitary(rng, 4)
        V = Q @ J @ Q.conj().T
        es = general_eigendecompose(V)
        assert es.eigenspace_dims == (2, 1)
        assert [len(c) for c in es.chains] == [2]
        check_biorthonormal(es, V, atol=1e-9)

    def test_degenerate_diagonalizable(self, rng):
        Q = random_unitary(rng, 3)
        V = Q @ np.diag([0.7, 0.7, -0.1]) @ Q.conj().T
        es = general_eigendecompose(V)
        assert es.diagonalizable
        assert es.eigenspace_dims == (2, 1)
        check_biorthonormal(es, V)

    def test_zero_and_identity(self):
        es = general_eigendecompose(np.zeros((3, 3)))
        assert es.diagonalizable and es.eigenspace_dims == (3,)
        es = general_eigendecompose(np.eye(3))
        assert es.diagonalizable and es.eigenspace_dims == (3,)

    def test_descending_modulus(self, rng):
        for _ in range(20):
            V = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
            es = general_eigendecompose(V)
            mods = np.abs(es.eigenvalues)
            assert np.all(np.diff(mods) <= 1e-12)

    def test_random_biorthonormal(self, rng):
        for _ in range(100):
            n = int(rng.integers(1, 9))
            V = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            check_biorthonormal(general_eigendecompose(V), V, atol=1e-8)

    def test_phase_convention(self, rng):
        V = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        es = general_eigendecompose(V)
        for k in range(4):
            u = es.right(k)
            big = u[np.argmax(np.abs(u))]
            assert big.real > 0 and abs(big.imag) < 1e-12
            assert abs(np.linalg.norm(u) - 1) < 1e-12

    def test_defective_without_rank_slack(self):
        # a split Jordan block is clustered, but with zero rank tolerance no chain can be built
        V = np.array([[0.5, 1.0], [1e-18, 0.5]])
        with pytest.raises(NumericallyDefective):
            general_eigendecompose(V, rank_tol=0.0)
