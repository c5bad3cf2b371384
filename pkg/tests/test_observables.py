import math

import numpy as np
import pytest

from collisync.linalg import (
    PAULI_Y,
    PAULI_Z,
    DensityMatrix,
    kron,
    unitary_from_hamiltonian,
)
from collisync.observables import (
    ObservableSelector,
    concurrence,
    expectation,
    mutual_information,
)

from conftest import random_density, random_unitary


def dm1(mat):
    return DensityMatrix(mat, ("s1",))


def plus_state():
    v = np.array([1.0, 1.0]) / math.sqrt(2)
    return np.outer(v, v.conj())


def bell_state():
    psi = np.zeros(4, dtype=complex)
    psi[0] = psi[3] = 1 / math.sqrt(2)
    return np.outer(psi, psi.conj())


class TestExpectation:
    def test_plus_state_x(self):
        assert abs(expectation(dm1(plus_state()), ObservableSelector("x", "s1")) - 1.0) < 1e-12

    def test_ground_state_z(self):
        rho = dm1(np.diag([1.0, 0.0]).astype(complex))
        assert abs(expectation(rho, ObservableSelector("z", "s1")) - 1.0) < 1e-12

    def test_one_free_rotation(self):
        # |+> precessing under H = -(omega/2) sigma_z for omega dt = 0.2
        u = unitary_from_hamiltonian(-0.5 * PAULI_Z, 0.2)
        rho = dm1(u @ plus_state() @ u.conj().T)
        got = expectation(rho, ObservableSelector("x", "s1"))
        assert abs(got - math.cos(0.2)) < 1e-12

    def test_reduces_multi_spin_states(self, rng):
        rho = DensityMatrix(kron(plus_state(), random_density(rng, 2)), ("s1", "s2"))
        assert abs(expectation(rho, ObservableSelector("x", "s1")) - 1.0) < 1e-12

    def test_unknown_subsystem(self):
        with pytest.raises(ValueError, match="not in layout"):
            expectation(dm1(plus_state()), ObservableSelector("x", "s9"))

    def test_bad_axis(self):
        with pytest.raises(ValueError, match="axis"):
            ObservableSelector("q", "s1")


class TestConcurrence:
    def test_bell_state(self):
        assert abs(concurrence(bell_state()) - 1.0) < 1e-12

    def test_product_state(self, rng):
        rho = kron(random_density(rng, 2), random_density(rng, 2))
        assert concurrence(rho) < 1e-10

    def test_werner_state(self):
        # p |Phi+><Phi+| + (1-p) I/4 has concurrence max{0, (3p-1)/2}
        p = 0.5
        rho = p * bell_state() + (1 - p) * np.eye(4) / 4
        assert abs(concurrence(rho) - 0.25) < 1e-12
        p = 0.2
        rho = p * bell_state() + (1 - p) * np.eye(4) / 4
        assert concurrence(rho) == 0.0

    def test_against_general_eigensolver(self, rng):
        # same spectrum from the non-Hermitian product rho rho_flipped
        yy = kron(PAULI_Y, PAULI_Y)
        for _ in range(10):
            rho = random_density(rng, 4)
            flipped = yy @ rho.conj() @ yy
            w = np.linalg.eigvals(rho @ flipped)
            s = np.sqrt(np.clip(np.sort(w.real)[::-1], 0.0, None))
            expected = max(0.0, s[0] - s[1] - s[2] - s[3])
            assert abs(concurrence(rho) - expected) < 1e-8

    def test_local_unitary_invariance(self, rng):
        for _ in range(20):
            rho = random_density(rng, 4)
            u = kron(random_unitary(rng, 2), random_unitary(rng, 2))
            rotated = u @ rho @ u.conj().T
            assert abs(concurrence(rho) - concurrence(rotated)) < 1e-10

    def test_separable_mixtures_are_unentangled(self, rng):
        for _ in range(5):
            weights = rng.dirichlet(np.ones(4))
            rho = sum(
                w * kron(random_density(rng, 2), random_density(rng, 2)) for w in weights
            )
            assert concurrence(rho) < 1e-10

    def test_accepts_density_matrix_wrapper(self):
        dm = DensityMatrix(bell_state(), ("s1", "s2"))
        assert abs(concurrence(dm) - 1.0) < 1e-12

    def test_rejects_wrong_shape(self):
        with pytest.raises(ValueError, match="two-spin"):
            concurrence(np.eye(2) / 2)


class TestMutualInformation:
    def test_product_state(self, rng):
        rho = kron(random_density(rng, 2), random_density(rng, 2))
        assert abs(mutual_information(rho)) < 1e-10

    def test_bell_state(self):
        assert abs(mutual_information(bell_state()) - 2.0) < 1e-12

    def test_classical_mixture(self):
        rho = np.diag([0.5, 0.0, 0.0, 0.5]).astype(complex)
        assert abs(mutual_information(rho) - 1.0) < 1e-12

    def test_range_on_random_states(self, rng):
        for _ in range(20):
            val = mutual_information(random_density(rng, 4))
            assert 0.0 <= val <= 2.0 + 1e-10

    def test_rejects_wrong_shape(self):
        with pytest.raises(ValueError, match="two-spin"):
            mutual_information(np.eye(8) / 8)
