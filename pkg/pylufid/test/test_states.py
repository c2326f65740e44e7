import sys
import unittest
from os.path import dirname as up

import numpy as np
from numpy.testing import assert_allclose, assert_equal

from pylufid.exceptions import BadParameter, DimensionMismatch, NotHermitian, NotPSD
from pylufid.utils.states import (DensityMatrix, LocalUnitary, PureState,
                                  bell_state, bipartite_dims,
                                  commutator_counterexample, complement_state,
                                  haar_unitary, isotropic, load_state,
                                  max_entangled, pure_state, random_density,
                                  schmidt, swap_operator, tensor_power,
                                  unitarity_error, werner)

# temporary solution for relative imports in case pylufid is not installed
# if pylufid is installed, no need to use the following line

path = up(up(up(__file__)))
sys.path.append(path)


class TestStates(unittest.TestCase):
    def setUp(self):
        self.d = [2, 3]
        self.t = [-1.0, -0.3, 0.0, 0.5, 1.0]
        self.rho = random_density(2, 3, seed=11)

    def test_families(self):

        for d in self.d:
            swap = swap_operator(d)
            assert_allclose(swap @ swap, np.eye(d * d), atol=0)

            for t in self.t:
                state = werner(d, t)
                assert_allclose(np.trace(state.mat).real, 1.0, atol=1e-12)
                assert (state.eigenvalues.min() >= 0)

            for lam in (0.0, 0.3, 1.0):
                omega = max_entangled(d).ket
                overlap = np.real(np.vdot(omega, isotropic(d, lam).mat @ omega))
                assert_allclose(overlap, lam, atol=1e-12)

        assert_allclose(werner(2, 1.0).mat, bell_state('psi-').projector(), atol=1e-12)

        with self.assertRaises(BadParameter):
            werner(2, 1.5)

    def test_validation(self):

        with self.assertRaises(BadParameter):
            DensityMatrix(np.eye(4), 2, 2)

        with self.assertRaises(NotPSD):
            DensityMatrix(np.diag([1.5, -0.5]), 2, 1)

        with self.assertRaises(NotHermitian):
            DensityMatrix(np.array([[0.5, 0.1], [0.0, 0.5]]), 2, 1)

        with self.assertRaises(DimensionMismatch):
            DensityMatrix(np.eye(4) / 4, 2, 3)

        with self.assertRaises(BadParameter):
            PureState([1.0, 1.0, 0.0, 0.0], 2, 2)

        with self.assertRaises(DimensionMismatch):
            bipartite_dims(werner(2, 0.5), werner(3, 0.5))

    def test_json(self):

        restored = DensityMatrix.from_json(self.rho.to_json())
        assert_equal(restored.mat, self.rho.mat)
        assert_equal(restored.dims, (2, 3))

        psi = pure_state([1, 1j, 0, 0, 0, 1], 2, 3)
        loaded = load_state(psi.to_dict())
        assert (isinstance(loaded, PureState))
        assert_equal(loaded.ket, psi.ket)

    def test_local_unitary(self):

        u = haar_unitary(3, seed=5)
        assert (unitarity_error(u) < 1e-12)
        assert_equal(u, haar_unitary(3, seed=5))

        w = LocalUnitary.random(2, 3, seed=3)
        rotated = w.apply(self.rho.mat)
        assert_allclose(w.adjoint().apply(rotated), self.rho.mat, atol=1e-12)
        assert_allclose(np.trace(rotated).real, 1.0, atol=1e-12)

        with self.assertRaises(BadParameter):
            LocalUnitary(2 * np.eye(2), np.eye(2))

    def test_structure(self):

        coefficients = schmidt(max_entangled(3)).coefficients
        assert_allclose(coefficients, np.full(3, 1 / np.sqrt(3)), atol=1e-12)

        a = random_density(2, 1, seed=1).mat
        b = random_density(3, 1, seed=2).mat
        power = tensor_power(DensityMatrix(np.kron(a, b), 2, 3), 2)

        assert_equal(power.dims, (4, 9))
        assert_allclose(power.mat, np.kron(np.kron(a, a), np.kron(b, b)), atol=1e-14)

        comp = complement_state(self.rho)
        assert_allclose(comp.mat, (np.eye(6) - self.rho.mat) / 5, atol=1e-14)

        assert_equal(random_density(2, 2, rank=2, seed=4).rank(), 2)

    def test_counterexample(self):

        rho, sigma = commutator_counterexample()

        assert_allclose(rho.eigenvalues, [1 / 2, 1 / 3, 1 / 6, 0.0], atol=1e-12)
        assert_allclose(sigma.eigenvalues, [2 / 3, 1 / 3, 0.0, 0.0], atol=1e-12)

    def test_haar_moment(self):

        for d in self.d:
            samples = 10000 if d == 2 else 4000
            corner = [abs(haar_unitary(d, seed=[d, k])[0, 0])**2
                      for k in range(samples)]
            assert_allclose(np.mean(corner), 1 / d, atol=0.02)

    def test_family_symmetries(self):

        for d in self.d:
            vals = np.linalg.eigvalsh(swap_operator(d))
            assert_equal(np.sum(np.isclose(vals, 1.0)), d * (d + 1) // 2)
            assert_equal(np.sum(np.isclose(vals, -1.0)), d * (d - 1) // 2)

            for seed in range(5):
                u = haar_unitary(d, seed=seed)
                twirl = np.kron(u, u)
                twisted = np.kron(u, u.conj())

                for t in self.t:
                    state = werner(d, t).mat
                    assert_allclose(twirl @ state @ twirl.conj().T, state, atol=1e-12)

                for lam in (0.0, 0.3, 1.0):
                    state = isotropic(d, lam).mat
                    assert_allclose(twisted @ state, state @ twisted, atol=1e-12)

    def test_schmidt_weights(self):

        psi = pure_state([np.sqrt(0.3), 0, 0, np.sqrt(0.7)], 2, 2)
        decomposition = schmidt(psi)

        assert_allclose(decomposition.coefficients, [np.sqrt(0.7), np.sqrt(0.3)],
                        atol=1e-12)
        assert_allclose(np.sum(decomposition.coefficients**2), 1.0, atol=1e-12)

        rebuilt = sum(c * np.kron(decomposition.left[:, j], decomposition.right[:, j])
                      for j, c in enumerate(decomposition.coefficients))
        assert_allclose(rebuilt, psi.ket, atol=1e-12)
