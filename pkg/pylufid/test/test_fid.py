import sys
import unittest
from os.path import dirname as up

import numpy as np
from numpy.testing import assert_allclose, assert_equal
from scipy.linalg import expm

from pylufid.closed_form import (gmax_pure_pure, gmax_werner_vs_pure_product,
                                 iso_extrema_vs_pure_product)
from pylufid.exceptions import BadConfig, BadParameter
from pylufid.orbits.fid import (GMAX, GMIN, directional_derivative, gmax, gmin,
                                riemannian_step)
from pylufid.utils.fidelity import fidelity
from pylufid.utils.states import (LocalUnitary, basis_product, isotropic,
                                  random_density, random_pure, werner)

# temporary solution for relative imports in case pylufid is not installed
# if pylufid is installed, no need to use the following line

path = up(up(up(__file__)))
sys.path.append(path)


def _skew(rng, d):

    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))

    return (g - g.conj().T) / 2


class TestFid(unittest.TestCase):
    def setUp(self):
        self.kwargs = {'restarts': 4, 'max_iter': 300, 'random_state': 42}
        self.rho = random_density(2, 2, seed=1)
        self.sigma = random_density(2, 2, seed=2)

    def test_pure_pairs(self):

        for seed in range(3):
            psi, phi = random_pure(2, 3, seed=seed), random_pure(2, 3, seed=seed + 10)

            report = gmax(psi, phi, **self.kwargs)
            assert_allclose(report.value, gmax_pure_pure(psi, phi), atol=1e-6)
            assert (report.mode == 'max')

            assert (gmin(psi, phi, restarts=4, max_iter=500).value < 1e-4)

    def test_werner_vs_product(self):

        for t in (-1.0, -0.5, 0.5, 1.0):
            value = gmax(werner(2, t), basis_product(2, 2), **self.kwargs).value
            assert_allclose(value, gmax_werner_vs_pure_product(2, t), atol=1e-5)

    def test_isotropic_vs_product(self):

        for lam in (0.2, 0.6):
            high, low = iso_extrema_vs_pure_product(2, lam)
            state = isotropic(2, lam)

            assert_allclose(gmax(state, basis_product(2, 2), **self.kwargs).value,
                            high, atol=1e-5)
            assert_allclose(gmin(state, basis_product(2, 2), **self.kwargs).value,
                            low, atol=1e-5)

    def test_sandwich(self):

        f = fidelity(self.rho, self.sigma)

        opt = GMAX(**self.kwargs)
        high = opt.eval(self.rho, self.sigma)
        low = GMIN(**self.kwargs).eval(self.rho, self.sigma)

        assert (low <= f + 1e-12)
        assert (f <= high + 1e-12)
        assert (0.0 <= low <= high <= 1.0 + 1e-10)

        # the reported value is attained by the reported local unitary
        w = opt.local_unitary_
        assert_allclose(fidelity(self.rho, w.apply(self.sigma.mat)), high, atol=1e-10)
        assert (opt.report_.diagnostics['commutator_norm'] >= 0)
        assert_equal(len(opt.report_.per_restart_values), 4)

    def test_determinism(self):

        first = gmax(self.rho, self.sigma, **self.kwargs)
        second = gmax(self.rho, self.sigma, **self.kwargs)

        assert_equal(first.per_restart_values, second.per_restart_values)
        assert_equal(first.local_unitary.u1, second.local_unitary.u1)

    def test_directional_derivative(self):

        rng = np.random.default_rng(5)
        h = 1e-6

        for d1 in (2, 3):
            for d2 in (2, 3):
                rho = random_density(d1, d2, seed=10 * d1 + d2)
                sigma = random_density(d1, d2, seed=100 + 10 * d1 + d2)

                for point in range(20):
                    w = LocalUnitary.random(d1, d2, seed=1000 * d1 + 100 * d2 + point)
                    omega1, omega2 = _skew(rng, d1), _skew(rng, d2)

                    def f(t):
                        u = LocalUnitary(expm(t * omega1) @ w.u1,
                                         expm(t * omega2) @ w.u2)
                        return fidelity(rho, u.apply(sigma.mat))

                    numeric = (f(h) - f(-h)) / (2 * h)
                    analytic = directional_derivative(rho, sigma, w, omega1, omega2)

                    assert_allclose(analytic, numeric, rtol=1e-5, atol=1e-7)

    def test_riemannian_step(self):

        w = LocalUnitary.random(2, 2, seed=3)
        start = fidelity(self.rho, w.apply(self.sigma.mat))

        (s1, s2), up_w = riemannian_step(self.rho, self.sigma, w, mode='max')
        assert_allclose(s1, -s1.conj().T, atol=1e-12)
        assert (fidelity(self.rho, up_w.apply(self.sigma.mat)) >= start - 1e-12)

        _, down_w = riemannian_step(self.rho, self.sigma, w, mode='min')
        assert (fidelity(self.rho, down_w.apply(self.sigma.mat)) <= start + 1e-12)

        with self.assertRaises(BadParameter):
            riemannian_step(self.rho, self.sigma, w, mode='sideways')

    def test_config(self):

        with self.assertRaises(BadConfig):
            GMAX(restarts=0).eval(self.rho, self.sigma)

        with self.assertRaises(BadConfig):
            GMIN(grad_tol=-1.0).eval(self.rho, self.sigma)
