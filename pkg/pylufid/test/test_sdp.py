import os
import sys
import tempfile
import unittest
from os.path import dirname as up

import numpy as np
from numpy.testing import assert_allclose, assert_equal

from pylufid.exceptions import (BadParameter, DimensionMismatch, IoError,
                                NotHermitian, NotPSD)
from pylufid.sdp import (SDPA_HEADER, build_problem, certificate,
                         check_dual_feasible, check_primal_feasible,
                         embedded_primal, export_sdpa, import_sdpa,
                         optimal_dual, optimal_primal, read_sdpa, sdpa_data)
from pylufid.utils.fidelity import fidelity
from pylufid.utils.states import basis_product, random_density

# temporary solution for relative imports in case pylufid is not installed
# if pylufid is installed, no need to use the following line

path = up(up(up(__file__)))
sys.path.append(path)


class TestSDP(unittest.TestCase):
    def setUp(self):
        self.rho = random_density(2, 2, seed=31)
        self.tau = random_density(2, 2, seed=32)
        self.problem = build_problem(self.rho, self.tau)
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def test_primal(self):

        x = optimal_primal(self.problem)
        feasible, objective = check_primal_feasible(self.problem, x)

        assert (feasible)
        assert_allclose(objective, fidelity(self.rho, self.tau), atol=1e-9)

        # scaling past the optimum breaks positivity of the block
        feasible, _ = check_primal_feasible(self.problem, 1.1 * x)
        assert (not feasible)

        with self.assertRaises(DimensionMismatch):
            check_primal_feasible(self.problem, np.eye(3))

    def test_dual(self):

        y, z = optimal_dual(self.problem)
        feasible, objective = check_dual_feasible(self.problem, y, z)

        assert (feasible)
        assert_allclose(objective, fidelity(self.rho, self.tau), atol=1e-9)

        # any feasible dual point bounds the fidelity from above
        feasible, objective = check_dual_feasible(self.problem, 2 * np.eye(4),
                                                  np.eye(4) / 2)
        assert (feasible)
        assert (objective >= fidelity(self.rho, self.tau) - 1e-12)

        with self.assertRaises(NotHermitian):
            check_dual_feasible(self.problem, np.triu(np.ones((4, 4))), np.eye(4))

        with self.assertRaises(BadParameter):
            optimal_dual(build_problem(basis_product(2, 2), self.tau))

    def test_certificate(self):

        summary = certificate(self.problem)
        assert (summary['primal_feasible'] and summary['dual_feasible'])
        assert_equal(summary['dual_kind'], 'analytic')
        assert_allclose(summary['gap'], 0.0, atol=1e-8)

        summary = certificate(build_problem(basis_product(2, 2), self.tau))
        assert_equal(summary['dual_kind'], 'scaled_identity')
        assert (summary['gap'] >= -1e-12)

        with self.assertRaises(NotPSD):
            build_problem(np.diag([1.0, -0.5]), np.eye(2))

        with self.assertRaises(DimensionMismatch):
            build_problem(np.eye(2), np.eye(3))

    def test_sdpa_constraints(self):

        objective, constraints, size = sdpa_data(self.problem)
        assert_equal(size, 16)
        assert_equal(len(constraints), 2 * 4 * 4)

        x = optimal_primal(self.problem)
        emb = embedded_primal(self.problem, x)

        for c, entries in constraints:
            f = np.zeros((size, size))
            for i, j, v in entries:
                f[i, j] = f[j, i] = v
            assert_allclose(np.trace(f @ emb), c, atol=1e-12)

        f0 = np.zeros((size, size))
        for i, j, v in objective:
            f0[i, j] = f0[j, i] = v
        assert_allclose(np.trace(f0 @ emb), np.real(np.trace(x)), atol=1e-12)

    def test_sdpa_file(self):

        target = os.path.join(self.tmp.name, 'problem.dat-s')
        export_sdpa(self.problem, target)

        with open(target) as f:
            assert_equal(f.readline().strip(), SDPA_HEADER)

        c, mats, size = read_sdpa(target)
        assert_equal(mats.shape, (c.size + 1, size, size))

        restored = import_sdpa(target)
        assert_allclose(restored.rho, self.problem.rho, atol=1e-15)
        assert_allclose(restored.tau, self.problem.tau, atol=1e-15)

        with self.assertRaises(IoError):
            read_sdpa(os.path.join(self.tmp.name, 'missing.dat-s'))

        broken = os.path.join(self.tmp.name, 'broken.dat-s')
        with open(broken, 'w') as f:
            f.write('2\n1\nnot-a-size\n')
        with self.assertRaises(IoError):
            read_sdpa(broken)
