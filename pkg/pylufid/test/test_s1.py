import sys
import unittest
from os.path import dirname as up

import numpy as np
from numpy.testing import assert_allclose

from pylufid.closed_form import werner_s1_norm
from pylufid.orbits.s1 import S1, s1_norm
from pylufid.utils.states import (PureState, basis_product, bell_state,
                                  random_density, werner)

# temporary solution for relative imports in case pylufid is not installed
# if pylufid is installed, no need to use the following line

path = up(up(up(__file__)))
sys.path.append(path)


class TestS1(unittest.TestCase):
    def setUp(self):
        self.kwargs = {'restarts': 6, 'random_state': 42}

    def test_product(self):

        opt = S1(**self.kwargs)
        value = opt.eval(basis_product(2, 3, 1, 2))

        assert_allclose(value, 1.0, atol=1e-10)
        assert (isinstance(opt.product_state_, PureState))
        assert_allclose(abs(opt.product_state_.ket[5]), 1.0, atol=1e-6)

    def test_werner(self):

        for d in (2, 3):
            for t in (-1.0, -0.4, 0.5, 1.0):
                assert_allclose(s1_norm(werner(d, t), **self.kwargs),
                                werner_s1_norm(d, t), atol=1e-8)

    def test_entangled(self):

        assert_allclose(s1_norm(bell_state('phi+'), **self.kwargs), 0.5, atol=1e-10)

        negative = -basis_product(2, 2).projector()
        assert_allclose(s1_norm(negative, dims=(2, 2), **self.kwargs), 1.0, atol=1e-10)

    def test_bounds(self):

        state = random_density(2, 2, seed=6)
        value = s1_norm(state, **self.kwargs)
        vals = np.linalg.eigvalsh(state.mat)

        assert (value <= vals[-1] + 1e-12)
        assert (value >= vals[0] - 1e-12)
