import json
import sys
import unittest
from os.path import dirname as up
from unittest import mock

import numpy as np
from numpy.testing import assert_allclose, assert_equal

from pylufid.bounds import (BoundReport, bound_suite, find_affine_matching_unitary,
                            fidelity_overlap_bounds, gmax_lower_bound,
                            gmax_upper_bound, gmin_lower_bound, gmin_upper_bound,
                            rank_sum_check, rank_trace_bounds, triangle_check)
from pylufid.exceptions import BadParameter, MissingWitness
from pylufid.orbits import fid
from pylufid.orbits.fid import gmax, gmin
from pylufid.utils.fidelity import affine_fidelity, fidelity
from pylufid.utils.states import (complement_state, maximally_mixed, random_density,
                                  random_pure, unitarity_error)

# temporary solution for relative imports in case pylufid is not installed
# if pylufid is installed, no need to use the following line

path = up(up(up(__file__)))
sys.path.append(path)


class TestBounds(unittest.TestCase):
    def setUp(self):
        self.kwargs = {'restarts': 4, 'max_iter': 300, 'random_state': 42}
        self.rho = random_density(2, 2, seed=41)
        self.sigma = random_density(2, 2, seed=42)
        self.mixed = maximally_mixed(2, 2)

    def test_maximally_mixed(self):

        reports = bound_suite(self.mixed, self.mixed, numeric=False)

        for report in reports.values():
            assert (report.satisfied)

        assert_allclose(reports['gmax_upper'].upper, 1.0, atol=1e-12)
        assert_allclose(reports['gmax_lower'].lower, 1.0, atol=1e-12)
        assert_allclose(reports['gmin_upper'].upper, 1.0, atol=1e-12)
        assert_allclose(reports['gmin_lower'].lower, 1.0, atol=1e-12)

        assert ('rank_sum' not in reports)

    def test_closed_form_bounds(self):

        for seed in range(5):
            rho, sigma = random_density(2, 2, seed=seed), random_density(2, 2, seed=seed + 20)
            f = fidelity(rho, sigma)

            upper = gmax_upper_bound(rho, sigma)
            assert (upper.satisfied and upper.upper >= f - 1e-12)
            assert_equal(sorted(upper.details), ['factor1', 'factor2', 'global'])

            lower = gmin_lower_bound(rho, sigma)
            assert (lower.satisfied and lower.lower <= f + 1e-12)
            assert ('spectral' in lower.details)

            assert (gmax_lower_bound(rho, sigma).satisfied)
            assert (gmin_upper_bound(rho, sigma).satisfied)

        lower = gmin_lower_bound(random_pure(2, 2, seed=1).density(), self.sigma)
        assert ('spectral' not in lower.details)
        assert (lower.satisfied)

        lower = gmin_lower_bound(self.rho, self.sigma, rel_entropy_max=0.1)
        assert ('numeric_relative_entropy_unsound' in lower.details)
        assert_equal(lower.lower, gmin_lower_bound(self.rho, self.sigma).lower)

    def test_numeric_sandwich(self):

        high = gmax(self.rho, self.sigma, **self.kwargs).value
        low = gmin(self.rho, self.sigma, **self.kwargs).value

        assert (gmax_upper_bound(self.rho, self.sigma, numeric=high).satisfied)
        assert (gmin_lower_bound(self.rho, self.sigma, numeric=low).satisfied)
        assert (gmax_lower_bound(self.rho, self.sigma, numeric=high).slack > -1e-6)
        assert (gmin_upper_bound(self.rho, self.sigma, numeric=low).slack > -1e-6)

        reports = bound_suite(self.rho, self.sigma, **self.kwargs)
        for name in ('gmax_upper', 'gmin_lower', 'triangle', 'affine_matching',
                     'rank_trace_rho', 'fidelity_overlap'):
            assert (reports[name].satisfied)
        assert (reports['rank_sum'].slack > -2e-4)
        assert (reports['gmax_lower'].slack > -1e-6)
        assert ('relative_entropy' in reports['gmax_lower'].details)

        with self.assertRaises(BadParameter):
            bound_suite(self.rho, self.sigma, numeric=False, restarts=2)

    def test_rank_sum(self):

        pure = random_pure(2, 2, seed=3).density()

        report = rank_sum_check(pure, self.sigma, gmax_val=1.0, gmin_val=0.0)
        assert (report.satisfied)
        assert_allclose(report.slack, 0.0, atol=1e-12)
        assert_equal(report.upper, 1.0)

        report = rank_sum_check(pure, self.sigma, gmax_val=1.0, gmin_val=1.0)
        assert (not report.satisfied)
        assert (report.slack < 0)

    def test_triangle(self):

        high = gmax(self.rho, self.sigma, **self.kwargs)
        low = gmin(self.rho, complement_state(self.sigma), **self.kwargs)

        report = triangle_check(self.rho, self.sigma, max_witness=high,
                                min_witness=low.local_unitary)
        assert (report.satisfied)
        assert_allclose(report.details['gmax'], high.value, atol=1e-10)
        assert_equal(sorted(k for k in report.details if k not in
                            ('gmax', 'gmin_complement')),
                     ['difference', 'squares', 'sum'])

        with self.assertRaises(MissingWitness):
            triangle_check(self.rho, self.sigma, max_witness=0.5, min_witness=low)

    def test_affine_matching(self):

        for seed in range(10):
            rho = random_density(2, 3, seed=seed).mat
            sigma = random_density(2, 3, seed=seed + 60).mat

            u0, achieved = find_affine_matching_unitary(rho, sigma)
            assert (unitarity_error(u0) < 1e-10)
            assert (abs(achieved - fidelity(rho, sigma)) < 1e-8)
            assert (affine_fidelity(rho, sigma) <= fidelity(rho, sigma) + 1e-12)

        u0, achieved = find_affine_matching_unitary(self.mixed, self.mixed)
        assert_allclose(u0, np.eye(4), atol=0)

    def test_inequalities(self):

        rng = np.random.default_rng(7)
        for _ in range(20):
            g = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
            h = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
            a, b = g @ g.conj().T, h @ h.conj().T

            assert (rank_trace_bounds(a).satisfied)
            assert (fidelity_overlap_bounds(a, b).satisfied)

        flat = rank_trace_bounds(np.eye(3) / 3)
        assert_allclose(flat.value, flat.upper, atol=1e-9)

        rank_one = rank_trace_bounds(np.diag([2.0, 0.0, 0.0]))
        assert_allclose(rank_one.value, rank_one.lower, atol=1e-9)

    def test_report(self):

        report = gmax_upper_bound(self.rho, self.sigma)
        data = json.loads(report.to_json())

        assert (isinstance(report, BoundReport))
        assert_equal(data['name'], 'gmax_upper')
        assert_allclose(data['upper'], report.upper, atol=0)

        witness = bound_suite(self.rho, self.sigma, numeric=False)['affine_matching']
        data = json.loads(witness.to_json())
        assert_equal(sorted(data['witness']), ['im', 're'])

    def test_suite_reuses_optimizers(self):

        with mock.patch('pylufid.orbits.fid.gmax', wraps=fid.gmax) as spy_max, \
                mock.patch('pylufid.orbits.fid.gmin', wraps=fid.gmin) as spy_min:
            reports = bound_suite(self.rho, self.sigma, **self.kwargs)

        # one maximization, minimizations against sigma and its complement
        assert_equal(spy_max.call_count, 1)
        assert_equal(spy_min.call_count, 2)

        assert_allclose(reports['rank_sum'].details['gmax'],
                        reports['triangle'].details['gmax'], atol=1e-10)
        assert_allclose(reports['rank_sum'].details['gmin_complement'],
                        reports['triangle'].details['gmin_complement'], atol=1e-10)
