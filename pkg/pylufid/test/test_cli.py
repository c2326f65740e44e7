import json
import os
import sys
import tempfile
import unittest
from os.path import dirname as up
from unittest import mock

import numpy as np
import pandas as pd
from jsonschema import Draft7Validator
from numpy.testing import assert_allclose, assert_equal

from pylufid.cli import RunConfig, build_parser, main, parse_state
from pylufid.exceptions import BadParameter, ConvergenceFailure, SchemaViolation
from pylufid.schema import load_schema, schema_names, validate_document
from pylufid.utils.states import (DensityMatrix, PureState, load_state,
                                  pure_state, random_density)

# temporary solution for relative imports in case pylufid is not installed
# if pylufid is installed, no need to use the following line

path = up(up(up(__file__)))
sys.path.append(path)


class TestCLI(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.out = os.path.join(self.tmp.name, 'out')

    def tearDown(self):
        self.tmp.cleanup()

    def _json(self):

        with open(self.out) as f:
            return json.load(f)

    def test_parse_state(self):

        state = parse_state('werner:d=3,t=0.5')
        assert (isinstance(state, DensityMatrix))
        assert_equal(state.dims, (3, 3))

        ket = parse_state('pure:ket=[1,0,0,1j],d1=2,d2=2')
        assert (isinstance(ket, PureState))
        assert_allclose(ket.ket, np.array([1, 0, 0, 1j]) / np.sqrt(2), atol=1e-15)

        assert_equal(parse_state('random:d1=2,d2=3,rank=2,seed=5').rank(), 2)
        assert_equal(parse_state('product:d1=2,d2=3').dims, (2, 3))
        assert_equal(parse_state('counterexample:which=sigma').dims, (2, 2))

        target = os.path.join(self.tmp.name, 'state.json')
        saved = random_density(2, 2, seed=3)
        saved.to_json(target)
        assert_equal(parse_state('file:' + target).mat, saved.mat)

        for bad in ('nosuch:d=2', 'werner:d=2', 'werner:d=2,t=abc', 'iso:d=2,0.5',
                    'counterexample:which=tau'):
            with self.assertRaises(BadParameter):
                parse_state(bad)

    def test_config(self):

        args = build_parser().parse_args(['gmax', 'mixed:d1=2,d2=2', 'mixed:d1=2,d2=2',
                                          '--restarts', '3', '--seed', '9'])
        cfg = RunConfig.from_args(args)

        assert_equal(cfg.optimizer_kwargs()['restarts'], 3)
        assert_equal(cfg.optimizer_kwargs()['random_state'], 9)
        assert_equal(cfg.fmt, 'json')

    def test_fidelity(self):

        code = main(['fidelity', 'werner:d=2,t=1', 'mixed:d1=2,d2=2', '--out', self.out])
        assert_equal(code, 0)

        data = self._json()
        assert_allclose(data['fidelity'], 0.5, atol=1e-7)
        assert (data['affine_fidelity'] <= data['fidelity'] + 1e-12)

        # relative entropy against a rank-deficient state is infinite
        main(['fidelity', 'mixed:d1=2,d2=2', 'product:d1=2,d2=2', '--out', self.out])
        assert (self._json()['relative_entropy'] is None)

    def test_gmax(self):

        code = main(['gmax', 'bell:kind=psi-', 'product:d1=2,d2=2', '--restarts', '3',
                     '--out', self.out])
        assert_equal(code, 0)

        data = self._json()
        assert_allclose(data['value'], np.sqrt(0.5), atol=1e-6)
        assert_equal(len(data['per_restart_values']), 3)
        assert_equal(sorted(data['local_unitary']), ['u1', 'u2'])

    def test_gmin_and_commute(self):

        code = main(['gmin', 'bell:kind=phi+', 'product:d1=2,d2=2', '--restarts', '4',
                     '--out', self.out])
        assert_equal(code, 0)
        assert (self._json()['value'] < 1e-4)

        code = main(['commute', 'mixed:d1=2,d2=2', 'random:d1=2,d2=2,seed=4',
                     '--restarts', '2', '--out', self.out])
        assert_equal(code, 0)

        data = self._json()
        assert (data['commuting'])
        assert_allclose(data['best'], 0.0, atol=1e-12)

    def test_werner_curve(self):

        code = main(['werner-curve', '--t-steps', '3', '--restarts', '3',
                     '--out', self.out])
        assert_equal(code, 0)

        table = pd.read_csv(self.out)
        assert_equal(list(table.columns), ['t', 'gmax_formula', 'gmax_numeric'])
        assert_allclose(table['gmax_numeric'], table['gmax_formula'], atol=1e-5)

    def test_bounds_and_sdp(self):

        code = main(['bounds', 'random:d1=2,d2=2,seed=1', 'mixed:d1=2,d2=2',
                     '--no-numeric', '--format', 'csv', '--out', self.out])
        assert_equal(code, 0)
        table = pd.read_csv(self.out)
        assert (table['satisfied'].all())

        target = os.path.join(self.tmp.name, 'problem.dat-s')
        code = main(['sdp-export', 'random:d1=2,d2=2,seed=1', 'mixed:d1=2,d2=2',
                     target, '--out', self.out])
        assert_equal(code, 0)
        assert (os.path.exists(target))
        assert (self._json()['primal_feasible'])

    def test_distill(self):

        code = main(['distill', 'werner:d=2,t=1', '--grid', '1', '--restarts', '2',
                     '--out', self.out])
        assert_equal(code, 0)
        assert_equal(self._json()['status'], 'distillable')

        code = main(['distill', '--sweep', '--t-steps', '2', '--grid', '1',
                     '--restarts', '2', '--format', 'csv', '--out', self.out])
        assert_equal(code, 0)
        assert_equal(list(pd.read_csv(self.out)['status']), ['ppt', 'distillable'])

        assert_equal(main(['distill', '--grid', '1']), 2)

    def test_exit_codes(self):

        assert_equal(main(['fidelity', 'nosuch:d=2', 'mixed:d1=2,d2=2']), 2)
        assert_equal(main(['gmax', 'werner:d=2,t=0.5', 'mixed:d1=2,d2=3']), 2)
        assert_equal(main(['fidelity', 'mixed:d1=2,d2=2', 'mixed:d1=2,d2=2',
                           '--out', os.path.join(self.tmp.name, 'no', 'such', 'dir')]), 2)

        with mock.patch('pylufid.cli.cmd_fidelity',
                        side_effect=ConvergenceFailure('stalled')):
            assert_equal(main(['fidelity', 'mixed:d1=2,d2=2', 'mixed:d1=2,d2=2']), 3)

        with self.assertRaises(SystemExit):
            main(['no-such-command'])

    def test_output_schemas(self):

        pair = ['random:d1=2,d2=2,seed=1', 'mixed:d1=2,d2=2']
        fast = ['--restarts', '2', '--max-iters', '100']
        runs = [(['fidelity'] + pair, 'fidelity_summary'),
                (['fidelity', 'mixed:d1=2,d2=2', 'product:d1=2,d2=2'], 'fidelity_summary'),
                (['gmax'] + pair + fast, 'optimization_report'),
                (['gmin', 'bell:kind=phi+', 'product:d1=2,d2=2'] + fast,
                 'optimization_report'),
                (['bounds'] + pair + fast, 'bound_suite'),
                (['bounds'] + pair + ['--no-numeric'], 'bound_suite'),
                (['commute'] + pair + fast, 'commutativity_report'),
                (['sdp-export'] + pair + [os.path.join(self.tmp.name, 'p.dat-s')],
                 'sdp_certificate'),
                (['distill', 'werner:d=2,t=1', '--grid', '3'] + fast, 'distill_report'),
                (['distill', 'werner:d=2,t=0.2', '--grid', '1'] + fast, 'distill_report')]

        for argv, name in runs:
            assert_equal(main(argv + ['--out', self.out]), 0)
            Draft7Validator(load_schema(name)).validate(self._json())

        validator = Draft7Validator(load_schema('state'))
        validator.validate(random_density(2, 3, seed=2).to_dict())
        validator.validate(json.loads(json.dumps(pure_state([1, 1j, 0, 1], 2, 2).to_dict())))

    def test_schema_command(self):

        assert ('optimization_report' in schema_names())

        for name in schema_names():
            assert_equal(main(['schema', name, '--out', self.out]), 0)
            schema = self._json()
            Draft7Validator.check_schema(schema)
            assert_equal(schema['allOf'], [{'$ref': '#/definitions/' + name}])

        with self.assertRaises(BadParameter):
            load_schema('nosuch')

    def test_schema_violations(self):

        with self.assertRaises(SchemaViolation):
            validate_document({'d1': 2, 're': [[1.0]]}, 'state')

        with self.assertRaises(SchemaViolation):
            load_state({'d1': 1, 'd2': 1, 're': [[1.0]], 'im': [[0.0]], 'kind': 'x'})

        assert_equal(load_state({'d1': 1, 'd2': 1, 're': [[1.0]], 'im': [[0.0]]}).dims,
                     (1, 1))

        target = os.path.join(self.tmp.name, 'broken.json')
        with open(target, 'w') as f:
            json.dump({'d1': 2, 'd2': 1, 're': [[0.5, 0], [0, 0.5]]}, f)
        assert_equal(main(['fidelity', 'file:' + target, 'mixed:d1=2,d2=1']), 2)

        # a malformed report is rejected before anything is written
        with mock.patch('pylufid.cli.cmd_gmax', return_value={'value': 1.0}):
            assert_equal(main(['gmax', 'mixed:d1=2,d2=2', 'mixed:d1=2,d2=2',
                               '--out', self.out]), 2)
        assert (not os.path.exists(self.out))
