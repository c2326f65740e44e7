"""Command-line front end.

Usage::

    pylufid gmax werner:d=3,t=0.5 product:d1=3,d2=3 --restarts 8
    pylufid werner-curve --d 2 --t-steps 21 --out curve.csv
    pylufid distill werner:d=2,t=1 --n 1
    pylufid sdp-export random:d1=2,d2=2,seed=1 mixed:d1=2,d2=2 problem.dat-s
    pylufid schema distill_report

States are named with a small mini-language, ``name:key=value,...``; see
:func:`parse_state`. Exit codes are 0 on success, 2 on invalid input and 3
on numerical failure. JSON output is validated against the schemas
of :mod:`pylufid.schema`.
"""
import argparse
import json
import logging
import re
import sys
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from . import bounds, closed_form, probes, sdp
from .exceptions import BadParameter, IoError, PylufidError
from .orbits.fid import gmax, gmin
from .schema import load_schema, schema_names, validate_document
from .utils.fidelity import affine_fidelity, fidelity, relative_entropy
from .utils.states import (basis_product, bell_state, check_state,
                           commutator_counterexample, isotropic, load_state,
                           max_entangled, maximally_mixed, pure_state,
                           random_density, werner)
from .version import __version__

logger = logging.getLogger(__name__)

CSV_FORMAT = '%.12g'


@dataclass
class RunConfig:
    """Parsed command line."""

    command: str
    states: list = field(default_factory=list)
    seed: int = 1234
    restarts: int = 24
    max_iters: int = 500
    tol: float = 1e-9
    fmt: str = 'json'
    out: str = None
    jobs: int = None
    verbose: bool = False
    schema: str = None
    options: dict = field(default_factory=dict)

    @classmethod
    def from_args(cls, args):

        known = {'command', 'states', 'seed', 'restarts', 'max_iters', 'tol',
                 'format', 'out', 'jobs', 'verbose', 'func', 'schema'}
        return cls(command=args.command, states=list(getattr(args, 'states', [])),
                   seed=args.seed, restarts=args.restarts, max_iters=args.max_iters,
                   tol=args.tol, fmt=args.format, out=args.out, jobs=args.jobs,
                   verbose=args.verbose, schema=getattr(args, 'schema', None),
                   options={k: v for k, v in vars(args).items() if k not in known})

    def optimizer_kwargs(self):

        return {'restarts': self.restarts, 'max_iter': self.max_iters,
                'grad_tol': self.tol, 'random_state': self.seed,
                'n_jobs': self.jobs, 'verbose': self.verbose}


def _split_params(text):

    return [p for p in re.split(r',(?![^\[]*\])', text) if p.strip()]


def _ket(text):

    items = text.strip().strip('[]').split(',')
    try:
        return np.array([complex(v.replace(' ', '')) for v in items if v.strip()])
    except ValueError:
        raise BadParameter(f"cannot parse ket '{text}'") from None


def _number(params, key, kind=float, default=None):

    if key not in params:
        if default is None:
            raise BadParameter(f"missing parameter '{key}'")
        return default

    try:
        return kind(params[key])
    except ValueError:
        raise BadParameter(f"parameter {key}={params[key]!r} is not a {kind.__name__}") from None


def parse_state(spec):
    """Build a state from ``name:key=value,...``.

    Recognized names:

    - ``werner:d=3,t=0.5`` and ``iso:d=2,lam=0.9``
    - ``pure:ket=[1,0,0,1j],d1=2,d2=2``, normalized; dims default to a
      square split
    - ``maxent:d=3``, ``bell:kind=psi-``
    - ``product:d1=2,d2=3`` (``|00>``), ``mixed:d1=2,d2=2``
    - ``random:d1=2,d2=2,rank=2,seed=7``
    - ``counterexample:which=rho`` or ``which=sigma``
    - ``file:path.json`` in the state JSON schema
    """

    name, _, rest = spec.partition(':')
    name = name.strip().lower()

    if name == 'file':
        return load_state(rest)

    params = {}
    for item in _split_params(rest):
        key, sep, value = item.partition('=')
        if not sep:
            raise BadParameter(f"expected key=value in '{spec}', got '{item}'")
        params[key.strip()] = value.strip()

    if name == 'werner':
        return werner(_number(params, 'd', int), _number(params, 't'))
    if name == 'iso':
        return isotropic(_number(params, 'd', int), _number(params, 'lam'))
    if name == 'pure':
        if 'ket' not in params:
            raise BadParameter("pure state needs 'ket=[...]'")
        ket = _ket(params['ket'])
        side = int(round(np.sqrt(ket.size)))
        d1 = _number(params, 'd1', int, side)
        d2 = _number(params, 'd2', int, ket.size // max(d1, 1))
        return pure_state(ket, d1, d2)
    if name == 'maxent':
        return max_entangled(_number(params, 'd', int))
    if name == 'bell':
        return bell_state(params.get('kind', 'phi+'))
    if name == 'product':
        return basis_product(_number(params, 'd1', int), _number(params, 'd2', int))
    if name == 'mixed':
        return maximally_mixed(_number(params, 'd1', int), _number(params, 'd2', int))
    if name == 'random':
        d1, d2 = _number(params, 'd1', int), _number(params, 'd2', int)
        return random_density(d1, d2, rank=_number(params, 'rank', int, d1 * d2),
                              seed=_number(params, 'seed', int, 0))
    if name == 'counterexample':
        which = params.get('which', 'rho')
        if which not in ('rho', 'sigma'):
            raise BadParameter(f"counterexample which must be rho or sigma, got '{which}'")
        return commutator_counterexample()[0 if which == 'rho' else 1]

    raise BadParameter(f"unknown state '{name}' in '{spec}'")


def _finite(value):

    if isinstance(value, dict):
        return {k: _finite(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite(v) for v in value]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value) if np.isfinite(value) else None

    return value


def _emit(cfg, data):
    """Write ``data`` (a dict or a DataFrame) to ``--out`` or stdout.

    JSON documents are checked against the command's schema before anything
    is written.
    """

    if isinstance(data, pd.DataFrame):
        frame = data
    elif cfg.fmt == 'csv':
        frame = pd.DataFrame([{k: v for k, v in data.items()
                               if not isinstance(v, (dict, list))}])
    else:
        frame = None

    if frame is not None:
        text = frame.to_csv(index=False, float_format=CSV_FORMAT)
    else:
        text = json.dumps(_finite(data), indent=2, default=float) + '\n'
        if cfg.schema is not None:
            validate_document(json.loads(text), cfg.schema)

    if cfg.out is None:
        sys.stdout.write(text)
        return

    try:
        with open(cfg.out, 'w') as f:
            f.write(text)
    except OSError as error:
        raise IoError(f'cannot write {cfg.out}: {error}') from error

    logger.info(f'wrote {cfg.command} output to {cfg.out}')


def _pair(cfg):

    a, b = (check_state(parse_state(s)) for s in cfg.states)

    return a, b


def cmd_fidelity(cfg):

    a, b = _pair(cfg)

    return {'fidelity': fidelity(a.mat, b.mat),
            'affine_fidelity': affine_fidelity(a.mat, b.mat),
            'relative_entropy': relative_entropy(a.mat, b.mat)}


def cmd_gmax(cfg):

    a, b = _pair(cfg)

    return gmax(a, b, **cfg.optimizer_kwargs()).to_dict()


def cmd_gmin(cfg):

    a, b = _pair(cfg)

    return gmin(a, b, **cfg.optimizer_kwargs()).to_dict()


def cmd_werner_curve(cfg):

    d = cfg.options['d']
    rows = []
    for t in np.linspace(-1.0, 1.0, cfg.options['t_steps']):
        numeric = gmax(werner(d, t), basis_product(d, d), **cfg.optimizer_kwargs())
        rows.append({'t': float(t),
                     'gmax_formula': closed_form.gmax_werner_vs_pure_product(d, t),
                     'gmax_numeric': numeric.value})

    return pd.DataFrame(rows)


def cmd_bounds(cfg):

    a, b = _pair(cfg)
    numeric = not cfg.options.get('no_numeric', False)
    kwargs = cfg.optimizer_kwargs() if numeric else {}
    reports = bounds.bound_suite(a, b, numeric=numeric, **kwargs)

    if cfg.fmt == 'csv':
        return pd.DataFrame([{'name': r.name, 'lower': r.lower, 'value': r.value,
                              'upper': r.upper, 'slack': r.slack,
                              'satisfied': r.satisfied}
                             for r in reports.values()])

    return {name: r.to_dict() for name, r in reports.items()}


def cmd_sdp_export(cfg):

    a, b = _pair(cfg)
    problem = sdp.build_problem(a, b)
    sdp.export_sdpa(problem, cfg.options['path'])

    return {'path': cfg.options['path'], **sdp.certificate(problem)}


def cmd_distill(cfg):

    kwargs = cfg.optimizer_kwargs()
    grid = cfg.options['grid']

    if cfg.options.get('sweep'):
        t_values = np.linspace(-1.0, 1.0, cfg.options['t_steps'])
        return probes.werner_sweep(t_values, n=cfg.options['n'], grid=grid, **kwargs)

    if not cfg.states:
        raise BadParameter('distill needs a state unless --sweep is given')

    report = probes.distill_probe(parse_state(cfg.states[0]), n=cfg.options['n'],
                                  grid=grid, **kwargs)

    return report.to_dict()


def cmd_commute(cfg):

    a, b = _pair(cfg)

    return probes.commutativity_experiment(a, b, **cfg.optimizer_kwargs()).to_dict()


def cmd_schema(cfg):

    return load_schema(cfg.options['name'])


def _common():

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--seed', type=int, default=1234,
                        help='random state of the optimizers')
    common.add_argument('--restarts', type=int, default=24)
    common.add_argument('--max-iters', dest='max_iters', type=int, default=500)
    common.add_argument('--tol', type=float, default=1e-9,
                        help='gradient-norm stopping tolerance')
    common.add_argument('--format', choices=('json', 'csv'), default='json')
    common.add_argument('--out', default=None, help='output path, stdout if omitted')
    common.add_argument('--jobs', type=int, default=None,
                        help='joblib workers for restarts')
    common.add_argument('--verbose', action='store_true')

    return common


def build_parser():

    common = _common()
    parser = argparse.ArgumentParser(
        prog='pylufid',
        description='Fidelity extrema under local unitaries.')
    parser.add_argument('--version', action='version', version=__version__)
    sub = parser.add_subparsers(dest='command', required=True)

    pair_help = 'states as name:key=value,... or file:path.json'
    commands = (
        ('fidelity', cmd_fidelity, 'fidelity_summary',
         'fidelity, affine fidelity and relative entropy'),
        ('gmax', cmd_gmax, 'optimization_report',
         'maximal fidelity over local unitaries'),
        ('gmin', cmd_gmin, 'optimization_report',
         'minimal fidelity over local unitaries'),
        ('bounds', cmd_bounds, 'bound_suite',
         'analytic bounds and inequality checks'),
        ('commute', cmd_commute, 'commutativity_report',
         'commutator minimization'))

    for name, func, schema, text in commands:
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument('states', nargs=2, help=pair_help)
        p.set_defaults(func=func, schema=schema)
        if name == 'bounds':
            p.add_argument('--no-numeric', dest='no_numeric', action='store_true',
                           help='closed-form bounds only')

    p = sub.add_parser('werner-curve', parents=[common],
                       help='G_max of Werner states against a product state')
    p.add_argument('--d', type=int, default=2)
    p.add_argument('--t-steps', dest='t_steps', type=int, default=21)
    p.set_defaults(func=cmd_werner_curve)

    p = sub.add_parser('sdp-export', parents=[common],
                       help='write the fidelity SDP in SDPA sparse format')
    p.add_argument('states', nargs=2, help=pair_help)
    p.add_argument('path')
    p.set_defaults(func=cmd_sdp_export, schema='sdp_certificate')

    p = sub.add_parser('distill', parents=[common], help='distillability witness search')
    p.add_argument('states', nargs='?', default=None, help='state to test')
    p.add_argument('--n', type=int, default=1, help='tensor power')
    p.add_argument('--grid', type=int, default=21, help='Schmidt weights scanned')
    p.add_argument('--sweep', action='store_true',
                   help='sweep the two-qubit Werner family instead')
    p.add_argument('--t-steps', dest='t_steps', type=int, default=21)
    p.set_defaults(func=cmd_distill, schema='distill_report')

    p = sub.add_parser('schema', parents=[common],
                       help='print the JSON schema of an input or output document')
    p.add_argument('name', choices=schema_names())
    p.set_defaults(func=cmd_schema)

    return parser


def main(argv=None):

    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == 'distill':
        args.states = [] if args.states is None else [args.states]

    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format='%(levelname)s %(name)s: %(message)s')

    cfg = RunConfig.from_args(args)

    try:
        _emit(cfg, args.func(cfg))
    except (ArithmeticError, np.linalg.LinAlgError) as error:
        logger.error(f'numerical failure: {error}')
        return 3
    except (PylufidError, ValueError, OSError) as error:
        logger.error(f'invalid input: {error}')
        return 2

    return 0


if __name__ == '__main__':
    sys.exit(main())
