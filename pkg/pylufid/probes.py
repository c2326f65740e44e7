"""Entanglement distillability and commutativity probes built on the optimizers."""
import json
import logging
from dataclasses import asdict, dataclass, field

import numpy as np
import pandas as pd
from scipy.optimize import minimize_scalar
from tqdm import tqdm

from .exceptions import BadParameter, DimensionMismatch, DimensionTooLarge, IoError
from .orbits.comm import commutator_min
from .orbits.fid import GMIN
from .utils.linalg import herm_eig, min_eigenvalue, partial_transpose
from .utils.states import (PureState, _complex_to_dict, check_state,
                           tensor_power, werner)

logger = logging.getLogger(__name__)

MAX_DIMENSION = 256
NPT_TOL = 1e-9
PPT_SHIFT = 1e-3
FLAG_TOL = 1e-12
COMMUTING_TOL = 1e-6
MULTIPLICITY_TOL = 1e-9
EDGE_LAMBDA = 1e-6


def _write_json(data, path):

    text = json.dumps(data, default=float)
    if path is None:
        return text

    try:
        with open(path, 'w') as f:
            f.write(text)
    except OSError as error:
        raise IoError(f'cannot write report to {path}: {error}') from error

    return text


@dataclass
class DistillReport:
    """Outcome of :func:`distill_probe`.

    Attributes
    ----------
    n : int
        Tensor power of the probed state.

    x_shift : float
        Positive shift making ``(rho^{(x) n})^Gamma + x 1`` PSD.

    best_lambda : float
        Schmidt weight of the best probe ``sqrt(l)|00> + sqrt(1-l)|11>``.

    witness_value : float
        Smallest ``G_min^2`` found between the probe and the shifted operator.

    distillable_flag : bool
        ``witness_value < x_shift`` beyond tolerance, with the witness
        re-verified.

    status : {'distillable', 'inconclusive', 'ppt'}

    min_eigenvalue : float
        Smallest eigenvalue of the partially transposed power.

    witness : np.ndarray or None
        Schmidt-rank-two ket ``psi`` with ``<psi|Gamma|psi> < 0`` when flagged.

    witness_expectation : float or None
        ``<psi|Gamma|psi>`` evaluated directly.

    grid : dict
        Witness value at each probed ``lambda``.
    """

    n: int
    x_shift: float
    best_lambda: float
    witness_value: float
    distillable_flag: bool
    status: str
    min_eigenvalue: float
    witness: np.ndarray = None
    witness_expectation: float = None
    grid: dict = field(default_factory=dict)

    def to_dict(self):

        out = asdict(self)
        out['witness'] = None if self.witness is None else _complex_to_dict(self.witness)
        out['grid'] = {repr(k): v for k, v in self.grid.items()}

        return out

    def to_json(self, path=None):
        return _write_json(self.to_dict(), path)


def schmidt_probe(lam, d1, d2):
    """``sqrt(lam)|00> + sqrt(1 - lam)|11>`` on ``C^d1 (x) C^d2``."""

    if d1 < 2 or d2 < 2:
        raise BadParameter(f'a Schmidt-rank-two probe needs d1, d2 >= 2, got ({d1}, {d2})')
    if not 0.0 < lam < 1.0:
        raise BadParameter(f'probe weight must lie in (0, 1), got {lam}')

    ket = np.zeros(d1 * d2, dtype=complex)
    ket[0] = np.sqrt(lam)
    ket[d2 + 1] = np.sqrt(1.0 - lam)

    return PureState(ket, d1, d2)


def distill_probe(rho, n=1, grid=21, refine=True, **kwargs):
    """Search for a Schmidt-rank-two state with negative partial-transpose expectation.

    ``rho`` is distillable iff for some ``n`` and some Schmidt-rank-two
    ``|phi>`` the local-unitary minimum of ``F(phi, Gamma + x 1)^2`` drops
    below ``x``, where ``Gamma = (rho^{(x) n})^Gamma`` and ``x > 0`` makes the
    shifted operator PSD. The probe scans ``grid`` interior weights
    ``lambda`` and refines the best one by golden-section search inside the
    bracket formed by its grid neighbours.

    Parameters
    ----------
    rho : DensityMatrix

    n : int, optional (default=1)
        Tensor power; ``(d1 d2)**n`` may not exceed 256.

    grid : int, optional (default=21)
        Number of interior ``lambda`` values.

    refine : bool, optional (default=True)

    **kwargs
        Passed to :class:`~pylufid.orbits.fid.GMIN`.

    Returns
    -------
    report : DistillReport
    """

    rho = check_state(rho)
    if int(n) != n or n < 1:
        raise BadParameter(f'tensor power must be a positive integer, got {n}')
    if rho.order ** n > MAX_DIMENSION:
        raise DimensionTooLarge(
            f'dimension {rho.order}**{n} exceeds the probe limit {MAX_DIMENSION}')
    if grid < 1:
        raise BadParameter(f'grid needs at least one point, got {grid}')

    power = tensor_power(rho, n) if n > 1 else rho
    d1, d2 = power.dims
    gamma = partial_transpose(power.mat, d1, d2)

    lam_min = min_eigenvalue(gamma)
    npt = lam_min < -NPT_TOL
    x = -lam_min + NPT_TOL if npt else PPT_SHIFT
    shifted = gamma + x * np.eye(d1 * d2)

    opt = GMIN(**kwargs)

    def witness_value(lam):
        value = opt.eval(schmidt_probe(lam, d1, d2), shifted, dims=(d1, d2))
        return value**2, opt.local_unitary_

    lambdas = np.linspace(0.0, 1.0, grid + 2)[1:-1]
    scan = tqdm(lambdas, ascii=True, desc='Schmidt weights') if opt.verbose else lambdas

    values = {}
    best = (np.inf, None, None)
    for lam in scan:
        value, w = witness_value(lam)
        values[float(lam)] = float(value)
        if value < best[0]:
            best = (value, float(lam), w)

    if refine and grid > 1:
        k = int(np.argmin([values[float(lam)] for lam in lambdas]))
        lo = lambdas[k - 1] if k > 0 else EDGE_LAMBDA
        hi = lambdas[k + 1] if k + 1 < grid else 1.0 - EDGE_LAMBDA
        f_lo = values[float(lo)] if k > 0 else witness_value(lo)[0]
        f_hi = values[float(hi)] if k + 1 < grid else witness_value(hi)[0]

        # golden-section needs a strict bracket around the grid minimum
        if best[0] < f_lo and best[0] < f_hi:
            res = minimize_scalar(lambda lam: witness_value(lam)[0],
                                  bracket=(lo, best[1], hi), method='golden',
                                  options={'xtol': 1e-6, 'maxiter': 30})
            value, w = witness_value(res.x)
            if value < best[0]:
                best = (value, float(res.x), w)

    value, lam, w = best
    psi = w.adjoint().apply_ket(schmidt_probe(lam, d1, d2).ket)
    expectation = float(np.real(np.vdot(psi, gamma @ psi)))

    flag = bool(npt and value < x - FLAG_TOL and expectation < 0)
    if flag:
        status = 'distillable'
    elif npt:
        status = 'inconclusive'
        logger.warning(f'state is NPT (min eigenvalue {lam_min:.3e}) but no '
                       f'Schmidt-rank-two witness found at n={n}')
    else:
        status = 'ppt'

    return DistillReport(n=int(n), x_shift=float(x), best_lambda=lam,
                         witness_value=float(max(value, 0.0)),
                         distillable_flag=flag, status=status,
                         min_eigenvalue=float(lam_min),
                         witness=psi if flag else None,
                         witness_expectation=expectation if flag else None,
                         grid=values)


def werner_sweep(t_values, n=1, **kwargs):
    """Run :func:`distill_probe` on two-qubit Werner states.

    Returns
    -------
    table : pandas.DataFrame
        Columns ``t``, ``min_eigenvalue``, ``x_shift``, ``witness_value``,
        ``best_lambda``, ``distillable`` and ``status``.
    """

    rows = []
    for t in t_values:
        report = distill_probe(werner(2, t), n=n, **kwargs)
        rows.append({'t': float(t),
                     'min_eigenvalue': report.min_eigenvalue,
                     'x_shift': report.x_shift,
                     'witness_value': report.witness_value,
                     'best_lambda': report.best_lambda,
                     'distillable': report.distillable_flag,
                     'status': report.status})

    return pd.DataFrame(rows)


@dataclass
class CommutativityReport:
    """Outcome of :func:`commutativity_experiment`.

    Attributes
    ----------
    best : float
        Smallest ``||[rho, W sigma W^dagger]||_F`` found.

    per_restart_values : list of float

    local_unitary : LocalUnitary

    commuting : bool
        ``best < 1e-6``.

    rho_multiplicities, sigma_multiplicities : list of [float, int]
        Distinct positive eigenvalues with their multiplicities.
    """

    best: float
    per_restart_values: list
    local_unitary: object
    commuting: bool
    rho_multiplicities: list
    sigma_multiplicities: list

    def to_dict(self):

        return {'best': self.best,
                'per_restart_values': list(self.per_restart_values),
                'local_unitary': self.local_unitary.to_dict(),
                'commuting': self.commuting,
                'rho_multiplicities': self.rho_multiplicities,
                'sigma_multiplicities': self.sigma_multiplicities}

    def to_json(self, path=None):
        return _write_json(self.to_dict(), path)


def eigenvalue_multiplicities(x, tol=MULTIPLICITY_TOL):
    """Distinct positive eigenvalues of ``x`` with multiplicities, descending."""

    vals = herm_eig(np.asarray(x)).eigenvalues
    groups = []
    for v in vals[vals > tol]:
        if groups and abs(groups[-1][0] - v) <= tol:
            groups[-1][1] += 1
        else:
            groups.append([float(v), 1])

    return groups


def commutativity_experiment(rho, sigma, **kwargs):
    """Minimize the commutator norm over the local-unitary orbit of ``sigma``.

    Parameters
    ----------
    rho, sigma : DensityMatrix

    **kwargs
        Passed to :class:`~pylufid.orbits.comm.COMM`.

    Returns
    -------
    report : CommutativityReport
    """

    rho, sigma = check_state(rho), check_state(sigma)
    if rho.dims != sigma.dims:
        raise DimensionMismatch(
            f'states on {rho.dims} and {sigma.dims} are not comparable')

    opt = commutator_min(rho, sigma, **kwargs)
    logger.info(f'smallest commutator norm {opt.value:.6g} over '
                f'{len(opt.per_restart_values)} restarts')

    return CommutativityReport(best=float(opt.value),
                               per_restart_values=list(opt.per_restart_values),
                               local_unitary=opt.local_unitary,
                               commuting=bool(opt.value < COMMUTING_TOL),
                               rho_multiplicities=eigenvalue_multiplicities(rho.mat),
                               sigma_multiplicities=eigenvalue_multiplicities(sigma.mat))
