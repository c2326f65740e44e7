"""Analytic bounds on the local-unitary fidelity extrema.

Every check returns a :class:`BoundReport`. Bounds that sandwich a
numerically optimized value compare against it when it is supplied;
otherwise they compare against a value known without optimization (the
fidelity at the identity, or the trivial range ``[0, 1]``).
"""
import json
import logging
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.linalg as sla
from scipy.optimize import bisect

from .closed_form import global_unitary_extrema, rel_entropy_global_max
from .exceptions import (BadParameter, ConvergenceFailure, DimensionMismatch,
                         IoError, MissingWitness)
from .utils.fidelity import affine_fidelity, fidelity
from .utils.linalg import (SUPPORT_TOL, dagger, matrix_sqrt, psd_eig, rank,
                           trace_norm)
from .utils.states import (LocalUnitary, _complex_to_dict, as_operator,
                           check_state, complement_state)

logger = logging.getLogger(__name__)

SLACK_TOL = 1e-8
MATCH_TOL = 1e-10
BISECT_MAXITER = 200


@dataclass
class BoundReport:
    """Outcome of one bound or inequality check.

    Attributes
    ----------
    name : str

    lower, upper : float or None
        The two sides of the checked inequality, when present.

    value : float or None
        The quantity sandwiched between ``lower`` and ``upper``.

    witness : LocalUnitary, np.ndarray or None
        Unitary attaining a reported value.

    satisfied : bool
        ``slack >= -1e-8``.

    slack : float
        Smallest margin over the checked inequalities; negative means
        violated.

    notes : list of str

    details : dict
        Branch values and other per-check quantities.
    """

    name: str
    lower: float = None
    upper: float = None
    value: float = None
    witness: object = None
    satisfied: bool = True
    slack: float = 0.0
    notes: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def to_dict(self):

        out = asdict(self)
        if isinstance(self.witness, LocalUnitary):
            out['witness'] = self.witness.to_dict()
        elif self.witness is not None:
            out['witness'] = _complex_to_dict(self.witness)

        return out

    def to_json(self, path=None):

        text = json.dumps(self.to_dict(), default=float)
        if path is None:
            return text

        try:
            with open(path, 'w') as f:
                f.write(text)
        except OSError as error:
            raise IoError(f'cannot write bound report to {path}: {error}') from error

        return text


def _report(name, slack, **kwargs):

    slack = float(slack)
    report = BoundReport(name=name, slack=slack, satisfied=slack >= -SLACK_TOL,
                         **kwargs)
    if not report.satisfied:
        logger.warning(f'{name} violated with slack {slack:.3e}')

    return report


def _states(rho, sigma):

    rho, sigma = check_state(rho), check_state(sigma)
    if rho.dims != sigma.dims:
        raise DimensionMismatch(
            f'states on {rho.dims} and {sigma.dims} are not comparable')

    return rho, sigma


def _trace_sqrt(x):

    vals, _ = psd_eig(as_operator(x))

    return float(np.sum(np.sqrt(vals)))


def rank_sum_check(rho, sigma, gmax_val=None, gmin_val=None, **kwargs):
    """Check ``rank(rho) >= G_max(rho, sigma)^2 + (n-1) G_min(rho, sigma')^2 >= 1``.

    ``sigma' = (1 - sigma) / (n - 1)`` with ``n = d1 d2``. Missing values
    are computed with :func:`~pylufid.orbits.fid.gmax` and
    :func:`~pylufid.orbits.fid.gmin`, which receive ``**kwargs``.

    Parameters
    ----------
    rho, sigma : DensityMatrix

    gmax_val : float, optional (default=None)
        ``G_max(rho, sigma)``.

    gmin_val : float, optional (default=None)
        ``G_min(rho, sigma')``, against the complement.

    Returns
    -------
    report : BoundReport
        ``value`` is the middle quantity, ``lower = 1`` and
        ``upper = rank(rho)``.
    """

    from .orbits.fid import gmax, gmin

    rho, sigma = _states(rho, sigma)
    n = rho.order

    if gmax_val is None:
        gmax_val = gmax(rho, sigma, **kwargs).value
    if gmin_val is None:
        gmin_val = gmin(rho, complement_state(sigma), **kwargs).value

    middle = gmax_val**2 + (n - 1) * gmin_val**2
    r = rho.rank()

    return _report('rank_sum', min(r - middle, middle - 1.0), lower=1.0,
                   upper=float(r), value=float(middle),
                   details={'gmax': float(gmax_val), 'gmin_complement': float(gmin_val),
                            'rank': r, 'upper_slack': float(r - middle),
                            'lower_slack': float(middle - 1.0)})


def _witness(w, name):

    if isinstance(w, LocalUnitary):
        return w

    unitary = getattr(w, 'local_unitary', None)
    if not isinstance(unitary, LocalUnitary):
        raise MissingWitness(f'{name} carries no local unitary')

    return unitary


def triangle_check(rho, sigma, max_witness=None, min_witness=None, **kwargs):
    """Check the three fidelity-triangle inequalities at the optimizers' witnesses.

    With ``U = argmax G_max(rho, sigma)``, ``V = argmin G_min(rho, sigma')``,
    ``s = U sigma U^dagger``, ``s' = V sigma' V^dagger`` and ``f = F(s, s')``:

    - ``G_max + G_min <= sqrt(2 + 2 f)``
    - ``|G_max^2 - G_min^2| <= sqrt(1 - f^2)``
    - ``|G_max - G_min| <= sqrt(1 - f^2)``

    Parameters
    ----------
    rho, sigma : DensityMatrix

    max_witness, min_witness : OptimizationReport or LocalUnitary, optional
        Computed with ``**kwargs`` when omitted.

    Returns
    -------
    report : BoundReport
        ``slack`` is the smallest of the three margins.
    """

    from .orbits.fid import gmax, gmin

    rho, sigma = _states(rho, sigma)
    complement = complement_state(sigma)

    if max_witness is None:
        max_witness = gmax(rho, sigma, **kwargs)
    if min_witness is None:
        min_witness = gmin(rho, complement, **kwargs)

    u = _witness(max_witness, 'max_witness')
    v = _witness(min_witness, 'min_witness')
    if (u.d1, u.d2) != rho.dims or (v.d1, v.d2) != rho.dims:
        raise DimensionMismatch('witness dimensions do not match the states')

    s_hat = u.apply(sigma.mat)
    s_hat_c = v.apply(complement.mat)

    a = fidelity(rho.mat, s_hat)
    b = fidelity(rho.mat, s_hat_c)
    f = min(fidelity(s_hat, s_hat_c), 1.0)
    gap = np.sqrt(max(1.0 - f**2, 0.0))

    slacks = {'sum': np.sqrt(2 + 2 * f) - (a + b),
              'squares': gap - abs(a**2 - b**2),
              'difference': gap - abs(a - b)}

    return _report('triangle', min(slacks.values()), value=float(f), witness=u,
                   details={'gmax': a, 'gmin_complement': b,
                            **{k: float(s) for k, s in slacks.items()}})


def gmax_upper_bound(rho, sigma, numeric=None):
    """Monotonicity bound ``G_max <= min(f1, f2, f12)``.

    ``f1`` and ``f2`` are the global-unitary maxima between the reduced
    states on each factor, ``f12`` the one between ``rho`` and ``sigma``;
    all three are closed form in the spectra.

    Parameters
    ----------
    rho, sigma : DensityMatrix

    numeric : float, optional (default=None)
        An optimized ``G_max`` to compare with; ``F(rho, sigma)`` is used
        otherwise.
    """

    rho, sigma = _states(rho, sigma)

    branches = {'factor1': global_unitary_extrema(rho.reduced(1), sigma.reduced(1))[0],
                'factor2': global_unitary_extrema(rho.reduced(2), sigma.reduced(2))[0],
                'global': global_unitary_extrema(rho.mat, sigma.mat)[0]}
    upper = min(branches.values())

    notes = []
    if numeric is None:
        numeric = fidelity(rho.mat, sigma.mat)
        notes.append('compared with the fidelity at the identity')

    return _report('gmax_upper', upper - numeric, upper=float(upper),
                   value=float(numeric), notes=notes, details=branches)


def gmax_lower_bound(rho, sigma, rel_entropy_min=None, numeric=None):
    """Lower bound ``max(Tr sqrt(rho) Tr sqrt(sigma) / (d1 d2), exp(-S_min / 2))``.

    The first branch is the Haar average of the affine fidelity over the
    orbit. The second applies when ``rel_entropy_min``, an attained value
    of ``S(rho || W sigma W^dagger)``, is supplied; any attained value gives
    a valid bound.

    Parameters
    ----------
    rho, sigma : DensityMatrix

    rel_entropy_min : float, optional (default=None)

    numeric : float, optional (default=None)
        An optimized ``G_max``; the trivial ceiling 1 is used otherwise.
    """

    rho, sigma = _states(rho, sigma)

    branches = {'haar_affine': _trace_sqrt(rho) * _trace_sqrt(sigma) / rho.order}
    if rel_entropy_min is not None:
        branches['relative_entropy'] = float(np.exp(-0.5 * rel_entropy_min))
    lower = max(branches.values())

    notes = []
    if numeric is None:
        numeric = 1.0
        notes.append('compared with the trivial ceiling 1')

    return _report('gmax_lower', numeric - lower, lower=float(lower),
                   value=float(numeric), notes=notes, details=branches)


def gmin_upper_bound(rho, sigma, numeric=None):
    """Haar-average bound ``G_min <= min(Tr sqrt(rho), Tr sqrt(sigma)) / sqrt(d1 d2)``.

    ``numeric`` is an optimized ``G_min``; the trivial floor 0 is used
    otherwise.
    """

    rho, sigma = _states(rho, sigma)

    branches = {'rho': _trace_sqrt(rho) / np.sqrt(rho.order),
                'sigma': _trace_sqrt(sigma) / np.sqrt(rho.order)}
    upper = min(branches.values())

    notes = []
    if numeric is None:
        numeric = 0.0
        notes.append('compared with the trivial floor 0')

    return _report('gmin_upper', upper - numeric, upper=float(upper),
                   value=float(numeric), notes=notes, details=branches)


def _spectral_branch(a, b):

    a = np.clip(np.sort(np.linalg.eigvalsh(a))[::-1], 0.0, None)
    b = np.sort(np.linalg.eigvalsh(b))

    return float(np.sum(np.sqrt(a)) * np.exp(0.5 * np.sum(a * np.log(b))))


def gmin_lower_bound(rho, sigma, rel_entropy_max=None, numeric=None):
    """Lower bound on ``G_min`` from spectra and relative entropy.

    Branches:

    - ``Tr sqrt(rho) exp(sum_j l_j(rho) log m_j(sigma) / 2)`` with ``l``
      descending and ``m`` ascending, for full-rank inputs
    - the same with ``rho`` and ``sigma`` exchanged
    - ``exp(-S_max / 2)`` where ``S_max`` is the largest relative entropy
      over global unitaries, which dominates the local one

    A numerically maximized relative entropy over local unitaries may fall
    short of the true maximum and would overstate the bound; when passed
    as ``rel_entropy_max`` it is recorded in ``details`` only.

    Parameters
    ----------
    rho, sigma : DensityMatrix

    rel_entropy_max : float, optional (default=None)

    numeric : float, optional (default=None)
        An optimized ``G_min``; ``F(rho, sigma)`` is used otherwise.
    """

    rho, sigma = _states(rho, sigma)
    n = rho.order

    branches, notes = {}, []
    full_rank = rank(rho.mat, SUPPORT_TOL) == n and rank(sigma.mat, SUPPORT_TOL) == n
    if full_rank:
        branches['spectral'] = _spectral_branch(rho.mat, sigma.mat)
        branches['spectral_exchanged'] = _spectral_branch(sigma.mat, rho.mat)
    else:
        notes.append('spectral branches skipped: rank-deficient input')

    branches['global_relative_entropy'] = float(
        np.exp(-0.5 * rel_entropy_global_max(rho.mat, sigma.mat)))
    lower = max(branches.values())

    details = dict(branches)
    if rel_entropy_max is not None:
        details['numeric_relative_entropy_unsound'] = float(
            np.exp(-0.5 * rel_entropy_max))
        notes.append('numeric relative-entropy maximum reported only')

    if numeric is None:
        numeric = fidelity(rho.mat, sigma.mat)
        notes.append('compared with the fidelity at the identity')

    return _report('gmin_lower', numeric - lower, lower=float(lower),
                   value=float(numeric), notes=notes, details=details)


def _affine_rotated(sqrt_rho, sqrt_sigma, u):

    return float(np.real(np.sum(sqrt_rho.T * (u @ sqrt_sigma @ dagger(u)))))


def find_affine_matching_unitary(rho, sigma, tol=1e-12):
    """Unitary ``U0`` with ``A(rho, U0 sigma U0^dagger) = F(rho, sigma)``.

    ``g(U) = A(rho, U sigma U^dagger)`` is continuous on the connected
    unitary group, ``g(1) <= F`` and ``g(U*) >= F`` for the unitary ``U*``
    aligning the eigenbases of ``sigma`` with those of ``rho`` in
    descending order. Bisection along ``s -> exp(s log U*)`` then finds a
    point where ``g`` equals ``F``.

    Parameters
    ----------
    rho, sigma : array-like of shape (n, n)
        PSD operators of equal order.

    tol : float, optional (default=1e-12)
        Accept an endpoint whose value is within ``tol`` of ``F``.

    Returns
    -------
    u0 : np.ndarray of shape (n, n)

    achieved : float
        ``A(rho, u0 sigma u0^dagger)``.
    """

    rho, sigma = as_operator(rho), as_operator(sigma)
    if rho.shape != sigma.shape:
        raise DimensionMismatch(
            f'operators of shapes {rho.shape} and {sigma.shape} differ')

    n = rho.shape[0]
    target = fidelity(rho, sigma)
    sqrt_rho, sqrt_sigma = matrix_sqrt(rho), matrix_sqrt(sigma)

    start = _affine_rotated(sqrt_rho, sqrt_sigma, np.eye(n))
    if start >= target - tol:
        return np.eye(n, dtype=complex), start

    _, v_rho = psd_eig(rho)
    _, v_sigma = psd_eig(sigma)
    aligned = v_rho @ dagger(v_sigma)

    t, z = sla.schur(aligned, output='complex')
    theta = np.angle(np.diag(t))

    def path(s):
        return (z * np.exp(1j * s * theta)) @ dagger(z)

    end = _affine_rotated(sqrt_rho, sqrt_sigma, path(1.0))
    if end < target - tol:
        raise ConvergenceFailure(
            f'aligned unitary reaches {end!r} below the fidelity {target!r}')
    if end <= target + tol:
        return path(1.0), end

    try:
        s0 = bisect(lambda s: _affine_rotated(sqrt_rho, sqrt_sigma, path(s)) - target,
                    0.0, 1.0, xtol=1e-15, maxiter=BISECT_MAXITER)
    except (RuntimeError, ValueError) as error:
        raise ConvergenceFailure(f'affine matching bisection failed: {error}') from None

    u0 = path(s0)
    achieved = _affine_rotated(sqrt_rho, sqrt_sigma, u0)
    logger.debug(f'affine matching at s = {s0:.15g}, gap {achieved - target:.3e}')

    return u0, achieved


def rank_trace_bounds(x):
    """``sqrt(Tr X) <= Tr sqrt(X) <= sqrt(rank(X) Tr X)`` for PSD ``X``."""

    vals, _ = psd_eig(as_operator(x))
    trace = float(np.sum(vals))
    middle = float(np.sum(np.sqrt(vals)))
    upper = float(np.sqrt(np.sum(vals > SUPPORT_TOL) * trace))
    lower = float(np.sqrt(trace))

    return _report('rank_trace', min(upper - middle, middle - lower),
                   lower=lower, upper=upper, value=middle)


def fidelity_overlap_bounds(a, b):
    """``sqrt(Tr AB) <= F(A, B) <= sqrt(rank(sqrt(A) sqrt(B)) Tr AB)`` for PSD pairs."""

    a, b = as_operator(a), as_operator(b)
    if a.shape != b.shape:
        raise DimensionMismatch(
            f'operators of shapes {a.shape} and {b.shape} differ')

    s = sla.svdvals(matrix_sqrt(a) @ matrix_sqrt(b))
    r = int(np.sum(s > SUPPORT_TOL * max(s[0], 1.0))) if s.size else 0

    overlap = max(float(np.real(np.trace(a @ b))), 0.0)
    middle = trace_norm(matrix_sqrt(a) @ matrix_sqrt(b))
    lower, upper = np.sqrt(overlap), np.sqrt(r * overlap)

    return _report('fidelity_overlap', min(upper - middle, middle - lower),
                   lower=float(lower), upper=float(upper), value=float(middle),
                   details={'rank': r})


def affine_matching_report(rho, sigma, **kwargs):

    u0, achieved = find_affine_matching_unitary(rho, sigma, **kwargs)
    target = fidelity(rho, sigma)

    return _report('affine_matching', MATCH_TOL - abs(achieved - target),
                   value=float(achieved), witness=u0,
                   details={'fidelity': float(target),
                            'affine_at_identity': affine_fidelity(rho, sigma)})


def bound_suite(rho, sigma, numeric=True, **kwargs):
    """Run every bound for a pair of states.

    Parameters
    ----------
    rho, sigma : DensityMatrix

    numeric : bool, optional (default=True)
        Optimize ``G_max``, ``G_min`` and the relative-entropy minimum
        (with ``**kwargs``) and sandwich them; when ``False`` only the
        closed-form bounds are evaluated.

    Returns
    -------
    reports : dict of BoundReport
    """

    from .orbits.fid import gmax, gmin
    from .orbits.hso import rel_entropy_min

    rho, sigma = _states(rho, sigma)
    if kwargs and not numeric:
        raise BadParameter('optimizer options need numeric=True')

    high = low_complement = None
    gmax_val = gmin_val = s_min = None
    if numeric:
        high = gmax(rho, sigma, **kwargs)
        low_complement = gmin(rho, complement_state(sigma), **kwargs)
        gmax_val = high.value
        gmin_val = gmin(rho, sigma, **kwargs).value
        s_min, _ = rel_entropy_min(rho, sigma, **kwargs)
        if not np.isfinite(s_min):
            s_min = None

    reports = {
        'gmax_upper': gmax_upper_bound(rho, sigma, numeric=gmax_val),
        'gmax_lower': gmax_lower_bound(rho, sigma, rel_entropy_min=s_min,
                                       numeric=gmax_val),
        'gmin_upper': gmin_upper_bound(rho, sigma, numeric=gmin_val),
        'gmin_lower': gmin_lower_bound(rho, sigma, numeric=gmin_val),
        'affine_matching': affine_matching_report(rho.mat, sigma.mat),
        'rank_trace_rho': rank_trace_bounds(rho),
        'fidelity_overlap': fidelity_overlap_bounds(rho, sigma),
    }

    if numeric:
        reports['rank_sum'] = rank_sum_check(rho, sigma, gmax_val=gmax_val,
                                             gmin_val=low_complement.value)
        reports['triangle'] = triangle_check(rho, sigma, max_witness=high,
                                             min_witness=low_complement)

    return reports
