import logging

import numpy as np

from ..utils.fidelity import von_neumann_entropy
from ..utils.linalg import SUPPORT_TOL, dagger, matrix_log, rank
from .base import BaseOrbitOptimizer
from .orbit_utility import OrbitObjective, check_pair, factor_gradients

logger = logging.getLogger(__name__)


class OverlapObjective(OrbitObjective):
    """``Re Tr(rho W x W^dagger)`` for Hermitian ``rho`` and ``x``."""

    def __init__(self, rho, x, d1, d2):

        super().__init__(d1, d2)
        self.rho = rho
        self.x = x

    def value(self, u1, u2):

        w = np.kron(u1, u2)

        return float(np.real(np.sum(self.rho.T * (w @ self.x @ dagger(w)))))

    def value_and_grad(self, u1, u2):

        w = np.kron(u1, u2)
        rw = self.rho @ w
        f = np.real(np.sum(np.conj(w) * (rw @ self.x)))

        return float(f), *factor_gradients(2 * rw @ self.x, u1, u2)


class HSO(BaseOrbitOptimizer):
    """HSO class for the Hilbert-Schmidt overlap over local unitaries.

       Computes the extrema of

       .. math::

           \\mathrm{Tr}\\left(\\rho (U_1 \\otimes U_2) \\sigma
           (U_1 \\otimes U_2)^\\dagger\\right)

       The maximum is found by Riemannian ascent. The minimum is obtained
       from a second maximization with ``sigma`` replaced by
       ``1 - sigma``, since
       ``min Tr(rho W sigma W^dagger) = Tr(rho) - max Tr(rho W (1 - sigma) W^dagger)``.

       Parameters
       ----------

       See :class:`~pylufid.orbits.base.BaseOrbitOptimizer`.

       Attributes
       ----------

       value_ : tuple (max, min)

       max_ : largest overlap found

       min_ : smallest overlap found

       max_report_, min_report_ : OptimizationReport of each search; the
            local unitary of ``min_report_`` attains ``min_`` on ``sigma``

       Notes
       -----

       The maximum never exceeds the unnormalized ``G_max(rho^2, sigma^2)``,
       because ``|Tr(U A)| <= Tr|A|`` for any unitary ``U``.
    """

    def __init__(self, restarts=24, max_iter=500, step_init=1.0, grad_tol=1e-9,
                 value_tol=1e-10, random_state=1234, n_jobs=None, verbose=False):

        super().__init__(restarts=restarts, max_iter=max_iter,
                         step_init=step_init, grad_tol=grad_tol,
                         value_tol=value_tol, random_state=random_state,
                         n_jobs=n_jobs, verbose=verbose)
        self.max_ = None
        self.min_ = None
        self.max_report_ = None
        self.min_report_ = None

    def eval(self, rho, sigma, dims=None):
        """Compute the largest and smallest Hilbert-Schmidt overlap.

        Parameters
        ----------
        rho, sigma : DensityMatrix, PureState or array-like

        dims : tuple of int, optional (default=None)

        Returns
        -------
        extrema : tuple of float
            ``(max, min)``.
        """

        rho, sigma, d1, d2 = check_pair(rho, sigma, dims)
        trace = float(np.real(np.trace(rho)))

        self.max_report_ = self._search(OverlapObjective(rho, sigma, d1, d2),
                                        'max')

        complement = np.eye(d1 * d2) - sigma
        report = self._search(OverlapObjective(rho, complement, d1, d2), 'max')
        report.value = trace - report.value
        report.per_restart_values = [trace - v for v in report.per_restart_values]
        report.mode = 'min'
        self.min_report_ = report

        self.max_ = self.max_report_.value
        self.min_ = self.min_report_.value
        self.report_ = self.max_report_
        self.value_ = (self.max_, self.min_)

        return self.value_


def hs_overlap_extrema(rho, sigma, dims=None, **kwargs):
    """``(max, min)`` of ``Tr(rho W sigma W^dagger)`` over local unitaries."""

    return HSO(**kwargs).eval(rho, sigma, dims=dims)


def rel_entropy_min(rho, sigma, dims=None, **kwargs):
    """Smallest ``S(rho || W sigma W^dagger)`` found over local unitaries.

    Uses ``S(rho || W sigma W^dagger) = -S(rho) - Tr(rho W log(sigma) W^dagger)``
    and maximizes the overlap with ``log(sigma)``. Any attained value is an
    upper estimate of the true minimum.

    Returns
    -------
    value : float
        ``inf`` when ``sigma`` is rank deficient.

    report : OptimizationReport or None
    """

    rho, sigma, d1, d2 = check_pair(rho, sigma, dims)

    if rank(sigma, SUPPORT_TOL) < d1 * d2:
        logger.warning('relative entropy search needs a full-rank sigma, '
                       'returning inf')
        return np.inf, None

    opt = HSO(**kwargs)
    report = opt._search(OverlapObjective(rho, matrix_log(sigma), d1, d2), 'max')

    value = -von_neumann_entropy(rho) - report.value

    return float(max(value, 0.0)), report
