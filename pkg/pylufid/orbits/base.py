import abc
import logging
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed
from tqdm import tqdm

from ..utils.states import LocalUnitary
from .orbit_utility import (check_params, initial_points, restart_rng,
                            riemannian_search)

logger = logging.getLogger(__name__)


@dataclass
class OptimizationReport:
    """Outcome of a multi-start optimization over local unitaries.

    Attributes
    ----------
    value : float
        Best objective value over all restarts.

    local_unitary : LocalUnitary
        Point attaining ``value``.

    per_restart_values : list of float
        Final value of each restart, in restart order.

    iterations_used : list of int

    converged : bool
        Whether the restart that produced ``value`` met a stopping test
        before ``max_iter``.

    stalled : bool
        Whether that restart ended because the line search could not
        improve. A stalled restart is never counted as converged.

    mode : {'max', 'min'}

    best_restart : int

    diagnostics : dict
        Extra quantities recorded at the optimum.
    """

    value: float
    local_unitary: LocalUnitary
    per_restart_values: list
    iterations_used: list
    converged: bool
    mode: str
    best_restart: int = 0
    stalled: bool = False
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self):

        return {'value': self.value,
                'mode': self.mode,
                'converged': self.converged,
                'stalled': self.stalled,
                'best_restart': self.best_restart,
                'per_restart_values': list(self.per_restart_values),
                'iterations_used': list(self.iterations_used),
                'local_unitary': self.local_unitary.to_dict(),
                'diagnostics': dict(self.diagnostics)}


class BaseOrbitOptimizer(metaclass=abc.ABCMeta):
    """Abstract class for optimizers over the local unitary group.

       Parameters
       ----------

       restarts : int, optional (default=24)
            Number of independent starting points.

       max_iter : int, optional (default=500)
            Iteration cap per restart.

       step_init : float, optional (default=1.0)
            First trial step of the line search.

       grad_tol : float, optional (default=1e-9)
            Stop when the Riemannian gradient norm falls below this.

       value_tol : float, optional (default=1e-10)
            Stop when the relative change of the objective falls below this.

       random_state : int, optional (default=1234)
            Seed of the per-restart random streams. Can also be set to None.

       n_jobs : int, optional (default=None)
            Number of joblib workers running restarts. None runs them in
            the calling process.

       verbose : bool, optional (default=False)
            Show a progress bar over restarts.

       Attributes
       ----------

       value_ : optimal value found

       report_ : OptimizationReport of the last evaluation
    """

    @abc.abstractmethod
    def __init__(self, restarts=24, max_iter=500, step_init=1.0, grad_tol=1e-9,
                 value_tol=1e-10, random_state=1234, n_jobs=None, verbose=False):

        self.restarts = restarts
        self.max_iter = max_iter
        self.step_init = step_init
        self.grad_tol = grad_tol
        self.value_tol = value_tol
        self.random_state = random_state
        self.n_jobs = n_jobs
        self.verbose = verbose

        self.value_ = None
        self.report_ = None

    @abc.abstractmethod
    def eval(self, rho, sigma, dims=None):
        """Optimize over the local unitary orbit of ``sigma``.

        Parameters
        ----------
        rho, sigma : DensityMatrix, PureState or array-like
            Operators on ``C^d1 (x) C^d2``.

        dims : tuple of int, optional (default=None)
            ``(d1, d2)``; required when both arguments are plain arrays.

        Returns
        -------
        value : float
            The optimal value found.
        """

    def _search(self, objective, mode, aligned=None, transform=None):
        """Run every restart and reduce to the best one.

        ``transform`` maps raw objective values to reported values and
        must be monotone increasing.
        """

        check_params(self.restarts, self.max_iter, self.step_init,
                     self.grad_tol, self.value_tol)

        sign = 1 if mode == 'max' else -1
        starts = initial_points(self.restarts, objective.d1, objective.d2,
                                self.random_state, aligned=aligned)
        if self.verbose:
            starts = tqdm(starts, total=self.restarts, ascii=True,
                          desc='Restarts')

        results = Parallel(n_jobs=self.n_jobs)(
            delayed(riemannian_search)(objective, u1, u2, sign,
                                       max_iter=self.max_iter,
                                       step_init=self.step_init,
                                       grad_tol=self.grad_tol,
                                       value_tol=self.value_tol,
                                       rng=restart_rng(self.random_state, idx,
                                                       stream=1))
            for idx, u1, u2 in starts)

        transform = (lambda v: v) if transform is None else transform
        values = [float(transform(r.value)) for r in results]

        best = int(np.argmax(values) if sign > 0 else np.argmin(values))
        winner = results[best]

        for idx, r in enumerate(results):
            logger.debug(f'restart {idx}: value {values[idx]:.12g} after '
                         f'{r.iterations} iterations (converged={r.converged}, '
                         f'stalled={r.stalled})')

        if winner.stalled:
            logger.info(f'best restart {best} ended on a stalled line search')
        elif not winner.converged:
            logger.warning(f'best restart {best} stopped at max_iter='
                           f'{self.max_iter} without meeting a tolerance')

        return OptimizationReport(
            value=values[best],
            local_unitary=LocalUnitary(winner.u1, winner.u2, check=False),
            per_restart_values=values,
            iterations_used=[r.iterations for r in results],
            converged=bool(winner.converged),
            stalled=bool(winner.stalled),
            mode=mode,
            best_restart=best)
