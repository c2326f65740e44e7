import numpy as np

from ..utils.linalg import dagger
from .base import BaseOrbitOptimizer
from .orbit_utility import OrbitObjective, check_pair, factor_gradients


class CommutatorObjective(OrbitObjective):
    """Squared Frobenius norm of ``[rho, W sigma W^dagger]``.

    ``f = 2 Tr(rho^2 X^2) - 2 Tr(rho X rho X)`` with ``X = W sigma W^dagger``;
    the Euclidean gradient is ``4 rho^2 W sigma^2 - 8 rho X rho W sigma``.
    """

    def __init__(self, rho, sigma, d1, d2):

        super().__init__(d1, d2)
        self.rho = rho
        self.sigma = sigma
        self.rho2 = rho @ rho
        self.sigma2 = sigma @ sigma

    def value(self, u1, u2):

        w = np.kron(u1, u2)
        x = w @ self.sigma @ dagger(w)
        c = self.rho @ x - x @ self.rho

        return float(np.real(np.vdot(c, c)))

    def value_and_grad(self, u1, u2):

        w = np.kron(u1, u2)
        ws = w @ self.sigma
        x = ws @ dagger(w)
        rxr = self.rho @ x @ self.rho

        f = 2 * np.real(np.sum(self.rho2.T * (w @ self.sigma2 @ dagger(w)))) - \
            2 * np.real(np.sum(rxr.T * x))
        g = 4 * self.rho2 @ w @ self.sigma2 - 8 * rxr @ ws

        return float(max(f, 0.0)), *factor_gradients(g, u1, u2)


class COMM(BaseOrbitOptimizer):
    """COMM class for commutator minimization over local unitaries.

       Searches for local unitaries making two states commute by
       minimizing

       .. math::

           \\lVert [\\rho, (U_1 \\otimes U_2) \\sigma
           (U_1 \\otimes U_2)^\\dagger] \\rVert_F

       The squared norm is minimized by Riemannian descent and the norm is
       reported.

       Parameters
       ----------

       See :class:`~pylufid.orbits.base.BaseOrbitOptimizer`.

       Attributes
       ----------

       value_ : smallest commutator norm found

       local_unitary_ : LocalUnitary attaining ``value_``

       report_ : OptimizationReport, values as norms
    """

    def __init__(self, restarts=24, max_iter=500, step_init=1.0, grad_tol=1e-9,
                 value_tol=1e-10, random_state=1234, n_jobs=None, verbose=False):

        super().__init__(restarts=restarts, max_iter=max_iter,
                         step_init=step_init, grad_tol=grad_tol,
                         value_tol=value_tol, random_state=random_state,
                         n_jobs=n_jobs, verbose=verbose)
        self.local_unitary_ = None

    def eval(self, rho, sigma, dims=None):
        """Minimize the commutator norm over the orbit of ``sigma``.

        Parameters
        ----------
        rho, sigma : DensityMatrix, PureState or array-like

        dims : tuple of int, optional (default=None)

        Returns
        -------
        value : float
            Smallest Frobenius norm found, non-negative.
        """

        rho, sigma, d1, d2 = check_pair(rho, sigma, dims)

        self.report_ = self._search(CommutatorObjective(rho, sigma, d1, d2),
                                    'min', transform=lambda f: np.sqrt(max(f, 0.0)))
        self.value_ = self.report_.value
        self.local_unitary_ = self.report_.local_unitary

        return self.value_


def commutator_min(rho, sigma, dims=None, **kwargs):
    """Run :class:`COMM` and return its :class:`OptimizationReport`."""

    opt = COMM(**kwargs)
    opt.eval(rho, sigma, dims=dims)

    return opt.report_
