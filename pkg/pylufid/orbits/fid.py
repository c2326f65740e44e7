import numpy as np
import scipy.linalg as sla

from ..exceptions import BadParameter
from ..utils.fidelity import commutator_norm
from ..utils.linalg import matrix_sqrt, rank
from ..utils.states import LocalUnitary, bipartite_dims
from .base import BaseOrbitOptimizer
from .orbit_utility import (OrbitObjective, armijo_step, check_pair,
                            factor_gradients, pure_ket,
                            schmidt_aligning_unitary, skew_project)

RANK_TOL = 1e-12
DEGENERATE_TOL = 1e-9


class FidelityObjective(OrbitObjective):
    """``F(rho, W sigma W^dagger) = || sqrt(rho) W sqrt(sigma) ||_1``.

    With ``A = sqrt(rho) W sqrt(sigma)`` and ``Q`` its polar isometry, the
    Euclidean gradient on ``W`` is ``sqrt(rho) Q sqrt(sigma)``.
    """

    def __init__(self, rho, sigma, d1, d2):

        super().__init__(d1, d2)
        self.sqrt_rho = matrix_sqrt(rho)
        self.sqrt_sigma = matrix_sqrt(sigma)
        self.rank = min(rank(rho), rank(sigma))

    def _a(self, u1, u2):
        return self.sqrt_rho @ np.kron(u1, u2) @ self.sqrt_sigma

    def value(self, u1, u2):
        return float(np.sum(sla.svdvals(self._a(u1, u2))))

    def value_and_grad(self, u1, u2):

        u, s, vh = sla.svd(self._a(u1, u2))
        keep = s > RANK_TOL * s[0] if s[0] > 0 else np.zeros(s.size, bool)
        q = u[:, keep] @ vh[keep]

        g = self.sqrt_rho @ q @ self.sqrt_sigma
        k1, k2 = factor_gradients(g, u1, u2)

        return float(np.sum(s)), k1, k2

    def degenerate(self, u1, u2):

        if self.rank < 2:
            return False

        s = sla.svdvals(self._a(u1, u2))

        return s[0] > 0 and s[self.rank - 1] < DEGENERATE_TOL * s[0]


class _FidelityOrbit(BaseOrbitOptimizer):

    mode = None

    def __init__(self, restarts=24, max_iter=500, step_init=1.0, grad_tol=1e-9,
                 value_tol=1e-10, random_state=1234, n_jobs=None, verbose=False):

        super().__init__(restarts=restarts, max_iter=max_iter,
                         step_init=step_init, grad_tol=grad_tol,
                         value_tol=value_tol, random_state=random_state,
                         n_jobs=n_jobs, verbose=verbose)
        self.local_unitary_ = None

    def eval(self, rho, sigma, dims=None):
        """Optimize the fidelity over the local unitary orbit of ``sigma``.

        Parameters
        ----------
        rho, sigma : DensityMatrix, PureState or array-like
            PSD operators on ``C^d1 (x) C^d2``; trace one is not required.

        dims : tuple of int, optional (default=None)
            ``(d1, d2)``; required when both arguments are plain arrays.

        Returns
        -------
        value : float
            The extremal fidelity found.
        """

        rho, sigma, d1, d2 = check_pair(rho, sigma, dims)
        objective = FidelityObjective(rho, sigma, d1, d2)

        aligned = None
        psi, phi = pure_ket(rho, d1, d2), pure_ket(sigma, d1, d2)
        if psi is not None and phi is not None:
            aligned = schmidt_aligning_unitary(psi, phi)

        self.report_ = self._search(objective, self.mode, aligned=aligned)

        w = self.report_.local_unitary
        self.report_.diagnostics['commutator_norm'] = commutator_norm(
            rho, w.apply(sigma))

        self.value_ = self.report_.value
        self.local_unitary_ = w

        return self.value_


class GMAX(_FidelityOrbit):
    """GMAX class for the maximal fidelity over local unitaries.

       Numerically evaluates

       .. math::

           G_{max}(\\rho, \\sigma) = \\max_{U_1, U_2}
           F(\\rho, (U_1 \\otimes U_2) \\sigma (U_1 \\otimes U_2)^\\dagger)

       by Riemannian gradient ascent on the product unitary group with
       several restarts. The fidelity is written as the trace norm
       :math:`\\lVert\\sqrt{\\rho}\\, W \\sqrt{\\sigma}\\rVert_1`, whose
       gradient is read off the polar decomposition. Every reported value
       is attained by the returned local unitary, so it is a certified
       lower bound on the true maximum.

       Parameters
       ----------

       See :class:`~pylufid.orbits.base.BaseOrbitOptimizer`.

       Attributes
       ----------

       value_ : largest fidelity found

       local_unitary_ : LocalUnitary attaining ``value_``

       report_ : OptimizationReport with per-restart values and the
            commutator norm ``||[rho, W sigma W^dagger]||`` at the optimum

       Notes
       -----

       Restart 0 starts at the identity, so ``value_ >= F(rho, sigma)``.
       When both arguments are pure, restart 1 starts at the unitary that
       aligns their Schmidt bases, which is optimal.

       Examples
       --------

       >>> from pylufid.orbits.fid import GMAX
       >>> from pylufid.utils.states import werner, basis_product
       >>> opt = GMAX(restarts=8)
       >>> opt.eval(werner(2, 1.0), basis_product(2, 2))  # doctest: +SKIP
       0.7071067811865476
    """

    mode = 'max'

    def __init__(self, restarts=24, max_iter=500, step_init=1.0, grad_tol=1e-9,
                 value_tol=1e-10, random_state=1234, n_jobs=None, verbose=False):

        super().__init__(restarts=restarts, max_iter=max_iter,
                         step_init=step_init, grad_tol=grad_tol,
                         value_tol=value_tol, random_state=random_state,
                         n_jobs=n_jobs, verbose=verbose)


class GMIN(_FidelityOrbit):
    """GMIN class for the minimal fidelity over local unitaries.

       Numerically evaluates

       .. math::

           G_{min}(\\rho, \\sigma) = \\min_{U_1, U_2}
           F(\\rho, (U_1 \\otimes U_2) \\sigma (U_1 \\otimes U_2)^\\dagger)

       by Riemannian gradient descent; the reported value is attained, so
       it is an upper bound on the true minimum. Unnormalized PSD
       arguments are accepted and never rescaled.

       Parameters
       ----------

       See :class:`~pylufid.orbits.base.BaseOrbitOptimizer`.

       Attributes
       ----------

       value_ : smallest fidelity found

       local_unitary_ : LocalUnitary attaining ``value_``

       report_ : OptimizationReport
    """

    mode = 'min'

    def __init__(self, restarts=24, max_iter=500, step_init=1.0, grad_tol=1e-9,
                 value_tol=1e-10, random_state=1234, n_jobs=None, verbose=False):

        super().__init__(restarts=restarts, max_iter=max_iter,
                         step_init=step_init, grad_tol=grad_tol,
                         value_tol=value_tol, random_state=random_state,
                         n_jobs=n_jobs, verbose=verbose)


def gmax(rho, sigma, dims=None, **kwargs):
    """Run :class:`GMAX` and return its :class:`OptimizationReport`."""

    opt = GMAX(**kwargs)
    opt.eval(rho, sigma, dims=dims)

    return opt.report_


def gmin(rho, sigma, dims=None, **kwargs):
    """Run :class:`GMIN` and return its :class:`OptimizationReport`."""

    opt = GMIN(**kwargs)
    opt.eval(rho, sigma, dims=dims)

    return opt.report_


def _sign(mode):

    if mode not in ('max', 'min'):
        raise BadParameter(f"mode must be 'max' or 'min', got '{mode}'")

    return 1 if mode == 'max' else -1


def riemannian_step(rho, sigma, w, mode='max', step=1.0, dims=None):
    """One line-searched gradient step of the fidelity on the orbit.

    Parameters
    ----------
    rho, sigma : DensityMatrix, PureState or array-like

    w : LocalUnitary
        Current point.

    mode : {'max', 'min'}, optional (default='max')

    step : float, optional (default=1.0)
        First trial step of the backtracking search.

    Returns
    -------
    gradient : tuple of np.ndarray
        Skew-Hermitian Riemannian gradients ``(S1, S2)`` at ``w``.

    w_new : LocalUnitary
        Point after the step; ``w`` itself when no step improves.
    """

    sign = _sign(mode)
    rho, sigma, d1, d2 = check_pair(rho, sigma, bipartite_dims(
        rho, sigma, w, dims=dims))
    objective = FidelityObjective(rho, sigma, d1, d2)

    f, k1, k2 = objective.value_and_grad(w.u1, w.u2)
    s1, s2 = skew_project(k1, w.u1), skew_project(k2, w.u2)
    slope = np.linalg.norm(s1)**2 + np.linalg.norm(s2)**2

    if slope == 0:
        return (s1, s2), w

    result = armijo_step(objective, w.u1, w.u2, f, sign * s1, sign * s2,
                         slope, sign, step)
    if result is None:
        return (s1, s2), w

    return (s1, s2), LocalUnitary(result[0], result[1], check=False)


def directional_derivative(rho, sigma, w, omega1, omega2, dims=None):
    """Derivative of ``F`` along ``t -> (exp(t Omega1) U1) (x) (exp(t Omega2) U2)``.

    Evaluated analytically at ``t = 0`` from the factor gradients:
    ``Re Tr(K1^dagger Omega1 U1) + Re Tr(K2^dagger Omega2 U2)``.
    """

    rho, sigma, d1, d2 = check_pair(rho, sigma, bipartite_dims(
        rho, sigma, w, dims=dims))
    objective = FidelityObjective(rho, sigma, d1, d2)

    _, k1, k2 = objective.value_and_grad(w.u1, w.u2)

    return float(np.real(np.vdot(k1, omega1 @ w.u1) +
                         np.vdot(k2, omega2 @ w.u2)))
