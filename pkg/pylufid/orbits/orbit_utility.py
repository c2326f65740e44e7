import logging
from collections import namedtuple

import numpy as np
import scipy.linalg as sla

from ..exceptions import BadConfig, SingularRetraction
from ..utils.linalg import dagger
from ..utils.states import (PureState, as_operator, bipartite_dims,
                            haar_unitary)

logger = logging.getLogger(__name__)

RestartResult = namedtuple('RestartResult',
                           ['value', 'u1', 'u2', 'iterations', 'converged',
                            'stalled'])

ARMIJO = 1e-4
SHRINK = 0.5
MAX_HALVINGS = 30
MAX_STEP = 1e6
COND_MAX = 1e12
KICK_SIZE = 1e-7
MAX_KICKS = 20


class OrbitObjective:
    """A smooth function of ``W = U1 (x) U2`` and its factor gradients.

    Subclasses implement :meth:`value` and :meth:`value_and_grad`. The
    gradients ``K1, K2`` are Euclidean: ``df = Re Tr(K1^dagger dU1) +
    Re Tr(K2^dagger dU2)``.
    """

    def __init__(self, d1, d2):

        self.d1 = d1
        self.d2 = d2

    def value(self, u1, u2):
        raise NotImplementedError

    def value_and_grad(self, u1, u2):
        raise NotImplementedError

    def degenerate(self, u1, u2):
        return False


def check_pair(rho, sigma, dims=None):
    """Dense operators and common bipartite dimensions of an argument pair."""

    d1, d2 = bipartite_dims(rho, sigma, dims=dims)

    return as_operator(rho), as_operator(sigma), d1, d2


def check_params(restarts, max_iter, step_init, grad_tol, value_tol):

    if int(restarts) != restarts or restarts < 1:
        raise BadConfig(f'restarts must be a positive integer, got {restarts}')
    if int(max_iter) != max_iter or max_iter < 1:
        raise BadConfig(f'max_iter must be a positive integer, got {max_iter}')

    for name, val in (('step_init', step_init), ('grad_tol', grad_tol),
                      ('value_tol', value_tol)):
        if not val > 0:
            raise BadConfig(f'{name} must be positive, got {val}')


def restart_rng(random_state, idx, stream=0):
    """Independent generator for restart ``idx``; ``stream`` separates uses."""

    if random_state is None:
        return np.random.default_rng()

    return np.random.default_rng([int(random_state), idx, stream])


def factor_gradients(g, u1, u2):
    """Split a gradient ``G`` on ``W`` into gradients on ``U1`` and ``U2``.

    ``K1 = Tr_2[G (1 (x) U2)^dagger]`` and ``K2 = Tr_1[G (U1 (x) 1)^dagger]``.
    """

    d1, d2 = u1.shape[0], u2.shape[0]
    g4 = g.reshape(d1, d2, d1, d2)

    k1 = np.einsum('ijkl,jl->ik', g4, np.conj(u2))
    k2 = np.einsum('ijkl,ik->jl', g4, np.conj(u1))

    return k1, k2


def skew_project(k, u):
    """Riemannian gradient ``S = (K U^dagger - U K^dagger) / 2`` at ``U``."""

    return (k @ dagger(u) - u @ dagger(k)) / 2


def cayley(omega, u, eta):
    """Cayley retraction ``(1 - eta/2 Omega)^-1 (1 + eta/2 Omega) U``."""

    eye = np.eye(u.shape[0])
    lhs = eye - (eta / 2) * omega

    if np.linalg.cond(lhs) > COND_MAX:
        raise SingularRetraction(
            f'Cayley denominator ill-conditioned at step {eta:.3e}')

    return sla.solve(lhs, (eye + (eta / 2) * omega) @ u)


def random_tangent(rng, d):

    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    h = (g - dagger(g)) / 2

    return h / np.linalg.norm(h)


def armijo_step(objective, u1, u2, f, omega1, omega2, slope, sign, eta):
    """Backtracking line search along ``(Omega1 U1, Omega2 U2)``.

    Accepts the first step with ``sign * (f_new - f) >= 1e-4 * eta * slope``,
    halving ``eta`` at most 30 times.

    Returns
    -------
    step : tuple or None
        ``(u1, u2, f_new, eta)``, or None when no step is accepted.
    """

    singular = 0

    for _ in range(MAX_HALVINGS + 1):

        try:
            v1 = cayley(omega1, u1, eta)
            v2 = cayley(omega2, u2, eta)
        except SingularRetraction:
            singular += 1
            eta *= SHRINK
            continue

        f_new = objective.value(v1, v2)
        if sign * (f_new - f) >= ARMIJO * eta * slope:
            return v1, v2, f_new, eta

        eta *= SHRINK

    if singular > MAX_HALVINGS:
        raise SingularRetraction(
            f'Cayley retraction stayed singular after {MAX_HALVINGS} halvings')

    return None


def riemannian_search(objective, u1, u2, sign, max_iter=500, step_init=1.0,
                      grad_tol=1e-9, value_tol=1e-10, rng=None):
    """Riemannian gradient ascent (``sign=1``) or descent (``sign=-1``).

    Steps follow the skew-projected gradient through the Cayley
    retraction. The search stops when the Riemannian gradient norm drops
    below ``grad_tol``, when the relative change of the objective drops
    below ``value_tol``, or when the line search cannot improve. A stalled
    line search is reported as ``stalled``, not ``converged``.
    Degenerate points get a random tangent kick of size 1e-7.

    Returns
    -------
    result : RestartResult
        Best point visited and its objective value.
    """

    rng = np.random.default_rng() if rng is None else rng

    f, k1, k2 = objective.value_and_grad(u1, u2)
    best = (f, u1, u2)
    eta = step_init / 2
    kicks = 0
    converged = False
    stalled = False
    it = 0

    for it in range(1, max_iter + 1):

        if kicks < MAX_KICKS and objective.degenerate(u1, u2):
            u1 = cayley(random_tangent(rng, u1.shape[0]), u1, KICK_SIZE)
            u2 = cayley(random_tangent(rng, u2.shape[0]), u2, KICK_SIZE)
            f, k1, k2 = objective.value_and_grad(u1, u2)
            kicks += 1
            logger.debug(f'degenerate point, kick {kicks} at iteration {it}')

        s1, s2 = skew_project(k1, u1), skew_project(k2, u2)
        slope = np.linalg.norm(s1)**2 + np.linalg.norm(s2)**2

        if np.sqrt(slope) < grad_tol:
            converged = True
            break

        step = armijo_step(objective, u1, u2, f, sign * s1, sign * s2, slope,
                           sign, min(2 * eta, MAX_STEP))
        if step is None:
            logger.debug(f'line search stalled at iteration {it}, value {f:.12g}')
            stalled = True
            break

        u1, u2, f_new, eta = step
        delta = abs(f_new - f)
        f, k1, k2 = objective.value_and_grad(u1, u2)

        if sign * (f - best[0]) > 0:
            best = (f, u1, u2)

        if delta <= value_tol * abs(f):
            converged = True
            break

    if sign * (f - best[0]) >= 0:
        best = (f, u1, u2)

    return RestartResult(float(best[0]), best[1], best[2], it, converged, stalled)


def schmidt_aligning_unitary(psi, phi):
    """Local unitary carrying the Schmidt vectors of ``phi`` onto those of ``psi``.

    With coefficient matrices ``B_psi = U_a S_a V_a^dagger`` and
    ``B_phi = U_b S_b V_b^dagger`` (full SVDs), ``U1 = U_a U_b^dagger`` and
    ``U2 = (V_b V_a^dagger)^T``. Then ``(U1 (x) U2)|phi>`` shares the Schmidt
    vectors of ``|psi>`` and attains the pure-state maximum of the overlap.
    """

    ua, _, vha = np.linalg.svd(psi.coefficients())
    ub, _, vhb = np.linalg.svd(phi.coefficients())

    return ua @ dagger(ub), (dagger(vhb) @ vha).T


def pure_ket(op, d1, d2, tol=1e-10):
    """:class:`PureState` of a rank-one PSD operator, None for higher rank."""

    vals, vecs = np.linalg.eigh((op + dagger(op)) / 2)
    if vals[-1] <= 0 or (vals.size > 1 and vals[-2] > tol * vals[-1]):
        return None

    return PureState(vecs[:, -1] / np.linalg.norm(vecs[:, -1]), d1, d2)


def initial_points(n, d1, d2, random_state, aligned=None):
    """Starting local unitaries for restart ``idx = 0..n-1``.

    Restart 0 is the identity, restart 1 the ``aligned`` pair when given,
    every other restart is Haar random from its own stream.
    """

    for idx in range(n):

        if idx == 0:
            yield idx, np.eye(d1, dtype=complex), np.eye(d2, dtype=complex)
        elif idx == 1 and aligned is not None:
            yield idx, aligned[0], aligned[1]
        else:
            rng = restart_rng(random_state, idx)
            yield idx, haar_unitary(d1, rng), haar_unitary(d2, rng)

