import logging

import numpy as np
from joblib import Parallel, delayed
from tqdm import tqdm

from ..utils.linalg import herm_eig
from ..utils.states import PureState, as_operator, bipartite_dims
from .base import BaseOrbitOptimizer
from .orbit_utility import check_params, restart_rng

logger = logging.getLogger(__name__)


def _top(op):

    vals, vecs = np.linalg.eigh((op + op.conj().T) / 2)

    return vals[-1], vecs[:, -1]


def _alternate(x4, v, max_iter, tol):
    """Alternating maximization of ``<uv|X|uv>`` starting from ``|v>``."""

    val = -np.inf
    u = None

    for it in range(1, max_iter + 1):

        _, u = _top(np.einsum('ajbk,j,k->ab', x4, np.conj(v), v))
        new, v = _top(np.einsum('ajbk,a,b->jk', x4, np.conj(u), u))

        if new - val <= tol * max(abs(new), 1.0):
            val = new
            break
        val = new

    return float(val), u, v, it


class S1(BaseOrbitOptimizer):
    """S1 class for the S(1)-norm of a bipartite Hermitian operator.

       Computes the largest expectation of ``X`` over pure product states

       .. math::

           \\lVert X \\rVert_{S(1)} = \\max_{|u\\rangle, |v\\rangle}
           |\\langle u v | X | u v \\rangle|

       by alternating top-eigenvector iteration: with ``|v>`` fixed the
       best ``|u>`` is the top eigenvector of
       ``(1 (x) <v|) X (1 (x) |v>)``, and vice versa. Each half-step can
       only increase the expectation. For ``X >= 0`` this equals
       ``G_max(X, |uv><uv|)**2`` up to the trace of ``X``.

       Parameters
       ----------

       restarts : int, optional (default=24)
            Number of random starting vectors.

       max_iter : int, optional (default=500)
            Alternations per restart.

       value_tol : float, optional (default=1e-10)
            Stop a restart when its value improves by less than this,
            relative to ``max(1, |value|)``.

       random_state : int, optional (default=1234)

       n_jobs : int, optional (default=None)

       verbose : bool, optional (default=False)

       Attributes
       ----------

       value_ : the S(1)-norm found

       product_state_ : PureState ``|uv>`` attaining it

       per_restart_values_ : list of float
    """

    def __init__(self, restarts=24, max_iter=500, value_tol=1e-10,
                 random_state=1234, n_jobs=None, verbose=False):

        super().__init__(restarts=restarts, max_iter=max_iter,
                         value_tol=value_tol, random_state=random_state,
                         n_jobs=n_jobs, verbose=verbose)
        self.product_state_ = None
        self.per_restart_values_ = None

    def eval(self, x, dims=None):
        """Compute the S(1)-norm of ``x``.

        Parameters
        ----------
        x : DensityMatrix, PureState or array-like
            Hermitian operator on ``C^d1 (x) C^d2``.

        dims : tuple of int, optional (default=None)

        Returns
        -------
        value : float
        """

        check_params(self.restarts, self.max_iter, self.step_init,
                     self.grad_tol, self.value_tol)

        d1, d2 = bipartite_dims(x, dims=dims)
        op = as_operator(x)
        vals = herm_eig(op).eigenvalues

        signs = [1.0]
        if vals[-1] < -1e-10 * max(1.0, abs(vals[0])):
            signs.append(-1.0)

        jobs = [(s, restart_rng(self.random_state, idx))
                for s in signs for idx in range(self.restarts)]
        if self.verbose:
            jobs = tqdm(jobs, ascii=True, desc='Restarts')

        results = Parallel(n_jobs=self.n_jobs)(
            delayed(_alternate)((s * op).reshape(d1, d2, d1, d2),
                                _random_ket(rng, d2), self.max_iter,
                                self.value_tol)
            for s, rng in jobs)

        values = [r[0] for r in results]
        best = int(np.argmax(values))
        _, u, v, _ = results[best]

        for idx, r in enumerate(results):
            logger.debug(f'start {idx}: value {r[0]:.12g} after {r[3]} alternations')

        self.per_restart_values_ = values
        self.product_state_ = PureState(np.kron(u, v), d1, d2)
        self.value_ = float(values[best])

        return self.value_


def _random_ket(rng, d):

    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)

    return v / np.linalg.norm(v)


def s1_norm(x, dims=None, **kwargs):
    """S(1)-norm of a Hermitian operator; see :class:`S1`."""

    return S1(**kwargs).eval(x, dims=dims)
