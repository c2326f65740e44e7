"""Fidelity, related divergences and quantum channels on PSD operators."""
from collections import namedtuple

import numpy as np

from ..exceptions import BadParameter, DimensionMismatch, InvalidChannel
from .linalg import (SUPPORT_TOL, check_matrix, dagger, matrix_log,
                     matrix_sqrt, psd_eig, trace_norm)
from .states import as_operator, haar_unitary

MonotonicityChain = namedtuple('MonotonicityChain', ['f0', 'f_mid', 'f_out'])


def _pair(a, b):

    a, b = as_operator(a), as_operator(b)
    if a.shape != b.shape:
        raise DimensionMismatch(
            f'operators of shapes {a.shape} and {b.shape} are not conformable')

    return a, b


def fidelity(a, b, method='trace_norm'):
    """Uhlmann fidelity of two PSD operators.

    Parameters
    ----------
    a, b : array-like of shape (n, n)
        Positive semidefinite; trace one is not required.

    method : {'trace_norm', 'uhlmann'}, optional (default='trace_norm')

        - 'trace_norm': :math:`\\lVert\\sqrt{a}\\sqrt{b}\\rVert_1`
        - 'uhlmann': :math:`\\mathrm{Tr}\\sqrt{\\sqrt{a}\\, b \\sqrt{a}}`

    Returns
    -------
    f : float
        Non-negative, symmetric, and ``<= 1`` for density matrices.
        Scales as ``F(c a, b) = sqrt(c) F(a, b)``.
    """

    a, b = _pair(a, b)
    sqrt_a = matrix_sqrt(a)

    if method == 'trace_norm':
        return trace_norm(sqrt_a @ matrix_sqrt(b))

    if method == 'uhlmann':
        vals, _ = psd_eig(sqrt_a @ b @ sqrt_a, check=False)
        return float(np.sum(np.sqrt(vals)))

    raise BadParameter(f"unknown fidelity method '{method}'")


def affine_fidelity(a, b):
    """Affine fidelity :math:`\\mathrm{Tr}(\\sqrt{a}\\sqrt{b})`, never above F."""

    a, b = _pair(a, b)

    return float(np.real(np.trace(matrix_sqrt(a) @ matrix_sqrt(b))))


def trace_distance(a, b):

    a, b = _pair(a, b)

    return 0.5 * trace_norm(a - b)


def hs_overlap(a, b):
    """Hilbert-Schmidt overlap ``Re Tr(a b)``."""

    a, b = _pair(a, b)

    return float(np.real(np.sum(a * b.T)))


def commutator_norm(a, b):
    """Frobenius norm of ``[a, b]``."""

    a, b = _pair(a, b)

    return float(np.linalg.norm(a @ b - b @ a))


def von_neumann_entropy(rho, support_tol=SUPPORT_TOL):
    """``-Tr(rho log rho)`` with the natural logarithm and ``0 log 0 = 0``."""

    vals, _ = psd_eig(as_operator(rho))
    vals = vals[vals > support_tol]

    return float(-np.sum(vals * np.log(vals)))


def relative_entropy(rho, sigma, support_tol=SUPPORT_TOL, leak_tol=1e-9):
    """Quantum relative entropy ``Tr rho (log rho - log sigma)``.

    Parameters
    ----------
    rho, sigma : array-like
        Density matrices of equal order.

    support_tol : float, optional (default=1e-10)
        Eigenvalues of ``sigma`` at or below this span its kernel.

    leak_tol : float, optional (default=1e-9)
        When the compression of ``rho`` to the kernel of ``sigma`` has
        norm above this, the supports are not nested and the result is
        ``inf``.

    Returns
    -------
    s : float
        Natural-log relative entropy, possibly ``np.inf``.
    """

    rho, sigma = _pair(rho, sigma)

    vals, vecs = psd_eig(sigma)
    kernel = vecs[:, vals <= support_tol]
    if kernel.shape[1]:
        leak = np.linalg.norm(dagger(kernel) @ rho @ kernel, 2)
        if leak > leak_tol:
            return np.inf

    cross = np.real(np.trace(rho @ matrix_log(sigma, support_tol)))

    return float(max(-von_neumann_entropy(rho, support_tol) - cross, 0.0))


class KrausChannel:
    """Quantum channel ``rho -> sum_j M_j rho M_j^dagger``.

    Parameters
    ----------
    kraus_ops : list of array-like, each of shape (d_out, d_in)
        Must satisfy ``sum_j M_j^dagger M_j = 1`` within ``tol``.

    tol : float, optional (default=1e-10)

    Attributes
    ----------
    kraus_ops : list of np.ndarray

    d_in, d_out : int
    """

    def __init__(self, kraus_ops, tol=1e-10):

        ops = [check_matrix(m, name='Kraus operator') for m in kraus_ops]
        if not ops:
            raise InvalidChannel('a channel needs at least one Kraus operator')

        shape = ops[0].shape
        if any(m.shape != shape for m in ops):
            raise InvalidChannel('Kraus operators must share one shape')

        self.kraus_ops = ops
        self.d_out, self.d_in = shape

        err = np.linalg.norm(sum(dagger(m) @ m for m in ops) - np.eye(self.d_in))
        if err > tol:
            raise InvalidChannel(
                f'Kraus operators violate completeness by {err:.2e}')

    def __len__(self):
        return len(self.kraus_ops)

    def __call__(self, rho):
        return apply_channel(self, rho)

    def branches(self, rho):
        """Unnormalized outputs ``M_j rho M_j^dagger`` of each Kraus operator."""

        rho = self._check_input(rho)

        return [m @ rho @ dagger(m) for m in self.kraus_ops]

    def _check_input(self, rho):

        rho = as_operator(rho)
        if rho.shape[0] != self.d_in:
            raise DimensionMismatch(
                f'channel acts on order {self.d_in}, got {rho.shape[0]}')

        return rho


def apply_channel(ch, rho):

    return sum(ch.branches(rho))


def monotonicity_chain(rho, sigma, ch):
    """Fidelity before a channel, summed over its branches, and after it.

    Returns
    -------
    chain : MonotonicityChain
        ``(F(rho, sigma), sum_j F(M_j rho M_j^dagger, M_j sigma M_j^dagger),
        F(Phi(rho), Phi(sigma)))``, which is non-decreasing.
    """

    rho, sigma = _pair(rho, sigma)
    branches = zip(ch.branches(rho), ch.branches(sigma))

    f0 = fidelity(rho, sigma)
    f_mid = float(sum(fidelity(r, s) for r, s in branches))
    f_out = fidelity(apply_channel(ch, rho), apply_channel(ch, sigma))

    return MonotonicityChain(f0, f_mid, f_out)


def identity_channel(d):

    return KrausChannel([np.eye(d)])


def dephasing_channel(d, p=1.0):
    """Dephasing in the computational basis with strength ``p``."""

    if not 0.0 <= p <= 1.0:
        raise BadParameter(f'dephasing strength must lie in [0, 1], got {p}')

    ops = [np.sqrt(p) * np.diag(np.eye(d)[k]) for k in range(d)]
    if p < 1.0:
        ops.append(np.sqrt(1.0 - p) * np.eye(d))

    return KrausChannel(ops)


def _weyl_operators(d):

    shift = np.roll(np.eye(d), 1, axis=0)
    clock = np.diag(np.exp(2j * np.pi * np.arange(d) / d))

    return [np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b)
            for a in range(d) for b in range(d)]


def depolarizing_channel(d, p):
    """``rho -> (1 - p) rho + p Tr(rho) 1/d`` through the Weyl operators."""

    if not 0.0 <= p <= 1.0:
        raise BadParameter(f'depolarizing strength must lie in [0, 1], got {p}')

    weyl = _weyl_operators(d)
    ops = [np.sqrt(1.0 - p + p / d**2) * weyl[0]]
    ops += [np.sqrt(p) / d * w for w in weyl[1:]]

    return KrausChannel(ops)


def amplitude_damping_channel(gamma):

    if not 0.0 <= gamma <= 1.0:
        raise BadParameter(f'damping rate must lie in [0, 1], got {gamma}')

    return KrausChannel([np.array([[1, 0], [0, np.sqrt(1 - gamma)]]),
                         np.array([[0, np.sqrt(gamma)], [0, 0]])])


def random_channel(d_in, d_out=None, n_kraus=2, seed=None):
    """Channel from a Haar-random isometry ``C^d_in -> C^n_kraus (x) C^d_out``."""

    d_out = d_in if d_out is None else d_out
    if n_kraus * d_out < d_in:
        raise BadParameter(
            f'{n_kraus} Kraus operators of output {d_out} cannot form a '
            f'channel on {d_in} dimensions')

    iso = haar_unitary(n_kraus * d_out, seed)[:, :d_in]

    return KrausChannel([iso[j * d_out:(j + 1) * d_out] for j in range(n_kraus)])
