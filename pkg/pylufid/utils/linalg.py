"""Dense complex linear algebra used across pylufid.

All routines take array-likes (anything :func:`numpy.asarray` accepts,
including :class:`~pylufid.utils.states.DensityMatrix`) and return new
``complex128`` arrays; inputs are never modified.
"""
from collections import namedtuple

import numpy as np
import scipy.linalg as sla
from sklearn.utils import assert_all_finite

from ..exceptions import (BadParameter, ConvergenceFailure,
                          DimensionMismatch, NonFinite, NotHermitian, NotPSD)

HermitianEig = namedtuple('HermitianEig', ['eigenvalues', 'eigenvectors'])
SvdResult = namedtuple('SvdResult', ['left', 'singular_values', 'right'])

HERMITIAN_TOL = 1e-12
PSD_CLAMP_TOL = 1e-8
SUPPORT_TOL = 1e-10
SQRT_CUTOFF = 1e-13


def check_matrix(m, square=False, name='matrix'):
    """Convert ``m`` to a finite 2-D complex array.

    Parameters
    ----------
    m : array-like of shape (rows, cols)

    square : bool, optional (default=False)
        Require ``rows == cols``.

    name : str, optional (default='matrix')
        Name used in error messages.

    Returns
    -------
    m : np.ndarray of dtype complex128
    """

    m = np.array(m, dtype=complex)

    if m.ndim != 2:
        raise DimensionMismatch(
            f'{name} must be 2-D, got array with shape {m.shape}')

    if square and m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f'{name} must be square, got {m.shape}')

    _check_finite(m, name)

    return m


def _check_finite(m, name='matrix'):

    try:
        assert_all_finite(m, input_name=name)
    except ValueError as error:
        raise NonFinite(str(error)) from None


def dagger(m):

    return np.conj(np.transpose(m))


def _split_order(m, d1, d2, name='matrix'):

    n = d1 * d2
    if m.shape != (n, n):
        raise DimensionMismatch(
            f'{name} has shape {m.shape}, expected ({n}, {n}) for '
            f'd1={d1}, d2={d2}')


def herm_eig(m, tol=HERMITIAN_TOL, method='lapack'):
    """Eigendecomposition of a Hermitian matrix.

    Parameters
    ----------
    m : array-like of shape (n, n)
        Hermitian matrix.

    tol : float, optional (default=1e-12)
        Largest admissible entry of ``m - m^dagger``, relative to
        ``max(1, max|m|)``.

    method : {'lapack', 'jacobi'}, optional (default='lapack')
        Eigensolver to use

        - 'lapack': ``scipy.linalg.eigh`` (divide and conquer)
        - 'jacobi': cyclic complex Jacobi rotations

    Returns
    -------
    eig : HermitianEig
        Eigenvalues sorted in descending order and the matching
        orthonormal eigenvectors as columns.
    """

    m = check_matrix(m, square=True)

    if m.size:
        scale = max(1.0, np.max(np.abs(m)))
        deviation = np.max(np.abs(m - dagger(m)))
        if deviation > tol * scale:
            raise NotHermitian(
                f'matrix deviates from its adjoint by {deviation:.3e}')

    return _eigh((m + dagger(m)) / 2, method=method)


def _eigh(h, method='lapack'):

    if method == 'jacobi':
        vals, vecs = _jacobi_eigh(h)
    elif method == 'lapack':
        vals, vecs = sla.eigh(h)
    else:
        raise BadParameter(f"unknown eigensolver '{method}'")

    order = np.argsort(vals, kind='stable')[::-1]

    return HermitianEig(np.asarray(vals[order], dtype=float),
                        vecs[:, order])


def _jacobi_eigh(h, tol=1e-13):

    a = np.array(h, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)

    max_rot = 100 * n**2
    n_rot = 0
    scale = max(1.0, np.linalg.norm(a))

    while True:

        off = np.linalg.norm(np.triu(a, 1))
        if off <= tol * scale:
            break

        for p in range(n - 1):
            for q in range(p + 1, n):

                b = a[p, q]
                mod = abs(b)
                if mod <= 1e-300:
                    continue

                # Phase rotation makes a[p, q] real, then a real rotation zeroes it
                phase = np.conj(b / mod)
                phi = (a[q, q].real - a[p, p].real) / (2.0 * mod)
                t = (1.0 if phi >= 0 else -1.0) / \
                    (abs(phi) + np.sqrt(phi * phi + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c

                rot = np.array([[c, s], [-s * phase, c * phase]])
                idx = [p, q]

                a[:, idx] = a[:, idx] @ rot
                a[idx, :] = dagger(rot) @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ rot

                n_rot += 1
                if n_rot > max_rot:
                    raise ConvergenceFailure(
                        f'Jacobi eigensolver exceeded {max_rot} rotations')

    return np.real(np.diag(a)), v


def psd_eig(m, tol=PSD_CLAMP_TOL, check=True):
    """Eigendecomposition of a PSD matrix with roundoff negatives clamped.

    Eigenvalues in ``[-tol, 0)`` are set to zero; anything more negative
    raises :class:`NotPSD`. The floor is absolute, whatever the scale of ``m``.
    """

    eig = herm_eig(m) if check else _eigh((m + dagger(m)) / 2)
    vals = eig.eigenvalues

    if vals.size:
        floor = -tol
        if vals[-1] < floor:
            raise NotPSD(f'minimum eigenvalue {vals[-1]:.3e} below {floor:.1e}')

    return HermitianEig(np.clip(vals, 0.0, None), eig.eigenvectors)


def _from_eig(vals, vecs):

    return (vecs * vals) @ dagger(vecs)


def matrix_sqrt(m):
    """Principal square root of a PSD matrix.

    Parameters
    ----------
    m : array-like of shape (n, n)
        Positive semidefinite matrix. Eigenvalues in ``[-1e-8, 0)`` are
        treated as roundoff and clamped to zero, as are eigenvalues below
        ``1e-13`` times the largest one.

    Returns
    -------
    root : np.ndarray of shape (n, n)
        PSD matrix with ``root @ root == m``.
    """

    vals, vecs = psd_eig(m)
    if vals.size:
        # eigensolver roundoff, not spectrum
        vals = np.where(vals > SQRT_CUTOFF * vals[0], vals, 0.0)

    return _from_eig(np.sqrt(vals), vecs)


def matrix_power_psd(m, power, support_tol=SUPPORT_TOL):
    """Real power of a PSD matrix taken on its support only."""

    vals, vecs = psd_eig(m)
    mask = vals > support_tol
    out = np.zeros_like(vals)
    out[mask] = vals[mask] ** power

    return _from_eig(out, vecs)


def matrix_log(m, support_tol=SUPPORT_TOL):
    """Natural logarithm of a PSD matrix restricted to its support.

    Eigenvalues at or below ``support_tol`` contribute zero, which is the
    ``0 log 0 = 0`` convention of the von Neumann entropy.
    """

    vals, vecs = psd_eig(m)
    mask = vals > support_tol
    out = np.zeros_like(vals)
    out[mask] = np.log(vals[mask])

    return _from_eig(out, vecs)


def support_projector(m, support_tol=SUPPORT_TOL):

    vals, vecs = psd_eig(m)
    cols = vecs[:, vals > support_tol]

    return cols @ dagger(cols)


def rank(m, support_tol=SUPPORT_TOL):

    vals, _ = psd_eig(m)

    return int(np.sum(vals > support_tol))


def svd(a):
    """Thin singular value decomposition ``a = U diag(s) V^dagger``."""

    a = check_matrix(a)
    u, s, vh = sla.svd(a, full_matrices=False)

    return SvdResult(u, s, dagger(vh))


def polar_isometry(a, rank_tol=None):
    """Isometric factor ``Q = U V^dagger`` of the polar decomposition of ``a``.

    Parameters
    ----------
    a : array-like of shape (rows, cols)

    rank_tol : float, optional (default=None)
        When set, singular directions with ``s_i <= rank_tol * s_max`` are
        dropped so that ``Q`` is the partial isometry of minimal norm.
        The default keeps every direction (unitary ``Q`` for square ``a``).

    Returns
    -------
    q : np.ndarray
        Satisfies ``Re Tr(Q^dagger a) = trace_norm(a)``.
    """

    u, s, v = svd(a)

    if rank_tol is not None and s.size:
        keep = s > rank_tol * s[0]
        u, v = u[:, keep], v[:, keep]

    return u @ dagger(v)


def trace_norm(a):
    """Sum of the singular values of ``a``."""

    a = check_matrix(a)
    if not a.size:
        return 0.0

    return float(np.sum(sla.svdvals(a)))


def kron(a, b):

    out = np.kron(check_matrix(a, name='a'), check_matrix(b, name='b'))
    _check_finite(out)

    return out


def partial_trace(m, d1, d2, subsystem=2):
    """Partial trace of an operator on ``C^d1 (x) C^d2``.

    Parameters
    ----------
    m : array-like of shape (d1*d2, d1*d2)

    d1, d2 : int
        Local dimensions.

    subsystem : {1, 2}, optional (default=2)
        Factor that is traced out.

    Returns
    -------
    reduced : np.ndarray
        ``d1 x d1`` when tracing out 2, ``d2 x d2`` when tracing out 1.
    """

    m = check_matrix(m, square=True)
    _split_order(m, d1, d2)
    t = m.reshape(d1, d2, d1, d2)

    if subsystem == 2:
        return np.einsum('ijkj->ik', t)
    if subsystem == 1:
        return np.einsum('ijil->jl', t)

    raise BadParameter(f'subsystem must be 1 or 2, got {subsystem}')


def partial_transpose(m, d1, d2, subsystem=2):
    """Transpose of one tensor factor of an operator on ``C^d1 (x) C^d2``."""

    m = check_matrix(m, square=True)
    _split_order(m, d1, d2)
    t = m.reshape(d1, d2, d1, d2)

    if subsystem == 2:
        t = t.transpose(0, 3, 2, 1)
    elif subsystem == 1:
        t = t.transpose(2, 1, 0, 3)
    else:
        raise BadParameter(f'subsystem must be 1 or 2, got {subsystem}')

    return t.reshape(d1 * d2, d1 * d2)


def vec(a):
    """Row-major vectorization: ``vec(|i><j|) = |i>|j>``.

    With this convention ``(U1 (x) U2) vec(B) = vec(U1 B U2^T)`` for a
    ``d1 x d2`` coefficient matrix ``B``.
    """

    return check_matrix(a).reshape(-1)


def unvec(v, d1, d2):

    v = np.asarray(v, dtype=complex).reshape(-1)
    if v.size != d1 * d2:
        raise DimensionMismatch(
            f'vector of length {v.size} cannot be reshaped to ({d1}, {d2})')
    _check_finite(v, 'vector')

    return v.reshape(d1, d2)


def real_embedding(h):
    """Real symmetric image ``[[Re h, -Im h], [Im h, Re h]]`` of ``h``."""

    h = check_matrix(h, square=True)

    return np.block([[h.real, -h.imag], [h.imag, h.real]])


def min_eigenvalue(h):

    h = check_matrix(h, square=True)

    return float(sla.eigvalsh((h + dagger(h)) / 2)[0])
