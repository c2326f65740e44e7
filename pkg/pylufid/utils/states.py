"""Bipartite states, local unitaries and the standard state families."""
import json
from collections import namedtuple
from functools import reduce

import numpy as np

from ..exceptions import BadParameter, DimensionMismatch, IoError
from ..schema import validate_document
from .linalg import (check_matrix, dagger, herm_eig, partial_trace, psd_eig,
                     unvec, vec)

Schmidt = namedtuple('Schmidt', ['coefficients', 'left', 'right'])

STATE_TOL = 1e-12
STATE_PSD_TOL = 1e-10
UNITARY_TOL = 1e-10


def _check_dims(d1, d2):

    for d in (d1, d2):
        if int(d) != d or d < 1:
            raise BadParameter(f'local dimensions must be positive integers, '
                               f'got ({d1}, {d2})')

    return int(d1), int(d2)


def _complex_to_dict(m):

    m = np.asarray(m)

    return {'re': m.real.tolist(), 'im': m.imag.tolist()}


def _complex_from_dict(data):

    return np.asarray(data['re'], dtype=float) + \
        1j * np.asarray(data['im'], dtype=float)


class DensityMatrix:
    """Trace-one positive semidefinite operator on ``C^d1 (x) C^d2``.

    Parameters
    ----------
    mat : array-like of shape (d1*d2, d1*d2)
        Hermitian (within 1e-12), PSD (eigenvalues >= -1e-10) and of unit
        trace (within 1e-12).

    d1, d2 : int
        Local dimensions of the bipartite split.

    Attributes
    ----------
    mat : np.ndarray
        The validated matrix. Treat as read-only.

    order : int
        ``d1 * d2``.
    """

    def __init__(self, mat, d1, d2):

        self.d1, self.d2 = _check_dims(d1, d2)
        mat = check_matrix(mat, square=True, name='density matrix')

        if mat.shape[0] != self.d1 * self.d2:
            raise DimensionMismatch(
                f'density matrix of order {mat.shape[0]} does not match '
                f'd1*d2 = {self.d1 * self.d2}')

        eig = herm_eig(mat, tol=STATE_TOL)
        psd_eig(mat, tol=STATE_PSD_TOL)

        trace = np.sum(eig.eigenvalues)
        if abs(trace - 1.0) > STATE_TOL:
            raise BadParameter(f'density matrix has trace {trace!r}, not 1')

        self.mat = (mat + dagger(mat)) / 2
        self.mat.setflags(write=False)
        self._eigenvalues = eig.eigenvalues

    def __array__(self, dtype=None, copy=None):

        return np.array(self.mat, dtype=dtype)

    def __repr__(self):

        return f'DensityMatrix(d1={self.d1}, d2={self.d2})'

    @property
    def order(self):
        return self.d1 * self.d2

    @property
    def dims(self):
        return self.d1, self.d2

    @property
    def eigenvalues(self):
        """Spectrum in descending order, clamped at zero."""
        return np.clip(self._eigenvalues, 0.0, None)

    def rank(self, tol=STATE_PSD_TOL):
        return int(np.sum(self._eigenvalues > tol))

    def is_pure(self, tol=1e-10):
        return self.rank(tol) == 1

    def reduced(self, keep=1):
        """Reduced state on factor ``keep`` (1 or 2)."""

        if keep == 1:
            return partial_trace(self.mat, self.d1, self.d2, subsystem=2)
        if keep == 2:
            return partial_trace(self.mat, self.d1, self.d2, subsystem=1)

        raise BadParameter(f'keep must be 1 or 2, got {keep}')

    def to_dict(self):
        return {'d1': self.d1, 'd2': self.d2, **_complex_to_dict(self.mat)}

    @classmethod
    def from_dict(cls, data):

        try:
            return cls(_complex_from_dict(data), data['d1'], data['d2'])
        except KeyError as error:
            raise BadParameter(f'state JSON is missing field {error}') from None

    def to_json(self, path=None):
        """Serialize to the ``{d1, d2, re, im}`` JSON schema.

        Floats are written with their shortest round-trip representation,
        so reading the file back reproduces the matrix bit for bit.
        """

        text = json.dumps(self.to_dict())
        if path is None:
            return text

        try:
            with open(path, 'w') as f:
                f.write(text)
        except OSError as error:
            raise IoError(f'cannot write state to {path}: {error}') from error

        return text

    @classmethod
    def from_json(cls, source):
        """Load from a JSON string or from a path to a JSON file."""

        return state_from_dict(_load_json(source), kind=cls)


class PureState:
    """Unit-norm ket on ``C^d1 (x) C^d2``.

    Parameters
    ----------
    ket : array-like of shape (d1*d2,)
        Norm one within 1e-12. Use :func:`pure_state` to normalize.

    d1, d2 : int
        Local dimensions.
    """

    def __init__(self, ket, d1, d2):

        self.d1, self.d2 = _check_dims(d1, d2)
        ket = np.array(unvec(ket, self.d1, self.d2).reshape(-1))

        norm = np.linalg.norm(ket)
        if abs(norm - 1.0) > STATE_TOL:
            raise BadParameter(f'ket has norm {norm!r}, not 1')

        self.ket = ket
        self.ket.setflags(write=False)

    def __array__(self, dtype=None, copy=None):

        return np.array(self.projector(), dtype=dtype)

    def __repr__(self):

        return f'PureState(d1={self.d1}, d2={self.d2})'

    @property
    def order(self):
        return self.d1 * self.d2

    @property
    def dims(self):
        return self.d1, self.d2

    def coefficients(self):
        """The ``d1 x d2`` matrix ``B`` with ``ket = vec(B)``."""
        return self.ket.reshape(self.d1, self.d2)

    def projector(self):
        return np.outer(self.ket, np.conj(self.ket))

    def density(self):
        return DensityMatrix(self.projector(), self.d1, self.d2)

    def to_dict(self):
        return {'d1': self.d1, 'd2': self.d2,
                'ket': _complex_to_dict(self.ket)}


class LocalUnitary:
    """A product unitary ``U1 (x) U2``.

    Parameters
    ----------
    u1 : array-like of shape (d1, d1)

    u2 : array-like of shape (d2, d2)

    check : bool, optional (default=True)
        Verify ``u^dagger u = 1`` within 1e-10 for both factors.
    """

    def __init__(self, u1, u2, check=True):

        self.u1 = check_matrix(u1, square=True, name='u1')
        self.u2 = check_matrix(u2, square=True, name='u2')

        if check:
            for name, u in (('u1', self.u1), ('u2', self.u2)):
                err = unitarity_error(u)
                if err > UNITARY_TOL:
                    raise BadParameter(f'{name} is not unitary (error {err:.2e})')

    def __repr__(self):

        return f'LocalUnitary(d1={self.d1}, d2={self.d2})'

    @property
    def d1(self):
        return self.u1.shape[0]

    @property
    def d2(self):
        return self.u2.shape[0]

    @classmethod
    def identity(cls, d1, d2):
        return cls(np.eye(d1), np.eye(d2), check=False)

    @classmethod
    def random(cls, d1, d2, seed=None):

        rng = np.random.default_rng(seed)

        return cls(haar_unitary(d1, rng), haar_unitary(d2, rng), check=False)

    def matrix(self):
        return np.kron(self.u1, self.u2)

    def adjoint(self):
        return LocalUnitary(dagger(self.u1), dagger(self.u2), check=False)

    def apply(self, op):
        """Conjugate an operator: ``W op W^dagger``."""

        w = self.matrix()
        op = check_matrix(op, square=True)
        if op.shape[0] != w.shape[0]:
            raise DimensionMismatch(
                f'operator of order {op.shape[0]} vs local unitary of order '
                f'{w.shape[0]}')

        return w @ op @ dagger(w)

    def apply_ket(self, ket):
        return self.matrix() @ np.asarray(ket, dtype=complex)

    def to_dict(self):
        return {'u1': _complex_to_dict(self.u1),
                'u2': _complex_to_dict(self.u2)}

    @classmethod
    def from_dict(cls, data):
        return cls(_complex_from_dict(data['u1']),
                   _complex_from_dict(data['u2']))


def unitarity_error(u):

    u = np.asarray(u)

    return float(np.linalg.norm(dagger(u) @ u - np.eye(u.shape[0])))


def _load_json(source):

    if isinstance(source, dict):
        return source

    text = str(source).lstrip()
    if text.startswith('{'):
        return json.loads(text)

    try:
        with open(source) as f:
            return json.load(f)
    except OSError as error:
        raise IoError(f'cannot read state from {source}: {error}') from error
    except json.JSONDecodeError as error:
        raise BadParameter(f'{source} is not valid JSON: {error}') from None


def state_from_dict(data, kind=None):
    """Build a :class:`DensityMatrix` or :class:`PureState` from its dict form.

    ``data`` is checked against the ``state`` schema first, so malformed
    documents raise :class:`~pylufid.exceptions.SchemaViolation`.
    """

    validate_document(data, 'state')
    if 'ket' in data:
        state = PureState(_complex_from_dict(data['ket']), data['d1'], data['d2'])
        return state.density() if kind is DensityMatrix else state

    return DensityMatrix.from_dict(data)


def load_state(source):

    return state_from_dict(_load_json(source))


def check_state(x, dims=None):
    """Coerce ``x`` to a :class:`DensityMatrix`.

    ``x`` may be a :class:`DensityMatrix`, a :class:`PureState`, or an
    array-like together with ``dims=(d1, d2)``.
    """

    if isinstance(x, DensityMatrix):
        return x
    if isinstance(x, PureState):
        return x.density()
    if dims is None:
        raise DimensionMismatch('bipartite dimensions unknown, pass dims=(d1, d2)')

    return DensityMatrix(x, *dims)


def as_operator(x):
    """Dense complex matrix for a state or a raw PSD operator."""

    if isinstance(x, PureState):
        return x.projector()

    return check_matrix(x, square=True)


def bipartite_dims(*ops, dims=None):
    """Common ``(d1, d2)`` of the arguments.

    Dimensions carried by :class:`DensityMatrix`, :class:`PureState` or
    :class:`LocalUnitary` arguments must agree with each other and with
    ``dims`` when given; raw arrays must have order ``d1 * d2``.
    """

    found = [tuple(dims)] if dims is not None else []
    for op in ops:
        if isinstance(op, (DensityMatrix, PureState, LocalUnitary)):
            found.append((op.d1, op.d2))

    if not found:
        raise DimensionMismatch('bipartite dimensions unknown, pass dims=(d1, d2)')

    d1, d2 = _check_dims(*found[0])
    for other in found[1:]:
        if tuple(other) != (d1, d2):
            raise DimensionMismatch(
                f'inconsistent bipartite dimensions {(d1, d2)} and {tuple(other)}')

    for op in ops:
        if isinstance(op, LocalUnitary) or op is None:
            continue
        n = np.shape(as_operator(op))[0]
        if n != d1 * d2:
            raise DimensionMismatch(
                f'operator of order {n} does not match d1*d2 = {d1 * d2}')

    return d1, d2


def swap_operator(d):
    """Operator exchanging the two factors of ``C^d (x) C^d``."""

    swap = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            swap[j * d + i, i * d + j] = 1.0

    return swap


def werner(d, t):
    """Werner state ``(1 - t SWAP) / (d (d - t))`` for ``t`` in ``[-1, 1]``.

    ``t = 0`` is the maximally mixed state and ``t = 1`` the normalized
    projector onto the antisymmetric subspace (the singlet for ``d = 2``).
    """

    if int(d) != d or d < 2:
        raise BadParameter(f'werner state needs d >= 2, got {d}')
    if not -1.0 <= t <= 1.0:
        raise BadParameter(f'werner parameter t must lie in [-1, 1], got {t}')

    d = int(d)
    mat = (np.eye(d * d) - t * swap_operator(d)) / (d * (d - t))

    return DensityMatrix(mat, d, d)


def max_entangled(d):
    """``|Omega> = sum_j |jj> / sqrt(d)``."""

    if int(d) != d or d < 2:
        raise BadParameter(f'maximally entangled state needs d >= 2, got {d}')

    d = int(d)

    return PureState(vec(np.eye(d) / np.sqrt(d)), d, d)


def isotropic(d, lam):
    """Isotropic state with overlap ``lam`` on the maximally entangled state.

    .. math::

        \\rho_{iso}(\\lambda) = \\lambda |\\Omega\\rangle\\langle\\Omega|
        + \\frac{1 - \\lambda}{d^2 - 1}(\\mathbb{1} - |\\Omega\\rangle\\langle\\Omega|)
    """

    if int(d) != d or d < 2:
        raise BadParameter(f'isotropic state needs d >= 2, got {d}')
    if not 0.0 <= lam <= 1.0:
        raise BadParameter(f'isotropic parameter must lie in [0, 1], got {lam}')

    d = int(d)
    omega = max_entangled(d).projector()
    mat = lam * omega + (1.0 - lam) / (d * d - 1) * (np.eye(d * d) - omega)

    return DensityMatrix(mat, d, d)


def bell_state(kind='phi+'):
    """Two-qubit Bell state.

    ``phi+-`` are ``(|00> +- |11>)/sqrt(2)`` and ``psi+-`` are
    ``(|01> +- |10>)/sqrt(2)``; ``psi-`` is the singlet.
    """

    r = 1 / np.sqrt(2)
    kets = {'phi+': [r, 0, 0, r], 'phi-': [r, 0, 0, -r],
            'psi+': [0, r, r, 0], 'psi-': [0, r, -r, 0]}

    if kind not in kets:
        raise BadParameter(f"unknown Bell state '{kind}', "
                           f"expected one of {sorted(kets)}")

    return PureState(kets[kind], 2, 2)


def pure_state(ket, d1, d2):
    """Normalize ``ket`` into a :class:`PureState`."""

    ket = np.asarray(ket, dtype=complex).reshape(-1)
    norm = np.linalg.norm(ket)
    if not norm > 0:
        raise BadParameter('cannot normalize the zero vector')

    return PureState(ket / norm, d1, d2)


def product_state(u, v):
    """Pure product state ``|u>|v>`` (factors are normalized)."""

    u = np.asarray(u, dtype=complex).reshape(-1)
    v = np.asarray(v, dtype=complex).reshape(-1)

    return pure_state(np.kron(u, v), u.size, v.size)


def basis_product(d1, d2, i=0, j=0):

    return PureState(np.eye(d1 * d2)[i * d2 + j], d1, d2)


def maximally_mixed(d1, d2):

    return DensityMatrix(np.eye(d1 * d2) / (d1 * d2), d1, d2)


def haar_unitary(d, seed=None):
    """Haar-random unitary from the QR factorization of a Ginibre matrix.

    Parameters
    ----------
    d : int
        Matrix order, ``d >= 1``.

    seed : int, sequence of int or np.random.Generator, optional
        Passed to :func:`numpy.random.default_rng`. A fixed seed gives a
        bit-identical matrix.

    Returns
    -------
    u : np.ndarray of shape (d, d)
    """

    if int(d) != d or d < 1:
        raise BadParameter(f'unitary order must be a positive integer, got {d}')

    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((d, d)) +
         1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)

    # Fix the phases of R's diagonal so the distribution is exactly Haar
    diag = np.diag(r)
    q = q * (diag / np.abs(diag))

    return q


def random_density(d1, d2, rank=None, seed=None):
    """Random density matrix of a given rank.

    Drawn from the induced measure: ``G G^dagger / Tr(G G^dagger)`` with
    ``G`` a ``d1 d2 x rank`` Ginibre matrix, equivalently the reduced state
    of a Haar-random pure state on ``C^{d1 d2} (x) C^rank``.
    """

    d1, d2 = _check_dims(d1, d2)
    n = d1 * d2
    rank = n if rank is None else rank

    if int(rank) != rank or not 1 <= rank <= n:
        raise BadParameter(f'rank must lie in [1, {n}], got {rank}')

    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, int(rank))) + \
        1j * rng.standard_normal((n, int(rank)))
    mat = g @ dagger(g)

    return DensityMatrix(mat / np.trace(mat).real, d1, d2)


def random_pure(d1, d2, seed=None):

    rng = np.random.default_rng(seed)
    ket = rng.standard_normal(d1 * d2) + 1j * rng.standard_normal(d1 * d2)

    return pure_state(ket, d1, d2)


def schmidt(psi):
    """Schmidt decomposition ``|psi> = sum_j c_j |a_j>|b_j>``.

    Returns
    -------
    decomposition : Schmidt
        ``coefficients`` holds all ``min(d1, d2)`` coefficients in
        descending order (zeros included); ``left[:, j]`` is ``|a_j>`` and
        ``right[:, j]`` is ``|b_j>``.
    """

    u, s, vh = np.linalg.svd(psi.coefficients())
    k = min(psi.d1, psi.d2)

    return Schmidt(s[:k], u[:, :k], vh[:k].T)


def complement_state(sigma):
    """``(1 - sigma) / (d1 d2 - 1)``, the normalized complement of ``sigma``."""

    sigma = check_state(sigma)
    n = sigma.order
    if n < 2:
        raise BadParameter('complement needs a state of order at least 2')

    return DensityMatrix((np.eye(n) - sigma.mat) / (n - 1), sigma.d1, sigma.d2)


def tensor_power(rho, n):
    """``rho^{(x) n}`` regrouped as ``(A1..An)(B1..Bn)``.

    The result is again a bipartite state, with local dimensions
    ``d1**n`` and ``d2**n``.
    """

    if int(n) != n or n < 1:
        raise BadParameter(f'tensor power must be a positive integer, got {n}')

    rho = check_state(rho)
    n = int(n)
    d1, d2 = rho.d1, rho.d2

    big = reduce(np.kron, [rho.mat] * n)
    t = big.reshape([d1, d2] * n * 2)

    rows = list(range(0, 2 * n, 2)) + list(range(1, 2 * n, 2))
    perm = rows + [2 * n + r for r in rows]
    mat = t.transpose(perm).reshape(d1**n * d2**n, d1**n * d2**n)

    return DensityMatrix(mat, d1**n, d2**n)


def commutator_counterexample():
    """Two-qubit pair whose local-unitary orbits never commute.

    ``rho`` has non-degenerate positive eigenvalues on three Bell states
    and ``sigma`` is diagonal on ``|00>, |11>``.
    """

    rho = (bell_state('phi+').projector() / 2 +
           bell_state('phi-').projector() / 3 +
           bell_state('psi+').projector() / 6)
    sigma = np.diag([2 / 3, 0, 0, 1 / 3])

    return DensityMatrix(rho, 2, 2), DensityMatrix(sigma, 2, 2)
