"""Semidefinite characterization of the fidelity and its certificates.

For PSD ``rho`` and ``tau`` of order ``n`` the fidelity is the optimal value
of

.. math::

    \\max_X \\; \\tfrac{1}{2}(\\mathrm{Tr}X + \\mathrm{Tr}X^\\dagger)
    \\quad \\text{s.t.} \\quad
    \\begin{pmatrix} \\rho & X \\\\ X^\\dagger & \\tau \\end{pmatrix} \\succeq 0

with dual

.. math::

    \\min_{Y, Z} \\; \\tfrac{1}{2}(\\langle\\rho, Y\\rangle + \\langle\\tau, Z\\rangle)
    \\quad \\text{s.t.} \\quad
    \\begin{pmatrix} Y & -\\mathbb{1} \\\\ -\\mathbb{1} & Z \\end{pmatrix} \\succeq 0

No interior-point solver is included: optimality is certified by the
analytic primal point, weak duality and, for full-rank inputs, the
analytic dual point. The problem can be exported in SDPA sparse format for
external solvers.
"""
import logging
from dataclasses import dataclass

import numpy as np

from .exceptions import BadParameter, DimensionMismatch, IoError, NotHermitian
from .utils.fidelity import fidelity
from .utils.linalg import (HERMITIAN_TOL, check_matrix, dagger, matrix_power_psd,
                           matrix_sqrt, min_eigenvalue, polar_isometry, psd_eig,
                           rank, real_embedding)
from .utils.states import as_operator

logger = logging.getLogger(__name__)

FEASIBILITY_TOL = 1e-9
SDPA_HEADER = ('* pylufid fidelity SDP; complex Hermitian blocks embedded as '
               '[[Re, -Im], [Im, Re]]')


@dataclass
class SdpProblem:
    """Data of the fidelity SDP for a fixed pair ``(rho, tau)``.

    Attributes
    ----------
    rho, tau : np.ndarray
        PSD matrices of equal order.

    order : int

    primal_candidate : np.ndarray or None
        A matrix ``X`` for the primal block.

    dual_candidate : tuple of np.ndarray or None
        A pair ``(Y, Z)`` for the dual block.
    """

    rho: np.ndarray
    tau: np.ndarray
    order: int
    primal_candidate: np.ndarray = None
    dual_candidate: tuple = None

    def primal_block(self, x):

        return np.block([[self.rho, x], [dagger(x), self.tau]])


def build_problem(rho, tau):
    """Assemble the fidelity SDP for ``rho`` and ``tau``.

    Parameters
    ----------
    rho, tau : DensityMatrix, PureState or array-like
        PSD operators of equal order; trace one is not required.

    Returns
    -------
    problem : SdpProblem
        With empty candidates.
    """

    rho, tau = as_operator(rho), as_operator(tau)
    if rho.shape != tau.shape:
        raise DimensionMismatch(
            f'SDP blocks of shapes {rho.shape} and {tau.shape} differ')

    psd_eig(rho)
    psd_eig(tau)

    return SdpProblem(rho=(rho + dagger(rho)) / 2, tau=(tau + dagger(tau)) / 2,
                      order=rho.shape[0])


def optimal_primal(p):
    """Analytic optimal primal point ``X* = sqrt(rho) Q sqrt(tau)``.

    ``Q`` is the unitary polar factor of ``sqrt(rho) sqrt(tau)``, so
    ``Tr X* = || sqrt(rho) sqrt(tau) ||_1 = F(rho, tau)`` and the primal
    block factors as ``B^dagger B`` plus a PSD remainder.
    """

    sqrt_rho = matrix_sqrt(p.rho)
    sqrt_tau = matrix_sqrt(p.tau)
    q = polar_isometry(sqrt_rho @ sqrt_tau)

    x = sqrt_rho @ q @ sqrt_tau
    p.primal_candidate = x

    return x


def optimal_dual(p):
    """Analytic optimal dual point for full-rank ``rho`` and ``tau``.

    ``Y = rho^{-1/2} (sqrt(rho) tau sqrt(rho))^{1/2} rho^{-1/2}`` and
    ``Z = Y^{-1}``; both halves of the dual objective then equal the
    fidelity.
    """

    n = p.order
    if rank(p.rho) < n or rank(p.tau) < n:
        raise BadParameter('the analytic dual point needs full-rank rho and tau')

    inv_sqrt_rho = matrix_power_psd(p.rho, -0.5)
    sqrt_rho = matrix_sqrt(p.rho)
    middle = matrix_sqrt(sqrt_rho @ p.tau @ sqrt_rho)

    y = inv_sqrt_rho @ middle @ inv_sqrt_rho
    y = (y + dagger(y)) / 2
    z = np.linalg.inv(y)
    z = (z + dagger(z)) / 2
    p.dual_candidate = (y, z)

    return y, z


def check_primal_feasible(p, x, tol=FEASIBILITY_TOL):
    """PSD test of the primal block and the primal objective ``Re Tr X``."""

    x = check_matrix(x, name='primal candidate')
    if x.shape != (p.order, p.order):
        raise DimensionMismatch(
            f'primal candidate has shape {x.shape}, expected ({p.order}, {p.order})')

    feasible = min_eigenvalue(p.primal_block(x)) >= -tol

    return bool(feasible), float(np.real(np.trace(x)))


def check_dual_feasible(p, y, z, tol=FEASIBILITY_TOL):
    """PSD test of the dual block and the dual objective.

    By weak duality any feasible dual objective bounds every feasible
    primal objective, and hence the fidelity, from above.
    """

    y = check_matrix(y, square=True, name='Y')
    z = check_matrix(z, square=True, name='Z')
    for name, m in (('Y', y), ('Z', z)):
        if m.shape != (p.order, p.order):
            raise DimensionMismatch(
                f'{name} has shape {m.shape}, expected ({p.order}, {p.order})')
        if np.max(np.abs(m - dagger(m))) > HERMITIAN_TOL * max(1.0, np.max(np.abs(m))):
            raise NotHermitian(f'dual candidate {name} is not Hermitian')

    eye = np.eye(p.order)
    block = np.block([[y, -eye], [-eye, z]])
    feasible = min_eigenvalue(block) >= -tol
    objective = 0.5 * np.real(np.trace(p.rho @ y) + np.trace(p.tau @ z))

    return bool(feasible), float(objective)


def certificate(p):
    """Summary of the primal and dual certificates for ``p``.

    Returns
    -------
    summary : dict
        The fidelity, the primal objective at :func:`optimal_primal` and its
        feasibility, and the best available dual objective (the analytic dual
        point for full-rank inputs, else the scaled identity pair
        ``Y = c 1, Z = 1/c``).
    """

    f = fidelity(p.rho, p.tau)
    primal_ok, primal_obj = check_primal_feasible(p, optimal_primal(p))

    try:
        y, z = optimal_dual(p)
        kind = 'analytic'
    except BadParameter:
        tr_rho = np.real(np.trace(p.rho))
        tr_tau = np.real(np.trace(p.tau))
        c = np.sqrt(tr_tau / tr_rho) if tr_rho > 0 and tr_tau > 0 else 1.0
        y, z = c * np.eye(p.order), np.eye(p.order) / c
        kind = 'scaled_identity'

    dual_ok, dual_obj = check_dual_feasible(p, y, z)

    if not (primal_ok and dual_ok):
        logger.warning('SDP certificate failed a feasibility check')

    return {'fidelity': f,
            'primal_objective': primal_obj,
            'primal_feasible': primal_ok,
            'dual_objective': dual_obj,
            'dual_feasible': dual_ok,
            'dual_kind': kind,
            'gap': dual_obj - primal_obj}


def _hermitian_constraints(m, offset, big):
    """SDPA constraints fixing one complex Hermitian block of the embedding.

    Yields ``(c, entries)`` with 0-based upper-triangular ``(i, j, value)``.
    """

    n = m.shape[0]

    for i in range(n):
        a = offset + i
        yield 2 * m[i, i].real, [(a, a, 1.0), (big + a, big + a, 1.0)]

    for i in range(n):
        for j in range(i + 1, n):
            a, b = offset + i, offset + j
            yield 4 * m[i, j].real, [(a, b, 1.0), (big + a, big + b, 1.0)]

    for i in range(n):
        for j in range(i + 1, n):
            a, b = offset + i, offset + j
            yield 4 * m[i, j].imag, [(b, big + a, 1.0), (a, big + b, -1.0)]


def sdpa_data(p):
    """Objective, constraints and block size of the real-embedded problem.

    The embedded variable is ``real_embedding([[rho, X], [X^dagger, tau]])``
    of order ``4 n``; SDPA maximizes ``Tr(F0 Y)`` subject to
    ``Tr(F_k Y) = c_k``.
    """

    n = p.order
    big = 2 * n

    objective = []
    for i in range(n):
        objective += [(i, n + i, 0.25), (big + i, big + n + i, 0.25)]

    constraints = list(_hermitian_constraints(p.rho, 0, big)) + \
        list(_hermitian_constraints(p.tau, n, big))

    return objective, constraints, 4 * n


def export_sdpa(p, path):
    """Write ``p`` in SDPA sparse format (``.dat-s``).

    Doubles are printed with 17 significant digits and indices are
    1-based, upper triangular.
    """

    objective, constraints, size = sdpa_data(p)

    lines = [SDPA_HEADER, str(len(constraints)), '1', str(size),
             ' '.join('%.17g' % c for c, _ in constraints)]
    lines += ['0 1 %d %d %.17g' % (i + 1, j + 1, v) for i, j, v in objective]
    for k, (_, entries) in enumerate(constraints, start=1):
        lines += ['%d 1 %d %d %.17g' % (k, i + 1, j + 1, v) for i, j, v in entries]

    try:
        with open(path, 'w') as f:
            f.write('\n'.join(lines) + '\n')
    except OSError as error:
        raise IoError(f'cannot write SDPA file {path}: {error}') from error

    logger.info(f'wrote SDPA problem with {len(constraints)} constraints to {path}')

    return path


def read_sdpa(path):
    """Parse an SDPA sparse file into ``(c, matrices, block_size)``.

    ``matrices[0]`` is ``F0``; every matrix is dense, symmetric and real.
    Only single-block files are supported.
    """

    try:
        with open(path) as f:
            lines = [ln.strip() for ln in f if ln.strip()]
    except OSError as error:
        raise IoError(f'cannot read SDPA file {path}: {error}') from error

    lines = [ln for ln in lines if ln[0] not in '*"']

    try:
        m = int(lines[0])
        n_blocks = int(lines[1])
        size = abs(int(lines[2].replace('{', ' ').replace('}', ' ').split()[0]))
        c = np.array([float(v) for v in lines[3].replace(',', ' ').split()])

        if n_blocks != 1:
            raise IoError(f'{path}: expected one block, found {n_blocks}')

        mats = np.zeros((m + 1, size, size))
        for ln in lines[4:]:
            k, _, i, j, v = ln.split()
            k, i, j, v = int(k), int(i) - 1, int(j) - 1, float(v)
            mats[k, i, j] = v
            mats[k, j, i] = v
    except (ValueError, IndexError) as error:
        raise IoError(f'{path} is not a valid SDPA sparse file: {error}') from None

    return c, mats, size


def import_sdpa(path):
    """Read back a file written by :func:`export_sdpa` as an :class:`SdpProblem`."""

    c, mats, size = read_sdpa(path)
    if size % 4:
        raise IoError(f'{path}: block size {size} is not a fidelity SDP')

    n = size // 4
    big = 2 * n
    if c.size != 2 * n * n:
        raise IoError(f'{path}: expected {2 * n * n} constraints, found {c.size}')

    block = np.zeros((big, big), dtype=complex)

    for k in range(c.size):
        f = mats[k + 1]
        top = np.argwhere(np.triu(f[:big, :big]) != 0)
        if top.size:
            a, b = top[0]
            if a == b:
                block[a, a] += c[k] / 2
            else:
                block[a, b] += c[k] / 4
                block[b, a] += c[k] / 4
            continue

        cross = np.argwhere(f[:big, big:] == -1.0)
        if not cross.size:
            raise IoError(f'{path}: constraint {k + 1} has an unknown pattern')
        a, b = cross[0]
        block[a, b] += 1j * c[k] / 4
        block[b, a] -= 1j * c[k] / 4

    return SdpProblem(rho=block[:n, :n], tau=block[n:, n:], order=n)


def embedded_primal(p, x):
    """Real embedding of the primal block, the variable seen by SDPA."""

    return real_embedding(p.primal_block(x))
