"""Closed-form values of the local-unitary fidelity extrema.

These are exact evaluators for the cases where the optimization over
``U1 (x) U2`` can be solved analytically: pure states, Werner and isotropic
states against pure product states, and the global-unitary extrema that
bound every local-unitary problem from outside.
"""
import numpy as np

from .exceptions import BadParameter, BadSpectrum, DimensionMismatch
from .utils.fidelity import von_neumann_entropy
from .utils.linalg import SUPPORT_TOL, psd_eig
from .utils.states import PureState, check_state, max_entangled, schmidt

SPECTRUM_TOL = 1e-10


def _sorted_spectrum(values, name='spectrum', normalized=True):

    values = np.asarray(values, dtype=float).reshape(-1)

    if values.size == 0:
        raise BadSpectrum(f'{name} is empty')
    if not np.all(np.isfinite(values)):
        raise BadSpectrum(f'{name} has non-finite entries')
    if np.min(values) < -SPECTRUM_TOL:
        raise BadSpectrum(f'{name} has negative entry {np.min(values):.3e}')
    if normalized and abs(np.sum(values) - 1.0) > 1e-8:
        raise BadSpectrum(f'{name} sums to {np.sum(values)!r}, not 1')

    return np.sort(np.clip(values, 0.0, None))[::-1]


class SchmidtSpectrum:
    """Spectrum of a reduced state of a bipartite pure state.

    Holds the squared Schmidt coefficients of ``|psi>``, in descending
    order, summing to one.

    Parameters
    ----------
    values : array-like
        Non-negative reals summing to one; re-sorted on construction.
    """

    def __init__(self, values):

        self.values = _sorted_spectrum(values, name='Schmidt spectrum')

    def __len__(self):
        return self.values.size

    def __repr__(self):
        return f'SchmidtSpectrum({np.array2string(self.values, precision=6)})'

    @classmethod
    def from_state(cls, psi):

        if not isinstance(psi, PureState):
            raise BadParameter('a Schmidt spectrum needs a PureState')

        return cls(schmidt(psi).coefficients ** 2)

    def padded(self, length):

        out = np.zeros(max(length, self.values.size))
        out[:self.values.size] = self.values

        return out


def _as_schmidt(x):

    if isinstance(x, SchmidtSpectrum):
        return x
    if isinstance(x, PureState):
        return SchmidtSpectrum.from_state(x)

    return SchmidtSpectrum(x)


def gmax_pure_pure(a, b):
    """Maximal fidelity between two pure states under local unitaries.

    .. math::

        G_{max} = \\sum_j \\sqrt{a_j b_j}

    with both reduced spectra sorted in descending order; the shorter one
    is zero-padded.

    Parameters
    ----------
    a, b : SchmidtSpectrum, PureState or array-like

    Returns
    -------
    g : float
        In ``[0, 1]``; equal to 1 exactly when the spectra agree.
    """

    a, b = _as_schmidt(a), _as_schmidt(b)
    n = max(len(a), len(b))

    return float(min(np.sum(np.sqrt(a.padded(n) * b.padded(n))), 1.0))


def gmin_pure_pure(d1=2, d2=2):
    """Minimal fidelity between two pure states under local unitaries: 0."""

    if d1 < 2 or d2 < 2:
        raise BadParameter(f'local dimensions must be at least 2, got ({d1}, {d2})')

    return 0.0


def _check_werner(d, t):

    if int(d) != d or d < 2:
        raise BadParameter(f'werner state needs d >= 2, got {d}')
    if not -1.0 <= t <= 1.0:
        raise BadParameter(f'werner parameter t must lie in [-1, 1], got {t}')


def werner_s1_norm(d, t):
    """Largest overlap of the Werner state with a pure product state.

    .. math::

        \\lVert\\sigma(t)\\rVert_{S(1)} = \\frac{1 + |\\min(t, 0)|}{d(d - t)}
    """

    _check_werner(d, t)

    return (1.0 + abs(min(t, 0.0))) / (d * (d - t))


def gmax_werner_vs_pure_product(d, t):
    """``G_max`` of the Werner state against any pure product state.

    Equals ``sqrt(werner_s1_norm(d, t))``; the minimum over ``t`` is ``1/d``
    and is attained at ``t = 0`` only.
    """

    return float(np.sqrt(werner_s1_norm(d, t)))


def iso_extrema_vs_pure_product(d, lam):
    """``(G_max, G_min)`` of the isotropic state against a pure product state.

    Parameters
    ----------
    d : int
        Local dimension, ``d >= 2``.

    lam : float
        Overlap with the maximally entangled state, in ``[0, 1]``.

    Returns
    -------
    gmax, gmin : float
        The larger and smaller of
        :math:`\\sqrt{(d\\lambda + 1)/(d(d + 1))}` and
        :math:`\\sqrt{(1 - \\lambda)/(d^2 - 1)}`; the branches swap at
        :math:`\\lambda = 1/d^2`.
    """

    if int(d) != d or d < 2:
        raise BadParameter(f'isotropic state needs d >= 2, got {d}')
    if not 0.0 <= lam <= 1.0:
        raise BadParameter(f'isotropic parameter must lie in [0, 1], got {lam}')

    entangled = np.sqrt((d * lam + 1.0) / (d * (d + 1.0)))
    flat = np.sqrt((1.0 - lam) / (d * d - 1.0))

    return float(max(entangled, flat)), float(min(entangled, flat))


def _spectrum_of(x, name):

    x = np.asarray(x)
    if x.ndim == 2:
        vals, _ = psd_eig(x)
        return _sorted_spectrum(vals, name)

    return _sorted_spectrum(x, name)


def global_unitary_extrema(rho_spec, sigma_spec):
    """Extrema of ``F(rho, U sigma U^dagger)`` over all global unitaries ``U``.

    .. math::

        f_{max} = \\sum_j \\sqrt{\\lambda_j^\\downarrow(\\rho)
                                 \\lambda_j^\\downarrow(\\sigma)}, \\qquad
        f_{min} = \\sum_j \\sqrt{\\lambda_j^\\downarrow(\\rho)
                                 \\lambda_j^\\uparrow(\\sigma)}

    Parameters
    ----------
    rho_spec, sigma_spec : array-like
        Normalized spectra (any order), or the density matrices themselves.

    Returns
    -------
    fmax, fmin : float
    """

    a = _spectrum_of(rho_spec, 'rho spectrum')
    b = _spectrum_of(sigma_spec, 'sigma spectrum')

    if a.size != b.size:
        raise BadSpectrum(f'spectra of lengths {a.size} and {b.size} differ')

    fmax = np.sum(np.sqrt(a * b))
    fmin = np.sum(np.sqrt(a * b[::-1]))

    return float(min(fmax, 1.0)), float(fmin)


def rel_entropy_global_max(rho, sigma, support_tol=SUPPORT_TOL):
    """Largest ``S(rho || U sigma U^dagger)`` over global unitaries ``U``.

    .. math::

        -S(\\rho) - \\sum_j \\lambda_j^\\downarrow(\\rho)
        \\log\\lambda_j^\\uparrow(\\sigma)

    ``inf`` when ``sigma`` is rank deficient, since its kernel can then be
    rotated onto the support of ``rho``.
    """

    a = _spectrum_of(rho, 'rho spectrum')
    b = _spectrum_of(sigma, 'sigma spectrum')[::-1]

    if a.size != b.size:
        raise BadSpectrum(f'spectra of lengths {a.size} and {b.size} differ')
    if b[0] <= support_tol:
        return np.inf

    return float(-von_neumann_entropy(np.diag(a)) - np.sum(a * np.log(b)))


def fef(rho, **kwargs):
    """Fully entangled fraction ``G_max(rho, |Omega><Omega|)**2``.

    Parameters
    ----------
    rho : DensityMatrix
        State on ``C^d (x) C^d``.

    **kwargs
        Passed to :class:`pylufid.orbits.fid.GMAX`.

    Returns
    -------
    fef : float
        In ``[0, 1]``.
    """

    from .orbits.fid import GMAX

    rho = check_state(rho)
    if rho.d1 != rho.d2:
        raise DimensionMismatch(
            f'fully entangled fraction needs d1 == d2, got {rho.dims}')

    opt = GMAX(**kwargs)
    opt.eval(rho, max_entangled(rho.d1))

    return float(min(opt.value_ ** 2, 1.0))
