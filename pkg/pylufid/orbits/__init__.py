from .base import OptimizationReport
from .comm import COMM, commutator_min
from .fid import GMAX, GMIN, directional_derivative, gmax, gmin, riemannian_step
from .hso import HSO, hs_overlap_extrema, rel_entropy_min
from .s1 import S1, s1_norm

__all__ = ['COMM', 'GMAX', 'GMIN', 'HSO', 'S1', 'OptimizationReport',
           'commutator_min', 'directional_derivative', 'gmax', 'gmin',
           'hs_overlap_extrema', 'rel_entropy_min', 'riemannian_step',
           's1_norm']
