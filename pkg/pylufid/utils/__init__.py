from . import fidelity, linalg, states

__all__ = ['fidelity', 'linalg', 'states']
