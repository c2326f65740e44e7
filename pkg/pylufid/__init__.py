from . import bounds, closed_form, orbits, probes, sdp, utils
from .version import __version__

__all__ = ['bounds', 'closed_form', 'orbits', 'probes', 'sdp', 'utils',
           '__version__']
