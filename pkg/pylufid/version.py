"""``pylufid`` is a python toolbox for fidelity under local unitary dynamics."""
# Based on NiLearn package
# License: simplified BSD

__version__ = '0.1.1'  # pragma: no cover
