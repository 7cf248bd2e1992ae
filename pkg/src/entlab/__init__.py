"""entlab - Entanglement laboratory.

Chiral symmetries, entangled subspaces and witness observables for
three-party qudit systems, with numerical verification tooling.
"""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("entlab")
except PackageNotFoundError:  # running from a source checkout
    __version__ = "0.0.0+local"
