"""Eigenvalues, spectral manifolds and stability of DDEs with hierarchical delays."""

from ._hdde import *  # noqa: F401,F403
from ._hdde import __doc__  # noqa: F401
