"""Soap film spanning an inextensible elastic loop.

Positions are (n, 3) float arrays, one row per mesh vertex. Stiffness sweeps
are parametrized by the dimensionless kL^3/alpha; gamma = sigma L^3 / alpha
with sigma = 4 k / sqrt(3).
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401

__version__ = "0.1.0"
