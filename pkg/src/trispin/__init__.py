"""Effective spin models of two-species atoms in triangular optical lattices."""
from .errors import *  # noqa: F401,F403
from .kernels import BACKEND

__version__ = "0.1.0"
