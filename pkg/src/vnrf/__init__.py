"""Noisily observed Ising Markov random fields on the square lattice.

Contexts, exact conditionals, theorem thresholds, and Monte Carlo
phase-diagram statistics at desk scale.
"""

__version__ = "0.1.0"

from .lattice import BoundaryCondition, Configuration, Contour, Window
from .sampler import ChainState, NoiseParams, rng_stream
from .specification import ExtremalRates, KernelTable, SpecificationParams
from .theory import Thresholds

__all__ = [
    "BoundaryCondition",
    "ChainState",
    "Configuration",
    "Contour",
    "ExtremalRates",
    "KernelTable",
    "NoiseParams",
    "SpecificationParams",
    "Thresholds",
    "Window",
    "rng_stream",
    "__version__",
]
