"""Conditional min-entropy, singlet fractions and learning-bound checks on finite instances."""
from .bounds import BoundReport
from .discretize import Discretization, MetricSpace, greedy_packing_net, uniform_grid
from .errors import InvalidInput
from .minent_sdp import SdpSolution, max_singlet_fraction, solve_hmin
from .quantum_core import Channel, DensityOperator

__version__ = "0.1.0"

__all__ = [
    "BoundReport", "Channel", "DensityOperator", "Discretization", "InvalidInput", "MetricSpace",
    "SdpSolution", "greedy_packing_net", "max_singlet_fraction", "solve_hmin", "uniform_grid",
]
