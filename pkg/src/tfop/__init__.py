"""Time-frequency analysis of Fourier integral and pseudo-differential operators on periodic lattices."""

from .errors import ConfigError, FitnessError, GridMismatchError, InvalidInputError, NumericalFailure, TfopError
from .grid import GridSpec, SampledFunction, forward_dft, inverse_dft
from .operators import OperatorMatrix, op_fio, op_pseudo
from .phase import PhaseSpec, nondegeneracy
from .stft import istft, stft
from .weights import WeightSpec, WindowSpec

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "FitnessError",
    "GridMismatchError",
    "GridSpec",
    "InvalidInputError",
    "NumericalFailure",
    "OperatorMatrix",
    "PhaseSpec",
    "SampledFunction",
    "TfopError",
    "WeightSpec",
    "WindowSpec",
    "forward_dft",
    "inverse_dft",
    "istft",
    "nondegeneracy",
    "op_fio",
    "op_pseudo",
    "stft",
]
