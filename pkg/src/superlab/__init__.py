"""Fourier analysis of finite-difference schemes, linear emulator fits and
superiority ratios, plus an implicit upwind Burgers solver."""
from . import (advection, burgers, diffusion, fitting, initial_conditions, kernels, linalg,
               poisson, spectral, superiority)
from ._accel import backend_name
from .errors import (ConfigurationError, DegenerateModeError, FactorizationError, SuperlabError,
                     UndefinedMetricError, UnsupportedBranchError, ValidationError)

__version__ = "0.1.0"
