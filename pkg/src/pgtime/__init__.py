"""Poisson and Skellam processes run on compound Poisson-Gamma clocks and
their first-passage inverses: closed-form laws, exact samplers and a
Monte Carlo verification harness."""

__version__ = "0.1.0"

from .errors import (ConvergenceFailure, DegenerateBinning, DomainError, InsufficientSamples,
                     PgtimeError, QuadratureFailure, RuntimeFault, UnknownSuite)
from .levy import CpgParams, MixedLaw, Pmf, SkellamParams
from .inverse import InvParams, InvTcParams
from .timechange import TcPoissonParams, TcSkellamParams
from .models import Model, build

__all__ = [
    "__version__", "CpgParams", "SkellamParams", "MixedLaw", "Pmf", "TcPoissonParams",
    "TcSkellamParams", "InvParams", "InvTcParams", "Model", "build", "PgtimeError",
    "DomainError", "ConvergenceFailure", "QuadratureFailure", "InsufficientSamples",
    "DegenerateBinning", "UnknownSuite", "RuntimeFault",
]
