"""Dipole-dipole couplings and guided-light transmission near a nanofiber."""

__version__ = "0.1.0"

from .coupling import (CouplingMatrices, EmitterEnsemble, Provenance,
                       assemble, chain_ensemble, chain_positions)
from .dispersion import FiberDispersion, FiberSpec, SellmeierMaterial
from .errors import (CacheError, ConfigError, ConvergenceError, DomainError,
                     FiberQedError, NoGuidedModeError)
from .green_fiber import RadiationQuadratureSpec
from .pv import DirectCutoff, FourierAveraged, TableCache, v_rd_pair
from .transmission import DriveSpec, SpectrumResult, transmission_spectrum

__all__ = [
    "CouplingMatrices", "EmitterEnsemble", "Provenance", "assemble",
    "chain_ensemble", "chain_positions", "FiberDispersion", "FiberSpec",
    "SellmeierMaterial", "CacheError", "ConfigError", "ConvergenceError",
    "DomainError", "FiberQedError", "NoGuidedModeError",
    "RadiationQuadratureSpec", "DirectCutoff", "FourierAveraged",
    "TableCache", "v_rd_pair", "DriveSpec", "SpectrumResult",
    "transmission_spectrum", "__version__",
]
