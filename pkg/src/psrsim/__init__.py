"""Polarization self-rotation and vacuum-noise simulator for driven 4-level vapours.

The package computes, for an elliptically or linearly polarized beam
traversing a driven 4-level atomic ensemble:

* classical transmission and self-rotation spectra, with Doppler and
  hyperfine-line averaging (:mod:`psrsim.ensemble`),
* the phenomenological cross-phase rotation/squeezing model
  (:mod:`psrsim.matsko`),
* semi-classical steady states and mean-field propagation
  (:mod:`psrsim.bloch`),
* quadrature noise spectra of the orthogonally polarized vacuum mode,
  with atomic Langevin sources (:mod:`psrsim.fluct`).

All frequencies are expressed in units of the optical coherence decay
rate gamma (gamma = 1 internally); the quantum noise limit is
normalized to 1 (0 dB).
"""

__version__ = "0.1.0"

from .core import (
    DataError,
    DriveParams,
    EnsembleParams,
    LabParams,
    NumericalError,
    SidebandGrid,
    ValidationError,
    denormalize_units,
    normalize_units,
)

__all__ = [
    "DataError",
    "DriveParams",
    "EnsembleParams",
    "LabParams",
    "NumericalError",
    "SidebandGrid",
    "ValidationError",
    "denormalize_units",
    "normalize_units",
    "__version__",
]
