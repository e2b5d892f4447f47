"""
Analysis package: fringe fitting and surface-plasmon estimates.

Modules:
- fringe_fit: Separable least-squares fringe fits and the de Broglie readout
- plasmon: Resonance wavelengths, Bethe baseline and measured spectra
"""

from biphoton.analysis.fringe_fit import FringeFit, FringeFitter, FringeModel, canonical_phase
from biphoton.analysis.plasmon import (
    Interface,
    OpticalConstants,
    PlasmonAnalyzer,
    ResonanceMode,
    SpectrumRecord,
)

__all__ = [
    "FringeFit",
    "FringeFitter",
    "FringeModel",
    "canonical_phase",
    "Interface",
    "OpticalConstants",
    "PlasmonAnalyzer",
    "ResonanceMode",
    "SpectrumRecord",
]
