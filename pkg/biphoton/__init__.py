"""
biphoton - two-photon polarization interference through subwavelength hole arrays.

A modular toolkit for simulating and analyzing biphoton fringes after a
plasmonic hole array: state algebra, optical elements with loss,
birefringence and dephasing, coincidence detection, fringe fitting and
surface-plasmon estimates.
"""

__version__ = "0.1.0"

from biphoton.config import Config
from biphoton.core import (
    BiphotonAlgebra,
    BiphotonDensityMatrix,
    BiphotonState,
    Detector,
    HoleArrayParams,
    JonesOperator,
    OpticalElements,
)
from biphoton.analysis import FringeFitter, PlasmonAnalyzer
from biphoton.experiment import ExperimentRunner, ScenarioConfig

__all__ = [
    'Config',
    'BiphotonAlgebra',
    'BiphotonDensityMatrix',
    'BiphotonState',
    'Detector',
    'HoleArrayParams',
    'JonesOperator',
    'OpticalElements',
    'FringeFitter',
    'PlasmonAnalyzer',
    'ExperimentRunner',
    'ScenarioConfig',
]
