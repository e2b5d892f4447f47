"""
Core two-photon optics.

Includes biphoton states and the Jones lift, the experiment's optical
elements with the hole-array channel, and coincidence detection.
"""

from biphoton.core.states import (
    BiphotonAlgebra,
    BiphotonDensityMatrix,
    BiphotonState,
    JonesOperator,
    PolarizationAmplitudePair,
    TraceConvention,
)
from biphoton.core.elements import HoleArrayParams, OpticalElements
from biphoton.core.detection import CountRecord, DetectionConfig, Detector, Normalization

__all__ = [
    'BiphotonAlgebra',
    'BiphotonDensityMatrix',
    'BiphotonState',
    'JonesOperator',
    'PolarizationAmplitudePair',
    'TraceConvention',
    'HoleArrayParams',
    'OpticalElements',
    'CountRecord',
    'DetectionConfig',
    'Detector',
    'Normalization'
]
