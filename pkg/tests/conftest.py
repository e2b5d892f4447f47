import math

import numpy as np
import pytest

from biphoton.core.elements import HoleArrayParams, OpticalElements
from biphoton.core.states import BiphotonAlgebra
from biphoton.experiment.scenarios import ScenarioConfig


@pytest.fixture
def hv_density():
    return BiphotonAlgebra.to_density(BiphotonAlgebra.make_hv_pair())


@pytest.fixture
def superposed_density(hv_density):
    """|HV> after the 22.5 deg half-wave plate: (|2H> - |2V>)/sqrt(2)."""
    return BiphotonAlgebra.apply_jones_density(OpticalElements.hwp(math.radians(22.5)), hv_density)


@pytest.fixture
def lossless_array():
    return HoleArrayParams(transmittance_t=1.0, birefringence_beta=0.0)


@pytest.fixture
def scan_x():
    return np.linspace(0.0, 800.0, 81)


@pytest.fixture
def base_config():
    return ScenarioConfig()
