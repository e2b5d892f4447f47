"""Tests for optical elements and the hole-array channel."""

import math

import numpy as np
import pytest

from biphoton.core.detection import Detector
from biphoton.core.elements import HoleArrayParams, OpticalElements
from biphoton.core.states import (
    BiphotonAlgebra,
    JonesOperator,
    PolarizationAmplitudePair,
    TraceConvention,
)
from biphoton.exceptions import InvalidArgumentError


@pytest.mark.parametrize("theta", [0.0, 0.3, math.pi / 8, 1.2, -0.7])
def test_hwp_is_involution(theta):
    hwp = OpticalElements.hwp(theta)
    np.testing.assert_allclose((hwp @ hwp).matrix, np.eye(2), atol=1e-15)


def test_phase_plate():
    np.testing.assert_allclose(OpticalElements.phase_plate(math.pi / 2).matrix, np.diag([1, 1j]), atol=1e-16)


def test_delta_l_to_phase():
    assert OpticalElements.delta_l_to_phase(351.0, 702.0) == pytest.approx(math.pi)
    assert OpticalElements.phase_to_delta_l(math.pi, 702.0) == pytest.approx(351.0)
    with pytest.raises(InvalidArgumentError):
        OpticalElements.delta_l_to_phase(1.0, 0.0)
    with pytest.raises(InvalidArgumentError):
        OpticalElements.phase_to_delta_l(1.0, -702.0)


def test_hole_array_jones_is_quarter_wave_like():
    p = HoleArrayParams()
    diagonal = PolarizationAmplitudePair(1 / math.sqrt(2), 1 / math.sqrt(2))
    out = OpticalElements.hole_array_jones(p).apply_single(diagonal)
    amp = math.sqrt(p.transmittance_t / 2)
    assert out.h == pytest.approx(amp)
    assert out.v == pytest.approx(-1j * amp)


@pytest.mark.parametrize("t", [1.0, 0.5, 0.032])
def test_hole_array_flips_noon_coherence(t):
    noon = BiphotonAlgebra.apply_jones(OpticalElements.hwp(math.radians(22.5)), BiphotonAlgebra.make_hv_pair())
    out = BiphotonAlgebra.apply_jones(OpticalElements.hole_array_jones(HoleArrayParams(transmittance_t=t)), noon)
    np.testing.assert_allclose(out.amplitudes, [t / math.sqrt(2), 0.0, t / math.sqrt(2)], atol=1e-14)


def test_survival_is_transmittance_squared(superposed_density):
    p = HoleArrayParams(transmittance_t=0.032)
    out = OpticalElements.hole_array_channel(p, superposed_density)
    assert out.trace_convention is TraceConvention.UNNORMALIZED
    assert abs(out.trace - 1.024e-3 * superposed_density.trace) < 1e-12


def test_survival_with_dephasing_unchanged(superposed_density):
    p = HoleArrayParams(transmittance_t=0.5, dephasing_covariance=np.diag([0.4, 0.1, 0.9]))
    out = OpticalElements.hole_array_channel(p, superposed_density)
    assert abs(out.trace - 0.25) < 1e-12


def test_post_select_renormalizes(superposed_density):
    out = OpticalElements.hole_array_channel(HoleArrayParams(), superposed_density, post_select=True)
    assert out.trace_convention is TraceConvention.POST_SELECTED
    assert out.trace == pytest.approx(1.0, abs=1e-12)


def test_zero_covariance_matches_pure_evolution():
    p = HoleArrayParams(transmittance_t=0.2, birefringence_beta=0.4)
    s = BiphotonAlgebra.apply_jones(OpticalElements.hwp(0.3), BiphotonAlgebra.make_hv_pair())
    channel = OpticalElements.hole_array_channel(p, BiphotonAlgebra.to_density(s))
    pure = BiphotonAlgebra.to_density(BiphotonAlgebra.apply_jones(OpticalElements.hole_array_jones(p), s))
    np.testing.assert_allclose(channel.rho, pure.rho, atol=1e-12)


def test_dephasing_damps_noon_coherence(superposed_density):
    s2 = 0.8
    p = HoleArrayParams(transmittance_t=1.0, birefringence_beta=0.0, dephasing_covariance=np.diag([s2, 0, 0]))
    out = OpticalElements.hole_array_channel(p, superposed_density)
    assert abs(out.rho[0, 2]) == pytest.approx(0.5 * math.exp(-s2 / 2), abs=1e-12)
    np.testing.assert_allclose(out.populations, superposed_density.populations, atol=1e-15)


def test_correlated_phases_cancel():
    cov = np.ones((3, 3))
    factors = OpticalElements.dephasing_factors(cov)
    np.testing.assert_allclose(factors, np.ones((3, 3)), atol=1e-15)


def test_channel_output_is_psd_for_random_covariance(superposed_density):
    min_eigs = []
    for seed in range(100):
        g = np.random.default_rng(seed).normal(size=(3, 3))
        cov = 9.0 * g @ g.T
        p = HoleArrayParams(dephasing_covariance=(cov + cov.T) / 2)
        out = OpticalElements.hole_array_channel(p, superposed_density)
        np.testing.assert_allclose(out.rho, out.rho.conj().T, atol=1e-12)
        min_eigs.append(np.linalg.eigvalsh(out.rho).min())
    assert min(min_eigs) >= -1e-10


def test_non_psd_covariance_rejected():
    with pytest.raises(InvalidArgumentError):
        HoleArrayParams(dephasing_covariance=np.diag([1.0, -1.0, 0.0]))
    with pytest.raises(InvalidArgumentError):
        HoleArrayParams(dephasing_covariance=np.array([[0, 1, 0], [0, 0, 0], [0, 0, 0]]))
    with pytest.raises(InvalidArgumentError):
        OpticalElements.dephasing_factors(np.eye(2))


@pytest.mark.parametrize("kwargs", [
    {"transmittance_t": 0.0},
    {"transmittance_t": 1.5},
    {"period_nm": -600.0},
    {"hole_diameter_nm": 0.0},
])
def test_hole_array_params_validation(kwargs):
    with pytest.raises(InvalidArgumentError):
        HoleArrayParams(**kwargs)


def test_hole_array_params_dict_round_trip():
    p = HoleArrayParams(transmittance_t=0.05, dephasing_covariance=np.diag([0.25, 0.0, 0.1]))
    again = HoleArrayParams.from_dict(p.to_dict())
    assert again.to_dict() == p.to_dict()
    np.testing.assert_array_equal(again.dephasing_covariance, p.dephasing_covariance)


@pytest.mark.parametrize("beta", [0.0, 1.0, -math.pi / 2, 2.5])
def test_birefringence_is_global_phase_on_hv(beta, hv_density):
    p = HoleArrayParams(birefringence_beta=beta)
    out = OpticalElements.hole_array_channel(p, hv_density, post_select=True)
    np.testing.assert_allclose(out.rho, hv_density.rho, atol=1e-12)
    assert Detector.pbs_coincidence_prob(out) == pytest.approx(1.0, abs=1e-12)


def test_sampled_dephasing_matches_closed_form(superposed_density):
    p = HoleArrayParams(transmittance_t=1.0, dephasing_covariance=np.array([
        [0.6, 0.1, 0.0],
        [0.1, 0.3, 0.05],
        [0.0, 0.05, 0.4],
    ]))
    exact = OpticalElements.hole_array_channel(p, superposed_density)
    sampled = OpticalElements.sample_dephased_density(p, superposed_density, 40000, np.random.default_rng(3))
    np.testing.assert_allclose(sampled.rho, exact.rho, atol=0.02)


def test_covariance_for_visibility():
    cov = OpticalElements.covariance_for_visibility(0.93)
    assert OpticalElements.dephasing_factors(cov)[0, 2] == pytest.approx(0.93, abs=1e-12)
    np.testing.assert_array_equal(OpticalElements.covariance_for_visibility(1.0), np.zeros((3, 3)))
    with pytest.raises(InvalidArgumentError):
        OpticalElements.covariance_for_visibility(0.0)


def test_jones_operator_of_array_is_passive():
    j = OpticalElements.hole_array_jones(HoleArrayParams(transmittance_t=1.0))
    assert isinstance(j, JonesOperator)
    assert j.is_unitary()
