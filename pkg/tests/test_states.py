"""Tests for biphoton states and the symmetric-square lift."""

import dataclasses
import math

import numpy as np
import pytest
from scipy.stats import unitary_group

from biphoton.core.elements import OpticalElements
from biphoton.core.states import (
    BiphotonAlgebra,
    BiphotonDensityMatrix,
    BiphotonState,
    JonesOperator,
    PolarizationAmplitudePair,
    TraceConvention,
)
from biphoton.exceptions import InvalidArgumentError, InvalidStateError

SEEDS = [0, 1, 2, 3, 4]
N_RANDOM = 100


def random_jones(seed):
    return JonesOperator(unitary_group.rvs(2, random_state=seed))


def random_state(seed):
    rng = np.random.default_rng(seed)
    amps = rng.normal(size=3) + 1j * rng.normal(size=3)
    return BiphotonState.from_amplitudes(amps / np.linalg.norm(amps), normalized=True)


def test_make_hv_pair():
    s = BiphotonAlgebra.make_hv_pair()
    assert s.normalized
    np.testing.assert_array_equal(s.amplitudes, [0, 1, 0])


def test_lift_is_multiplicative():
    errors = []
    for seed in range(N_RANDOM):
        j1, j2 = random_jones(seed), random_jones(seed + N_RANDOM)
        lhs = BiphotonAlgebra.symmetric_square(j1 @ j2)
        rhs = BiphotonAlgebra.symmetric_square(j1) @ BiphotonAlgebra.symmetric_square(j2)
        errors.append(np.abs(lhs - rhs).max())
    assert max(errors) < 1e-10


@pytest.mark.parametrize("seed", SEEDS)
def test_lift_of_unitary_is_unitary(seed):
    m = BiphotonAlgebra.symmetric_square(random_jones(seed))
    np.testing.assert_allclose(m.conj().T @ m, np.eye(3), atol=1e-12)


def test_lift_of_lossy_operator_is_not_unitary():
    m = BiphotonAlgebra.symmetric_square(JonesOperator(0.5 * np.eye(2)))
    assert not np.allclose(m.conj().T @ m, np.eye(3))


def test_lift_determinant_is_cube():
    errors = []
    for seed in range(N_RANDOM):
        j = random_jones(seed)
        det_m = np.linalg.det(BiphotonAlgebra.symmetric_square(j))
        errors.append(abs(det_m - np.linalg.det(j.matrix) ** 3))
    assert max(errors) < 1e-10


@pytest.mark.parametrize("seed", SEEDS)
def test_lift_determinant_is_cube_for_lossy_operators(seed):
    rng = np.random.default_rng(seed)
    raw = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    j = JonesOperator(raw / (1.01 * np.linalg.norm(raw, ord=2)))
    det_m = np.linalg.det(BiphotonAlgebra.symmetric_square(j))
    assert abs(det_m - np.linalg.det(j.matrix) ** 3) < 1e-10


def test_identity_lift_round_trip_is_bitwise():
    s = random_state(7)
    out = BiphotonAlgebra.apply_jones(JonesOperator.identity(), s)
    assert np.array_equal(out.amplitudes, s.amplitudes)
    assert out.normalized


@pytest.mark.parametrize("seed", SEEDS)
def test_unitary_preserves_norm(seed):
    out = BiphotonAlgebra.apply_jones(random_jones(seed), random_state(seed))
    assert abs(out.norm_squared - 1.0) < 1e-12
    assert out.normalized


def test_lossy_operator_clears_normalized_flag():
    out = BiphotonAlgebra.apply_jones(JonesOperator(0.5 * np.eye(2)), BiphotonAlgebra.make_hv_pair())
    assert not out.normalized
    assert out.norm_squared == pytest.approx(0.0625, abs=1e-15)
    assert BiphotonAlgebra.to_density(out).trace_convention is TraceConvention.UNNORMALIZED


def test_half_wave_plate_makes_noon_state():
    out = BiphotonAlgebra.apply_jones(OpticalElements.hwp(math.radians(22.5)), BiphotonAlgebra.make_hv_pair())
    np.testing.assert_allclose(out.amplitudes, [1 / math.sqrt(2), 0, -1 / math.sqrt(2)], atol=1e-15)


@pytest.mark.parametrize("delta_phi", [0.0, 0.4, math.pi / 3, 2.0, -1.1])
def test_lift_of_phase_plate_is_diagonal(delta_phi):
    m = BiphotonAlgebra.symmetric_square(OpticalElements.phase_plate(delta_phi))
    expected = np.diag([1.0, np.exp(1j * delta_phi), np.exp(2j * delta_phi)])
    np.testing.assert_allclose(m, expected, atol=1e-15)


@pytest.mark.parametrize("delta_phi", [0.0, 0.4, math.pi / 3, 2.0, -1.1])
def test_second_half_wave_plate_amplitudes(delta_phi):
    hwp = OpticalElements.hwp(math.radians(22.5))
    s = BiphotonAlgebra.apply_jones(hwp, BiphotonAlgebra.make_hv_pair())
    s = BiphotonAlgebra.apply_jones(OpticalElements.phase_plate(delta_phi), s)
    out = BiphotonAlgebra.apply_jones(hwp, s)
    e = np.exp(2j * delta_phi)
    side = (1 - e) * math.sqrt(2) / 4
    np.testing.assert_allclose(out.amplitudes, [side, (1 + e) / 2, side], atol=1e-14)


def test_phase_plate_at_pi_leaves_noon_state():
    noon = BiphotonAlgebra.apply_jones(OpticalElements.hwp(math.radians(22.5)), BiphotonAlgebra.make_hv_pair())
    out = BiphotonAlgebra.apply_jones(OpticalElements.phase_plate(math.pi), noon)
    np.testing.assert_allclose(out.amplitudes, noon.amplitudes, atol=1e-14)


def test_noon_density_coherence():
    noon = BiphotonAlgebra.apply_jones(OpticalElements.hwp(math.radians(22.5)), BiphotonAlgebra.make_hv_pair())
    rho = BiphotonAlgebra.to_density(noon).rho
    assert rho[0, 2] == pytest.approx(-0.5, abs=1e-15)
    assert rho[2, 0] == pytest.approx(-0.5, abs=1e-15)
    np.testing.assert_allclose(np.diag(rho).real, [0.5, 0.0, 0.5], atol=1e-15)


def test_to_density_convention():
    rho = BiphotonAlgebra.to_density(BiphotonAlgebra.make_hv_pair())
    assert rho.trace_convention is TraceConvention.POST_SELECTED
    assert rho.trace == 1.0


def test_density_is_read_only(hv_density):
    with pytest.raises(ValueError):
        hv_density.rho[0, 0] = 1.0
    with pytest.raises(dataclasses.FrozenInstanceError):
        hv_density.trace_convention = TraceConvention.UNNORMALIZED


def test_density_rejects_non_hermitian():
    rho = np.array([[0.5, 0.5, 0], [0, 0.5, 0], [0, 0, 0]])
    with pytest.raises(InvalidStateError):
        BiphotonDensityMatrix(rho)


def test_density_rejects_wrong_trace():
    with pytest.raises(InvalidStateError):
        BiphotonDensityMatrix(np.diag([0.5, 0.2, 0.0]), TraceConvention.POST_SELECTED)


def test_renormalize_post_selects():
    rho = BiphotonDensityMatrix(np.diag([0.1, 0.3, 0.0]), TraceConvention.UNNORMALIZED)
    out = BiphotonAlgebra.renormalize(rho)
    assert out.trace_convention is TraceConvention.POST_SELECTED
    np.testing.assert_allclose(out.populations, [0.25, 0.75, 0.0])


def test_renormalize_zero_trace_fails():
    rho = BiphotonDensityMatrix(np.zeros((3, 3)), TraceConvention.UNNORMALIZED)
    with pytest.raises(InvalidStateError):
        BiphotonAlgebra.renormalize(rho)


@pytest.mark.parametrize("seed", SEEDS)
def test_state_probabilities_sum_to_one(seed):
    rho = BiphotonAlgebra.apply_jones_density(random_jones(seed),
                                              BiphotonAlgebra.to_density(random_state(seed)))
    assert sum(BiphotonAlgebra.state_probabilities(rho)) == pytest.approx(1.0, abs=1e-12)


def test_apply_jones_density_matches_pure_state(superposed_density):
    s = BiphotonAlgebra.apply_jones(OpticalElements.hwp(math.radians(22.5)), BiphotonAlgebra.make_hv_pair())
    np.testing.assert_allclose(superposed_density.rho, BiphotonAlgebra.to_density(s).rho, atol=1e-15)


def test_non_passive_operator_rejected():
    with pytest.raises(InvalidArgumentError):
        JonesOperator(2.0 * np.eye(2))
    with pytest.raises(InvalidArgumentError):
        JonesOperator(np.eye(3))


def test_zero_pair_requires_absorbed_marker():
    with pytest.raises(InvalidArgumentError):
        PolarizationAmplitudePair(0.0, 0.0)
    marker = PolarizationAmplitudePair.absorbed_marker()
    assert marker.absorbed and marker.norm_squared == 0.0


def test_apply_single_absorbs_explicitly():
    out = JonesOperator(np.zeros((2, 2))).apply_single(PolarizationAmplitudePair(1.0, 0.0))
    assert out.absorbed


def test_apply_single_global_phase():
    pair = PolarizationAmplitudePair(1 / math.sqrt(2), 1 / math.sqrt(2))
    out = JonesOperator(np.exp(0.3j) * np.eye(2)).apply_single(pair)
    assert out.equals_up_to_global_phase(pair)
    assert not out.equals_up_to_global_phase(PolarizationAmplitudePair(1.0, 0.0))


def test_normalized_flag_checked():
    with pytest.raises(InvalidStateError):
        BiphotonState(1.0, 1.0, 0.0, normalized=True)
