"""Tests for fringe fitting and the de Broglie wavelength readout."""

import math

import numpy as np
import pytest

from biphoton.analysis.fringe_fit import FringeFit, FringeFitter, FringeModel, canonical_phase
from biphoton.exceptions import BracketingError, IdentifiabilityError, InvalidArgumentError, InvalidFitError


def fringe(x, offset, amplitude, phase0, period, polarity=1):
    return offset + polarity * amplitude * np.cos(2.0 * np.pi * np.asarray(x) / period + phase0)


def as_curve(x, y):
    return list(zip(np.asarray(x, dtype=float).tolist(), np.asarray(y, dtype=float).tolist()))


@pytest.mark.parametrize("phi, expected", [
    (math.pi, math.pi),
    (-math.pi, math.pi),
    (3 * math.pi, math.pi),
    (-math.pi / 2, -math.pi / 2),
    (5 * math.pi / 2, math.pi / 2),
    (-math.pi + 1e-12, math.pi),
    (0.0, 0.0),
])
def test_canonical_phase(phi, expected):
    assert canonical_phase(phi) == pytest.approx(expected, abs=1e-12)


def test_canonical_phase_is_idempotent():
    for phi in np.linspace(-10, 10, 41):
        once = canonical_phase(phi)
        assert canonical_phase(once) == once
        assert -math.pi < once <= math.pi


def test_model_canonicalizes_phase():
    assert FringeModel(1.0, 0.5, -math.pi, 351.0).phase0 == math.pi
    with pytest.raises(InvalidArgumentError):
        FringeModel(1.0, -0.5, 0.0, 351.0)
    with pytest.raises(InvalidArgumentError):
        FringeModel(1.0, 0.5, 0.0, 351.0, polarity=2)


@pytest.mark.parametrize("phase0", [0.0, 0.7, -2.1, math.pi])
def test_fixed_period_noiseless_round_trip(scan_x, phase0):
    y = fringe(scan_x, 2.0, 1.5, phase0, 351.0)
    fit = FringeFitter.fit_fixed_period(as_curve(scan_x, y), 702.0, harmonic=2)
    assert fit.residual_rms < 1e-9
    assert fit.model.offset_c == pytest.approx(2.0, abs=1e-9)
    assert fit.model.amplitude_a == pytest.approx(1.5, abs=1e-9)
    assert fit.model.phase0 == pytest.approx(canonical_phase(phase0), abs=1e-9)
    assert fit.model.period_nm == 351.0


def test_negative_polarity_fits_one_minus_cos(scan_x):
    y = fringe(scan_x, 0.125, 0.125, 0.3, 351.0, polarity=-1)
    fit = FringeFitter.fit_fixed_period(as_curve(scan_x, y), 351.0, polarity=-1)
    assert fit.model.phase0 == pytest.approx(0.3, abs=1e-9)
    assert fit.model.polarity == -1
    np.testing.assert_allclose(fit.model.evaluate(scan_x), y, atol=1e-12)


def test_fit_is_scale_invariant(scan_x):
    y = fringe(scan_x, 1.0, 0.8, 1.1, 351.0)
    base = FringeFitter.fit_fixed_period(as_curve(scan_x, y), 351.0)
    scaled = FringeFitter.fit_fixed_period(as_curve(scan_x, 7.0 * y), 351.0)
    assert scaled.model.phase0 == pytest.approx(base.model.phase0, abs=1e-12)
    assert scaled.model.offset_c == pytest.approx(7.0 * base.model.offset_c, rel=1e-12)
    assert scaled.visibility == pytest.approx(base.visibility, abs=1e-12)


def test_flat_data_has_undefined_phase(scan_x):
    fit = FringeFitter.fit_fixed_period(as_curve(scan_x, np.full_like(scan_x, 3.0)), 351.0)
    assert not fit.model.phase_defined
    assert fit.model.amplitude_a == 0.0
    assert FringeFitter.extract_visibility(fit) == 0.0


def test_identifiability_errors():
    with pytest.raises(IdentifiabilityError):
        FringeFitter.fit_fixed_period([(0.0, 1.0), (100.0, 2.0), (200.0, 1.0)], 351.0)
    with pytest.raises(IdentifiabilityError):
        FringeFitter.fit_fixed_period([(0.0, 1.0), (0.0, 2.0), (100.0, 1.0), (100.0, 2.0)], 351.0)
    with pytest.raises(IdentifiabilityError):
        FringeFitter.fit_fixed_period([(0.0, 1.0), (10.0, 2.0), (20.0, 1.0), (30.0, 2.0)], 351.0)


def test_rank_deficient_design():
    x = np.array([0.0, 351.0, 702.0, 1053.0])
    with pytest.raises(IdentifiabilityError):
        FringeFitter.fit_fixed_period(as_curve(x, [1.0, 1.1, 0.9, 1.0]), 351.0)


def test_invalid_fit_arguments(scan_x):
    curve = as_curve(scan_x, fringe(scan_x, 1.0, 0.5, 0.0, 351.0))
    with pytest.raises(InvalidArgumentError):
        FringeFitter.fit_fixed_period(curve, -351.0)
    with pytest.raises(InvalidArgumentError):
        FringeFitter.fit_fixed_period(curve, 351.0, weighting="chi2")
    with pytest.raises(InvalidArgumentError):
        FringeFitter.fit_fixed_period([(0.0, 1.0, 2.0)], 351.0)


def test_free_period_recovers_biphoton_wavelength(scan_x):
    y = 0.5 * (1.0 + np.cos(4.0 * np.pi * scan_x / 702.0))
    fit = FringeFitter.fit_free_period(as_curve(scan_x, y))
    assert fit.model.period_nm == pytest.approx(351.0, abs=0.1)


def test_free_period_recovers_single_photon_wavelength(scan_x):
    y = 0.5 * (1.0 + np.cos(2.0 * np.pi * scan_x / 702.0))
    fit = FringeFitter.fit_free_period(as_curve(scan_x, y))
    assert fit.model.period_nm == pytest.approx(702.0, abs=0.2)


def test_free_period_off_grid(scan_x):
    y = fringe(scan_x, 1.0, 0.6, 0.4, 412.37)
    fit = FringeFitter.fit_free_period(as_curve(scan_x, y))
    assert fit.model.period_nm == pytest.approx(412.37, abs=1e-3)
    assert fit.model.phase0 == pytest.approx(0.4, abs=1e-3)


def test_free_residual_not_worse_than_fixed(scan_x):
    rng = np.random.default_rng(4)
    y = fringe(scan_x, 1000.0, 900.0, 0.2, 352.0) + rng.normal(0.0, 20.0, scan_x.size)
    free = FringeFitter.fit_free_period(as_curve(scan_x, y))
    fixed = FringeFitter.fit_fixed_period(as_curve(scan_x, y), 702.0, harmonic=2)
    assert free.residual_rms <= fixed.residual_rms + 1e-12


def test_free_period_edge_minimum(scan_x):
    y = fringe(scan_x, 1.0, 0.5, 0.0, 351.0)
    with pytest.raises(BracketingError):
        FringeFitter.fit_free_period(as_curve(scan_x, y), period_grid=(351.0, 400.0, 0.5))
    with pytest.raises(BracketingError):
        FringeFitter.fit_free_period(as_curve(scan_x, y), period_grid=(340.0, 341.0, 0.5))


def test_free_period_parallel_matches_sequential(scan_x):
    y = fringe(scan_x, 1.0, 0.6, 0.4, 412.37)
    sequential = FringeFitter.fit_free_period(as_curve(scan_x, y), n_cores=1)
    parallel = FringeFitter.fit_free_period(as_curve(scan_x, y), n_cores=2)
    assert parallel.model.period_nm == sequential.model.period_nm
    assert parallel.to_report() == sequential.to_report()


def test_poisson_weighting_runs(scan_x):
    y = fringe(scan_x, 1000.0, 950.0, 0.0, 351.0)
    fit = FringeFitter.fit_fixed_period(as_curve(scan_x, np.round(y)), 351.0, weighting="poisson")
    assert fit.weighting == "poisson"
    assert fit.visibility == pytest.approx(0.95, abs=1e-3)


def test_extract_visibility_requires_positive_offset():
    fit = FringeFit(FringeModel(-1.0, 0.5, 0.0, 351.0), residual_rms=0.0, n_points=10)
    with pytest.raises(InvalidFitError):
        FringeFitter.extract_visibility(fit)
    assert fit.visibility == 0.0


def test_report_keys(scan_x):
    fit = FringeFitter.fit_fixed_period(as_curve(scan_x, fringe(scan_x, 1.0, 0.5, math.pi, 351.0)), 351.0)
    report = fit.to_report()
    assert set(report) == {"offset", "amplitude", "phase0_rad", "phase0_over_pi", "period_nm", "polarity",
                           "visibility", "residual_rms", "n_points"}
    assert report["phase0_over_pi"] == pytest.approx(1.0, abs=1e-9)
    assert report["n_points"] == 81
