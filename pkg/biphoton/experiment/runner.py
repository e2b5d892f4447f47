import logging
import math
from dataclasses import replace
from datetime import datetime
from functools import partial
from pathlib import Path
from typing import Dict, Tuple, Union

import numpy as np

from biphoton.analysis.fringe_fit import FringeFit, FringeFitter, canonical_phase
from biphoton.core.detection import COUNT_RECORD_HEADER, CountRecord, Detector
from biphoton.core.elements import OpticalElements
from biphoton.core.states import BiphotonAlgebra, BiphotonDensityMatrix
from biphoton.exceptions import InvalidInputError
from biphoton.experiment.scenarios import SCAN_COLUMNS, Mode, ScanResult, Scenario, ScenarioConfig
from biphoton.utils.file_io import FileHandler
from biphoton.utils.parallel import ParallelProcessor

logger = logging.getLogger(__name__)

CHANNEL_POLARITY = {"hv": 1, "hh": -1}


def _baseline(cfg: ScenarioConfig, rho: BiphotonDensityMatrix) -> BiphotonDensityMatrix:
    if cfg.baseline_visibility >= 1.0:
        return rho
    return OpticalElements.dephase(rho, OpticalElements.covariance_for_visibility(cfg.baseline_visibility))


def _through_array(cfg: ScenarioConfig, rho: BiphotonDensityMatrix) -> Tuple[BiphotonDensityMatrix, float]:
    incoming = rho.trace
    out = OpticalElements.hole_array_channel(cfg.hole_array, rho)
    return BiphotonAlgebra.renormalize(out), out.trace / incoming


def _prepare(cfg: ScenarioConfig) -> Tuple[BiphotonDensityMatrix, float]:
    """State entering the scanned phase plate, and the pair survival probability."""
    hwp = OpticalElements.hwp(math.radians(cfg.hwp_angle_deg))
    rho = BiphotonAlgebra.to_density(BiphotonAlgebra.make_hv_pair())
    survival = 1.0
    if cfg.scenario is Scenario.NO_PLATE:
        rho = _baseline(cfg, BiphotonAlgebra.apply_jones_density(hwp, rho))
    elif cfg.scenario is Scenario.PLATE_HWP_FIRST:
        rho = _baseline(cfg, BiphotonAlgebra.apply_jones_density(hwp, rho))
        rho, survival = _through_array(cfg, rho)
    else:
        rho, survival = _through_array(cfg, rho)
        rho = _baseline(cfg, BiphotonAlgebra.apply_jones_density(hwp, rho))
    return rho, survival


def _evaluate_point(cfg: ScenarioConfig, delta_l_nm: float) -> Tuple[float, float, float, float]:
    """Coincidence probabilities per pair at one scan position (runs in worker processes)."""
    rho, survival = _prepare(cfg)
    phase = OpticalElements.delta_l_to_phase(delta_l_nm, cfg.wavelength_nm)
    rho = BiphotonAlgebra.apply_jones_density(OpticalElements.phase_plate(phase), rho)
    rho = BiphotonAlgebra.apply_jones_density(OpticalElements.hwp(math.radians(cfg.hwp_angle_deg)), rho)
    p_hv = Detector.pbs_coincidence_prob(rho, cfg.detection.normalization)
    p_hh = Detector.hh_coincidence_prob(rho)
    scale = 1.0 if cfg.post_select else survival
    return float(delta_l_nm), p_hv * scale, p_hh * scale, survival


class ExperimentRunner:
    """Runs the three hole-array configurations and fits their fringes."""

    @staticmethod
    def run_scenario(cfg: ScenarioConfig) -> ScanResult:
        """
        Scan the phase plate and fit both coincidence channels.

        Args:
            cfg: Scenario configuration

        Returns:
            ScanResult with per-point rates (probabilities per pair, or counts
            in Monte Carlo mode), survival probabilities and HV / HH fits
        """
        started = datetime.now().isoformat(timespec="seconds")
        logger.info(f"Running {cfg.scenario.value} ({cfg.mode.value}, {cfg.scan_points} points)")

        positions = [float(x) for x in cfg.scan_positions()]
        points = ParallelProcessor.parallel_map(partial(_evaluate_point, cfg), positions, n_cores=cfg.n_workers)
        survival = np.array([p[3] for p in points])

        records = []
        if cfg.mode is Mode.MONTE_CARLO:
            for i, (delta_l, p_hv, p_hh, _) in enumerate(points):
                records.append(CountRecord(
                    delta_l_nm=delta_l,
                    counts_hv=Detector.sample_counts(min(max(p_hv, 0.0), 1.0), cfg.detection,
                                                     cfg.integration_s, counter=2 * i),
                    counts_hh=Detector.sample_counts(min(max(p_hh, 0.0), 1.0), cfg.detection,
                                                     cfg.integration_s, counter=2 * i + 1),
                    integration_s=cfg.integration_s,
                ))
            rows = [(r.delta_l_nm, float(r.counts_hv), float(r.counts_hh)) for r in records]
        else:
            rows = [(delta_l, p_hv, p_hh) for delta_l, p_hv, p_hh, _ in points]

        result = ScanResult(
            scenario=cfg.scenario,
            mode=cfg.mode,
            rows=rows,
            survival=survival,
            records=records,
            metadata={
                "scenario": cfg.scenario.value,
                "mode": cfg.mode.value,
                "seed": cfg.detection.seed,
                "normalization": cfg.detection.normalization.value,
                "started": started,
            },
        )
        result.fits = ExperimentRunner.fit_channels(result, cfg)
        result.metadata["finished"] = datetime.now().isoformat(timespec="seconds")
        logger.info(f"{cfg.scenario.value}: phase0 HV {result.fits['hv'].model.phase0 / math.pi:+.4f} pi, "
                    f"HH {result.fits['hh'].model.phase0 / math.pi:+.4f} pi")
        return result

    @staticmethod
    def fit_channels(result: ScanResult, cfg: ScenarioConfig) -> Dict[str, FringeFit]:
        """Fit HV as (1 + cos) and HH as (1 - cos) fringes."""
        weighting = cfg.resolved_weighting()
        fits = {}
        for channel, polarity in CHANNEL_POLARITY.items():
            curve = result.curve(channel)
            if cfg.fit_period == "free":
                fits[channel] = FringeFitter.fit_free_period(curve, cfg.period_grid, polarity=polarity,
                                                             weighting=weighting, n_cores=cfg.n_workers)
            else:
                fits[channel] = FringeFitter.fit_fixed_period(curve, cfg.wavelength_nm, harmonic=2,
                                                              polarity=polarity, weighting=weighting)
        return fits

    @staticmethod
    def compare_cases(r1: ScanResult, r2: ScanResult) -> Dict[str, float]:
        """Per-channel phase0 difference r1 - r2 in units of pi, canonicalized to (-1, 1]."""
        report = {}
        for channel in CHANNEL_POLARITY:
            if channel not in r1.fits or channel not in r2.fits:
                raise InvalidInputError(f"Both results need a '{channel}' fit to compare")
            delta = r1.fits[channel].model.phase0 - r2.fits[channel].model.phase0
            report[channel] = canonical_phase(delta) / math.pi
        return report

    @staticmethod
    def run_all(cfg: ScenarioConfig) -> Dict[Scenario, ScanResult]:
        return {scenario: ExperimentRunner.run_scenario(replace(cfg, scenario=scenario)) for scenario in Scenario}

    @staticmethod
    def write_outputs(result: ScanResult, out_dir: Union[str, Path], stem: str = "") -> Tuple[Path, Path]:
        """Write the scan CSV and the fit JSON; returns their paths."""
        out_dir = Path(out_dir)
        stem = stem or result.scenario.value
        csv_path = out_dir / f"{stem}.csv"
        if result.mode is Mode.MONTE_CARLO:
            FileHandler.save_table_csv([r.as_row() for r in result.records], COUNT_RECORD_HEADER, csv_path)
        else:
            FileHandler.save_table_csv(result.rows, SCAN_COLUMNS, csv_path)
        json_path = FileHandler.save_json(result.fit_report(), out_dir / f"{stem}_fit.json")
        return csv_path, json_path
