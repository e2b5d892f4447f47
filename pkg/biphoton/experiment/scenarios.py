import configparser
import io
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from biphoton.analysis.fringe_fit import FringeFit
from biphoton.config import Config
from biphoton.core.detection import CountRecord, DetectionConfig
from biphoton.core.elements import HoleArrayParams
from biphoton.exceptions import InvalidArgumentError

logger = logging.getLogger(__name__)

SCAN_COLUMNS = ("delta_l_nm", "rate_hv", "rate_hh")
FIT_PERIODS = ("fixed", "free")
FIT_WEIGHTINGS = ("auto", "none", "poisson")


class Scenario(str, Enum):
    NO_PLATE = "no_plate"
    PLATE_HWP_FIRST = "plate_hwp_first"
    PLATE_HWP_AFTER = "plate_hwp_after"


class Mode(str, Enum):
    ANALYTIC = "analytic"
    MONTE_CARLO = "monte_carlo"

    @classmethod
    def _missing_(cls, value):
        if isinstance(value, str) and value.strip().lower() == "mc":
            return cls.MONTE_CARLO
        return None


def _enum(kind, value):
    try:
        return kind(value)
    except ValueError:
        choices = ", ".join(m.value for m in kind)
        raise InvalidArgumentError(f"Unknown {kind.__name__.lower()} '{value}' (expected one of: {choices})") from None


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything that defines one scan; INI-serializable."""

    scenario: Scenario = Scenario.NO_PLATE
    mode: Mode = Mode.ANALYTIC
    hole_array: HoleArrayParams = field(default_factory=HoleArrayParams)
    detection: DetectionConfig = field(default_factory=DetectionConfig)
    scan_min_nm: float = Config.SCAN_MIN_NM
    scan_max_nm: float = Config.SCAN_MAX_NM
    scan_points: int = Config.SCAN_POINTS
    wavelength_nm: float = Config.WAVELENGTH_NM
    integration_s: float = Config.INTEGRATION_S
    hwp_angle_deg: float = Config.HWP_ANGLE_DEG
    baseline_visibility: float = Config.BASELINE_VISIBILITY
    post_select: bool = True
    fit_period: str = "fixed"
    fit_weighting: str = "auto"
    period_grid: Tuple[float, float, float] = Config.PERIOD_GRID
    n_workers: int = Config.NUM_CORES

    def __post_init__(self):
        object.__setattr__(self, "scenario", _enum(Scenario, self.scenario))
        object.__setattr__(self, "mode", _enum(Mode, self.mode))
        if int(self.scan_points) < 4:
            raise InvalidArgumentError(f"A scan needs at least 4 points, got {self.scan_points}")
        if self.scan_max_nm == self.scan_min_nm:
            raise InvalidArgumentError("Scan range is empty")
        if self.wavelength_nm <= 0:
            raise InvalidArgumentError(f"Wavelength must be positive, got {self.wavelength_nm}")
        if self.integration_s <= 0:
            raise InvalidArgumentError(f"integration_s must be positive, got {self.integration_s}")
        if not (0.0 < self.baseline_visibility <= 1.0):
            raise InvalidArgumentError(f"baseline_visibility must lie in (0, 1], got {self.baseline_visibility}")
        if self.fit_period not in FIT_PERIODS:
            raise InvalidArgumentError(f"fit_period must be one of {FIT_PERIODS}, got '{self.fit_period}'")
        if self.fit_weighting not in FIT_WEIGHTINGS:
            raise InvalidArgumentError(f"fit_weighting must be one of {FIT_WEIGHTINGS}, got '{self.fit_weighting}'")
        if len(self.period_grid) != 3:
            raise InvalidArgumentError("period_grid needs (min, max, step)")
        if self.n_workers < 0:
            raise InvalidArgumentError("n_workers must be nonnegative (0 = auto)")
        object.__setattr__(self, "scan_points", int(self.scan_points))
        object.__setattr__(self, "n_workers", int(self.n_workers))
        object.__setattr__(self, "period_grid", tuple(float(v) for v in self.period_grid))

    def scan_positions(self) -> np.ndarray:
        return np.linspace(self.scan_min_nm, self.scan_max_nm, self.scan_points)

    def resolved_weighting(self) -> str:
        """'auto' weights Monte Carlo counts as Poisson and leaves analytic curves unweighted."""
        if self.fit_weighting != "auto":
            return self.fit_weighting
        return "poisson" if self.mode is Mode.MONTE_CARLO else "none"

    def to_ini(self) -> str:
        parser = configparser.ConfigParser()
        parser["scenario"] = {
            "scenario": self.scenario.value,
            "mode": self.mode.value,
            "wavelength_nm": repr(float(self.wavelength_nm)),
            "hwp_angle_deg": repr(float(self.hwp_angle_deg)),
            "baseline_visibility": repr(float(self.baseline_visibility)),
            "post_select": "true" if self.post_select else "false",
            "integration_s": repr(float(self.integration_s)),
            "n_workers": str(self.n_workers),
        }
        parser["hole_array"] = self.hole_array.to_dict()
        parser["detection"] = self.detection.to_dict()
        parser["scan"] = {
            "min_nm": repr(float(self.scan_min_nm)),
            "max_nm": repr(float(self.scan_max_nm)),
            "n_points": str(self.scan_points),
        }
        parser["fit"] = {
            "period": self.fit_period,
            "weighting": self.fit_weighting,
            "period_grid": ", ".join(repr(v) for v in self.period_grid),
        }
        buffer = io.StringIO()
        parser.write(buffer)
        return buffer.getvalue()

    @classmethod
    def from_ini(cls, text: str) -> "ScenarioConfig":
        """Parse an INI document; absent keys keep their Config defaults."""
        parser = configparser.ConfigParser()
        try:
            parser.read_string(text)
        except configparser.Error as e:
            raise InvalidArgumentError(f"Malformed config document: {e}") from e
        return cls.from_parser(parser)

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "ScenarioConfig":
        try:
            parser = Config.read_ini(path)
        except FileNotFoundError as e:
            raise InvalidArgumentError(str(e)) from e
        except configparser.Error as e:
            raise InvalidArgumentError(f"Malformed config file '{path}': {e}") from e
        return cls.from_parser(parser)

    @classmethod
    def from_parser(cls, parser: configparser.ConfigParser) -> "ScenarioConfig":
        kwargs: Dict[str, Any] = {}
        try:
            if parser.has_section("scenario"):
                section = parser["scenario"]
                for key in ("scenario", "mode"):
                    if key in section:
                        kwargs[key] = section[key].strip()
                for key in ("wavelength_nm", "hwp_angle_deg", "baseline_visibility", "integration_s"):
                    if key in section:
                        kwargs[key] = section.getfloat(key)
                if "post_select" in section:
                    kwargs["post_select"] = section.getboolean("post_select")
                if "n_workers" in section:
                    kwargs["n_workers"] = section.getint("n_workers")
            if parser.has_section("hole_array"):
                kwargs["hole_array"] = HoleArrayParams.from_dict(dict(parser["hole_array"]))
            if parser.has_section("detection"):
                kwargs["detection"] = DetectionConfig.from_dict(dict(parser["detection"]))
            if parser.has_section("scan"):
                section = parser["scan"]
                if "min_nm" in section:
                    kwargs["scan_min_nm"] = section.getfloat("min_nm")
                if "max_nm" in section:
                    kwargs["scan_max_nm"] = section.getfloat("max_nm")
                if "n_points" in section:
                    kwargs["scan_points"] = section.getint("n_points")
            if parser.has_section("fit"):
                section = parser["fit"]
                if "period" in section:
                    kwargs["fit_period"] = section["period"].strip()
                if "weighting" in section:
                    kwargs["fit_weighting"] = section["weighting"].strip()
                if "period_grid" in section:
                    kwargs["period_grid"] = tuple(float(v) for v in section["period_grid"].split(","))
        except ValueError as e:
            if isinstance(e, InvalidArgumentError):
                raise
            raise InvalidArgumentError(f"Invalid config value: {e}") from e
        unknown = set(parser.sections()) - {"scenario", "hole_array", "detection", "scan", "fit"}
        if unknown:
            logger.warning(f"Ignoring unknown config sections: {sorted(unknown)}")
        return cls(**kwargs)


@dataclass
class ScanResult:
    """Output of one scenario run.

    rows holds (delta_l_nm, rate_hv, rate_hh) per scan point; in Monte Carlo
    mode the rates are the sampled counts, also kept as CountRecords.
    """

    scenario: Scenario
    mode: Mode
    rows: List[Tuple[float, float, float]]
    survival: np.ndarray
    records: List[CountRecord] = field(default_factory=list)
    fits: Dict[str, FringeFit] = field(default_factory=dict)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def curve(self, channel: str) -> List[Tuple[float, float]]:
        column = {"hv": 1, "hh": 2}.get(channel)
        if column is None:
            raise InvalidArgumentError(f"Unknown channel '{channel}', expected 'hv' or 'hh'")
        return [(row[0], row[column]) for row in self.rows]

    def fit_report(self) -> Dict[str, Any]:
        """Timestamp-free summary suitable for JSON output."""
        return {
            "scenario": self.scenario.value,
            "mode": self.mode.value,
            "seed": self.metadata.get("seed"),
            "normalization": self.metadata.get("normalization"),
            "survival_mean": float(np.mean(self.survival)),
            "fits": {name: fit.to_report() for name, fit in sorted(self.fits.items())},
        }

    def fit_for(self, channel: str) -> Optional[FringeFit]:
        return self.fits.get(channel)
