import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy.optimize import bisect

from biphoton.config import Config
from biphoton.exceptions import (
    InvalidArgumentError,
    InvalidInputError,
    NoModeError,
    NumericalError,
    OutOfRangeError,
    RangeError,
    RegimeError,
    SingularityError,
)
from biphoton.utils.file_io import FileHandler

logger = logging.getLogger(__name__)

OPTICAL_CONSTANTS_HEADER = ("wavelength_nm", "eps_real", "eps_imag")
SPECTRUM_HEADER = ("wavelength_nm", "transmittance")
SAMPLE_GOLD_TABLE = Path(__file__).resolve().parent.parent / "data" / "gold_johnson_christy.csv"
BETHE_PREFACTOR = 64.0 / (27.0 * math.pi ** 2)


class Interface(str, Enum):
    METAL_GLASS = "metal-glass"
    METAL_AIR = "metal-air"


_INTERFACE_RANK = {Interface.METAL_GLASS: 0, Interface.METAL_AIR: 1}


@dataclass(frozen=True)
class ResonanceMode:
    """Grating order (i, j) of a square hole lattice on one metal interface."""

    i: int
    j: int
    interface: Interface = Interface.METAL_GLASS

    def __post_init__(self):
        if (self.i, self.j) == (0, 0):
            raise InvalidArgumentError("Mode (0, 0) carries no grating momentum")
        object.__setattr__(self, "i", int(self.i))
        object.__setattr__(self, "j", int(self.j))
        object.__setattr__(self, "interface", Interface(self.interface))

    @property
    def order_squared(self) -> int:
        return self.i ** 2 + self.j ** 2

    def canonical(self) -> "ResonanceMode":
        a, b = abs(self.i), abs(self.j)
        return ResonanceMode(max(a, b), min(a, b), self.interface)

    def label(self) -> str:
        return f"({self.i},{self.j}) {self.interface.value}"


@dataclass(frozen=True, eq=False)
class OpticalConstants:
    """Tabulated metal permittivity plus the two dielectric half-spaces."""

    wavelength_nm: np.ndarray
    eps_metal: np.ndarray
    eps_glass: float = Config.EPS_GLASS
    eps_air: float = Config.EPS_AIR
    source: str = field(default="user table")

    def __post_init__(self):
        wl = np.array(self.wavelength_nm, dtype=float)
        eps = np.array(self.eps_metal, dtype=complex)
        if wl.ndim != 1 or wl.size < 2 or eps.shape != wl.shape:
            raise InvalidInputError("Optical constants need at least two (wavelength, eps) rows")
        if not (np.all(np.isfinite(wl)) and np.all(np.isfinite(eps))):
            raise InvalidInputError("Optical constants contain non-finite values")
        if np.any(wl <= 0) or np.any(np.diff(wl) <= 0):
            raise InvalidInputError("Wavelengths must be positive and strictly increasing")
        if self.eps_glass <= 0 or self.eps_air <= 0:
            raise InvalidArgumentError("Dielectric permittivities must be positive")
        wl.setflags(write=False)
        eps.setflags(write=False)
        object.__setattr__(self, "wavelength_nm", wl)
        object.__setattr__(self, "eps_metal", eps)

    @property
    def wavelength_range(self) -> Tuple[float, float]:
        return float(self.wavelength_nm[0]), float(self.wavelength_nm[-1])

    def eps_dielectric(self, interface: Interface) -> float:
        return self.eps_glass if Interface(interface) is Interface.METAL_GLASS else self.eps_air

    def eps_metal_at(self, wavelength_nm: float) -> complex:
        lo, hi = self.wavelength_range
        if not (lo <= wavelength_nm <= hi):
            raise OutOfRangeError(f"{wavelength_nm:.3f} nm is outside the optical-constant table [{lo}, {hi}]")
        re = np.interp(wavelength_nm, self.wavelength_nm, self.eps_metal.real)
        im = np.interp(wavelength_nm, self.wavelength_nm, self.eps_metal.imag)
        return complex(re, im)

    @classmethod
    def constant(cls, eps_metal: complex, wavelength_range=(300.0, 2000.0), **kwargs) -> "OpticalConstants":
        """Dispersionless metal over a wavelength window."""
        return cls(np.array(wavelength_range, dtype=float), np.full(2, eps_metal, dtype=complex),
                   source="constant", **kwargs)

    @classmethod
    def from_csv_text(cls, text: str, **kwargs) -> "OpticalConstants":
        table = FileHandler.parse_numeric_table(text, 3, OPTICAL_CONSTANTS_HEADER)
        return cls(table[:, 0], table[:, 1] + 1j * table[:, 2], **kwargs)

    @classmethod
    def from_csv(cls, path: Union[str, Path], **kwargs) -> "OpticalConstants":
        kwargs.setdefault("source", str(path))
        return cls.from_csv_text(FileHandler.read_text(path), **kwargs)

    @classmethod
    def sample_gold(cls, **kwargs) -> "OpticalConstants":
        """Third-party gold permittivity shipped with the package (not measured here)."""
        kwargs.setdefault("source", "sample gold table (third-party data)")
        return cls.from_csv(SAMPLE_GOLD_TABLE, **kwargs)


@dataclass(frozen=True, eq=False)
class SpectrumRecord:
    wavelength_nm: np.ndarray
    transmittance: np.ndarray

    def __post_init__(self):
        wl = np.array(self.wavelength_nm, dtype=float)
        tr = np.array(self.transmittance, dtype=float)
        if wl.ndim != 1 or wl.size < 2 or tr.shape != wl.shape:
            raise InvalidInputError("A spectrum needs at least two (wavelength, transmittance) rows")
        if np.any(np.diff(wl) <= 0):
            raise InvalidInputError("Spectrum wavelengths must be strictly increasing")
        if np.any(tr < 0) or np.any(tr > 1):
            raise InvalidInputError("Transmittance values must lie in [0, 1]")
        wl.setflags(write=False)
        tr.setflags(write=False)
        object.__setattr__(self, "wavelength_nm", wl)
        object.__setattr__(self, "transmittance", tr)


class PlasmonAnalyzer:
    """Momentum-matching resonance estimates and the classical aperture baseline."""

    @staticmethod
    def _bound_window(oc: OpticalConstants, eps_d: float) -> Tuple[float, float, bool]:
        """Longest-wavelength run of table rows with Re eps_m + eps_d < 0.

        The flag is True when the run does not cover the whole table.
        """
        bound = oc.eps_metal.real + eps_d < 0
        if not np.any(bound):
            raise SingularityError("No bound surface plasmon: Re(eps_m) + eps_d >= 0 over the whole table")
        end = int(np.flatnonzero(bound)[-1])
        start = end
        while start > 0 and bound[start - 1]:
            start -= 1
        if start == end:
            raise SingularityError(
                f"Bound region collapses to a single table row at {oc.wavelength_nm[end]:.2f} nm")
        blocked = start > 0 or end < bound.size - 1
        return float(oc.wavelength_nm[start]), float(oc.wavelength_nm[end]), blocked

    @staticmethod
    def resonance_wavelength(mode: ResonanceMode, period_nm: float, oc: OpticalConstants) -> float:
        """
        Solve lambda = (P / sqrt(i^2 + j^2)) * Re sqrt(eps_m eps_d / (eps_m + eps_d)).

        Damped fixed-point iteration with bisection fallback.

        Args:
            mode: Grating order and interface
            period_nm: Lattice period P
            oc: Optical constants (eps_m interpolated linearly)

        Returns:
            Resonance wavelength in nm, equation residual below Config.RESONANCE_TOL_NM
        """
        if period_nm <= 0:
            raise InvalidArgumentError(f"Period must be positive, got {period_nm}")
        eps_d = oc.eps_dielectric(mode.interface)
        scale = period_nm / math.sqrt(mode.order_squared)
        lo, hi, blocked = PlasmonAnalyzer._bound_window(oc, eps_d)

        def matched(lam: float) -> float:
            eps_m = oc.eps_metal_at(lam)
            return scale * float(np.sqrt(eps_m * eps_d / (eps_m + eps_d)).real)

        tol = Config.RESONANCE_TOL_NM
        lam = float(np.clip(scale * math.sqrt(eps_d), lo, hi))
        pinned = 0
        for iteration in range(Config.FIXED_POINT_MAX_ITER):
            target = matched(lam)
            if abs(target - lam) < tol:
                logger.debug(f"{mode.label()}: fixed point {lam:.4f} nm after {iteration} iterations")
                return lam
            step = lam + Config.FIXED_POINT_DAMPING * (target - lam)
            clipped = float(np.clip(step, lo, hi))
            pinned = pinned + 1 if clipped != step else 0
            if pinned >= 3:
                break
            lam = clipped

        logger.debug(f"{mode.label()}: fixed point did not settle, bisecting on [{lo:.2f}, {hi:.2f}] nm")
        f_lo, f_hi = matched(lo) - lo, matched(hi) - hi
        if f_lo * f_hi > 0:
            if blocked:
                raise SingularityError(
                    f"{mode.label()}: solution blocked by the Re(eps_m) + eps_d = 0 crossing")
            raise OutOfRangeError(f"{mode.label()}: no resonance inside [{lo:.2f}, {hi:.2f}] nm")
        return float(bisect(lambda x: matched(x) - x, lo, hi, xtol=tol / 10.0))

    @staticmethod
    def _enumerate_modes(max_order: int) -> List[ResonanceMode]:
        if max_order < 1:
            raise InvalidArgumentError(f"max_order must be at least 1, got {max_order}")
        modes = []
        for interface in (Interface.METAL_GLASS, Interface.METAL_AIR):
            for i in range(1, max_order + 1):
                for j in range(0, i + 1):
                    if i ** 2 + j ** 2 <= max_order ** 2:
                        modes.append(ResonanceMode(i, j, interface))
        return modes

    @staticmethod
    def mode_table(period_nm: float, oc: OpticalConstants,
                   max_order: int) -> List[Tuple[ResonanceMode, Optional[float]]]:
        """Resonance of every canonical mode; None where the solver fails."""
        table = []
        for mode in PlasmonAnalyzer._enumerate_modes(max_order):
            try:
                table.append((mode, PlasmonAnalyzer.resonance_wavelength(mode, period_nm, oc)))
            except NumericalError as e:
                logger.warning(f"Skipping mode {mode.label()}: {e}")
                table.append((mode, None))
        return table

    @staticmethod
    def nearest_mode(wavelength_nm: float, period_nm: float, oc: OpticalConstants,
                     max_order: int) -> Tuple[ResonanceMode, float]:
        if wavelength_nm <= 0:
            raise InvalidArgumentError(f"Wavelength must be positive, got {wavelength_nm}")
        candidates = [
            (abs(lam - wavelength_nm), mode.order_squared, _INTERFACE_RANK[mode.interface], mode)
            for mode, lam in PlasmonAnalyzer.mode_table(period_nm, oc, max_order)
            if lam is not None
        ]
        if not candidates:
            raise NoModeError(f"No resonance converged for period {period_nm} nm up to order {max_order}")
        distance, _, _, mode = min(candidates, key=lambda c: c[:3])
        logger.info(f"Nearest mode to {wavelength_nm} nm: {mode.label()} at distance {distance:.2f} nm")
        return mode, float(distance)

    @staticmethod
    def bethe_transmission(hole_diameter_nm: float, wavelength_nm: float, period_nm: float) -> float:
        """Classical small-aperture transmittance per unit cell, (64 / 27 pi^2) (kr)^4 pi r^2 / P^2."""
        if hole_diameter_nm <= 0 or wavelength_nm <= 0 or period_nm <= 0:
            raise InvalidArgumentError("Diameter, wavelength and period must all be positive")
        if hole_diameter_nm >= wavelength_nm:
            raise RegimeError(
                f"Bethe theory needs a subwavelength hole (d={hole_diameter_nm} nm, lambda={wavelength_nm} nm)")
        r = hole_diameter_nm / 2.0
        kr = 2.0 * math.pi / wavelength_nm * r
        return BETHE_PREFACTOR * kr ** 4 * math.pi * r ** 2 / period_nm ** 2

    @staticmethod
    def ingest_spectrum(document: str) -> SpectrumRecord:
        """Parse `wavelength_nm,transmittance` text (comments and header allowed)."""
        table = FileHandler.parse_numeric_table(document, 2, SPECTRUM_HEADER)
        return SpectrumRecord(table[:, 0], table[:, 1])

    @staticmethod
    def transmittance_at(spectrum: SpectrumRecord, wavelength_nm: float) -> float:
        lo, hi = float(spectrum.wavelength_nm[0]), float(spectrum.wavelength_nm[-1])
        if not (lo <= wavelength_nm <= hi):
            raise RangeError(f"{wavelength_nm} nm is outside the measured range [{lo}, {hi}]")
        return float(np.interp(wavelength_nm, spectrum.wavelength_nm, spectrum.transmittance))

    @staticmethod
    def enhancement_at(spectrum: SpectrumRecord, wavelength_nm: float, classical: float) -> float:
        """Measured over classical transmittance at one wavelength."""
        if classical <= 0:
            raise InvalidArgumentError(f"Classical transmittance must be positive, got {classical}")
        return PlasmonAnalyzer.transmittance_at(spectrum, wavelength_nm) / classical
