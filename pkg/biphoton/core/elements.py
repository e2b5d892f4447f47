import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from biphoton.config import Config
from biphoton.core.states import (
    BiphotonAlgebra,
    BiphotonDensityMatrix,
    JonesOperator,
)
from biphoton.exceptions import InvalidArgumentError

logger = logging.getLogger(__name__)

COVARIANCE_TOL = 1e-12


def _validated_covariance(covariance) -> np.ndarray:
    cov = np.array(covariance, dtype=float)
    if cov.shape != (3, 3):
        raise InvalidArgumentError(f"Dephasing covariance must be 3x3, got shape {cov.shape}")
    if not np.all(np.isfinite(cov)):
        raise InvalidArgumentError("Dephasing covariance contains non-finite entries")
    if np.max(np.abs(cov - cov.T)) > COVARIANCE_TOL:
        raise InvalidArgumentError("Dephasing covariance is not symmetric")
    min_eig = np.linalg.eigvalsh(cov).min()
    if min_eig < -COVARIANCE_TOL * max(1.0, np.abs(cov).max()):
        raise InvalidArgumentError(f"Dephasing covariance is not positive semidefinite (min eigenvalue {min_eig:.3e})")
    cov.flags.writeable = False
    return cov


@dataclass(frozen=True, eq=False)
class HoleArrayParams:
    """Effective description of the perforated gold film at the working wavelength.

    dephasing_covariance is the covariance (rad^2) of the random phases added
    to the biphoton basis states (theta_HH, theta_HV, theta_VV).
    """

    transmittance_t: float = Config.TRANSMITTANCE
    birefringence_beta: float = Config.BIREFRINGENCE_BETA
    dephasing_covariance: np.ndarray = field(default_factory=lambda: np.zeros((3, 3)))
    period_nm: float = Config.ARRAY_PERIOD_NM
    hole_diameter_nm: float = Config.HOLE_DIAMETER_NM
    film_thickness_nm: float = Config.FILM_THICKNESS_NM

    def __post_init__(self):
        if not (0.0 < self.transmittance_t <= 1.0):
            raise InvalidArgumentError(f"Transmittance must lie in (0, 1], got {self.transmittance_t}")
        for name in ("period_nm", "hole_diameter_nm", "film_thickness_nm"):
            if getattr(self, name) <= 0:
                raise InvalidArgumentError(f"{name} must be positive")
        object.__setattr__(self, "dephasing_covariance", _validated_covariance(self.dephasing_covariance))

    def to_dict(self) -> Dict[str, str]:
        return {
            "transmittance_t": repr(float(self.transmittance_t)),
            "birefringence_beta": repr(float(self.birefringence_beta)),
            "dephasing_covariance": ", ".join(repr(float(x)) for x in self.dephasing_covariance.ravel()),
            "period_nm": repr(float(self.period_nm)),
            "hole_diameter_nm": repr(float(self.hole_diameter_nm)),
            "film_thickness_nm": repr(float(self.film_thickness_nm)),
        }

    @classmethod
    def from_dict(cls, values: Dict[str, str]) -> "HoleArrayParams":
        kwargs = {}
        for key in ("transmittance_t", "birefringence_beta", "period_nm", "hole_diameter_nm", "film_thickness_nm"):
            if key in values:
                kwargs[key] = float(values[key])
        if "dephasing_covariance" in values:
            entries = [float(x) for x in values["dephasing_covariance"].split(",")]
            if len(entries) != 9:
                raise InvalidArgumentError("dephasing_covariance needs 9 comma-separated values")
            kwargs["dephasing_covariance"] = np.array(entries).reshape(3, 3)
        return cls(**kwargs)


class OpticalElements:
    """Jones operators of the interferometer and the hole-array channel."""

    @staticmethod
    def hwp(theta: float) -> JonesOperator:
        """Half-wave plate with fast axis at theta (radians) from horizontal."""
        c, s = math.cos(2.0 * theta), math.sin(2.0 * theta)
        return JonesOperator.from_entries(c, s, s, -c)

    @staticmethod
    def phase_plate(delta_phi: float) -> JonesOperator:
        """Birefringent delay: V picks up delta_phi relative to H."""
        return JonesOperator.from_entries(1.0, 0.0, 0.0, np.exp(1j * delta_phi))

    @staticmethod
    def delta_l_to_phase(delta_l_nm: float, wavelength_nm: float) -> float:
        """Convert the optical path difference axis to a phase difference."""
        if wavelength_nm <= 0:
            raise InvalidArgumentError(f"Wavelength must be positive, got {wavelength_nm}")
        return 2.0 * math.pi * delta_l_nm / wavelength_nm

    @staticmethod
    def phase_to_delta_l(delta_phi: float, wavelength_nm: float) -> float:
        if wavelength_nm <= 0:
            raise InvalidArgumentError(f"Wavelength must be positive, got {wavelength_nm}")
        return delta_phi * wavelength_nm / (2.0 * math.pi)

    @staticmethod
    def hole_array_jones(p: HoleArrayParams) -> JonesOperator:
        """Polarization-independent loss plus quarter-wave-like birefringence.

        With the default beta = -pi/2, (|H>+|V>)/sqrt(2) leaves as (|H>-i|V>)/sqrt(2).
        """
        amp = math.sqrt(p.transmittance_t)
        return JonesOperator.from_entries(amp, 0.0, 0.0, amp * np.exp(1j * p.birefringence_beta))

    @staticmethod
    def dephasing_factors(covariance) -> np.ndarray:
        """Damping exp(-Var(theta_i - theta_j)/2) of each density-matrix entry."""
        cov = _validated_covariance(covariance)
        variances = np.diag(cov)
        var_diff = variances[:, None] + variances[None, :] - 2.0 * cov
        return np.exp(-0.5 * var_diff)

    @staticmethod
    def dephase(rho: BiphotonDensityMatrix, covariance) -> BiphotonDensityMatrix:
        """Average over jointly Gaussian random phases on the biphoton basis states."""
        damped = rho.rho * OpticalElements.dephasing_factors(covariance)
        return BiphotonDensityMatrix(damped, rho.trace_convention)

    @staticmethod
    def hole_array_channel(p: HoleArrayParams, rho: BiphotonDensityMatrix,
                           post_select: bool = False) -> BiphotonDensityMatrix:
        """Transmit a biphoton through the hole array.

        Args:
            p: Hole array parameters
            rho: Incident density matrix
            post_select: Renormalize onto transmitted pairs

        Returns:
            Output density matrix; its trace is t^2 times the input trace
            unless post-selected
        """
        transmitted = BiphotonAlgebra.apply_jones_density(OpticalElements.hole_array_jones(p), rho)
        out = OpticalElements.dephase(transmitted, p.dephasing_covariance)
        logger.debug(f"Hole array survival {out.trace:.6e} (input trace {rho.trace:.6e})")
        if post_select:
            return BiphotonAlgebra.renormalize(out)
        return out

    @staticmethod
    def sample_dephased_density(p: HoleArrayParams, rho: BiphotonDensityMatrix, n_samples: int,
                                rng: Optional[np.random.Generator] = None) -> BiphotonDensityMatrix:
        """Monte Carlo estimate of hole_array_channel by explicit phase sampling."""
        if n_samples < 1:
            raise InvalidArgumentError("n_samples must be at least 1")
        rng = rng if rng is not None else np.random.default_rng(Config.RANDOM_SEED)
        transmitted = BiphotonAlgebra.apply_jones_density(OpticalElements.hole_array_jones(p), rho)
        thetas = rng.multivariate_normal(np.zeros(3), p.dephasing_covariance, size=n_samples, method="eigh")
        phases = np.exp(1j * thetas)
        factors = np.einsum("ni,nj->ij", phases, phases.conj()) / n_samples
        out = transmitted.rho * factors
        return BiphotonDensityMatrix(0.5 * (out + out.conj().T), transmitted.trace_convention)

    @staticmethod
    def covariance_for_visibility(visibility: float) -> np.ndarray:
        """Covariance that damps the |2_H>-|2_V> coherence to the given visibility.

        All phase noise sits on |2_H>, so Var(theta_HH - theta_VV) = -2 ln(visibility).
        """
        if not (0.0 < visibility <= 1.0):
            raise InvalidArgumentError(f"Visibility must lie in (0, 1], got {visibility}")
        cov = np.zeros((3, 3))
        cov[0, 0] = -2.0 * math.log(visibility)
        return cov
