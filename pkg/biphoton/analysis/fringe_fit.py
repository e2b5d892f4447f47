import logging
import math
from dataclasses import dataclass
from functools import partial
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from biphoton.config import Config
from biphoton.exceptions import (
    BracketingError,
    IdentifiabilityError,
    InvalidArgumentError,
    InvalidFitError,
)
from biphoton.utils.parallel import ParallelProcessor

logger = logging.getLogger(__name__)

N_LINEAR_PARAMS = 3
RANK_RTOL = 1e-9
AMPLITUDE_RTOL = 1e-10
WEIGHTINGS = ("none", "poisson")


def canonical_phase(phi: float, snap_tol: float = Config.PHASE_SNAP_TOL) -> float:
    """Map a phase onto (-pi, pi]; values within snap_tol of -pi become +pi."""
    if -math.pi < phi <= math.pi:
        wrapped = phi
    else:
        wrapped = math.pi - math.fmod(math.pi - phi, 2.0 * math.pi)
        if wrapped > math.pi:
            wrapped -= 2.0 * math.pi
    if wrapped <= -math.pi + snap_tol:
        wrapped = math.pi
    return wrapped


@dataclass(frozen=True)
class FringeModel:
    """y = offset_c + polarity * amplitude_a * cos(2 pi dL / period_nm + phase0).

    polarity -1 is the (1 - cos) form used for HH coincidences.
    """

    offset_c: float
    amplitude_a: float
    phase0: float
    period_nm: float
    polarity: int = 1
    phase_defined: bool = True

    def __post_init__(self):
        if self.amplitude_a < 0:
            raise InvalidArgumentError("Amplitude must be nonnegative; fold the sign into phase0")
        if self.period_nm <= 0:
            raise InvalidArgumentError(f"Period must be positive, got {self.period_nm}")
        if self.polarity not in (1, -1):
            raise InvalidArgumentError(f"Polarity must be +1 or -1, got {self.polarity}")
        object.__setattr__(self, "phase0", canonical_phase(float(self.phase0)))

    def evaluate(self, delta_l_nm) -> np.ndarray:
        x = np.asarray(delta_l_nm, dtype=float)
        return self.offset_c + self.polarity * self.amplitude_a * np.cos(2.0 * np.pi * x / self.period_nm + self.phase0)


@dataclass(frozen=True)
class FringeFit:
    model: FringeModel
    residual_rms: float
    n_points: int
    weighting: str = "none"

    def __post_init__(self):
        if self.residual_rms < 0:
            raise InvalidArgumentError("residual_rms must be nonnegative")
        if self.n_points < N_LINEAR_PARAMS:
            raise InvalidArgumentError("A fit needs at least as many points as free parameters")

    @property
    def visibility(self) -> float:
        """A/C clamped to [0, 1] for reporting."""
        if self.model.offset_c <= 0:
            return 0.0
        return float(min(1.0, max(0.0, self.model.amplitude_a / self.model.offset_c)))

    def to_report(self) -> Dict[str, Any]:
        m = self.model
        return {
            "offset": float(m.offset_c),
            "amplitude": float(m.amplitude_a),
            "phase0_rad": float(m.phase0),
            "phase0_over_pi": float(m.phase0 / math.pi),
            "period_nm": float(m.period_nm),
            "polarity": int(m.polarity),
            "visibility": self.visibility,
            "residual_rms": float(self.residual_rms),
            "n_points": int(self.n_points),
        }


def _as_xy(data) -> Tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise InvalidArgumentError("Fringe data must be a sequence of (delta_l_nm, rate) pairs")
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError("Fringe data contains non-finite values")
    return arr[:, 0], arr[:, 1]


def _weights(y: np.ndarray, weighting: str) -> np.ndarray:
    if weighting == "none":
        return np.ones_like(y)
    if weighting == "poisson":
        return 1.0 / np.maximum(y, 1.0)
    raise InvalidArgumentError(f"Unknown weighting '{weighting}', expected one of {WEIGHTINGS}")


def _check_sampling(x: np.ndarray) -> None:
    if x.size < N_LINEAR_PARAMS + 1:
        raise IdentifiabilityError(f"Need at least {N_LINEAR_PARAMS + 1} points, got {x.size}")
    if np.unique(x).size < N_LINEAR_PARAMS:
        raise IdentifiabilityError("Need at least 3 distinct delta_l values")


def _solve_linear(x: np.ndarray, y: np.ndarray, w: np.ndarray, period_nm: float):
    """Weighted least squares for (C, p, q) in y = C + p cos(kx) + q sin(kx).

    Returns None when the design is rank deficient.
    """
    k = 2.0 * np.pi / period_nm
    design = np.column_stack([np.ones_like(x), np.cos(k * x), np.sin(k * x)])
    sw = np.sqrt(w)
    weighted = design * sw[:, None]
    singular = np.linalg.svd(weighted, compute_uv=False)
    if singular[-1] <= RANK_RTOL * singular[0]:
        return None
    coef, *_ = np.linalg.lstsq(weighted, y * sw, rcond=None)
    residual = y - design @ coef
    return coef, residual


def _grid_objective(x: np.ndarray, y: np.ndarray, w: np.ndarray, period_nm: float) -> float:
    solved = _solve_linear(x, y, w, period_nm)
    if solved is None:
        return math.inf
    _, residual = solved
    return float(np.sqrt(np.mean(w * residual ** 2)))


class FringeFitter:
    """Separable least-squares fits of two-photon interference fringes."""

    @staticmethod
    def _build_fit(x, y, w, period_nm: float, polarity: int, weighting: str) -> FringeFit:
        solved = _solve_linear(x, y, w, period_nm)
        if solved is None:
            raise IdentifiabilityError(
                f"Design is rank deficient at period {period_nm} nm (all points at the same phase?)")
        (offset, p, q), residual = solved
        amplitude = math.hypot(p, q)
        scale = float(np.max(np.abs(y))) if y.size else 0.0
        phase_defined = amplitude > AMPLITUDE_RTOL * scale
        if phase_defined:
            phase0 = math.atan2(-polarity * q, polarity * p)
        else:
            amplitude, phase0 = 0.0, 0.0
        model = FringeModel(
            offset_c=float(offset),
            amplitude_a=float(amplitude),
            phase0=phase0,
            period_nm=float(period_nm),
            polarity=polarity,
            phase_defined=phase_defined,
        )
        rms = float(np.sqrt(np.mean(residual ** 2)))
        return FringeFit(model=model, residual_rms=rms, n_points=int(x.size), weighting=weighting)

    @staticmethod
    def fit_fixed_period(data: Sequence[Tuple[float, float]], period_nm: float, harmonic: int = 1,
                         polarity: int = 1, weighting: str = "none") -> FringeFit:
        """Fit a fringe of known period by linear least squares.

        Args:
            data: (delta_l_nm, rate) pairs
            period_nm: Base period; the fitted fringe period is period_nm / harmonic
            harmonic: 2 with period_nm = wavelength gives the biphoton 2*delta_phi fringe
            polarity: +1 for (1 + cos) fringes, -1 for (1 - cos) fringes
            weighting: "none" or "poisson" (1 / max(y, 1))

        Returns:
            FringeFit with canonical phase0
        """
        if period_nm <= 0 or harmonic < 1:
            raise InvalidArgumentError("Period must be positive and harmonic at least 1")
        x, y = _as_xy(data)
        fringe_period = period_nm / harmonic
        _check_sampling(x)
        if np.ptp(x) < fringe_period / 2.0:
            raise IdentifiabilityError(
                f"Scan span {np.ptp(x):.3f} nm covers less than half the {fringe_period:.3f} nm period")
        fit = FringeFitter._build_fit(x, y, _weights(y, weighting), fringe_period, polarity, weighting)
        logger.debug(f"Fixed-period fit: period={fringe_period:.6f} nm phase0={fit.model.phase0 / math.pi:.4f} pi "
                     f"rms={fit.residual_rms:.3e}")
        return fit

    @staticmethod
    def fit_free_period(data: Sequence[Tuple[float, float]],
                        period_grid: Tuple[float, float, float] = Config.PERIOD_GRID,
                        polarity: int = 1, weighting: str = "none",
                        n_cores: Optional[int] = None) -> FringeFit:
        """Fit a fringe with unknown period (the de Broglie wavelength readout).

        Every grid period gets its linear solve; the best grid point is refined
        by golden-section search on the residual.

        Args:
            data: (delta_l_nm, rate) pairs
            period_grid: (min_nm, max_nm, step_nm)
            polarity: +1 or -1 as in fit_fixed_period
            weighting: "none" or "poisson"
            n_cores: Worker processes for the grid (default Config.NUM_CORES)

        Returns:
            FringeFit whose model period is the fringe period in delta L
        """
        lo, hi, step = (float(v) for v in period_grid)
        if lo <= 0 or hi <= lo or step <= 0:
            raise InvalidArgumentError(f"Invalid period grid {period_grid}")
        x, y = _as_xy(data)
        _check_sampling(x)
        w = _weights(y, weighting)

        grid = np.arange(lo, hi + step / 2.0, step)
        if grid.size < 3:
            raise BracketingError("Period grid needs at least three points")
        objective = partial(_grid_objective, x, y, w)
        values = np.array(ParallelProcessor.parallel_map(objective, list(grid), n_cores=n_cores))
        if not np.any(np.isfinite(values)):
            raise IdentifiabilityError("Design is rank deficient at every grid period")

        best = int(np.argmin(values))
        if best == 0 or best == grid.size - 1:
            raise BracketingError(
                f"Residual minimum at grid edge ({grid[best]:.3f} nm); widen or refine the period grid")

        best_period, best_value = float(grid[best]), float(values[best])
        try:
            refined = minimize_scalar(
                objective,
                bracket=(float(grid[best - 1]), best_period, float(grid[best + 1])),
                method="golden",
                tol=Config.PERIOD_RTOL,
            )
        except ValueError as e:
            raise BracketingError(f"Golden-section refinement could not bracket the minimum: {e}") from e
        if np.isfinite(refined.fun) and refined.fun <= best_value:
            best_period = float(refined.x)
        logger.info(f"Free-period fit: grid minimum {grid[best]:.3f} nm refined to {best_period:.6f} nm")

        if np.ptp(x) < best_period / 2.0:
            raise IdentifiabilityError("Scan span covers less than half the fitted period")
        return FringeFitter._build_fit(x, y, w, best_period, polarity, weighting)

    @staticmethod
    def extract_visibility(fit: FringeFit) -> float:
        """Raw A/C of a fitted fringe (the coherence damping factor for C(1 +/- V cos))."""
        if fit.model.offset_c <= 0:
            raise InvalidFitError(f"Fit offset {fit.model.offset_c!r} is not positive")
        return float(fit.model.amplitude_a / fit.model.offset_c)
