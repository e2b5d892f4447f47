import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from biphoton.config import Config
from biphoton.core.states import BiphotonDensityMatrix
from biphoton.exceptions import (
    InvalidArgumentError,
    InvalidStateError,
    UndefinedVisibilityError,
)

logger = logging.getLogger(__name__)

COUNT_RECORD_HEADER = ("delta_l_nm", "counts_hv", "counts_hh", "integration_s")
NORMALIZED_TRACE_TOL = 1e-9


class Normalization(str, Enum):
    PAPER = "paper"          # per ordered outcome: HV and VH each carry half, peak 1/4 in a/4 units
    PHYSICAL = "physical"    # total coincidence probability, peak 1/2


@dataclass(frozen=True)
class CountRecord:
    delta_l_nm: float
    counts_hv: int
    counts_hh: int
    integration_s: float

    def __post_init__(self):
        if self.integration_s <= 0:
            raise InvalidArgumentError(f"integration_s must be positive, got {self.integration_s}")
        if self.counts_hv < 0 or self.counts_hh < 0:
            raise InvalidArgumentError("Counts must be nonnegative")

    def as_row(self) -> Tuple[float, int, int, float]:
        return (float(self.delta_l_nm), int(self.counts_hv), int(self.counts_hh), float(self.integration_s))


@dataclass(frozen=True)
class DetectionConfig:
    pair_rate_hz: float = Config.PAIR_RATE_HZ
    seed: Optional[int] = None                  # None reads Config.RANDOM_SEED at construction
    normalization: Normalization = Normalization(Config.NORMALIZATION)
    background_rate_hz: float = Config.BACKGROUND_RATE_HZ

    def __post_init__(self):
        if self.pair_rate_hz <= 0:
            raise InvalidArgumentError(f"pair_rate_hz must be positive, got {self.pair_rate_hz}")
        if self.background_rate_hz < 0:
            raise InvalidArgumentError("background_rate_hz must be nonnegative")
        if self.seed is None:
            object.__setattr__(self, "seed", Config.RANDOM_SEED)
        if not (0 <= int(self.seed) < 2 ** 64):
            raise InvalidArgumentError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "normalization", Normalization(self.normalization))

    def to_dict(self) -> Dict[str, str]:
        return {
            "pair_rate_hz": repr(float(self.pair_rate_hz)),
            "seed": str(self.seed),
            "normalization": self.normalization.value,
            "background_rate_hz": repr(float(self.background_rate_hz)),
        }

    @classmethod
    def from_dict(cls, values: Dict[str, str]) -> "DetectionConfig":
        kwargs = {}
        for key in ("pair_rate_hz", "background_rate_hz"):
            if key in values:
                kwargs[key] = float(values[key])
        if "seed" in values:
            kwargs["seed"] = int(values["seed"])
        if "normalization" in values:
            kwargs["normalization"] = Normalization(values["normalization"].strip())
        return cls(**kwargs)


def _require_normalized(rho: BiphotonDensityMatrix) -> None:
    if abs(rho.trace - 1.0) > NORMALIZED_TRACE_TOL:
        raise InvalidStateError(f"Detection needs a trace-normalized state, got trace {rho.trace!r}")


class Detector:
    """Projections onto the PBS / beam-splitter coincidence outcomes and count sampling."""

    @staticmethod
    def pbs_coincidence_prob(rho: BiphotonDensityMatrix,
                             normalization: Normalization = Normalization.PHYSICAL) -> float:
        """Coincidence behind the PBS, i.e. projection on |1_H 1_V>.

        Args:
            rho: Post-selected density matrix
            normalization: PHYSICAL returns P(1H1V); PAPER returns half of it

        Returns:
            Coincidence probability per detected pair
        """
        _require_normalized(rho)
        p11 = float(rho.rho[1, 1].real)
        if Normalization(normalization) is Normalization.PAPER:
            return p11 / 2.0
        return p11

    @staticmethod
    def hh_coincidence_prob(rho: BiphotonDensityMatrix) -> float:
        """Coincidence of two H photons split by a 50:50 beam splitter, (1/2) P(2H)."""
        _require_normalized(rho)
        return 0.5 * float(rho.rho[0, 0].real)

    @staticmethod
    def sample_counts(prob: float, cfg: DetectionConfig, integration_s: float, counter: int = 0) -> int:
        """Draw a Poisson count for one detection channel.

        The generator is keyed by (cfg.seed, counter), so the same inputs
        always give the same count independent of evaluation order.
        """
        if not (0.0 <= prob <= 1.0):
            raise InvalidArgumentError(f"Probability must lie in [0, 1], got {prob}")
        if integration_s <= 0:
            raise InvalidArgumentError(f"integration_s must be positive, got {integration_s}")
        if counter < 0:
            raise InvalidArgumentError("counter must be nonnegative")
        mean = (prob * cfg.pair_rate_hz + cfg.background_rate_hz) * integration_s
        rng = np.random.default_rng([cfg.seed, counter])
        return int(rng.poisson(mean))

    @staticmethod
    def visibility(curve: Sequence[Tuple[float, float]]) -> float:
        """Fringe contrast (max - min) / (max + min) of a sampled curve."""
        values = np.array([rate for _, rate in curve], dtype=float)
        if values.size < 2:
            raise InvalidArgumentError("Visibility needs at least two points")
        hi, lo = values.max(), values.min()
        if hi + lo == 0.0:
            raise UndefinedVisibilityError("Visibility is undefined for an all-zero curve")
        return float((hi - lo) / (hi + lo))

