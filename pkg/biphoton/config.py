import os
import math
import logging
import configparser
from pathlib import Path
from typing import Optional, Union

from biphoton.exceptions import InvalidArgumentError

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

# === BIPHOTON HOLE-ARRAY SIMULATOR CONFIGURATION ===
class Config:
    # --- Source & Interferometer ---
    WAVELENGTH_NM = 702.0                                # Down-converted photon wavelength
    HWP_ANGLE_DEG = 22.5                                 # Fast-axis angle of both half-wave plates
    BASELINE_VISIBILITY = 1.0                            # Interferometer contrast without the hole array

    # --- Hole Array ---
    TRANSMITTANCE = 0.032                                # Per-photon intensity transmittance at 702 nm
    BIREFRINGENCE_BETA = -math.pi / 2                    # Phase of V relative to H (rad)
    ARRAY_PERIOD_NM = 600.0                              # Square lattice period
    HOLE_DIAMETER_NM = 200.0                             # Cylindrical hole diameter
    FILM_THICKNESS_NM = 135.0                            # Gold film thickness

    # --- Detection ---
    PAIR_RATE_HZ = 2000.0                                # Detected pairs per second at unit probability
    INTEGRATION_S = 1.0                                  # Integration time per scan point
    BACKGROUND_RATE_HZ = 0.0                             # Flat background (pump background neglected)
    NORMALIZATION = "physical"                           # "physical" | "paper"

    # --- Scan ---
    SCAN_MIN_NM = 0.0                                    # Delta L range start
    SCAN_MAX_NM = 800.0                                  # Delta L range end
    SCAN_POINTS = 81                                     # Number of scan points

    # --- Fringe Fitting ---
    PERIOD_GRID = (300.0, 800.0, 0.5)                    # (min, max, step) for free-period fits (nm)
    PERIOD_RTOL = 1e-12                                  # Golden-section relative tolerance on the period
    PHASE_SNAP_TOL = 1e-9                                # Phases this close to -pi are reported as +pi

    # --- Plasmon Resonance ---
    EPS_GLASS = 2.13                                     # Silica substrate permittivity (n ~ 1.46)
    EPS_AIR = 1.0
    FIXED_POINT_DAMPING = 0.5
    FIXED_POINT_MAX_ITER = 200
    RESONANCE_TOL_NM = 0.01
    CLASSICAL_TRANSMITTANCE = 0.0055                     # Quoted classical baseline at 702 nm

    # --- Parallelization ---
    NUM_CORES = 1                                        # >1 evaluates scan points and period grids in a process pool

    # --- Reproducibility & Output ---
    RANDOM_SEED = 1
    OUTPUT_DIR = "output"

    @classmethod
    def setup(cls, output_dir: Optional[Union[str, Path]] = None) -> Path:
        """Create output directory if needed."""
        target = Path(output_dir or cls.OUTPUT_DIR)
        try:
            os.makedirs(target, exist_ok=True)
            logger.info(f"Output directory '{target}' ready")
        except OSError as e:
            logger.error(f"Error creating output directory '{target}': {e}")
            raise
        return target

    @classmethod
    def set_seed(cls, seed: Optional[int] = None) -> None:
        """Set the seed used for Monte Carlo counting.

        Counts are drawn from generators keyed by (seed, scan counter), so a
        fixed seed reproduces every sampled dataset bit for bit regardless of
        how scan points are scheduled across worker processes.

        Args:
            seed: Non-negative integer below 2**64. If None, keeps the current seed.
        """
        if seed is None:
            logger.info(f"Keeping configured seed {cls.RANDOM_SEED}")
            return
        if seed < 0 or seed >= 2 ** 64:
            raise InvalidArgumentError(f"Seed must be an unsigned 64-bit integer, got {seed}")
        cls.RANDOM_SEED = seed
        logger.info(f"Random seed set to: {seed}")

    @staticmethod
    def read_ini(path: Union[str, Path]) -> configparser.ConfigParser:
        """Read an INI experiment document.

        Args:
            path: Path to the config file

        Returns:
            Parsed ConfigParser (sections may be missing; callers fall back to defaults)
        """
        parser = configparser.ConfigParser()
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Config file '{path}' not found")
        parser.read(path, encoding="utf-8")
        logger.info(f"Loaded config '{path}' with sections {parser.sections()}")
        return parser



# --- Parameter Documentation ---
"""
Parameter Overview:

- Source & Interferometer:
    WAVELENGTH_NM: Photon wavelength; the biphoton fringe period in Delta L is half of it.
    HWP_ANGLE_DEG: Both half-wave plates; 22.5 deg maps |HV> to (|HH>-|VV>)/sqrt(2).
    BASELINE_VISIBILITY: Contrast of the bare interferometer (about 0.93 measured).

- Hole Array:
    TRANSMITTANCE: Intensity transmittance per photon; the pair survives with its square.
    BIREFRINGENCE_BETA: Effective quarter-wave birefringence of the array.
    ARRAY_PERIOD_NM, HOLE_DIAMETER_NM, FILM_THICKNESS_NM: Geometry.

- Detection:
    PAIR_RATE_HZ: Count scale; detector efficiency is folded in.
    NORMALIZATION: "physical" conserves probability, "paper" halves the HV
        coincidence to match the printed a/4 fit functions.

- Fringe Fitting:
    PERIOD_GRID: Grid bracketing both the lambda and lambda/2 hypotheses.
    PERIOD_RTOL: Golden-section stopping tolerance.

- Plasmon Resonance:
    EPS_GLASS, EPS_AIR: Dielectric permittivities of the two interfaces.
    FIXED_POINT_*: Damped fixed-point solver controls.

- Parallelization:
    NUM_CORES: Worker processes; 1 keeps everything in-process.

INI documents override these per run; see ScenarioConfig.to_ini for the schema.
"""
