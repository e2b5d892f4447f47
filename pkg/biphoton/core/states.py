import logging
from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np

from biphoton.exceptions import InvalidArgumentError, InvalidStateError

logger = logging.getLogger(__name__)

SQRT2 = np.sqrt(2.0)
NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
TRACE_TOL = 1e-10

# Basis ordering of every amplitude triple and 3x3 matrix in this package.
BASIS_LABELS = ("2H", "1H1V", "2V")


def _frozen_array(values, shape: Tuple[int, ...]) -> np.ndarray:
    arr = np.array(values, dtype=complex)
    if arr.shape != shape:
        raise InvalidArgumentError(f"Expected array of shape {shape}, got {arr.shape}")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class PolarizationAmplitudePair:
    """Single-photon polarization amplitudes on (|H>, |V>).

    The all-zero pair only exists as the explicit absorbed marker.
    """

    h: complex
    v: complex
    absorbed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "h", complex(self.h))
        object.__setattr__(self, "v", complex(self.v))
        norm_sq = self.norm_squared
        if norm_sq > 1.0 + NORM_TOL:
            raise InvalidArgumentError(f"Single-photon norm^2 {norm_sq} exceeds 1")
        if self.absorbed and norm_sq != 0.0:
            raise InvalidArgumentError("Absorbed marker must carry zero amplitudes")
        if not self.absorbed and norm_sq == 0.0:
            raise InvalidArgumentError("Zero amplitudes are only allowed as the absorbed marker")

    @classmethod
    def absorbed_marker(cls) -> "PolarizationAmplitudePair":
        return cls(0.0, 0.0, absorbed=True)

    @property
    def norm_squared(self) -> float:
        return abs(self.h) ** 2 + abs(self.v) ** 2

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.h, self.v], dtype=complex)

    def equals_up_to_global_phase(self, other: "PolarizationAmplitudePair", tol: float = 1e-12) -> bool:
        """Compare two pairs ignoring a common phase factor (norms must agree)."""
        if self.absorbed or other.absorbed:
            return self.absorbed == other.absorbed
        overlap = np.vdot(self.vector, other.vector)
        return bool(abs(abs(overlap) - np.sqrt(self.norm_squared * other.norm_squared)) <= tol
                    and abs(self.norm_squared - other.norm_squared) <= tol)


@dataclass(frozen=True, eq=False)
class JonesOperator:
    """2x2 polarization operator of a passive element (spectral norm <= 1)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen_array(self.matrix, (2, 2))
        spectral_norm = np.linalg.norm(m, ord=2)
        if spectral_norm > 1.0 + NORM_TOL:
            raise InvalidArgumentError(f"Jones operator is not passive (spectral norm {spectral_norm:.15g})")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_entries(cls, j_hh: complex, j_hv: complex, j_vh: complex, j_vv: complex) -> "JonesOperator":
        return cls(np.array([[j_hh, j_hv], [j_vh, j_vv]], dtype=complex))

    @classmethod
    def identity(cls) -> "JonesOperator":
        return cls(np.eye(2, dtype=complex))

    @property
    def j_hh(self) -> complex:
        return complex(self.matrix[0, 0])

    @property
    def j_hv(self) -> complex:
        return complex(self.matrix[0, 1])

    @property
    def j_vh(self) -> complex:
        return complex(self.matrix[1, 0])

    @property
    def j_vv(self) -> complex:
        return complex(self.matrix[1, 1])

    def __matmul__(self, other: "JonesOperator") -> "JonesOperator":
        return JonesOperator(self.matrix @ other.matrix)

    def is_unitary(self, tol: float = NORM_TOL) -> bool:
        return bool(np.allclose(self.matrix.conj().T @ self.matrix, np.eye(2), rtol=0.0, atol=tol))

    def apply_single(self, pair: PolarizationAmplitudePair) -> PolarizationAmplitudePair:
        """Act on a single photon; full absorption yields the absorbed marker."""
        if pair.absorbed:
            return pair
        h, v = self.matrix @ pair.vector
        if abs(h) ** 2 + abs(v) ** 2 == 0.0:
            return PolarizationAmplitudePair.absorbed_marker()
        return PolarizationAmplitudePair(h, v)


@dataclass(frozen=True)
class BiphotonState:
    """Amplitudes of a collinear photon pair on (|2_H>, |1_H 1_V>, |2_V>)."""

    c20: complex
    c11: complex
    c02: complex
    normalized: bool = False

    def __post_init__(self):
        for name in ("c20", "c11", "c02"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        if self.normalized and abs(self.norm_squared - 1.0) > NORM_TOL:
            raise InvalidStateError(f"State flagged normalized has norm^2 {self.norm_squared!r}")

    @classmethod
    def from_amplitudes(cls, amplitudes, normalized: bool = False) -> "BiphotonState":
        c20, c11, c02 = np.asarray(amplitudes, dtype=complex)
        return cls(c20, c11, c02, normalized=normalized)

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([self.c20, self.c11, self.c02], dtype=complex)

    @property
    def norm_squared(self) -> float:
        return abs(self.c20) ** 2 + abs(self.c11) ** 2 + abs(self.c02) ** 2


class TraceConvention(str, Enum):
    POST_SELECTED = "post_selected"
    UNNORMALIZED = "unnormalized"


@dataclass(frozen=True, eq=False)
class BiphotonDensityMatrix:
    """3x3 density matrix on the symmetric two-photon polarization space.

    Post-selected matrices have unit trace; unnormalized ones carry the
    two-photon survival probability as their trace.
    """

    rho: np.ndarray
    trace_convention: TraceConvention = TraceConvention.POST_SELECTED

    def __post_init__(self):
        rho = _frozen_array(self.rho, (3, 3))
        convention = TraceConvention(self.trace_convention)
        if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
            raise InvalidStateError("Density matrix is not Hermitian")
        min_eig = np.linalg.eigvalsh(rho).min()
        if min_eig < -PSD_TOL:
            raise InvalidStateError(f"Density matrix is not positive semidefinite (min eigenvalue {min_eig:.3e})")
        trace = float(np.trace(rho).real)
        if convention is TraceConvention.POST_SELECTED and abs(trace - 1.0) > TRACE_TOL:
            raise InvalidStateError(f"Post-selected density matrix has trace {trace!r}")
        if convention is TraceConvention.UNNORMALIZED and not (-TRACE_TOL <= trace <= 1.0 + TRACE_TOL):
            raise InvalidStateError(f"Unnormalized trace {trace!r} is not a probability")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "trace_convention", convention)

    @property
    def trace(self) -> float:
        return float(np.trace(self.rho).real)

    @property
    def populations(self) -> np.ndarray:
        return np.real(np.diag(self.rho)).copy()

    def coherence(self, i: int, j: int) -> complex:
        return complex(self.rho[i, j])


class BiphotonAlgebra:
    """Static operations on biphoton states and their lift from single-photon optics."""

    @staticmethod
    def make_hv_pair() -> BiphotonState:
        """Type-II collinear down-conversion output |1_H 1_V>."""
        return BiphotonState(0.0, 1.0, 0.0, normalized=True)

    @staticmethod
    def symmetric_square(j: JonesOperator) -> np.ndarray:
        """Lift a single-photon Jones operator to the symmetric two-photon space.

        Follows a_H^+ -> j_hh a_H^+ + j_vh a_V^+, a_V^+ -> j_hv a_H^+ + j_vv a_V^+
        acting on Fock states, so the sqrt(2) factors of |2_H> and |2_V> appear
        in the mixed rows and columns.

        Args:
            j: Single-photon operator

        Returns:
            3x3 complex matrix ordered (|2_H>, |1_H 1_V>, |2_V>)
        """
        a, b, c, d = j.j_hh, j.j_hv, j.j_vh, j.j_vv
        return np.array([
            [a * a, SQRT2 * a * b, b * b],
            [SQRT2 * a * c, a * d + b * c, SQRT2 * b * d],
            [c * c, SQRT2 * c * d, d * d],
        ], dtype=complex)

    @staticmethod
    def apply_jones(j: JonesOperator, s: BiphotonState) -> BiphotonState:
        """Apply an element to both photons without renormalizing.

        The output norm^2 is the two-photon survival probability; the
        normalized flag is kept only while the norm is still one.
        """
        out = BiphotonAlgebra.symmetric_square(j) @ s.amplitudes
        result = BiphotonState.from_amplitudes(out)
        still_normalized = s.normalized and abs(result.norm_squared - 1.0) <= NORM_TOL
        if still_normalized:
            result = BiphotonState.from_amplitudes(out, normalized=True)
        return result

    @staticmethod
    def to_density(s: BiphotonState) -> BiphotonDensityMatrix:
        amps = s.amplitudes
        convention = TraceConvention.POST_SELECTED if s.normalized else TraceConvention.UNNORMALIZED
        return BiphotonDensityMatrix(np.outer(amps, amps.conj()), convention)

    @staticmethod
    def apply_jones_density(j: JonesOperator, rho: BiphotonDensityMatrix) -> BiphotonDensityMatrix:
        m = BiphotonAlgebra.symmetric_square(j)
        out = m @ rho.rho @ m.conj().T
        out = 0.5 * (out + out.conj().T)
        convention = rho.trace_convention
        if convention is TraceConvention.POST_SELECTED and abs(np.trace(out).real - 1.0) > TRACE_TOL:
            convention = TraceConvention.UNNORMALIZED
        return BiphotonDensityMatrix(out, convention)

    @staticmethod
    def renormalize(rho: BiphotonDensityMatrix) -> BiphotonDensityMatrix:
        """Post-select on detection of both photons."""
        trace = rho.trace
        if trace <= 0.0:
            raise InvalidStateError("Cannot post-select a state with zero survival probability")
        return BiphotonDensityMatrix(rho.rho / trace, TraceConvention.POST_SELECTED)

    @staticmethod
    def state_probabilities(rho: BiphotonDensityMatrix) -> Tuple[float, float, float]:
        """Return (P(2H), P(1H1V), P(2V)) of a post-selected matrix."""
        p20, p11, p02 = rho.populations
        return float(p20), float(p11), float(p02)
