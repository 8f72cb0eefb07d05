"""
Domain Models for the Benjamin–Ono Birkhoff toolkit.
These represent the core numerical entities: fields on the torus, Lax spectra,
Birkhoff states, flow specifications, trajectories and experiment reports.
"""

from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy import fft as sfft

HERMITIAN_RTOL = 1e-12


def _readonly(values: Any, dtype: Any) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


def complex_pairs(values: Sequence[complex]) -> List[List[float]]:
    """Serialize complex numbers as [re, im] pairs."""
    return [[float(z.real), float(z.imag)] for z in np.asarray(values, dtype=complex)]


def from_pairs(pairs: Sequence[Sequence[float]]) -> np.ndarray:
    data = np.asarray(pairs, dtype=float).reshape(-1, 2)
    return data[:, 0] + 1j * data[:, 1]


class ArrayModel(BaseModel):
    """Frozen model holding read-only numpy arrays."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)


class FlowMethod(str, Enum):
    """Time evolution methods."""
    QUADRATURE = "quadrature"
    DIRECT = "direct"


class EigenBackend(str, Enum):
    """Eigensolver backends."""
    AUTO = "auto"
    DENSE = "dense"
    LANCZOS = "lanczos"


class SobolevIndex(BaseModel):
    """Regularity exponent s of the H^s norm."""
    s: float

    @field_validator("s")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not np.isfinite(value):
            raise ValueError("Sobolev index must be finite")
        return value


# ============ Fields ============

class RealField(ArrayModel):
    """
    Real-valued function on the torus stored as Fourier coefficients n = -N..N.

    Index n lives at position n + N. Hermitian symmetry is enforced at
    construction: the input is symmetrized and rejected if the asymmetry
    exceeds 1e-12 relative to the largest coefficient.
    """

    coeffs: np.ndarray

    @field_validator("coeffs", mode="before")
    @classmethod
    def _hermitian(cls, value: Any) -> np.ndarray:
        c = np.asarray(value, dtype=complex).ravel()
        if c.size % 2 == 0 or c.size < 1:
            raise ValueError("coefficient block must have odd length 2N+1")
        mirror = np.conj(c[::-1])
        scale = max(float(np.max(np.abs(c))), 1e-300)
        if float(np.max(np.abs(c - mirror))) > HERMITIAN_RTOL * scale:
            raise ValueError("coefficients are not Hermitian-symmetric")
        return _readonly(0.5 * (c + mirror), complex)

    @classmethod
    def from_positive(cls, positive: Sequence[complex]) -> "RealField":
        """Build from modes n = 0..N; negative modes follow by symmetry."""
        pos = np.asarray(positive, dtype=complex).ravel()
        pos = pos.copy()
        pos[0] = pos[0].real
        full = np.concatenate([np.conj(pos[:0:-1]), pos])
        return cls(coeffs=full)

    @classmethod
    def zeros(cls, N: int) -> "RealField":
        return cls(coeffs=np.zeros(2 * N + 1, dtype=complex))

    @classmethod
    def constant(cls, c: float, N: int) -> "RealField":
        coeffs = np.zeros(2 * N + 1, dtype=complex)
        coeffs[N] = c
        return cls(coeffs=coeffs)

    @property
    def N(self) -> int:
        return (self.coeffs.size - 1) // 2

    @property
    def positive(self) -> np.ndarray:
        """Modes n = 0..N."""
        return self.coeffs[self.N :]

    @property
    def mean(self) -> float:
        return float(self.coeffs[self.N].real)

    @property
    def indices(self) -> np.ndarray:
        return np.arange(-self.N, self.N + 1)

    def mode(self, n: int) -> complex:
        if abs(n) > self.N:
            return 0j
        return complex(self.coeffs[n + self.N])

    def plus_constant(self, c: float) -> "RealField":
        coeffs = self.coeffs.copy()
        coeffs[self.N] += c
        return RealField(coeffs=coeffs)

    def mean_zero(self) -> "RealField":
        return self.plus_constant(-self.mean)

    def translate(self, a: float) -> "RealField":
        """Return x -> u(x + a)."""
        return RealField(coeffs=self.coeffs * np.exp(1j * self.indices * a))

    def reflect(self) -> "RealField":
        """Return x -> u(-x)."""
        return RealField(coeffs=self.coeffs[::-1])

    def with_modes(self, N: int) -> "RealField":
        """Truncate or zero-pad to order N."""
        pos = np.zeros(N + 1, dtype=complex)
        keep = min(N, self.N) + 1
        pos[:keep] = self.positive[:keep]
        return RealField.from_positive(pos)

    def values(self, M: Optional[int] = None) -> np.ndarray:
        """Samples on the grid x_j = 2*pi*j/M (M > 2N)."""
        M = M or 2 * self.N + 2
        if M <= 2 * self.N:
            raise ValueError("sampling grid must have more than 2N points")
        spectrum = np.zeros(M // 2 + 1, dtype=complex)
        spectrum[: self.N + 1] = self.positive * M
        return sfft.irfft(spectrum, n=M)

    def __add__(self, other: "RealField") -> "RealField":
        if other.N != self.N:
            raise ValueError("fields have different truncation orders")
        return RealField(coeffs=self.coeffs + other.coeffs)

    def __sub__(self, other: "RealField") -> "RealField":
        if other.N != self.N:
            raise ValueError("fields have different truncation orders")
        return RealField(coeffs=self.coeffs - other.coeffs)

    def scaled(self, factor: float) -> "RealField":
        return RealField(coeffs=self.coeffs * factor)

    def to_payload(self) -> Dict[str, Any]:
        return {"N": self.N, "coeffs": complex_pairs(self.positive)}

    @classmethod
    def from_payload(cls, payload: Dict[str, Any]) -> "RealField":
        positive = from_pairs(payload["coeffs"])
        if positive.size != int(payload["N"]) + 1:
            raise ValueError("field payload length does not match N")
        return cls.from_positive(positive)


class HardyField(ArrayModel):
    """Element of the Hardy space: modes n = 0..N only."""

    coeffs: np.ndarray

    @field_validator("coeffs", mode="before")
    @classmethod
    def _as_array(cls, value: Any) -> np.ndarray:
        c = np.asarray(value, dtype=complex).ravel()
        if c.size < 1:
            raise ValueError("Hardy field needs at least the zero mode")
        return _readonly(c, complex)

    @property
    def N(self) -> int:
        return self.coeffs.size - 1

    def to_payload(self) -> Dict[str, Any]:
        return {"N": self.N, "coeffs": complex_pairs(self.coeffs)}


# ============ Lax operator ============

class LaxMatrix(ArrayModel):
    """Truncated Lax operator L_u = D - T_u on the Hardy modes 0..N."""

    entries: np.ndarray

    @field_validator("entries", mode="before")
    @classmethod
    def _hermitian(cls, value: Any) -> np.ndarray:
        m = np.asarray(value)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("Lax matrix must be square")
        herm = 0.5 * (m + m.conj().T)
        scale = max(float(np.max(np.abs(m))), 1.0)
        if float(np.max(np.abs(m - herm))) > HERMITIAN_RTOL * scale:
            raise ValueError("Lax matrix is not Hermitian")
        if np.iscomplexobj(herm) and not np.any(herm.imag):
            herm = herm.real
        return _readonly(herm, herm.dtype)

    @property
    def N(self) -> int:
        return self.entries.shape[0] - 1


class LaxSpectrum(ArrayModel):
    """Ordered eigenpairs of a truncated Lax operator with fixed phases."""

    eigenvalues: np.ndarray
    vectors: np.ndarray
    n_trust: int
    backend: EigenBackend = EigenBackend.DENSE

    @model_validator(mode="after")
    def _aligned(self) -> "LaxSpectrum":
        if self.vectors.shape[1] != self.eigenvalues.size:
            raise ValueError("eigenvector count does not match eigenvalue count")
        if not 0 <= self.n_trust < self.eigenvalues.size:
            raise ValueError("n_trust must index an available eigenvalue")
        if np.any(np.diff(self.eigenvalues) < 0):
            raise ValueError("eigenvalues must be sorted ascending")
        return self

    @property
    def trusted_eigenvalues(self) -> np.ndarray:
        """lambda_0..lambda_{N_trust}."""
        return self.eigenvalues[: self.n_trust + 1]

    @property
    def raw_gaps(self) -> np.ndarray:
        """Unclipped gamma_1..gamma_{N_trust}."""
        lam = self.trusted_eigenvalues
        return lam[1:] - lam[:-1] - 1.0

    def to_payload(self, gamma: Sequence[float]) -> Dict[str, Any]:
        return {
            "lambda": [float(x) for x in self.eigenvalues],
            "gamma": [float(x) for x in gamma],
            "N_trust": self.n_trust,
        }


class GenFunValue(BaseModel):
    """Value of the generating function at a spectral parameter."""
    lambda_arg: complex
    value: complex


# ============ Birkhoff coordinates ============

class BirkhoffState(ArrayModel):
    """
    Birkhoff coordinates of a finite-gap potential.

    zeta, gamma and mu_ratio are indexed n = 1..P (position n-1); lambdas and
    kappa are indexed n = 0..P. mu_ratio[n] holds mu_{n+1}/kappa_{n+1}.
    """

    zeta: np.ndarray
    gamma: np.ndarray
    lambdas: np.ndarray
    kappa: np.ndarray
    mu_ratio: np.ndarray
    mean_c: float = 0.0
    tail_action: float = 0.0

    @field_validator("zeta", mode="before")
    @classmethod
    def _complex(cls, value: Any) -> np.ndarray:
        return _readonly(np.asarray(value, dtype=complex).ravel(), complex)

    @field_validator("gamma", "lambdas", "kappa", "mu_ratio", mode="before")
    @classmethod
    def _real(cls, value: Any) -> np.ndarray:
        return _readonly(np.asarray(value, dtype=float).ravel(), float)

    @model_validator(mode="after")
    def _consistent(self) -> "BirkhoffState":
        P = self.zeta.size
        if self.gamma.size != P or self.mu_ratio.size != P:
            raise ValueError("zeta, gamma and mu_ratio must have P entries")
        if self.lambdas.size != P + 1 or self.kappa.size != P + 1:
            raise ValueError("lambdas and kappa must have P+1 entries")
        if not np.allclose(self.gamma, np.abs(self.zeta) ** 2, rtol=1e-9, atol=1e-14):
            raise ValueError("gamma must equal |zeta|^2")
        if np.any(self.kappa <= 0.0):
            raise ValueError("kappa must be positive")
        return self

    @property
    def P(self) -> int:
        return int(self.zeta.size)

    @property
    def phases(self) -> np.ndarray:
        return np.angle(self.zeta)

    def with_zeta(self, zeta: np.ndarray) -> "BirkhoffState":
        """Same actions and spectral data, new angles."""
        return self.model_copy(update={"zeta": _readonly(zeta, complex)})

    def to_payload(self) -> Dict[str, Any]:
        return {
            "c": float(self.mean_c),
            "zeta": complex_pairs(self.zeta),
            "gamma": [float(x) for x in self.gamma],
            "kappa": [float(x) for x in self.kappa],
            "mu_ratio": [float(x) for x in self.mu_ratio],
            "lambda": [float(x) for x in self.lambdas],
            "tail_action": float(self.tail_action),
        }

    @classmethod
    def from_payload(cls, payload: Dict[str, Any]) -> "BirkhoffState":
        zeta = from_pairs(payload["zeta"]) if payload["zeta"] else np.zeros(0, complex)
        return cls(
            zeta=zeta,
            gamma=payload.get("gamma", np.abs(zeta) ** 2),
            lambdas=payload["lambda"],
            kappa=payload["kappa"],
            mu_ratio=payload["mu_ratio"],
            mean_c=float(payload.get("c", 0.0)),
            tail_action=float(payload.get("tail_action", 0.0)),
        )


class FrequencyVector(ArrayModel):
    """Frequencies omega_{c,n}, n = 1..P."""
    omega: np.ndarray
    c: float = 0.0


class TransferMatrix(ArrayModel):
    """P x P matrix whose characteristic data encode the finite-gap potential."""
    matrix: np.ndarray

    @property
    def P(self) -> int:
        return int(self.matrix.shape[0])


# ============ Flow ============

class FlowSpec(ArrayModel):
    """Time evolution request."""

    t_grid: np.ndarray
    method: FlowMethod = FlowMethod.QUADRATURE
    c: Optional[float] = None
    dt: float = Field(default=1e-4, gt=0.0)
    dealias: float = Field(default=2.0 / 3.0, gt=0.0, le=1.0)
    modes: Optional[int] = Field(default=None, ge=1)
    sobolev_indices: Tuple[float, ...] = (0.0,)
    diagnostic_gaps: int = Field(default=4, ge=0)

    @field_validator("t_grid", mode="before")
    @classmethod
    def _increasing(cls, value: Any) -> np.ndarray:
        grid = np.asarray(value, dtype=float).ravel()
        if grid.size == 0:
            raise ValueError("time grid is empty")
        if grid[0] < 0.0 or np.any(np.diff(grid) <= 0.0):
            raise ValueError("time grid must be nonnegative and strictly increasing")
        return _readonly(grid, float)


class TrajectoryDiagnostics(ArrayModel):
    """Per-time conserved quantities and gaps."""

    mean: np.ndarray
    l2: np.ndarray
    sobolev: Dict[float, np.ndarray]
    energy: np.ndarray
    gaps: np.ndarray
    tail_action: float = 0.0


class Trajectory(ArrayModel):
    """Fields at the output times of a flow."""

    times: np.ndarray
    fields: List[RealField]
    method: FlowMethod
    states: Optional[List[BirkhoffState]] = None
    diagnostics: Optional[TrajectoryDiagnostics] = None

    @model_validator(mode="after")
    def _aligned(self) -> "Trajectory":
        if len(self.fields) != self.times.size:
            raise ValueError("one field per output time is required")
        if self.states is not None and len(self.states) != self.times.size:
            raise ValueError("one state per output time is required")
        return self


class ComparisonReport(BaseModel):
    """Distance between two trajectories on a shared grid."""
    s: float
    times: List[float]
    distances: List[float]
    max_distance: float
    gap_drift_a: float
    gap_drift_b: float


# ============ Ill-posedness ============

class IllposedParams(BaseModel):
    """
    Parameters of u = 2 Re(eps q z / (1 - q z)).

    delta = 1 - q^2 is carried explicitly: for q^2 = 1 - e^{-40} the value of q
    rounds to 1 while delta is still representable.
    """

    epsilon: float
    q: float
    delta: float
    mu: Optional[float] = None

    @model_validator(mode="after")
    def _ordered(self) -> "IllposedParams":
        if not 0.0 < self.epsilon < self.q <= 1.0:
            raise ValueError("parameters must satisfy 0 < epsilon < q < 1")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta = 1 - q^2 must lie in (0, 1)")
        if abs(self.q * self.q - (1.0 - self.delta)) > 1e-12:
            raise ValueError("delta is inconsistent with q")
        if self.mu is not None and not self.mu > 0.0:
            raise ValueError("mu must be positive")
        return self

    @classmethod
    def from_q(cls, epsilon: float, q: float, mu: Optional[float] = None) -> "IllposedParams":
        return cls(epsilon=epsilon, q=q, delta=(1.0 - q) * (1.0 + q), mu=mu)

    @classmethod
    def from_log_delta(
        cls, epsilon: float, log_delta: float, mu: Optional[float] = None
    ) -> "IllposedParams":
        """Build from log(1 - q^2), exact even when q rounds to 1."""
        delta = float(np.exp(log_delta))
        q = float(np.sqrt(-np.expm1(log_delta)))
        return cls(epsilon=epsilon, q=q, delta=delta, mu=mu)

    def with_mu(self, mu: float) -> "IllposedParams":
        return self.model_copy(update={"mu": mu})

    @property
    def mu_max(self) -> float:
        """Right end of the root bracket, eps q^2 / (1 - q^2)."""
        return self.epsilon * self.q * self.q / self.delta


class UkConstruction(BaseModel):
    """A member of the deep-ground-state sequence with its provenance."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    k: int
    field: RealField
    params: IllposedParams
    modes: int
    ladder_index: int
    truncation_tail: float
    F_at_k: float
    growth_condition: float


class XiSeries(ArrayModel):
    """First Fourier coefficient of the evolved potential in closed form."""

    times: np.ndarray
    xi: np.ndarray
    state: BirkhoffState
    c: float = 0.0


class WindowedIntegral(BaseModel):
    """Demodulated integral of a xi series over an interval."""
    interval: Tuple[float, float]
    lambda0: float
    value: complex
    predicted: complex
    predicted_asymptotic: complex


class DivergenceSample(BaseModel):
    """Two-gap state with equal actions evolved by the exact phase laws."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    gamma: float
    t: float
    state: BirkhoffState
    field: RealField
    q1: complex
    q2: complex
    alpha: complex
    beta: complex


# ============ Probes ============

class StabilityReport(BaseModel):
    q: float
    delta: float
    s: float
    t_max: float
    times: List[float]
    distances: List[float]
    sup_distance: float
    ratio: Optional[float] = None


class RecurrenceReport(BaseModel):
    c: float
    horizon: float
    eps: float
    omega: List[float]
    returns: List[float]
    return_distances: List[float]
    status: str


class NormTrackReport(BaseModel):
    s_list: List[float]
    times: List[float]
    quadrature_norms: Dict[str, List[float]]
    quadrature_sup: Dict[str, float]
    growth_ratio: Dict[str, float]
    bounded: bool
    direct_times: List[float] = Field(default_factory=list)
    direct_norms: Dict[str, List[float]] = Field(default_factory=dict)
    direct_mean_drift: Optional[float] = None
    direct_l2_drift: Optional[float] = None
