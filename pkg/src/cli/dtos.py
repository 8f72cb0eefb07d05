"""
Data Transfer Objects (DTOs) for command-line experiments.

An ExperimentConfig is assembled from an optional JSON config file and the
command-line flags, flags taking precedence.
"""

from enum import Enum
from typing import Any, Dict, List, Optional, Tuple, Type

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.domain.models import FlowMethod


class Command(str, Enum):
    """Experiment commands."""
    FORWARD = "forward"
    INVERSE = "inverse"
    SPECTRUM = "spectrum"
    GENFUN = "genfun"
    EVOLVE = "evolve"
    COMPARE = "compare"
    ILLPOSED_HALF = "illposed-half"
    ILLPOSED_DEEP = "illposed-deep"
    STABILITY = "stability"
    RECURRENCE = "recurrence"
    NORMTRACK = "normtrack"
    ROUNDTRIP = "roundtrip"


class CommandParams(BaseModel):
    """Base class for per-command parameters."""

    model_config = ConfigDict(extra="forbid")


# ============ Input DTOs ============

class DatumParams(CommandParams):
    """
    Initial datum of an experiment.

    Sources in order of precedence: a RealField JSON file (``field``), a
    BirkhoffState JSON file (``state``), a JSON list of (gamma, phi) pairs
    (``gaps``), inline actions (``gamma`` with optional ``phases``), and the
    one-gap family (``q``, ``epsilon``).
    """
    field: Optional[str] = None
    state: Optional[str] = None
    gaps: Optional[str] = None
    gamma: Optional[List[float]] = None
    phases: Optional[List[float]] = None
    q: float = Field(default=0.5, gt=0.0, lt=1.0)
    epsilon: float = Field(default=1.0, gt=0.0, le=1.0)
    c: float = 0.0

    @model_validator(mode="after")
    def _phases_match(self) -> "DatumParams":
        if self.phases is not None and (self.gamma is None or len(self.phases) != len(self.gamma)):
            raise ValueError("phases need one entry per inline action")
        if self.gamma is not None and any(g < 0.0 for g in self.gamma):
            raise ValueError("actions must be nonnegative")
        return self


# ============ Spectral DTOs ============

class ForwardParams(DatumParams):
    n_trust: Optional[int] = Field(default=None, ge=1)


class InverseParams(DatumParams):
    pass


class SpectrumParams(DatumParams):
    n_trust: Optional[int] = Field(default=None, ge=1)
    backend: Optional[str] = None
    vectors: bool = False

    @field_validator("backend")
    @classmethod
    def _known_backend(cls, value: Optional[str]) -> Optional[str]:
        if value is not None and value not in ("auto", "dense", "lanczos"):
            raise ValueError("backend must be auto, dense or lanczos")
        return value


class GenfunParams(DatumParams):
    points: int = Field(default=20, ge=1)
    radius: float = Field(default=2.0, gt=0.0)


class RoundtripParams(CommandParams):
    """Seeded finite-gap states with P = 1..gaps actions."""
    gaps: int = Field(default=4, ge=1)
    states: int = Field(default=25, ge=1)
    gamma_min: float = Field(default=0.1, gt=0.0)
    gamma_max: float = Field(default=2.0, gt=0.0)

    @model_validator(mode="after")
    def _range(self) -> "RoundtripParams":
        if self.gamma_min > self.gamma_max:
            raise ValueError("gamma_min must not exceed gamma_max")
        return self


# ============ Flow DTOs ============

class EvolveParams(DatumParams):
    method: FlowMethod = FlowMethod.QUADRATURE
    tmax: float = Field(default=1.0, gt=0.0)
    dt: Optional[float] = Field(default=None, gt=0.0)
    samples: int = Field(default=11, ge=2)
    s_list: List[float] = Field(default_factory=lambda: [0.0])
    diagnostic_gaps: int = Field(default=4, ge=0)
    save_fields: bool = True


class CompareParams(EvolveParams):
    s: float = 0.0


# ============ Ill-posedness DTOs ============

class IllposedHalfParams(CommandParams):
    k: int = Field(default=1, ge=1)
    eps: Optional[float] = Field(default=None, gt=0.0, lt=1.0)
    interval: Tuple[float, float] = (0.0, 1.0)
    points_per_period: int = Field(default=20, ge=4)
    f_grid: bool = False

    @field_validator("interval")
    @classmethod
    def _ordered(cls, value: Tuple[float, float]) -> Tuple[float, float]:
        if not value[1] > value[0] >= 0.0:
            raise ValueError("interval must satisfy 0 <= a < b")
        return value


class IllposedDeepParams(CommandParams):
    gamma: List[float] = Field(default_factory=lambda: [1.0, 10.0, 100.0, 1000.0])
    t: float = 0.0
    coefficients: int = Field(default=8, ge=1)

    @field_validator("gamma")
    @classmethod
    def _positive(cls, value: List[float]) -> List[float]:
        if not value or any(g <= 0.0 for g in value):
            raise ValueError("actions must be positive")
        return value


# ============ Probe DTOs ============

class StabilityParams(CommandParams):
    q: float = Field(default=0.5, gt=0.0, lt=1.0)
    delta: float = Field(default=1e-3, ge=0.0)
    s: float = Field(default=0.0, gt=-0.5)
    tmax: float = Field(default=50.0, gt=0.0)
    samples: int = Field(default=101, ge=2)
    shift: float = 0.0


class RecurrenceParams(DatumParams):
    horizon: float = Field(default=30.0, gt=0.0)
    eps: float = Field(default=1e-6, gt=0.0)
    s: float = 0.0
    count: int = Field(default=3, ge=1)


class NormtrackParams(DatumParams):
    s_list: List[float] = Field(default_factory=lambda: [0.0, 0.5, 1.0])
    tmax: float = Field(default=100.0, gt=0.0)
    direct_tmax: float = Field(default=1.0, ge=0.0)
    direct_modes: Optional[int] = Field(default=None, ge=1)


PARAMS_BY_COMMAND: Dict[Command, Type[CommandParams]] = {
    Command.FORWARD: ForwardParams,
    Command.INVERSE: InverseParams,
    Command.SPECTRUM: SpectrumParams,
    Command.GENFUN: GenfunParams,
    Command.EVOLVE: EvolveParams,
    Command.COMPARE: CompareParams,
    Command.ILLPOSED_HALF: IllposedHalfParams,
    Command.ILLPOSED_DEEP: IllposedDeepParams,
    Command.STABILITY: StabilityParams,
    Command.RECURRENCE: RecurrenceParams,
    Command.NORMTRACK: NormtrackParams,
    Command.ROUNDTRIP: RoundtripParams,
}


# ============ Experiment DTOs ============

class ExperimentConfig(BaseModel):
    """Validated description of one command-line run."""

    model_config = ConfigDict(extra="forbid")

    command: Command
    params: CommandParams = Field(default_factory=CommandParams)
    seed: int = Field(default=0, ge=0)
    out_dir: str = "out"
    jobs: int = Field(default=1, ge=1)
    modes: Optional[int] = Field(default=None, ge=1)
    tol: float = Field(default=1e-6, gt=0.0)

    @model_validator(mode="before")
    @classmethod
    def _typed_params(cls, data: Any) -> Any:
        if not isinstance(data, dict) or "command" not in data:
            return data
        params = data.get("params") or {}
        if isinstance(params, CommandParams):
            params = params.model_dump(exclude_unset=True)
        model = PARAMS_BY_COMMAND[Command(data["command"])]
        return {**data, "params": model.model_validate(params)}

    def inputs(self) -> Dict[str, Any]:
        """Flat record of the run inputs for the manifest."""
        return {
            "command": self.command.value,
            "params": self.params.model_dump(mode="json"),
            "seed": self.seed,
            "jobs": self.jobs,
            "modes": self.modes,
            "tol": self.tol,
        }
