"""
Application Configuration using Pydantic Settings.
"""

from typing import Literal, Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
        populate_by_name=True,
    )

    # Application
    app_name: str = Field(default="bo-birkhoff", alias="BO_APP_NAME")
    app_version: str = Field(default="0.1.0", alias="BO_APP_VERSION")
    app_env: str = Field(default="development", alias="BO_APP_ENV")
    debug: bool = Field(default=False, alias="BO_DEBUG")
    log_level: str = Field(default="INFO", alias="BO_LOG_LEVEL")
    log_dir: Optional[str] = Field(default=None, alias="BO_LOG_DIR")

    # Truncation
    modes: int = Field(default=256, ge=1, alias="BO_MODES")
    trust_fraction: float = Field(default=0.5, gt=0.0, le=1.0, alias="BO_TRUST_FRACTION")

    # Spectral tolerances
    tol_gap: float = Field(default=1e-8, alias="BO_TOL_GAP")
    tol_phase: float = Field(default=1e-10, alias="BO_TOL_PHASE")
    tol_pole: float = Field(default=1e-6, alias="BO_TOL_POLE")
    tol_tail: float = Field(default=1e-10, alias="BO_TOL_TAIL")
    tol_hermitian: float = Field(default=1e-12, alias="BO_TOL_HERMITIAN")
    tol_root: float = Field(default=1e-10, alias="BO_TOL_ROOT")
    tol_denominator: float = Field(default=1e-12, alias="BO_TOL_DENOMINATOR")

    # Eigensolver
    eig_backend: Literal["auto", "dense", "lanczos"] = Field(
        default="auto", alias="BO_EIG_BACKEND"
    )
    dense_limit: int = Field(default=2048, ge=1, alias="BO_DENSE_LIMIT")
    lanczos_eigenpairs: int = Field(default=8, ge=2, alias="BO_LANCZOS_EIGENPAIRS")

    # Direct integrator
    flow_dt: float = Field(default=1e-4, alias="BO_FLOW_DT")
    flow_dealias: float = Field(default=2.0 / 3.0, gt=0.0, le=1.0, alias="BO_FLOW_DEALIAS")
    blowup_threshold: float = Field(default=1e8, alias="BO_BLOWUP_THRESHOLD")
    cfl_limit: float = Field(default=2.8, alias="BO_CFL_LIMIT")

    # Quadrature for F
    quad_initial_nodes: int = Field(default=16, ge=2, alias="BO_QUAD_INITIAL_NODES")
    quad_max_nodes: int = Field(default=512, ge=2, alias="BO_QUAD_MAX_NODES")
    quad_rtol: float = Field(default=1e-11, alias="BO_QUAD_RTOL")
    quad_crosscheck_rtol: float = Field(default=1e-8, alias="BO_QUAD_CROSSCHECK_RTOL")

    # Deep ground state sequence
    uk_epsilon_start: float = Field(default=0.5, gt=0.0, lt=1.0, alias="BO_UK_EPSILON_START")
    uk_epsilon_ratio: float = Field(
        default=2.0 ** -0.25, gt=0.0, lt=1.0, alias="BO_UK_EPSILON_RATIO"
    )
    uk_epsilon_steps: int = Field(default=16, ge=1, alias="BO_UK_EPSILON_STEPS")
    uk_truncation: float = Field(default=1e-14, alias="BO_UK_TRUNCATION")
    uk_truncation_limit: float = Field(default=1e-10, alias="BO_UK_TRUNCATION_LIMIT")
    uk_max_modes: int = Field(default=8192, ge=1, alias="BO_UK_MAX_MODES")

    # Probes
    tau_oversampling: int = Field(default=8, ge=1, alias="BO_TAU_OVERSAMPLING")

    # Harness
    out_dir: str = Field(default="out", alias="BO_OUT_DIR")
    jobs: int = Field(default=1, ge=1, alias="BO_JOBS")
    seed: int = Field(default=0, ge=0, alias="BO_SEED")

    @field_validator(
        "tol_gap",
        "tol_phase",
        "tol_pole",
        "tol_tail",
        "tol_hermitian",
        "tol_root",
        "tol_denominator",
        "flow_dt",
        "blowup_threshold",
        "cfl_limit",
        "quad_rtol",
        "quad_crosscheck_rtol",
        "uk_truncation",
        "uk_truncation_limit",
    )
    @classmethod
    def _positive(cls, value: float) -> float:
        if not value > 0.0:
            raise ValueError("tolerances and step sizes must be positive")
        return value

    def n_trust(self, modes: Optional[int] = None) -> int:
        """Number of trusted eigenpairs for a truncation order."""
        return max(1, int((modes or self.modes) * self.trust_fraction))


# Global settings instance
settings = Settings()
