"""
Dependency Injection Container.
Manages service instantiation and lifecycle for a command-line run.
"""

from pathlib import Path
from typing import Any, Dict, Optional, Union

from src.config import Settings, settings
from src.repositories.filesystem_repository import FileArtifactRepository
from src.services.birkhoff_service import BirkhoffService
from src.services.flow_service import FlowService
from src.services.illposedness_service import IllposednessService
from src.services.inverse_service import InverseService
from src.services.lax_service import LaxService
from src.services.probe_service import ProbeService
from src.utils.logging_config import get_logger

logger = get_logger(__name__)

# Effective settings of the current run (module settings plus command-line overrides)
_settings: Settings = settings

# Global instances (singleton pattern)
_lax_service: Optional[LaxService] = None
_birkhoff_service: Optional[BirkhoffService] = None
_inverse_service: Optional[InverseService] = None
_flow_service: Optional[FlowService] = None
_illposedness_service: Optional[IllposednessService] = None
_probe_service: Optional[ProbeService] = None


def configure_services(overrides: Optional[Dict[str, Any]] = None) -> Settings:
    """Apply per-run overrides and drop every cached service."""
    global _settings, _lax_service, _birkhoff_service, _inverse_service
    global _flow_service, _illposedness_service, _probe_service

    _settings = settings.model_copy(update=overrides or {})
    _lax_service = None
    _birkhoff_service = None
    _inverse_service = None
    _flow_service = None
    _illposedness_service = None
    _probe_service = None
    return _settings


def get_settings() -> Settings:
    return _settings


def tolerances() -> Dict[str, float]:
    """Tolerances every report is judged against."""
    return {
        "tol_gap": _settings.tol_gap,
        "tol_phase": _settings.tol_phase,
        "tol_pole": _settings.tol_pole,
        "tol_tail": _settings.tol_tail,
        "tol_root": _settings.tol_root,
        "tol_denominator": _settings.tol_denominator,
        "quad_rtol": _settings.quad_rtol,
        "quad_crosscheck_rtol": _settings.quad_crosscheck_rtol,
    }


def get_lax_service_instance() -> LaxService:
    """Get LaxService instance."""
    global _lax_service

    if _lax_service is None:
        _lax_service = LaxService(
            config={
                "tol_gap": _settings.tol_gap,
                "tol_phase": _settings.tol_phase,
                "tol_pole": _settings.tol_pole,
                "trust_fraction": _settings.trust_fraction,
                "eig_backend": _settings.eig_backend,
                "dense_limit": _settings.dense_limit,
                "lanczos_eigenpairs": _settings.lanczos_eigenpairs,
            },
        )
        logger.debug("Created LaxService instance")

    return _lax_service


def get_birkhoff_service_instance() -> BirkhoffService:
    """Get BirkhoffService instance."""
    global _birkhoff_service

    if _birkhoff_service is None:
        _birkhoff_service = BirkhoffService(
            lax_service=get_lax_service_instance(),
            config={"tol_tail": _settings.tol_tail},
        )
        logger.debug("Created BirkhoffService instance")

    return _birkhoff_service


def get_inverse_service_instance() -> InverseService:
    """Get InverseService instance."""
    global _inverse_service

    if _inverse_service is None:
        _inverse_service = InverseService(
            config={
                "tol_root": _settings.tol_root,
                "tol_denominator": _settings.tol_denominator,
            },
        )
        logger.debug("Created InverseService instance")

    return _inverse_service


def get_flow_service_instance() -> FlowService:
    """Get FlowService instance."""
    global _flow_service

    if _flow_service is None:
        _flow_service = FlowService(
            lax_service=get_lax_service_instance(),
            birkhoff_service=get_birkhoff_service_instance(),
            inverse_service=get_inverse_service_instance(),
            config={
                "blowup_threshold": _settings.blowup_threshold,
                "cfl_limit": _settings.cfl_limit,
                "tol_tail": _settings.tol_tail,
            },
        )
        logger.debug("Created FlowService instance")

    return _flow_service


def get_illposedness_service_instance() -> IllposednessService:
    """Get IllposednessService instance."""
    global _illposedness_service

    if _illposedness_service is None:
        _illposedness_service = IllposednessService(
            lax_service=get_lax_service_instance(),
            birkhoff_service=get_birkhoff_service_instance(),
            inverse_service=get_inverse_service_instance(),
            config={
                "debug": _settings.debug,
                "modes": _settings.modes,
                "quad_initial_nodes": _settings.quad_initial_nodes,
                "quad_max_nodes": _settings.quad_max_nodes,
                "quad_rtol": _settings.quad_rtol,
                "quad_crosscheck_rtol": _settings.quad_crosscheck_rtol,
                "uk_epsilon_start": _settings.uk_epsilon_start,
                "uk_epsilon_ratio": _settings.uk_epsilon_ratio,
                "uk_epsilon_steps": _settings.uk_epsilon_steps,
                "uk_truncation": _settings.uk_truncation,
                "uk_truncation_limit": _settings.uk_truncation_limit,
                "uk_max_modes": _settings.uk_max_modes,
            },
        )
        logger.debug("Created IllposednessService instance")

    return _illposedness_service


def get_probe_service_instance() -> ProbeService:
    """Get ProbeService instance."""
    global _probe_service

    if _probe_service is None:
        _probe_service = ProbeService(
            birkhoff_service=get_birkhoff_service_instance(),
            inverse_service=get_inverse_service_instance(),
            flow_service=get_flow_service_instance(),
            config={
                "tau_oversampling": _settings.tau_oversampling,
                "modes": _settings.modes,
                "seed": _settings.seed,
                "flow_dt": _settings.flow_dt,
                "flow_dealias": _settings.flow_dealias,
            },
        )
        logger.debug("Created ProbeService instance")

    return _probe_service


def get_artifact_repository(out_dir: Union[str, Path]) -> FileArtifactRepository:
    """Repository for one run; not cached, every run owns its output directory."""
    return FileArtifactRepository(out_dir)
