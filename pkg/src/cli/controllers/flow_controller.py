"""
Flow Controller.
Handles the evolve and compare commands.
"""

from typing import Any, Dict

import numpy as np

from src.cli.controllers.common import parallel_map, resolve_field, run_modes
from src.cli.dtos import CompareParams, EvolveParams, ExperimentConfig
from src.dependencies import get_flow_service_instance, get_settings
from src.domain.models import FlowMethod, FlowSpec, RealField, Trajectory
from src.repositories.interfaces import IArtifactRepository
from src.utils.logging_config import get_logger

logger = get_logger(__name__)


def _flow_spec(params: EvolveParams, method: FlowMethod, N: int) -> FlowSpec:
    settings = get_settings()
    return FlowSpec(
        t_grid=np.linspace(0.0, params.tmax, params.samples),
        method=method,
        dt=params.dt or settings.flow_dt,
        dealias=settings.flow_dealias,
        modes=N,
        sobolev_indices=tuple(params.s_list),
        diagnostic_gaps=params.diagnostic_gaps,
    )


def _write_trajectory(
    repository: IArtifactRepository, trajectory: Trajectory, prefix: str, save_fields: bool
) -> None:
    header, rows = get_flow_service_instance().trajectory_table(trajectory)
    repository.write_csv(f"{prefix}trajectory.csv", header, rows)
    if save_fields:
        for i, (t, field) in enumerate(zip(trajectory.times, trajectory.fields)):
            repository.write_json(
                f"{prefix}fields/field_{i:04d}.json", {"t": float(t), **field.to_payload()}
            )


def _summary(trajectory: Trajectory) -> Dict[str, Any]:
    diag = trajectory.diagnostics
    summary = {
        "method": trajectory.method.value,
        "outputs": int(trajectory.times.size),
        "mean_drift": float(np.max(np.abs(diag.mean - diag.mean[0]))),
        "l2_drift": float(np.max(np.abs(diag.l2 - diag.l2[0]))),
        "energy_drift": float(np.max(np.abs(diag.energy - diag.energy[0]))),
        "tail_action": diag.tail_action,
    }
    if diag.gaps.size:
        summary["gap_drift"] = float(np.max(np.abs(diag.gaps - diag.gaps[0])))
    return summary


def evolve(cfg: ExperimentConfig, repository: IArtifactRepository) -> Dict[str, Any]:
    """Trajectory table plus per-time field files for one method."""
    params: EvolveParams = cfg.params
    N = run_modes(cfg.modes)
    v0 = resolve_field(params, N)

    trajectory = get_flow_service_instance().evolve_potential(v0, _flow_spec(params, params.method, N))
    _write_trajectory(repository, trajectory, "", params.save_fields)

    logger.info("Evolution finished", method=params.method.value, tmax=params.tmax)
    return {"N": N, "tmax": params.tmax, **_summary(trajectory)}


def compare(cfg: ExperimentConfig, repository: IArtifactRepository) -> Dict[str, Any]:
    """Quadrature against direct integration on a shared time grid."""
    params: CompareParams = cfg.params
    N = run_modes(cfg.modes)
    flow = get_flow_service_instance()
    v0: RealField = resolve_field(params, N)

    def run(method: FlowMethod) -> Trajectory:
        return flow.evolve_potential(v0, _flow_spec(params, method, N))

    quadrature, direct = parallel_map(run, [FlowMethod.QUADRATURE, FlowMethod.DIRECT], cfg.jobs)
    report = flow.compare_trajectories(quadrature, direct, params.s)

    _write_trajectory(repository, quadrature, "quadrature_", False)
    _write_trajectory(repository, direct, "direct_", False)
    repository.write_csv(
        "comparison.csv",
        ["t", f"H{params.s:g}_distance"],
        [[t, d] for t, d in zip(report.times, report.distances)],
    )

    logger.info("Comparison finished", max_distance=report.max_distance)
    return {
        "N": N,
        "tmax": params.tmax,
        "s": report.s,
        "max_distance": report.max_distance,
        "gap_drift_quadrature": report.gap_drift_a,
        "gap_drift_direct": report.gap_drift_b,
        "quadrature": _summary(quadrature),
        "direct": _summary(direct),
        "passed": report.max_distance < cfg.tol,
    }
