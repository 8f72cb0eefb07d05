"""
Probe Controller.
Handles the stability, recurrence and normtrack commands.
"""

from typing import Any, Dict

from src.cli.controllers.common import resolve_field, resolve_state, run_modes
from src.cli.dtos import ExperimentConfig, NormtrackParams, RecurrenceParams, StabilityParams
from src.dependencies import get_probe_service_instance
from src.domain.errors import ConfigError
from src.repositories.interfaces import IArtifactRepository
from src.utils.logging_config import get_logger
from src.utils.rng import make_rng

logger = get_logger(__name__)


def stability(cfg: ExperimentConfig, repository: IArtifactRepository) -> Dict[str, Any]:
    """Distance of a perturbed one-gap solution to the traveling-wave orbit."""
    params: StabilityParams = cfg.params
    report = get_probe_service_instance().stability_probe(
        params.q,
        params.delta,
        params.s,
        params.tmax,
        rng=make_rng(cfg.seed),
        samples=params.samples,
        N=run_modes(cfg.modes),
        shift=params.shift,
    )
    repository.write_csv(
        "stability.csv",
        ["t", "orbit_distance"],
        [[t, d] for t, d in zip(report.times, report.distances)],
    )
    return report.model_dump(exclude={"times", "distances"})


def recurrence(cfg: ExperimentConfig, repository: IArtifactRepository) -> Dict[str, Any]:
    """First almost-periods of a finite-gap state."""
    params: RecurrenceParams = cfg.params
    state = resolve_state(params)
    if state is None:
        raise ConfigError("recurrence needs a finite-gap state: --gaps, --state, --gamma or --q")

    report = get_probe_service_instance().recurrence_probe(
        state,
        state.mean_c,
        params.horizon,
        params.eps,
        s=params.s,
        N=run_modes(cfg.modes),
        count=params.count,
    )
    repository.write_csv(
        "recurrence.csv",
        ["t", "return_distance"],
        [[t, d] for t, d in zip(report.returns, report.return_distances)],
    )
    if report.status != "found":
        logger.warning("No almost-period within the horizon", horizon=params.horizon)
    return report.model_dump()


def normtrack(cfg: ExperimentConfig, repository: IArtifactRepository) -> Dict[str, Any]:
    """Sobolev norms along the flow and their growth ratios."""
    params: NormtrackParams = cfg.params
    N = run_modes(cfg.modes)
    v0 = resolve_field(params, N)
    report = get_probe_service_instance().normtrack(
        v0,
        params.s_list,
        params.tmax,
        direct_t_max=params.direct_tmax,
        direct_modes=params.direct_modes,
        tolerance=cfg.tol,
    )

    keys = list(report.quadrature_norms)
    repository.write_csv(
        "normtrack.csv",
        ["t"] + [f"H{key}" for key in keys],
        [[t] + [report.quadrature_norms[key][i] for key in keys] for i, t in enumerate(report.times)],
    )
    if report.direct_times:
        repository.write_csv(
            "normtrack_direct.csv",
            ["t"] + [f"H{key}" for key in keys],
            [[t] + [report.direct_norms[key][i] for key in keys] for i, t in enumerate(report.direct_times)],
        )
    return report.model_dump(exclude={"times", "quadrature_norms", "direct_times", "direct_norms"})
