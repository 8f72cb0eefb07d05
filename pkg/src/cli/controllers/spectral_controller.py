"""
Spectral Controller.
Handles the forward, inverse, spectrum, genfun and roundtrip commands.
"""

from typing import Any, Dict, List, Tuple

import numpy as np

from src.cli.controllers.common import parallel_map, resolve_field, resolve_state, run_modes
from src.cli.dtos import (
    ExperimentConfig,
    ForwardParams,
    GenfunParams,
    InverseParams,
    RoundtripParams,
    SpectrumParams,
)
from src.dependencies import (
    get_birkhoff_service_instance,
    get_inverse_service_instance,
    get_lax_service_instance,
)
from src.domain.errors import ConfigError
from src.domain.models import BirkhoffState, complex_pairs
from src.repositories.interfaces import IArtifactRepository
from src.services.birkhoff_service import random_gap_state, translate_state
from src.services.spectral_core import sobolev_distance, sobolev_norm
from src.utils.logging_config import get_logger
from src.utils.rng import make_rng

logger = get_logger(__name__)


def _state_rows(state: BirkhoffState, omega: np.ndarray) -> List[List[Any]]:
    return [
        [
            n + 1,
            float(state.gamma[n]),
            float(state.phases[n]),
            float(state.zeta[n].real),
            float(state.zeta[n].imag),
            float(state.kappa[n + 1]),
            float(state.mu_ratio[n]),
            float(omega[n]),
        ]
        for n in range(state.P)
    ]


STATE_HEADER = ["n", "gamma", "phi", "zeta_re", "zeta_im", "kappa", "mu_ratio", "omega"]


def forward(cfg: ExperimentConfig, repository: IArtifactRepository) -> Dict[str, Any]:
    """Birkhoff coordinates of the datum together with the trace-formula check."""
    params: ForwardParams = cfg.params
    N = run_modes(cfg.modes)
    lax = get_lax_service_instance()
    birkhoff = get_birkhoff_service_instance()

    u = resolve_field(params, N)
    spectrum = lax.spectrum(u.mean_zero(), N, n_trust=params.n_trust)
    state = birkhoff.birkhoff_forward(u, spectrum=spectrum)
    omega = birkhoff.frequencies(state, state.mean_c).omega

    l2_squared = sobolev_norm(u.mean_zero(), 0.0) ** 2
    trace = birkhoff.trace_formula(state)
    repository.write_json("state.json", state.to_payload())
    repository.write_csv("state.csv", STATE_HEADER, _state_rows(state, omega))

    logger.info("Forward map finished", N=N, P=state.P)
    return {
        "N": N,
        "n_trust": spectrum.n_trust,
        "P": state.P,
        "state": state.to_payload(),
        "omega": [float(w) for w in omega],
        "hamiltonian_B": birkhoff.hamiltonian_B(state),
        "trace": {"l2_squared": l2_squared, "two_sum_n_gamma": trace},
        "trace_residual": abs(l2_squared - trace),
        "gap_identities": lax.trusted_gaps_identity(spectrum),
        "kappa_crosscheck": birkhoff.kappa_crosscheck(spectrum),
    }


def inverse(cfg: ExperimentConfig, repository: IArtifactRepository) -> Dict[str, Any]:
    """Potential of a finite-gap state, with Q(z) and its factor data."""
    params: InverseParams = cfg.params
    state = resolve_state(params)
    if state is None:
        raise ConfigError("inverse needs a finite-gap state: --gaps, --state or --gamma")

    N = run_modes(cfg.modes)
    inverse_service = get_inverse_service_instance()
    M = inverse_service.transfer_matrix(state)
    coeffs = inverse_service.q_polynomial(M)
    roots = inverse_service.check_roots(coeffs)
    field = inverse_service.reconstruct(state, N)

    repository.write_json("field.json", field.to_payload())
    repository.write_csv(
        "field.csv",
        ["n", "re", "im"],
        [[n, float(z.real), float(z.imag)] for n, z in enumerate(field.positive)],
    )
    logger.info("Inverse map finished", P=state.P, N=N)
    return {
        "N": N,
        "P": state.P,
        "transfer_matrix": [complex_pairs(row) for row in M.matrix],
        "Q": complex_pairs(coeffs),
        "roots": complex_pairs(roots),
        "factor_data": complex_pairs(inverse_service.factor_data(M)),
        "first_coefficient": complex_pairs([inverse_service.first_coefficient(state)])[0],
        "mean": field.mean,
        "l2": sobolev_norm(field, 0.0),
    }


def spectrum(cfg: ExperimentConfig, repository: IArtifactRepository) -> Dict[str, Any]:
    """Eigenvalues, gaps and the residuals of the truncated Lax operator."""
    params: SpectrumParams = cfg.params
    N = run_modes(cfg.modes)
    lax = get_lax_service_instance()

    u = resolve_field(params, N).mean_zero()
    result = lax.spectrum(u, N, n_trust=params.n_trust, backend=params.backend)
    gamma = lax.gap_sequence(result)
    residual = None
    if result.vectors.shape[1] == N + 1:
        residual = float(np.max(lax.residuals(result, lax.assemble_lax(u, N))))

    rows = []
    for n, value in enumerate(result.eigenvalues):
        trusted = n <= result.n_trust
        gap = float(gamma[n - 1]) if 1 <= n <= gamma.size else ""
        rows.append([n, float(value), gap, int(trusted)])
    repository.write_csv("spectrum.csv", ["n", "lambda", "gamma", "trusted"], rows)
    if params.vectors:
        repository.write_array("eigenvectors", result.vectors)

    return {
        "N": N,
        "backend": result.backend.value,
        **result.to_payload(gamma),
        "max_residual": residual,
        "gap_identities": lax.trusted_gaps_identity(result),
        "shift_overlaps": [float(x) for x in lax.shift_overlaps(result)[:8]],
        "eigenvectors": "eigenvectors.bin" if params.vectors else None,
    }


def genfun(cfg: ExperimentConfig, repository: IArtifactRepository) -> Dict[str, Any]:
    """Resolvent against product evaluation at seeded non-real spectral parameters."""
    params: GenfunParams = cfg.params
    N = run_modes(cfg.modes)
    lax = get_lax_service_instance()

    u = resolve_field(params, N).mean_zero()
    result = lax.spectrum(u, N, backend="dense")
    rng = make_rng(cfg.seed)
    radius = params.radius * rng.uniform(0.5, 1.0, size=params.points)
    angle = rng.uniform(0.1, np.pi - 0.1, size=params.points) * rng.choice([-1.0, 1.0], params.points)
    points = radius * np.exp(1j * angle)

    def evaluate(lam: complex) -> Tuple[complex, complex]:
        resolvent = lax.genfun_resolvent(u, lam, N).value
        product = lax.genfun_product(result, lam).value
        return resolvent, product

    values = parallel_map(evaluate, list(points), cfg.jobs)
    errors = [abs(a - b) / abs(a) for a, b in values]
    rows = [
        [float(lam.real), float(lam.imag), float(a.real), float(a.imag), float(b.real), float(b.imag), e]
        for lam, (a, b), e in zip(points, values, errors)
    ]
    header = ["lambda_re", "lambda_im", "resolvent_re", "resolvent_im", "product_re", "product_im", "rel_error"]
    repository.write_csv("genfun.csv", header, rows)

    return {
        "N": N,
        "points": params.points,
        "max_relative_error": max(errors),
        "passed": max(errors) < cfg.tol,
    }


def roundtrip(cfg: ExperimentConfig, repository: IArtifactRepository) -> Dict[str, Any]:
    """forward(inverse(state)) and inverse(forward(u)) on seeded finite-gap states."""
    params: RoundtripParams = cfg.params
    N = run_modes(cfg.modes)
    birkhoff = get_birkhoff_service_instance()
    inverse_service = get_inverse_service_instance()

    def run_one(index: int) -> List[Any]:
        P = 1 + index % params.gaps
        rng = make_rng(cfg.seed, stream=index)
        state = random_gap_state(rng, P, (params.gamma_min, params.gamma_max))
        u = inverse_service.reconstruct(state, N)
        recovered = birkhoff.birkhoff_forward(u)
        action_error = inverse_service.roundtrip_error(state, recovered)
        phase_error = 0.0
        if recovered.P == state.P:
            phase_error = float(np.max(np.abs(recovered.zeta - state.zeta)))
        field_error = sobolev_distance(inverse_service.reconstruct(recovered, N), u, 0.0)

        shift = float(rng.uniform(0.0, 2.0 * np.pi))
        moved = birkhoff.birkhoff_forward(u.translate(shift))
        expected = translate_state(recovered, shift)
        if moved.P == expected.P:
            translation_error = float(np.max(np.abs(moved.zeta - expected.zeta), initial=0.0))
        else:
            translation_error = inverse_service.roundtrip_error(expected, moved)
        return [index, P, action_error, phase_error, field_error, translation_error]

    rows = parallel_map(run_one, list(range(params.states)), cfg.jobs)
    repository.write_csv(
        "roundtrip.csv", ["index", "P", "action_error", "zeta_error", "l2_error", "translation_error"], rows
    )

    max_action = max(row[2] for row in rows)
    max_l2 = max(row[4] for row in rows)
    logger.info("Round trip finished", states=len(rows), max_action=max_action, max_l2=max_l2)
    return {
        "N": N,
        "states": params.states,
        "max_P": params.gaps,
        "max_action_error": max_action,
        "max_zeta_error": max(row[3] for row in rows),
        "max_l2_error": max_l2,
        "max_translation_error": max(row[5] for row in rows),
        "passed": max_action < cfg.tol and max_l2 < cfg.tol,
    }
