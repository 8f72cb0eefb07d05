"""
Ill-posedness Controller.
Handles the illposed-half and illposed-deep commands.
"""

from typing import Any, Dict, List

import numpy as np

from src.cli.controllers.common import parallel_map, run_modes
from src.cli.dtos import ExperimentConfig, IllposedDeepParams, IllposedHalfParams
from src.dependencies import (
    get_birkhoff_service_instance,
    get_illposedness_service_instance,
    get_lax_service_instance,
)
from src.domain.models import DivergenceSample, IllposedParams, complex_pairs
from src.repositories.interfaces import IArtifactRepository
from src.services.spectral_core import sobolev_norm
from src.utils.logging_config import get_logger

logger = get_logger(__name__)

F_GRID_Q = (0.5, 0.6, 0.7, 0.8, 0.9)
F_GRID_FRACTIONS = (0.1, 0.3, 0.5, 0.7, 0.9)
MIN_XI_SAMPLES = 201


def _f_grid_row(point: IllposedParams) -> List[Any]:
    illposed = get_illposedness_service_instance()
    at_max = illposed.eval_F(point.with_mu(point.mu_max))
    root = illposed.lambda0_root(point.epsilon, point.q, point)
    residual = illposed.eval_F(point.with_mu(root))
    slope = illposed.dF_dmu(point.with_mu(root))
    changes = illposed.sign_changes(point)
    return [point.epsilon, point.q, point.mu_max, at_max, root, abs(residual), slope, changes]


def _f_grid(cfg: ExperimentConfig, repository: IArtifactRepository) -> Dict[str, Any]:
    points = [IllposedParams.from_q(f * q, q) for q in F_GRID_Q for f in F_GRID_FRACTIONS]
    rows = parallel_map(_f_grid_row, points, cfg.jobs)
    header = [
        "epsilon", "q", "mu_max", "F_at_mu_max", "mu_root", "abs_F_at_root", "dF_dmu_at_root", "sign_changes",
    ]
    repository.write_csv("f_grid.csv", header, rows)
    return {
        "points": len(rows),
        "all_positive_at_mu_max": all(row[3] > 0.0 for row in rows),
        "all_increasing_at_root": all(row[6] > 0.0 for row in rows),
        "all_unique_roots": all(row[7] == 1 for row in rows),
        "max_abs_F_at_root": max(row[5] for row in rows),
    }


def illposed_half(cfg: ExperimentConfig, repository: IArtifactRepository) -> Dict[str, Any]:
    """Deep ground-state potential u^(k), its xi series and the windowed integral."""
    params: IllposedHalfParams = cfg.params
    illposed = get_illposedness_service_instance()
    lax = get_lax_service_instance()
    birkhoff = get_birkhoff_service_instance()

    uk = illposed.build_uk(params.k, params.eps)
    eps, q = uk.params.epsilon, uk.params.q
    epsilon_by_k = [illposed.select_epsilon(j, params.eps)[1].epsilon for j in range(1, uk.k)] + [eps]
    mu_root = illposed.lambda0_root(eps, q, uk.params)

    spectrum = lax.spectrum(uk.field, uk.modes)
    state = birkhoff.birkhoff_forward(uk.field, spectrum=spectrum)
    negative = int(np.count_nonzero(spectrum.eigenvalues < 0.0))
    upper_tail = float(np.sum(state.gamma[1:]) + state.tail_action)
    ratio = illposed.ground_state_ratio(uk.field, q, spectrum)
    norm_squared = sobolev_norm(uk.field, -0.5) ** 2
    closed_form = -2.0 * eps * eps * np.log(uk.params.delta)

    a, b = params.interval
    _, frequencies = illposed.xi_terms(state)
    peak = float(np.max(np.abs(frequencies))) if frequencies.size else 1.0
    samples = max(MIN_XI_SAMPLES, int(np.ceil((b - a) * peak * params.points_per_period / (2.0 * np.pi))) + 1)
    series = illposed.xi_timeseries(uk.field, np.linspace(a, b, samples), state=state)
    window = illposed.windowed_integral(series, (a, b))
    xi_zero = complex(illposed.xi_timeseries(uk.field, [0.0], state=state).xi[0])

    repository.write_json(
        "uk.json",
        {"k": uk.k, "epsilon": eps, "log_delta": float(np.log(uk.params.delta)), **uk.field.to_payload()},
    )
    repository.write_csv(
        "xi.csv",
        ["t", "re", "im", "abs"],
        [[float(t), float(z.real), float(z.imag), float(abs(z))] for t, z in zip(series.times, series.xi)],
    )

    length = b - a
    lambda0 = float(state.lambdas[0])
    result: Dict[str, Any] = {
        "k": uk.k,
        "epsilon": eps,
        "q": q,
        "log_delta": float(np.log(uk.params.delta)),
        "ladder_index": uk.ladder_index,
        "epsilon_by_k": epsilon_by_k,
        "degenerate_sequence": len(set(epsilon_by_k)) < len(epsilon_by_k),
        "modes": uk.modes,
        "truncation_tail": uk.truncation_tail,
        "F_at_k": uk.F_at_k,
        "growth_condition": uk.growth_condition,
        "F_root_mu": mu_root,
        "lambda0_galerkin": lambda0,
        "lambda0_below_minus_k": lambda0 < -uk.k,
        "negative_eigenvalues": negative,
        "ground_state_ratio": ratio,
        "ground_state_ratio_expected": (eps + mu_root) / eps,
        "upper_gap_sum": upper_tail,
        "norm_minus_half_squared": norm_squared,
        "norm_closed_form": closed_form,
        "xi_at_zero": [xi_zero.real, xi_zero.imag],
        "xi_at_zero_expected": eps * q,
        "window": {
            "interval": [a, b],
            "samples": samples,
            "value": complex_pairs([window.value])[0],
            "predicted": complex_pairs([window.predicted])[0],
            "predicted_asymptotic": complex_pairs([window.predicted_asymptotic])[0],
            "exceeds_threshold": abs(window.value) > 0.5 * np.sqrt(2.0) * length,
            "scaled_remainder": abs(window.value - window.predicted) * abs(lambda0),
        },
    }
    if params.f_grid:
        result["f_grid"] = _f_grid(cfg, repository)

    logger.info("Deep ground-state experiment finished", k=uk.k, epsilon=eps, lambda0=lambda0)
    return result


def illposed_deep(cfg: ExperimentConfig, repository: IArtifactRepository) -> Dict[str, Any]:
    """Two-gap equal-action family: factor data, coefficients and the renormalization scan."""
    params: IllposedDeepParams = cfg.params
    illposed = get_illposedness_service_instance()
    N = run_modes(cfg.modes)

    def sample(gamma: float) -> DivergenceSample:
        return illposed.two_gap_divergence(gamma, params.t, N)

    samples = parallel_map(sample, params.gamma, cfg.jobs)
    count = min(params.coefficients, N)
    limit = 2.0 * (-1.0) ** np.arange(1, count + 1)

    factor_rows = []
    coefficient_rows = []
    deviations = []
    for s in samples:
        coeffs = s.field.positive[1 : count + 1]
        deviation = float(np.max(np.abs(coeffs - limit)) / 2.0)
        deviations.append(deviation)
        factor_rows.append(
            [s.gamma, s.t, s.q1.real, s.q1.imag, abs(s.q1), s.q2.real, s.q2.imag, abs(s.q2),
             s.alpha.real, s.alpha.imag, s.beta.real, s.beta.imag, deviation]
        )
        coefficient_rows += [[s.gamma, n + 1, float(z.real), float(z.imag)] for n, z in enumerate(coeffs)]

    pairs = list(zip(params.gamma[:-1], params.gamma[1:]))
    gaps = parallel_map(lambda pair: illposed.renormalization_gap(pair[0], pair[1], params.t), pairs, cfg.jobs)

    repository.write_csv(
        "factors.csv",
        ["gamma", "t", "q1_re", "q1_im", "q1_abs", "q2_re", "q2_im", "q2_abs",
         "alpha_re", "alpha_im", "beta_re", "beta_im", "limit_deviation"],
        factor_rows,
    )
    repository.write_csv("coefficients.csv", ["gamma", "n", "re", "im"], coefficient_rows)
    repository.write_csv(
        "renormalization.csv",
        ["gamma", "gamma_prime", "t", "misalignment"],
        [[g, h, params.t, gap] for (g, h), gap in zip(pairs, gaps)],
    )

    inside = all(abs(s.q1) < 1.0 and abs(s.q2) < 1.0 for s in samples)
    result: Dict[str, Any] = {
        "t": params.t,
        "gamma": params.gamma,
        "factors_inside_disc": inside,
        "limit_deviation": deviations,
        "renormalization_gap": gaps,
    }
    if params.t == 0.0:
        result["monotone_approach"] = all(b < a for a, b in zip(deviations[:-1], deviations[1:]))
    logger.info("Two-gap divergence scan finished", t=params.t, samples=len(samples))
    return result
