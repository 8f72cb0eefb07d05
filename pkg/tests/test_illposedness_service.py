"""
Test Ill-posedness Service: the F function, the deep-ground-state sequence
and the two-gap divergence family.
"""

import numpy as np
import pytest

from src.domain.errors import IntervalTooShort
from src.domain.models import IllposedParams
from src.services.birkhoff_service import state_from_gaps
from src.services.spectral_core import one_gap_potential, sobolev_norm


@pytest.mark.parametrize("q", [0.5, 0.6, 0.7, 0.8, 0.9])
@pytest.mark.parametrize("ratio", [0.1, 0.3, 0.5, 0.7, 0.9])
def test_F_has_one_increasing_root(illposedness_service, q, ratio):
    """F(eps q^2 / (1 - q^2)) > 0 and F has a single simple increasing zero below it."""
    params = IllposedParams.from_q(ratio * q, q)
    mu = illposedness_service.lambda0_root(params.epsilon, q, params)

    # Assertions
    assert illposedness_service.eval_F(params.with_mu(params.mu_max)) > 0.0
    assert 0.0 < mu < params.mu_max
    assert abs(illposedness_service.eval_F(params.with_mu(mu))) < 1e-10
    assert illposedness_service.dF_dmu(params.with_mu(mu)) > 0.0
    assert illposedness_service.sign_changes(params) == 1


def test_root_matches_galerkin_ground_state(illposedness_service, lax_service):
    """mu* is a simple zero of F and equals -lambda_0 of the truncated operator."""
    eps, q = 0.3, 0.6
    mu = illposedness_service.lambda0_root(eps, q)
    params = IllposedParams.from_q(eps, q, mu=mu)
    spectrum = lax_service.spectrum(one_gap_potential(q, eps, N=256))

    # Assertions
    assert abs(illposedness_service.eval_F(params)) < 1e-10
    assert illposedness_service.dF_dmu(params) > 0.0
    assert spectrum.eigenvalues[0] == pytest.approx(-mu, abs=1e-6)
    assert np.count_nonzero(spectrum.eigenvalues < 0.0) == 1


def test_ground_state_ratio(illposedness_service):
    """f(q) = ((eps + mu) / eps) f(0) for the Galerkin ground state."""
    eps, q = 0.3, 0.6
    mu = illposedness_service.lambda0_root(eps, q)
    ratio = illposedness_service.ground_state_ratio(one_gap_potential(q, eps, N=256), q)

    # Assertions
    assert ratio == pytest.approx((eps + mu) / eps, rel=1e-6)


def test_two_forms_of_F_agree(illposedness_service):
    """Direct and integrated-by-parts quadratures agree."""
    for mu in (0.05, 0.3, 1.0):
        params = IllposedParams.from_q(0.3, 0.6, mu=mu)

        # Assertions
        assert illposedness_service.crosscheck_F(params) < 1e-8


def test_delta_resolves_q_near_one():
    """q^2 = 1 - e^{-40} keeps delta while q rounds to 1."""
    params = IllposedParams.from_log_delta(0.1, -40.0)

    # Assertions
    assert params.q == 1.0
    assert params.delta == pytest.approx(np.exp(-40.0), rel=1e-14)
    assert params.mu_max == pytest.approx(0.1 * np.exp(40.0), rel=1e-12)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_build_uk(illposedness_service, lax_service, k):
    """u^(k) has one negative eigenvalue below -k, upper gaps summing to at most 1
    and ||u||_{-1/2}^2 = -2 eps^2 log delta."""
    uk = illposedness_service.build_uk(k)
    params = uk.params
    mu = illposedness_service.lambda0_root(params.epsilon, params.q, params)
    eigenvalues = lax_service.spectrum(uk.field, uk.modes).eigenvalues

    # Assertions
    assert uk.k == k
    assert uk.F_at_k < 0.0
    assert uk.growth_condition > k
    assert uk.truncation_tail < 1e-10
    assert mu > k
    assert eigenvalues[0] < -k
    assert eigenvalues[0] == pytest.approx(-mu, abs=1e-6)
    assert np.count_nonzero(eigenvalues < 0.0) == 1
    # sum_{n>=2} gamma_n = 1 - lambda_1
    assert 1.0 - eigenvalues[1] <= 1.0 + 1e-6
    assert uk.field.mode(1) == pytest.approx(params.epsilon * params.q)
    assert sobolev_norm(uk.field, -0.5) ** 2 == pytest.approx(
        -2.0 * params.epsilon**2 * np.log(params.delta), rel=1e-6
    )


def test_select_epsilon_is_shared_by_small_k(illposedness_service):
    """The first ladder entry already satisfies k = 1, 2 and 3, so the three members coincide."""
    picks = [illposedness_service.select_epsilon(k) for k in (1, 2, 3)]

    # Assertions
    assert [index for index, _, _ in picks] == [0, 0, 0]
    assert {params.epsilon for _, params, _ in picks} == {0.5}
    assert all(F_k < 0.0 for _, _, F_k in picks)


def test_build_uk_rejects_bad_k(illposedness_service):
    with pytest.raises(ValueError):
        illposedness_service.build_uk(0)


def test_one_gap_windowed_integral(illposedness_service, inverse_service):
    """For one gap the demodulated integral is exactly the predicted leading term."""
    state = state_from_gaps([1.0 / 3.0], [np.pi])
    field = inverse_service.reconstruct(state, 32)
    series = illposedness_service.xi_timeseries(field, np.linspace(0.0, 1.0, 201), state=state)
    result = illposedness_service.windowed_integral(series, (0.0, 1.0))

    # Assertions
    assert series.xi[0] == pytest.approx(0.5, abs=1e-14)
    assert result.value == pytest.approx(0.5, abs=1e-12)
    assert result.predicted == pytest.approx(result.value, abs=1e-12)


def test_xi_starts_at_first_coefficient(illposedness_service, inverse_service):
    """xi(0) is the first Fourier coefficient of the datum."""
    state = state_from_gaps([0.5, 0.25, 0.1], [0.3, -0.4, 1.2])
    field = inverse_service.reconstruct(state, 64)
    series = illposedness_service.xi_timeseries(field, [0.0, 0.5], state=state)

    # Assertions
    assert abs(series.xi[0] - field.mode(1)) < 1e-12


def test_interval_too_short(illposedness_service):
    """Degenerate or out-of-grid windows are rejected."""
    state = state_from_gaps([0.25])
    series = illposedness_service.xi_timeseries(
        one_gap_potential(0.5, N=8), np.linspace(0.0, 1.0, 11), state=state
    )

    with pytest.raises(IntervalTooShort):
        illposedness_service.windowed_integral(series, (0.5, 0.5))
    with pytest.raises(IntervalTooShort):
        illposedness_service.windowed_integral(series, (0.0, 2.0))


def test_two_gap_divergence_at_time_zero(illposedness_service):
    """Coefficients approach 2(-1)^n monotonically as gamma grows; factors stay in the disc."""
    n = np.arange(1, 9)
    deviations = []
    for gamma in (1.0, 10.0, 100.0, 1000.0):
        sample = illposedness_service.two_gap_divergence(gamma, 0.0, N=8)
        deviations.append(np.max(np.abs(sample.field.positive[1:9] - 2.0 * (-1.0) ** n)))

        # Assertions
        assert abs(sample.q1) < 1.0 and abs(sample.q2) < 1.0

    assert all(b < a for a, b in zip(deviations, deviations[1:]))
    assert deviations[-1] < 1e-2


def test_renormalization_gap_vanishes_on_equal_actions(illposedness_service):
    """A state is aligned with itself."""
    # Assertions
    assert illposedness_service.renormalization_gap(5.0, 5.0, 0.3) < 1e-8


def test_two_gap_divergence_rejects_nonpositive_gamma(illposedness_service):
    with pytest.raises(ValueError):
        illposedness_service.two_gap_divergence(0.0, 0.0)
