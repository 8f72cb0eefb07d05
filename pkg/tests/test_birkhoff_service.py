"""
Test Birkhoff Service and the product formulas.
"""

import itertools

import numpy as np
import pytest

from src.domain.errors import NonPositiveKappa
from src.services.birkhoff_service import (
    kappa_products,
    lambdas_from_gaps,
    mu_ratio_products,
    random_gap_state,
    state_from_gaps,
    translate_state,
)
from src.services.spectral_core import one_gap_potential, random_band_limited_field
from src.utils.rng import make_rng

GRID = [0.1, 0.5, 1.0, 2.0, 5.0]


@pytest.mark.parametrize("q", [0.3, 0.5, 0.7])
def test_one_gap_coordinates(birkhoff_service, q):
    """One retained gap with zeta_1 = -q/sqrt(1-q^2) and omega_1 = (1-3q^2)/(1-q^2)."""
    state = birkhoff_service.birkhoff_forward(one_gap_potential(q, N=256))
    omega = birkhoff_service.frequencies(state).omega

    # Assertions
    assert state.P == 1
    assert state.zeta[0] == pytest.approx(-q / np.sqrt(1 - q * q), abs=1e-8)
    assert state.gamma[0] == pytest.approx(q * q / (1 - q * q), abs=1e-8)
    assert omega[0] == pytest.approx((1 - 3 * q * q) / (1 - q * q), abs=1e-8)


def test_one_gap_functions_of_actions(birkhoff_service):
    """q = 1/2: gamma_1 = 1/3, H_B = 2/9 and mu_1 kappa_0 / kappa_1 = 1 - q^2."""
    state = state_from_gaps([1.0 / 3.0], [np.pi])

    # Assertions
    assert birkhoff_service.hamiltonian_B(state) == pytest.approx(2.0 / 9.0, rel=1e-14)
    assert birkhoff_service.trace_formula(state) == pytest.approx(2.0 / 3.0, rel=1e-14)
    assert state.mu_ratio[0] * state.kappa[0] == pytest.approx(0.75, rel=1e-14)


@pytest.mark.parametrize("g1,g2", list(itertools.product(GRID, GRID)))
def test_two_gap_closed_forms(birkhoff_service, g1, g2):
    """kappa, mu/kappa and frequencies of a two-gap state in closed form."""
    state = state_from_gaps([g1, g2], [0.4, -1.3])
    omega = birkhoff_service.frequencies(state).omega

    # Assertions
    assert np.allclose(state.lambdas, [-g1 - g2, 1 - g2, 2], rtol=1e-12, atol=1e-14)
    assert state.kappa[0] == pytest.approx((2 + g1) / ((1 + g1) * (2 + g1 + g2)), rel=1e-12)
    assert state.kappa[1] == pytest.approx(1 / ((1 + g1) * (1 + g2)), rel=1e-12)
    assert state.kappa[2] == pytest.approx((1 + g1 + g2) / ((2 + g1 + g2) * (1 + g2)), rel=1e-12)
    assert state.mu_ratio[0] == pytest.approx((1 + g1 + g2) / (1 + g1), rel=1e-12)
    assert state.mu_ratio[1] == pytest.approx((2 + g1) / (1 + g1), rel=1e-12)
    assert omega[0] == pytest.approx(1 - 2 * g1 - 2 * g2, rel=1e-12, abs=1e-12)
    assert omega[1] == pytest.approx(4 - 2 * g1 - 4 * g2, rel=1e-12, abs=1e-12)


def test_two_gap_unit_actions(birkhoff_service):
    """gamma = (1, 1): omega = (-3, -2), kappa_0 = 3/8, kappa_1 = 1/4, mu_2 kappa_1 / kappa_2 = 3/8."""
    state = state_from_gaps([1.0, 1.0])

    # Assertions
    assert np.allclose(birkhoff_service.frequencies(state).omega, [-3.0, -2.0], atol=1e-14)
    assert state.kappa[0] == pytest.approx(3.0 / 8.0, rel=1e-14)
    assert state.kappa[1] == pytest.approx(1.0 / 4.0, rel=1e-14)
    assert state.mu_ratio[1] * state.kappa[1] == pytest.approx(3.0 / 8.0, rel=1e-14)


def test_shifted_frequencies(birkhoff_service):
    """A mean c shifts omega_n by -2cn."""
    state = state_from_gaps([0.5, 0.25])
    plain = birkhoff_service.frequencies(state).omega
    shifted = birkhoff_service.frequencies(state, c=0.3).omega

    # Assertions
    assert np.allclose(shifted, plain - 0.6 * np.array([1, 2]), atol=1e-14)


def test_frequencies_are_the_gradient_of_the_hamiltonian(birkhoff_service):
    """omega_n = dH_B/dgamma_n by central differences."""
    gammas = np.array([0.7, 0.3, 1.1, 0.05])
    h = 1e-6
    gradient = []
    for n in range(gammas.size):
        step = np.zeros_like(gammas)
        step[n] = h
        up = birkhoff_service.hamiltonian_B(state_from_gaps(gammas + step))
        down = birkhoff_service.hamiltonian_B(state_from_gaps(gammas - step))
        gradient.append((up - down) / (2 * h))

    # Assertions
    omega = birkhoff_service.frequencies(state_from_gaps(gammas)).omega
    assert np.allclose(gradient, omega, rtol=0.0, atol=1e-7)


def test_products_match_normalization_constants(lax_service, birkhoff_service):
    """|<1|f_n>|^2 = gamma_n kappa_n and |<f_{n+1}|S f_n>|^2 = mu_{n+1}."""
    service = birkhoff_service
    spectrum = lax_service.spectrum(random_band_limited_field(make_rng(21), 128))
    gamma = lax_service.gap_sequence(spectrum)
    lam = spectrum.trusted_eigenvalues
    mu = mu_ratio_products(lam, gamma) * kappa_products(lam, gamma)[1:]
    overlaps = lax_service.shift_overlaps(spectrum)

    # Assertions
    assert service.kappa_crosscheck(spectrum) < 1e-8
    assert np.allclose(overlaps[:6], mu[:6], rtol=1e-8)


def test_lambdas_from_gaps():
    """lambda_n = n - sum_{k>n} gamma_k."""
    # Assertions
    assert np.allclose(lambdas_from_gaps([0.5, 0.25, 0.125]), [-0.875, 0.625, 1.875, 3.0])


def test_kappa_must_be_positive():
    """Inconsistent spectral data is rejected."""
    with pytest.raises(NonPositiveKappa):
        kappa_products(np.array([0.0, 0.5]), np.array([2.0]))


def test_translation_covariance(birkhoff_service, inverse_service):
    """Coordinates of u(. + a) are zeta_n e^{ina}."""
    u = inverse_service.reconstruct(state_from_gaps([0.5, 0.25], [0.3, 1.1]), 64)
    a = 0.7
    state = birkhoff_service.birkhoff_forward(u)
    moved = birkhoff_service.birkhoff_forward(u.translate(a))

    # Assertions
    assert moved.P == state.P
    assert np.allclose(moved.zeta, translate_state(state, a).zeta, atol=1e-8)


def test_random_gap_state_is_seeded():
    """Same seed and stream give the same state."""
    a = random_gap_state(make_rng(7, 3), 3)
    b = random_gap_state(make_rng(7, 3), 3)

    # Assertions
    assert a.P == 3
    assert np.array_equal(a.zeta, b.zeta)
    assert np.all((a.gamma >= 0.1) & (a.gamma <= 2.0))


@pytest.mark.parametrize("P", [1, 2, 3, 4])
@pytest.mark.parametrize("seed", [7, 17, 29, 41, 53])
def test_forward_inverts_reconstruction(birkhoff_service, inverse_service, P, seed):
    """forward(reconstruct(zeta)) recovers zeta at N = 128 for actions up to 2."""
    state = random_gap_state(make_rng(seed, P), P, (0.1, 2.0))
    field = inverse_service.reconstruct(state, 128)
    recovered = birkhoff_service.birkhoff_forward(field)
    rebuilt = inverse_service.reconstruct(recovered, 128)

    # Assertions
    assert recovered.P == P
    assert np.all(recovered.gamma > 0.0)
    assert np.max(np.abs(recovered.zeta - state.zeta)) < 1e-6
    assert recovered.tail_action < 1e-6
    assert np.max(np.abs(rebuilt.positive - field.positive)) < 1e-6


def test_retained_gaps_drop_accumulated_noise(birkhoff_service):
    """Many sub-threshold gaps go to the tail instead of stretching P past closed gaps."""
    gamma = np.concatenate([[0.6, 1.2], np.full(120, 5e-12), [0.0, 3e-12]])
    P, tail = birkhoff_service.retained_gaps(gamma)

    # Assertions
    assert P == 2
    assert tail == pytest.approx(120 * 5e-12 + 3e-12, rel=1e-12)
    assert birkhoff_service.retained_gaps(np.full(8, 1e-12)) == (0, pytest.approx(8e-12))


def test_sequences_from_spectrum(birkhoff_service, lax_service):
    """One gap of size 1/3 gives kappa_0 = kappa_1 = 3/4 and mu_1/kappa_1 = 1."""
    spectrum = lax_service.spectrum(one_gap_potential(0.5, N=128))
    kappa = birkhoff_service.kappa_sequence(spectrum)
    mu_ratio = birkhoff_service.mu_ratio_sequence(spectrum)

    # Assertions
    assert kappa.size == spectrum.n_trust + 1
    assert kappa[:2] == pytest.approx([0.75, 0.75], abs=1e-8)
    assert mu_ratio[0] == pytest.approx(1.0, abs=1e-8)
