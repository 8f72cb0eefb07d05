"""
Test Lax Service.
"""

import numpy as np
import pytest

from src.domain.errors import GapViolation, NearPole, PhaseDegenerate
from src.domain.models import EigenBackend, LaxSpectrum
from src.services.spectral_core import one_gap_potential, random_band_limited_field, sobolev_norm
from src.utils.rng import make_rng


@pytest.mark.parametrize("q", [0.3, 0.5, 0.7])
def test_one_gap_spectrum(lax_service, q):
    """gamma_1 = q^2/(1-q^2), higher gaps closed, lambda_0 = -gamma_1."""
    gamma_1 = q * q / (1 - q * q)
    spectrum = lax_service.spectrum(one_gap_potential(q, N=256))
    gamma = lax_service.gap_sequence(spectrum)

    # Assertions
    assert spectrum.n_trust == 128
    assert gamma[0] == pytest.approx(gamma_1, abs=1e-8)
    assert np.max(gamma[1:]) < 1e-8
    assert spectrum.eigenvalues[0] == pytest.approx(-gamma_1, abs=1e-8)


def test_eigenpairs_and_phase_chain(lax_service):
    """Small residuals, <f_0|1> > 0 and <f_{n+1}|S f_n> > 0 along the trusted chain."""
    u = random_band_limited_field(make_rng(11), 64)
    L = lax_service.assemble_lax(u)
    spectrum = lax_service.eigendecompose(L)
    V = spectrum.vectors

    overlaps = np.array([np.vdot(V[:-1, n], V[1:, n + 1]) for n in range(spectrum.n_trust)])

    # Assertions
    assert np.max(lax_service.residuals(spectrum, L)) < 1e-10
    assert abs(V[0, 0].imag) < 1e-14 and V[0, 0].real > 0
    assert np.max(np.abs(overlaps.imag)) < 1e-12
    assert np.all(overlaps.real > 0)


@pytest.mark.parametrize("seed", range(10))
def test_trace_formula(lax_service, seed):
    """||u||^2 = 2 sum n gamma_n on random band-limited fields."""
    u = random_band_limited_field(make_rng(seed), 128)
    gamma = lax_service.gap_sequence(lax_service.spectrum(u))
    n = np.arange(1, gamma.size + 1)

    # Assertions
    assert abs(sobolev_norm(u, 0.0) ** 2 - 2 * np.sum(n * gamma)) < 1e-8


def test_trusted_gaps_identity(lax_service):
    """-lambda_0 = sum gamma_n and lambda_n = n - sum_{k>n} gamma_k."""
    u = random_band_limited_field(make_rng(4), 128)
    residuals = lax_service.trusted_gaps_identity(lax_service.spectrum(u))

    # Assertions
    assert residuals["lambda0"] < 1e-8
    assert residuals["lambdas"] < 1e-8


def test_generating_function_resolvent_matches_product(lax_service):
    """<(L + lambda)^{-1} 1|1> equals the spectral product at non-real lambda."""
    u = random_band_limited_field(make_rng(2), 128)
    spectrum = lax_service.spectrum(u)

    for lam in (1.0 + 1.0j, -0.5 + 2.0j, 3.0 - 1.0j, -2.0 - 0.25j):
        resolvent = lax_service.genfun_resolvent(u, lam).value
        product = lax_service.genfun_product(spectrum, lam).value

        # Assertions
        assert abs(resolvent - product) / abs(resolvent) < 1e-8


def test_generating_function_near_pole(lax_service):
    """lambda = -lambda_0 is a pole."""
    u = one_gap_potential(0.5, N=64)
    spectrum = lax_service.spectrum(u)

    with pytest.raises(NearPole):
        lax_service.genfun_product(spectrum, -spectrum.eigenvalues[0])


def test_lanczos_matches_dense(lax_service):
    """The lowest eigenvalues agree between backends."""
    u = random_band_limited_field(make_rng(9), 256)
    dense = lax_service.spectrum(u, backend="dense")
    lanczos = lax_service.spectrum(u, backend="lanczos")

    # Assertions
    assert lanczos.backend is EigenBackend.LANCZOS
    assert lanczos.n_trust == 7
    assert np.allclose(lanczos.eigenvalues, dense.eigenvalues[:8], atol=1e-9)


def test_negative_gap_is_rejected(lax_service):
    """A gap below -tol_gap raises GapViolation."""
    spectrum = LaxSpectrum(
        eigenvalues=np.array([0.0, 0.5, 2.0]),
        vectors=np.eye(3, dtype=complex),
        n_trust=2,
    )

    with pytest.raises(GapViolation):
        lax_service.gap_sequence(spectrum)


def test_phase_degenerate_ground_state(lax_service):
    """A ground state orthogonal to the constants cannot be normalized."""
    vectors = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)

    with pytest.raises(PhaseDegenerate):
        lax_service._fix_phases(vectors, 1)
