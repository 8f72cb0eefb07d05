"""
Test Probe Service: orbital stability, recurrence and norm tracking.
"""

import numpy as np
import pytest

from src.services.birkhoff_service import state_from_gaps
from src.services.probe_service import ProbeService
from src.services.spectral_core import one_gap_potential
from src.utils.rng import make_rng


def test_orbit_distance_finds_translation(probe_service):
    """A translate of u0 lies on its orbit."""
    u0 = one_gap_potential(0.5, N=32)
    distance, tau = probe_service.orbit_distance(u0.translate(1.234), u0, 0.0)

    # Assertions
    assert distance < 1e-10
    assert tau == pytest.approx(1.234, abs=1e-8)


def test_unperturbed_traveling_wave_stays_on_orbit(probe_service):
    """delta = 0 gives a vanishing orbital distance."""
    report = probe_service.stability_probe(q=0.5, delta=0.0, s=0.0, t_max=10.0, samples=21)

    # Assertions
    assert report.sup_distance < 1e-8
    assert report.ratio is None
    assert len(report.distances) == 21


def test_stability_is_translation_invariant(probe_service):
    """Shifting the perturbed datum leaves the orbital distances unchanged."""
    kwargs = dict(q=0.5, delta=1e-3, s=0.0, t_max=5.0, samples=11)
    plain = probe_service.stability_probe(rng=make_rng(4), **kwargs)
    shifted = probe_service.stability_probe(rng=make_rng(4), shift=0.7, **kwargs)

    # Assertions
    assert 0.0 < plain.distances[0] <= 1e-3 * (1.0 + 1e-9)
    assert np.allclose(plain.distances, shifted.distances, rtol=0.0, atol=1e-8)
    assert plain.ratio == pytest.approx(plain.sup_distance / 1e-3)


def test_negative_perturbation_is_rejected(probe_service):
    with pytest.raises(ValueError):
        probe_service.stability_probe(q=0.5, delta=-1.0, s=0.0, t_max=1.0)


def test_one_gap_recurrence(probe_service):
    """omega_1 = 1/3 returns at multiples of 6 pi."""
    state = state_from_gaps([1.0 / 3.0], [np.pi])
    report = probe_service.recurrence_probe(state, c=0.0, horizon=60.0, eps=1e-6)

    # Assertions
    assert report.status == "found"
    assert report.returns == pytest.approx([6 * np.pi, 12 * np.pi, 18 * np.pi], abs=1e-8)
    assert max(report.return_distances) < 1e-8


def test_two_gap_recurrence(probe_service):
    """gamma = (1, 1) has integer frequencies (-3, -2) and period 2 pi."""
    report = probe_service.recurrence_probe(state_from_gaps([1.0, 1.0]), c=0.0, horizon=10.0, eps=1e-6)

    # Assertions
    assert report.omega == pytest.approx([-3.0, -2.0])
    assert report.returns[0] == pytest.approx(2 * np.pi, abs=1e-8)
    assert max(report.return_distances) < 1e-8


def test_zero_state_recurrence(probe_service):
    """Without gaps every time is a return."""
    report = probe_service.recurrence_probe(state_from_gaps([]), c=0.0, horizon=3.0, eps=1e-6, count=3)

    # Assertions
    assert report.status == "found"
    assert len(report.returns) == 3
    assert report.return_distances == [0.0, 0.0, 0.0]


def test_short_horizon_finds_nothing(probe_service):
    """No return of the one-gap wave before t = 6 pi."""
    state = state_from_gaps([1.0 / 3.0])
    report = probe_service.recurrence_probe(state, c=0.0, horizon=10.0, eps=1e-6)

    # Assertions
    assert report.status == "none_found"
    assert report.returns == []


def test_normtrack_traveling_wave(probe_service):
    """Norms of a traveling wave are constant; the direct run conserves mean and L2."""
    report = probe_service.normtrack(one_gap_potential(0.5, N=64), [0.0, 0.5, 1.0], t_max=10.0)

    # Assertions
    assert report.bounded
    for key in ("0", "0.5", "1"):
        values = np.array(report.quadrature_norms[key])
        assert np.max(np.abs(values - values[0])) < 1e-10
    assert len(report.direct_times) == 11
    assert report.direct_mean_drift < 1e-8
    assert report.direct_l2_drift < 1e-8


def test_normtrack_two_gap_is_bounded(probe_service, inverse_service):
    """A periodic two-gap orbit shows no growth between the halves of the window."""
    v0 = inverse_service.reconstruct(state_from_gaps([1.0, 1.0]), 128)
    report = probe_service.normtrack(v0, [0.0, 1.0], t_max=100.0, direct_t_max=0.0)

    # Assertions
    assert report.bounded
    assert report.growth_ratio["1"] == pytest.approx(1.0, abs=1e-8)
    assert report.direct_times == []


def test_growth_ratio():
    """Second-half sup over first-half sup."""
    # Assertions
    assert ProbeService.growth_ratio([1.0, 2.0, 3.0, 4.0]) == pytest.approx(2.0)