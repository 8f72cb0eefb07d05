"""
Test Flow Service: quadrature and direct evolution.
"""

import numpy as np
import pytest

from src.domain.errors import GridMismatch, StepTooLarge
from src.domain.models import FlowMethod, FlowSpec
from src.services.birkhoff_service import state_from_gaps
from src.services.spectral_core import one_gap_potential, sobolev_distance

TIMES = np.linspace(0.0, 1.0, 6)


@pytest.fixture
def two_gap_field(inverse_service):
    return inverse_service.reconstruct(state_from_gaps([0.5, 0.25], [0.2, -0.9]), 64)


def test_quadrature_traveling_wave(flow_service):
    """A one-gap potential travels: u(t) = u_0(. + omega_1 t)."""
    u0 = one_gap_potential(0.5, N=64)
    trajectory = flow_service.evolve_potential(u0, FlowSpec(t_grid=TIMES))

    for t, field in zip(trajectory.times, trajectory.fields):
        # Assertions
        assert sobolev_distance(field, u0.translate(t / 3.0)) < 1e-10


def test_direct_traveling_wave(flow_service):
    """RK4 reproduces the traveling wave to 1e-6 in L2 at t = 1."""
    u0 = one_gap_potential(0.5, N=64)
    spec = FlowSpec(t_grid=[1.0], method=FlowMethod.DIRECT, dt=1e-4)
    trajectory = flow_service.evolve_potential(u0, spec)

    # Assertions
    assert sobolev_distance(trajectory.fields[0], u0.translate(1.0 / 3.0)) < 1e-6


def test_quadrature_matches_direct_on_two_gap_state(flow_service, two_gap_field):
    """Both methods agree, conserve the mean and L2 norm, and keep the gaps."""
    quadrature = flow_service.evolve_potential(two_gap_field, FlowSpec(t_grid=TIMES))
    direct = flow_service.evolve_potential(
        two_gap_field, FlowSpec(t_grid=TIMES, method=FlowMethod.DIRECT, dt=1e-4)
    )
    report = flow_service.compare_trajectories(quadrature, direct, s=0.0)
    diag = direct.diagnostics

    # Assertions
    assert report.max_distance < 1e-4
    assert np.max(np.abs(diag.mean - diag.mean[0])) < 1e-8
    assert np.max(np.abs(diag.l2 - diag.l2[0])) < 1e-8
    assert np.max(np.abs(diag.energy - diag.energy[0])) < 1e-7
    assert report.gap_drift_a == 0.0
    assert report.gap_drift_b < 1e-6
    assert quadrature.diagnostics.gaps[0, :2] == pytest.approx([0.5, 0.25], abs=1e-8)


def test_nonzero_mean(flow_service):
    """The mean shifts the frequencies by -2cn in both methods."""
    v0 = one_gap_potential(0.5, N=48).plus_constant(0.3)
    grid = [0.0, 0.25, 0.5]
    quadrature = flow_service.evolve_potential(v0, FlowSpec(t_grid=grid, c=0.3))
    direct = flow_service.evolve_potential(
        v0, FlowSpec(t_grid=grid, method=FlowMethod.DIRECT, dt=1e-4)
    )

    # Assertions
    assert flow_service.compare_trajectories(quadrature, direct).max_distance < 1e-6
    assert quadrature.fields[-1].mean == pytest.approx(0.3)


def test_reflection_reverses_time(flow_service, two_gap_field):
    """Evolving the reflected state at time T for time T returns the reflected datum."""
    T = 0.5
    forward = flow_service.evolve_potential(two_gap_field, FlowSpec(t_grid=[T]))
    back = flow_service.evolve_potential(
        forward.fields[0].reflect(), FlowSpec(t_grid=[T], method=FlowMethod.DIRECT, dt=1e-4)
    )

    # Assertions
    assert sobolev_distance(back.fields[0].reflect(), two_gap_field) < 1e-6


def test_step_too_large(flow_service):
    """The CFL bound rejects dt = 0.5 on 64 modes."""
    spec = FlowSpec(t_grid=[1.0], method=FlowMethod.DIRECT, dt=0.5)

    with pytest.raises(StepTooLarge):
        flow_service.evolve_potential(one_gap_potential(0.5, N=64), spec)


def test_mean_mismatch_is_rejected(flow_service):
    """A requested c must match the datum."""
    with pytest.raises(ValueError):
        flow_service.evolve_potential(one_gap_potential(0.5, N=32), FlowSpec(t_grid=[0.0], c=1.0))


def test_grid_mismatch(flow_service):
    """Trajectories on different grids cannot be compared."""
    u0 = one_gap_potential(0.5, N=32)
    a = flow_service.evolve_potential(u0, FlowSpec(t_grid=[0.0, 1.0]))
    b = flow_service.evolve_potential(u0, FlowSpec(t_grid=[0.0, 0.5, 1.0]))

    with pytest.raises(GridMismatch):
        flow_service.compare_trajectories(a, b)


def test_time_grid_must_increase():
    """Decreasing or negative output times are rejected."""
    with pytest.raises(ValueError):
        FlowSpec(t_grid=[0.0, 1.0, 0.5])
    with pytest.raises(ValueError):
        FlowSpec(t_grid=[-1.0, 0.0])


def test_trajectory_table(flow_service):
    """Header lists t, mean, norms, energy and the diagnostic gaps."""
    u0 = one_gap_potential(0.5, N=32)
    spec = FlowSpec(t_grid=[0.0, 0.5], sobolev_indices=(0.0, 0.5), diagnostic_gaps=2)
    header, rows = flow_service.trajectory_table(flow_service.evolve_potential(u0, spec))

    # Assertions
    assert header == ["t", "mean", "L2", "H0", "H0.5", "energy", "gamma_1", "gamma_2"]
    assert len(rows) == 2
    assert rows[1][0] == 0.5
    assert rows[0][6] == pytest.approx(1.0 / 3.0, abs=1e-8)
