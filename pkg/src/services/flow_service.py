"""
Flow Service - time evolution of the Benjamin-Ono equation

    d_t v = H d_x^2 v - d_x(v^2)

either exactly, as a rotation of the Birkhoff coordinates, or by a dealiased
integrating-factor RK4 scheme in coefficient space.
"""

from typing import Any, Dict, List, Sequence, Tuple, Union

import numpy as np
from scipy import fft as sfft

from src.domain.errors import BlowupDetected, GridMismatch, StepTooLarge, TailNotResolved
from src.domain.models import (
    BirkhoffState,
    ComparisonReport,
    FlowMethod,
    FlowSpec,
    LaxSpectrum,
    RealField,
    SobolevIndex,
    Trajectory,
    TrajectoryDiagnostics,
)
from src.services.birkhoff_service import BirkhoffService
from src.services.inverse_service import InverseService
from src.services.lax_service import LaxService
from src.services.spectral_core import energy, sobolev_distance, sobolev_norm
from src.utils.logging_config import get_logger

logger = get_logger(__name__)


class FlowService:
    """Service for quadrature and direct time evolution."""

    def __init__(
        self,
        lax_service: LaxService,
        birkhoff_service: BirkhoffService,
        inverse_service: InverseService,
        config: Dict[str, Any],
    ):
        """
        Initialize flow service.

        Args:
            lax_service: Spectral backend, used for gap diagnostics
            birkhoff_service: Forward map
            inverse_service: Finite-gap reconstruction
            config: Service configuration
        """
        self.lax = lax_service
        self.birkhoff = birkhoff_service
        self.inverse = inverse_service
        self.config = config
        self.blowup_threshold = config.get("blowup_threshold", 1e8)
        self.cfl_limit = config.get("cfl_limit", 2.8)
        self.tol_tail = config.get("tol_tail", 1e-10)

        logger.info(
            "Initialized FlowService",
            blowup_threshold=self.blowup_threshold,
            cfl_limit=self.cfl_limit,
        )

    # ============ Quadrature ============

    def quadrature_evolve(self, state: BirkhoffState, t: float, c: float = 0.0) -> BirkhoffState:
        """zeta_n -> zeta_n e^{i t omega_{c,n}}; actions and spectral data are copied."""
        omega = self.birkhoff.frequencies(state, c).omega
        return state.with_zeta(state.zeta * np.exp(1j * omega * t))

    def _check_tail(self, state: BirkhoffState, spectrum: LaxSpectrum) -> None:
        n_trust = spectrum.n_trust
        if n_trust and state.P == n_trust and state.gamma[-1] > self.tol_tail:
            raise TailNotResolved(
                "gaps are still open at the trust limit",
                {"P": state.P, "gamma_last": float(state.gamma[-1]), "tol_tail": self.tol_tail},
            )

    def evolve_potential(self, v0: RealField, spec: FlowSpec) -> Trajectory:
        """S(t, v0) on the output grid."""
        if spec.method is FlowMethod.DIRECT:
            return self.direct_integrate(v0, spec)

        N = spec.modes or v0.N
        v0 = v0.with_modes(N)
        c = v0.mean
        if spec.c is not None and abs(spec.c - c) > 1e-12:
            raise ValueError("flow mean does not match the mean of the initial datum")

        logger.info("Quadrature evolution", N=N, c=c, outputs=spec.t_grid.size)
        try:
            spectrum = self.lax.spectrum(v0.mean_zero(), N)
            state0 = self.birkhoff.birkhoff_forward(v0, spectrum=spectrum)
            self._check_tail(state0, spectrum)

            states = [self.quadrature_evolve(state0, float(t), c) for t in spec.t_grid]
            fields = [self.inverse.reconstruct(state, N) for state in states]
            gaps = np.tile(self._pad(state0.gamma, spec.diagnostic_gaps), (len(states), 1))
            diagnostics = self.diagnostics(fields, spec, gaps, state0.tail_action)

            return Trajectory(
                times=spec.t_grid,
                fields=fields,
                method=FlowMethod.QUADRATURE,
                states=states,
                diagnostics=diagnostics,
            )

        except Exception as e:
            logger.error("Quadrature evolution failed", error=str(e), exc_info=True)
            raise

    # ============ Direct integration ============

    def direct_integrate(self, v0: RealField, spec: FlowSpec) -> Trajectory:
        """Integrating-factor RK4 with exact landing on every output time."""
        N = spec.modes or v0.N
        field = v0.with_modes(N)
        n = np.arange(N + 1)
        M = sfft.next_fast_len(int(np.ceil(2 * (N + 1) / spec.dealias)))
        linear = 1j * n.astype(float) ** 2

        def nonlinear(b: np.ndarray) -> np.ndarray:
            """-d_x(v^2) on modes 0..N, squared on the padded grid."""
            padded = np.zeros(M // 2 + 1, dtype=complex)
            padded[: N + 1] = b * M
            samples = sfft.irfft(padded, n=M)
            square = sfft.rfft(samples * samples)[: N + 1] / M
            return -1j * n * square

        peak = float(np.max(np.abs(field.values(M))))
        courant = spec.dt * N * 2.0 * peak
        if courant > self.cfl_limit:
            raise StepTooLarge(
                "time step violates the advective CFL bound",
                {"dt": spec.dt, "courant": courant, "cfl_limit": self.cfl_limit},
            )

        logger.info("Direct integration", N=N, grid=M, dt=spec.dt, courant=courant)
        a = field.positive.copy()
        fields: List[RealField] = []
        t = 0.0
        for target in spec.t_grid:
            span = float(target) - t
            if span > 0.0:
                steps = max(1, int(np.ceil(span / spec.dt - 1e-9)))
                h = span / steps
                E = np.exp(linear * h)
                E2 = np.exp(linear * h / 2.0)
                for step in range(steps):
                    k1 = nonlinear(a)
                    k2 = nonlinear(E2 * (a + 0.5 * h * k1))
                    k3 = nonlinear(E2 * a + 0.5 * h * k2)
                    k4 = nonlinear(E * a + h * E2 * k3)
                    a = E * a + (h / 6.0) * (E * k1 + 2.0 * E2 * (k2 + k3) + k4)
                    self._check_blowup(a, t + (step + 1) * h)
            fields.append(RealField.from_positive(a))
            t = float(target)

        gaps = self._gap_history(fields, spec.diagnostic_gaps)
        return Trajectory(
            times=spec.t_grid,
            fields=fields,
            method=FlowMethod.DIRECT,
            diagnostics=self.diagnostics(fields, spec, gaps),
        )

    def _check_blowup(self, a: np.ndarray, t: float) -> None:
        norm = float(np.sqrt(abs(a[0]) ** 2 + 2.0 * np.sum(np.abs(a[1:]) ** 2)))
        if not np.isfinite(norm) or norm > self.blowup_threshold:
            logger.error("Blowup detected", t=t, norm=norm)
            raise BlowupDetected(
                "solution norm left the admissible range",
                {"t": t, "norm": norm, "threshold": self.blowup_threshold},
            )

    # ============ Diagnostics ============

    @staticmethod
    def _pad(values: np.ndarray, count: int) -> np.ndarray:
        out = np.zeros(count)
        keep = min(count, values.size)
        out[:keep] = values[:keep]
        return out

    def _gap_history(self, fields: Sequence[RealField], count: int) -> np.ndarray:
        history = np.zeros((len(fields), count))
        if count == 0:
            return history
        for i, f in enumerate(fields):
            spectrum = self.lax.spectrum(f.mean_zero())
            history[i] = self._pad(self.lax.gap_sequence(spectrum), count)
        return history

    def diagnostics(
        self,
        fields: Sequence[RealField],
        spec: FlowSpec,
        gaps: np.ndarray,
        tail_action: float = 0.0,
    ) -> TrajectoryDiagnostics:
        """Mean, L2 and H^s norms, energy and leading gaps at every output time."""
        return TrajectoryDiagnostics(
            mean=np.array([f.mean for f in fields]),
            l2=np.array([sobolev_norm(f, 0.0) for f in fields]),
            sobolev={
                float(s): np.array([sobolev_norm(f, s) for f in fields])
                for s in spec.sobolev_indices
            },
            energy=np.array([energy(f) for f in fields]),
            gaps=gaps,
            tail_action=tail_action,
        )

    def gap_drift(self, trajectory: Trajectory, count: int = 4) -> float:
        """max_t max_n |gamma_n(t) - gamma_n(0)|."""
        if trajectory.diagnostics is not None and trajectory.diagnostics.gaps.size:
            gaps = trajectory.diagnostics.gaps
        else:
            gaps = self._gap_history(trajectory.fields, count)
        return float(np.max(np.abs(gaps - gaps[0]))) if gaps.size else 0.0

    def compare_trajectories(
        self, a: Trajectory, b: Trajectory, s: Union[SobolevIndex, float] = 0.0
    ) -> ComparisonReport:
        """Per-time H^s distance and the gap drift of each trajectory."""
        if a.times.shape != b.times.shape or not np.allclose(a.times, b.times, rtol=0.0, atol=1e-12):
            raise GridMismatch(
                "trajectories use different time grids",
                {"len_a": int(a.times.size), "len_b": int(b.times.size)},
            )
        exponent = s.s if isinstance(s, SobolevIndex) else float(s)
        distances = [sobolev_distance(fa, fb, exponent) for fa, fb in zip(a.fields, b.fields)]
        return ComparisonReport(
            s=exponent,
            times=[float(t) for t in a.times],
            distances=distances,
            max_distance=max(distances),
            gap_drift_a=self.gap_drift(a),
            gap_drift_b=self.gap_drift(b),
        )

    def trajectory_table(self, trajectory: Trajectory) -> Tuple[List[str], List[List[float]]]:
        """CSV layout t, mean, L2, H^s..., energy, gamma_1..gamma_K."""
        diag = trajectory.diagnostics
        if diag is None:
            raise ValueError("trajectory carries no diagnostics")
        exponents = sorted(diag.sobolev)
        header = ["t", "mean", "L2"] + [f"H{s:g}" for s in exponents] + ["energy"]
        header += [f"gamma_{n + 1}" for n in range(diag.gaps.shape[1])]
        rows = []
        for i, t in enumerate(trajectory.times):
            row = [float(t), float(diag.mean[i]), float(diag.l2[i])]
            row += [float(diag.sobolev[s][i]) for s in exponents]
            row += [float(diag.energy[i])] + [float(g) for g in diag.gaps[i]]
            rows.append(row)
        return header, rows
