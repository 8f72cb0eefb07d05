"""
Probe Service - quantitative surrogates for orbital stability, almost
periodicity and the uniform bounds on Sobolev norms along the flow.
"""

from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import fft as sfft
from scipy.optimize import brentq

from src.domain.models import (
    BirkhoffState,
    FlowMethod,
    FlowSpec,
    NormTrackReport,
    RealField,
    RecurrenceReport,
    StabilityReport,
)
from src.services.birkhoff_service import BirkhoffService
from src.services.flow_service import FlowService
from src.services.inverse_service import InverseService
from src.services.spectral_core import (
    one_gap_potential,
    random_band_limited_field,
    sobolev_distance,
    sobolev_norm,
    sobolev_weights,
)
from src.utils.logging_config import get_logger
from src.utils.rng import make_rng

logger = get_logger(__name__)

NORMTRACK_SPACING = 2.0 * np.pi / 64.0


class ProbeService:
    """Service for the experiment probes run by the command line."""

    def __init__(
        self,
        birkhoff_service: BirkhoffService,
        inverse_service: InverseService,
        flow_service: FlowService,
        config: Dict[str, Any],
    ):
        """Initialize probe service."""
        self.birkhoff = birkhoff_service
        self.inverse = inverse_service
        self.flow = flow_service
        self.config = config
        self.oversampling = config.get("tau_oversampling", 8)
        self.modes = config.get("modes", 256)

        logger.info("Initialized ProbeService", tau_oversampling=self.oversampling, modes=self.modes)

    # ============ Orbital stability ============

    def orbit_distance(self, v: RealField, u0: RealField, s: float) -> Tuple[float, float]:
        """
        inf over tau of ||v - u0(. + tau)||_s.

        The cross term sum_n w_n conj(v(n)) u0(n) e^{in tau} is sampled on a
        uniform tau grid by one inverse FFT, then refined by Newton steps that
        are kept only while the distance decreases.
        """
        N = max(v.N, u0.N)
        v = v.with_modes(N)
        u0 = u0.with_modes(N)
        n = v.indices
        weighted = sobolev_weights(n, s) * np.conj(v.coeffs) * u0.coeffs

        size = max(self.oversampling * N, 2 * N + 1)
        placed = np.zeros(size, dtype=complex)
        np.add.at(placed, n % size, weighted)
        cross = size * sfft.ifft(placed)
        best = int(np.argmax(cross.real))
        tau = 2.0 * np.pi * best / size

        def distance(shift: float) -> float:
            return sobolev_distance(v, u0.translate(shift), s)

        current = distance(tau)
        for _ in range(8):
            phase = np.exp(1j * n * tau)
            slope = float(np.sum(1j * n * weighted * phase).real)
            curvature = float(np.sum(-(n**2) * weighted * phase).real)
            if curvature >= 0.0:
                break
            candidate = tau - slope / curvature
            trial = distance(candidate)
            if trial >= current:
                break
            tau, current = candidate, trial
        return current, float(np.mod(tau, 2.0 * np.pi))

    def stability_probe(
        self,
        q: float,
        delta: float,
        s: float,
        t_max: float,
        rng: Optional[np.random.Generator] = None,
        samples: int = 101,
        N: Optional[int] = None,
        shift: float = 0.0,
    ) -> StabilityReport:
        """sup_t inf_tau ||S(t, u0 + p) - u0(. + tau)||_s with ||p||_s = delta."""
        if delta < 0.0:
            raise ValueError("perturbation size must be nonnegative")
        N = N or self.modes
        rng = rng or make_rng(self.config.get("seed", 0))
        u0 = one_gap_potential(q, 1.0, N)
        v0 = u0
        if delta > 0.0:
            bump = random_band_limited_field(rng, N)
            v0 = u0 + bump.scaled(delta / sobolev_norm(bump, s))
        v0 = v0.translate(shift)

        times = np.linspace(0.0, t_max, samples)
        trajectory = self.flow.evolve_potential(
            v0, FlowSpec(t_grid=times, method=FlowMethod.QUADRATURE, diagnostic_gaps=0)
        )
        distances = [self.orbit_distance(v, u0, s)[0] for v in trajectory.fields]
        sup = max(distances)

        logger.info("Stability probe finished", q=q, delta=delta, s=s, sup_distance=sup)
        return StabilityReport(
            q=q,
            delta=delta,
            s=s,
            t_max=t_max,
            times=[float(t) for t in times],
            distances=distances,
            sup_distance=sup,
            ratio=sup / delta if delta > 0.0 else None,
        )

    # ============ Recurrence ============

    def recurrence_probe(
        self,
        state: BirkhoffState,
        c: float,
        horizon: float,
        eps: float,
        s: float = 0.0,
        N: Optional[int] = None,
        count: int = 3,
    ) -> RecurrenceReport:
        """First eps-almost periods of the phase flow and the return distances there."""
        N = N or self.modes
        omega = self.birkhoff.frequencies(state, c).omega
        peak = float(np.max(np.abs(omega))) if omega.size else 0.0

        if peak == 0.0:
            step = horizon / 1000.0
            returns = [step * (j + 1) for j in range(count)]
            return RecurrenceReport(
                c=c,
                horizon=horizon,
                eps=eps,
                omega=[float(w) for w in omega],
                returns=returns,
                return_distances=[0.0] * count,
                status="found",
            )

        step = 0.1 / peak
        grid = step * np.arange(1, int(np.floor(horizon / step)) + 1)
        # smooth surrogate sum_n (1 - cos(omega_n t)) for locating minima
        misfit = np.sum(1.0 - np.cos(np.outer(grid, omega)), axis=1)

        def slope(t: float) -> float:
            return float(np.sum(omega * np.sin(omega * t)))

        returns: List[float] = []
        for j in range(1, grid.size - 1):
            if not (misfit[j] <= misfit[j - 1] and misfit[j] <= misfit[j + 1]):
                continue
            lo, hi = grid[j - 1], grid[j + 1]
            t = grid[j]
            if slope(lo) < 0.0 < slope(hi):
                t = brentq(slope, lo, hi, xtol=1e-15, rtol=4.0 * np.finfo(float).eps)
            miss = float(np.max(np.abs(np.exp(1j * omega * t) - 1.0)))
            if miss < eps and (not returns or t - returns[-1] > step):
                returns.append(float(t))
                if len(returns) == count:
                    break

        start = self.inverse.reconstruct(state, N)
        distances = []
        for t in returns:
            moved = self.inverse.reconstruct(self.flow.quadrature_evolve(state, t, c), N)
            distances.append(sobolev_distance(moved, start, s))
        status = "found" if returns else "none_found"
        logger.info("Recurrence probe finished", status=status, returns=returns)
        return RecurrenceReport(
            c=c,
            horizon=horizon,
            eps=eps,
            omega=[float(w) for w in omega],
            returns=returns,
            return_distances=distances,
            status=status,
        )

    # ============ Norm tracking ============

    @staticmethod
    def growth_ratio(values: Sequence[float]) -> float:
        """Sup over the second half of the window divided by the sup over the first half."""
        values = np.asarray(values, dtype=float)
        half = max(1, values.size // 2)
        first = float(np.max(values[:half]))
        second = float(np.max(values[half:])) if values.size > half else first
        return second / first if first > 0.0 else 1.0

    def normtrack(
        self,
        v0: RealField,
        s_list: Sequence[float],
        t_max: float,
        direct_t_max: float = 1.0,
        direct_modes: Optional[int] = None,
        tolerance: float = 1e-8,
    ) -> NormTrackReport:
        """H^s norms along the quadrature flow, plus a short direct run for drift."""
        exponents = tuple(float(s) for s in s_list)
        times = np.arange(0.0, t_max + 0.5 * NORMTRACK_SPACING, NORMTRACK_SPACING)
        quadrature = self.flow.evolve_potential(
            v0,
            FlowSpec(
                t_grid=times,
                method=FlowMethod.QUADRATURE,
                sobolev_indices=exponents,
                diagnostic_gaps=0,
            ),
        )
        norms = {f"{s:g}": [float(x) for x in quadrature.diagnostics.sobolev[s]] for s in exponents}
        sups = {key: max(values) for key, values in norms.items()}
        ratios = {key: self.growth_ratio(values) for key, values in norms.items()}
        bounded = all(r <= 1.0 + tolerance for r in ratios.values())

        report = NormTrackReport(
            s_list=list(exponents),
            times=[float(t) for t in times],
            quadrature_norms=norms,
            quadrature_sup=sups,
            growth_ratio=ratios,
            bounded=bounded,
        )
        if direct_t_max <= 0.0:
            return report

        direct_times = np.linspace(0.0, direct_t_max, 11)
        direct = self.flow.evolve_potential(
            v0,
            FlowSpec(
                t_grid=direct_times,
                method=FlowMethod.DIRECT,
                dt=self.config.get("flow_dt", 1e-4),
                dealias=self.config.get("flow_dealias", 2.0 / 3.0),
                modes=direct_modes,
                sobolev_indices=exponents,
                diagnostic_gaps=0,
            ),
        )
        diag = direct.diagnostics
        logger.info("Norm tracking finished", bounded=bounded, t_max=t_max)
        return report.model_copy(
            update={
                "direct_times": [float(t) for t in direct_times],
                "direct_norms": {f"{s:g}": [float(x) for x in diag.sobolev[s]] for s in exponents},
                "direct_mean_drift": float(np.max(np.abs(diag.mean - diag.mean[0]))),
                "direct_l2_drift": float(np.max(np.abs(diag.l2 - diag.l2[0]))),
            }
        )
