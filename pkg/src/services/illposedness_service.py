"""
Ill-posedness Service - constructions showing that the flow map cannot be
continuously extended below the critical regularity.

The potentials u = 2 Re(eps q z / (1 - q z)) with 0 < eps < q < 1 have a single
negative eigenvalue lambda_0 = -mu, where mu is the unique positive zero of

    F(mu, eps, q) = int_0^q t^{eps+mu} (1-qt)^eps / (q-t)^eps (mu/t - eps q/(1-qt)) dt.

All integrals are evaluated in s = q - t with delta = 1 - q^2 carried
explicitly, so q^2 = 1 - e^{-40} still resolves.
"""

from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import trapezoid
from scipy.optimize import brentq, minimize_scalar
from scipy.special import roots_jacobi, roots_legendre

from src.domain.errors import (
    IntervalTooShort,
    NoBracket,
    QuadratureNotConverged,
    TruncationInsufficient,
)
from src.domain.models import (
    BirkhoffState,
    DivergenceSample,
    HardyField,
    IllposedParams,
    LaxSpectrum,
    RealField,
    UkConstruction,
    WindowedIntegral,
    XiSeries,
)
from src.services.birkhoff_service import BirkhoffService, state_from_gaps
from src.services.inverse_service import InverseService
from src.services.lax_service import LaxService
from src.services.spectral_core import disc_eval, one_gap_potential
from src.utils.logging_config import get_logger

logger = get_logger(__name__)

# above this Jacobi exponent the t-panel weight is applied pointwise
JACOBI_EXPONENT_LIMIT = 20.0


class IllposednessService:
    """Service for the F-function, the deep-ground-state sequence and the divergence witnesses."""

    def __init__(
        self,
        lax_service: LaxService,
        birkhoff_service: BirkhoffService,
        inverse_service: InverseService,
        config: Dict[str, Any],
    ):
        """
        Initialize ill-posedness service.

        Args:
            lax_service: Spectral backend
            birkhoff_service: Forward map
            inverse_service: Finite-gap reconstruction
            config: Quadrature, ladder and truncation settings
        """
        self.lax = lax_service
        self.birkhoff = birkhoff_service
        self.inverse = inverse_service
        self.config = config
        self.debug = config.get("debug", False)
        self.initial_nodes = config.get("quad_initial_nodes", 16)
        self.max_nodes = config.get("quad_max_nodes", 512)
        self.quad_rtol = config.get("quad_rtol", 1e-11)
        self.crosscheck_rtol = config.get("quad_crosscheck_rtol", 1e-8)

        logger.info(
            "Initialized IllposednessService",
            quad_rtol=self.quad_rtol,
            max_nodes=self.max_nodes,
            debug=self.debug,
        )

    # ============ Quadrature helpers ============

    @staticmethod
    def _edges(params: IllposedParams, mu: float) -> List[float]:
        """Panel breakpoints in s on [0, q/2], doubling from the smallest scale."""
        q = params.q
        head = min(params.delta, q / (4.0 * (1.0 + mu)))
        edges = [0.0, head]
        while 2.0 * edges[-1] < 0.5 * q:
            edges.append(2.0 * edges[-1])
        edges.append(0.5 * q)
        return edges

    @staticmethod
    def _logs_in_s(params: IllposedParams, s: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """log t and log(1 - qt) at t = q - s."""
        q, delta = params.q, params.delta
        log_q = 0.5 * np.log1p(-delta)
        log_t = log_q + np.log1p(-s / q)
        log_d = np.log(delta) + np.log1p(q * s / delta)
        return log_t, log_d

    def _composite(
        self,
        params: IllposedParams,
        n: int,
        s_terms,
        t_terms,
        t_exponent: float,
    ) -> np.ndarray:
        """
        Sum of Gauss rules over the graded panels.

        s_terms(s) returns the integrand stripped of s^{-eps}; t_terms(t) the
        integrand stripped of t^{t_exponent}. Returns one total per term.
        """
        eps, q = params.epsilon, params.q
        edges = self._edges(params, params.mu)

        x, w = roots_jacobi(n, 0.0, -eps)
        b = edges[1]
        total = (0.5 * b) ** (1.0 - eps) * (w @ s_terms(0.5 * b * (1.0 + x)))

        x, w = roots_legendre(n)
        for lo, hi in zip(edges[1:-1], edges[2:]):
            s = lo + 0.5 * (hi - lo) * (1.0 + x)
            total = total + 0.5 * (hi - lo) * (w @ (s_terms(s) * s[:, None] ** (-eps)))

        half = 0.5 * q
        if t_exponent <= JACOBI_EXPONENT_LIMIT:
            x, w = roots_jacobi(n, 0.0, t_exponent)
            t = 0.5 * half * (1.0 + x)
            total = total + (0.5 * half) ** (t_exponent + 1.0) * (w @ t_terms(t))
        else:
            t = 0.5 * half * (1.0 + x)
            weight = np.exp(t_exponent * np.log(t))
            total = total + 0.5 * half * (w @ (t_terms(t) * weight[:, None]))
        return total

    def _converge(self, evaluate, label: str, params: IllposedParams) -> Tuple[float, float]:
        """Double the node count until two successive values agree; returns (value, scale)."""
        n = self.initial_nodes
        previous: Optional[float] = None
        while n <= self.max_nodes:
            value, scale = evaluate(n)
            if previous is not None and abs(value - previous) <= self.quad_rtol * scale:
                return value, scale
            previous = value
            n *= 2
        logger.error("Quadrature did not converge", form=label, mu=params.mu)
        raise QuadratureNotConverged(
            f"{label} quadrature did not converge",
            {
                "epsilon": params.epsilon,
                "q": params.q,
                "delta": params.delta,
                "mu": params.mu,
                "max_nodes": self.max_nodes,
            },
        )

    # ============ F function ============

    def _require_mu(self, params: IllposedParams) -> float:
        if params.mu is None:
            raise ValueError("F needs a candidate mu")
        return float(params.mu)

    def _F_with_scale(self, params: IllposedParams) -> Tuple[float, float]:
        mu = self._require_mu(params)
        eps, q, delta = params.epsilon, params.q, params.delta

        def s_terms(s: np.ndarray) -> np.ndarray:
            log_t, log_d = self._logs_in_s(params, s)
            plus = mu * np.exp((eps + mu - 1.0) * log_t + eps * log_d)
            minus = eps * q * np.exp((eps + mu) * log_t + (eps - 1.0) * log_d)
            return np.stack([plus, minus], axis=-1)

        def t_terms(t: np.ndarray) -> np.ndarray:
            one_minus = 1.0 - q * t
            shape = one_minus**eps * (q - t) ** (-eps)
            return np.stack([mu * shape, eps * q * t * shape / one_minus], axis=-1)

        def evaluate(n: int) -> Tuple[float, float]:
            plus, minus = self._composite(params, n, s_terms, t_terms, eps + mu - 1.0)
            return float(plus - minus), float(plus + minus)

        return self._converge(evaluate, "F", params)

    def eval_F(self, params: IllposedParams) -> float:
        """F(mu, eps, q) by graded Gauss-Jacobi quadrature."""
        value, _ = self._F_with_scale(params)
        if self.debug:
            self.crosscheck_F(params)
        logger.debug("Evaluated F", mu=params.mu, epsilon=params.epsilon, q=params.q, F=value)
        return value

    def alter_F(self, params: IllposedParams) -> float:
        """
        F after integrating by parts against d[g(t) - g(q)], g(t) = t^mu (1-qt)^eps:

            F = eps q int_0^q (g(q) - g(t)) t^{eps-1} (q-t)^{-1-eps} dt.
        """
        mu = self._require_mu(params)
        eps, q, delta = params.epsilon, params.q, params.delta
        log_q = 0.5 * np.log1p(-delta)
        g_q = np.exp(mu * log_q + eps * np.log(delta))

        def drop(log_t: np.ndarray, log_d: np.ndarray) -> np.ndarray:
            """g(q) - g(t) without cancellation."""
            exponent = mu * (log_t - log_q) + eps * (log_d - np.log(delta))
            return -g_q * np.expm1(exponent)

        def s_terms(s: np.ndarray) -> np.ndarray:
            log_t, log_d = self._logs_in_s(params, s)
            value = eps * q * drop(log_t, log_d) * np.exp((eps - 1.0) * log_t) / s
            return np.stack([value, np.abs(value)], axis=-1)

        def t_terms(t: np.ndarray) -> np.ndarray:
            log_t = np.log(t)
            log_d = np.log1p(-q * t)
            value = eps * q * drop(log_t, log_d) * (q - t) ** (-1.0 - eps)
            return np.stack([value, np.abs(value)], axis=-1)

        def evaluate(n: int) -> Tuple[float, float]:
            value, mass = self._composite(params, n, s_terms, t_terms, eps - 1.0)
            return float(value), float(mass)

        value, _ = self._converge(evaluate, "alternative F", params)
        return value

    def crosscheck_F(self, params: IllposedParams) -> float:
        """Relative disagreement of the two forms, measured against the size of the integrand."""
        value, scale = self._F_with_scale(params)
        other = self.alter_F(params)
        discrepancy = abs(value - other) / scale
        if discrepancy > self.crosscheck_rtol:
            raise QuadratureNotConverged(
                "the two forms of F disagree",
                {"F": value, "alternative": other, "relative": discrepancy, "mu": params.mu},
            )
        return discrepancy

    def dF_dmu(self, params: IllposedParams, step: Optional[float] = None) -> float:
        """Central difference in mu."""
        mu = self._require_mu(params)
        h = step or 1e-5 * max(1.0, mu)
        h = min(h, 0.5 * mu)
        up = self.eval_F(params.with_mu(mu + h))
        down = self.eval_F(params.with_mu(mu - h))
        return (up - down) / (2.0 * h)

    def sign_changes(self, params: IllposedParams, samples: int = 48) -> int:
        """Sign changes of F on a geometric mu grid over (0, 4 mu_max]."""
        top = 4.0 * params.mu_max
        grid = np.geomspace(min(1e-6, 1e-6 * top), top, samples)
        signs = np.sign([self.eval_F(params.with_mu(float(m))) for m in grid])
        return int(np.count_nonzero(signs[1:] != signs[:-1]))

    def lambda0_root(self, epsilon: float, q: float, params: Optional[IllposedParams] = None) -> float:
        """Unique positive zero mu* of F(., eps, q); lambda_0 = -mu*."""
        params = params or IllposedParams.from_q(epsilon, q)

        def F(mu: float) -> float:
            return self.eval_F(params.with_mu(mu))

        hi = params.mu_max
        if F(hi) <= 0.0:
            raise NoBracket(
                "F is not positive at the right end of the bracket",
                {"epsilon": params.epsilon, "q": params.q, "mu_max": hi},
            )
        lo = 0.5 * hi
        for _ in range(60):
            if F(lo) < 0.0:
                break
            hi, lo = lo, 0.5 * lo
        else:
            raise NoBracket(
                "no sign change of F below eps q^2 / (1 - q^2)",
                {"epsilon": params.epsilon, "q": params.q, "mu_low": lo},
            )

        mu = brentq(F, lo, hi, xtol=1e-15, rtol=4.0 * np.finfo(float).eps, maxiter=200)
        for _ in range(3):
            value = F(mu)
            if value == 0.0:
                break
            slope = self.dF_dmu(params.with_mu(mu))
            candidate = mu - value / slope
            if not lo < candidate < hi or abs(F(candidate)) >= abs(value):
                break
            mu = candidate

        logger.info("Found ground-state root", epsilon=params.epsilon, q=params.q, mu=mu)
        return float(mu)

    # ============ Deep ground state sequence ============

    def ladder(self, start: Optional[float] = None) -> List[float]:
        first = start or self.config.get("uk_epsilon_start", 0.5)
        ratio = self.config.get("uk_epsilon_ratio", 2.0**-0.25)
        steps = self.config.get("uk_epsilon_steps", 16)
        return [first * ratio**j for j in range(steps + 1)]

    @staticmethod
    def uk_params(epsilon: float) -> IllposedParams:
        """q^2 = 1 - exp(-eps^{-3/2})."""
        return IllposedParams.from_log_delta(epsilon, -(epsilon**-1.5))

    def select_epsilon(self, k: int, epsilon: Optional[float] = None) -> Tuple[int, IllposedParams, float]:
        """First ladder entry with eps q^2 / (1 - q^2) > k and F(k, eps, q) < 0, as (index, params, F)."""
        if k < 1:
            raise ValueError("k must be a positive integer")

        for index, eps in enumerate(self.ladder(epsilon)):
            params = self.uk_params(eps)
            if params.mu_max <= k:
                continue
            F_k = self.eval_F(params.with_mu(float(k)))
            if F_k < 0.0:
                return index, params, F_k
        raise NoBracket(
            "no epsilon on the ladder satisfies both growth conditions",
            {"k": k, "ladder": self.ladder(epsilon)},
        )

    def build_uk(self, k: int, epsilon: Optional[float] = None) -> UkConstruction:
        """
        u^(k) = 2 Re(eps_k q_k z / (1 - q_k z)) with the largest eps_k on the ladder
        for which F(k, eps_k, q_k) < 0 and eps_k q_k^2 / (1 - q_k^2) > k.
        """
        index, params, F_k = self.select_epsilon(k, epsilon)
        eps, growth = params.epsilon, params.mu_max

        log_q = 0.5 * np.log1p(-params.delta)
        max_modes = self.config.get("uk_max_modes", 8192)
        modes = int(np.ceil(np.log(self.config.get("uk_truncation", 1e-14)) / log_q))
        modes = min(modes, max_modes)
        tail = float(np.exp(modes * log_q))
        if tail > self.config.get("uk_truncation_limit", 1e-10):
            raise TruncationInsufficient(
                "q_k is too close to 1 for the mode limit",
                {"k": k, "epsilon": eps, "modes": modes, "q_power_N": tail},
            )

        field = one_gap_potential(params.q, eps, modes)
        logger.info("Built deep ground-state potential", k=k, epsilon=eps, modes=modes, tail=tail)
        return UkConstruction(
            k=k,
            field=field,
            params=params,
            modes=modes,
            ladder_index=index,
            truncation_tail=tail,
            F_at_k=F_k,
            growth_condition=growth,
        )

    def ground_state_ratio(self, u: RealField, q: float, spectrum: Optional[LaxSpectrum] = None) -> float:
        """f(q)/f(0) for the Galerkin ground state f of L_u; equals (eps + mu)/eps on u^(k)."""
        if spectrum is None:
            spectrum = self.lax.spectrum(u.mean_zero())
        ground = HardyField(coeffs=spectrum.vectors[:, 0])
        return float((disc_eval(ground, q) / ground.coeffs[0]).real)

    # ============ First Fourier coefficient along the flow ============

    @staticmethod
    def xi_terms(state: BirkhoffState, c: float = 0.0) -> Tuple[np.ndarray, np.ndarray]:
        """
        Amplitudes A_n and frequencies W_n with xi(t) = sum_n A_n e^{i W_n t}:
        A_n = -sqrt(mu_{n+1} kappa_n / kappa_{n+1}) zeta_{n+1} conj(zeta_n),
        W_n = 1 + 2 lambda_n - 2c.
        """
        P = state.P
        zeta = np.concatenate([[1.0 + 0j], state.zeta])
        amplitudes = -np.sqrt(state.mu_ratio * state.kappa[:P]) * zeta[1:] * np.conj(zeta[:P])
        frequencies = 1.0 + 2.0 * state.lambdas[:P] - 2.0 * c
        return amplitudes, frequencies

    def xi_timeseries(
        self,
        u_k: RealField,
        t_grid: Sequence[float],
        c: float = 0.0,
        state: Optional[BirkhoffState] = None,
    ) -> XiSeries:
        """xi(t) = <S(t, u_k) | e^{ix}> from the closed-form series."""
        times = np.asarray(t_grid, dtype=float)
        if state is None:
            state = self.birkhoff.birkhoff_forward(u_k.mean_zero())
        amplitudes, frequencies = self.xi_terms(state, c)
        xi = np.exp(1j * np.outer(times, frequencies)) @ amplitudes
        logger.debug("Evaluated xi series", P=state.P, points=times.size)
        return XiSeries(times=times, xi=xi, state=state, c=c)

    def windowed_integral(
        self,
        series: XiSeries,
        interval: Tuple[float, float],
        lambda0: Optional[float] = None,
    ) -> WindowedIntegral:
        """Trapezoidal int_I xi(t) e^{-it(1 + 2 lambda_0 - 2c)} dt and its leading term."""
        t_a, t_b = float(interval[0]), float(interval[1])
        times = series.times
        inside = (times >= t_a - 1e-12) & (times <= t_b + 1e-12)
        outside = t_a < times[0] - 1e-12 or t_b > times[-1] + 1e-12
        if t_b <= t_a or outside or np.count_nonzero(inside) < 2:
            raise IntervalTooShort(
                "interval must have positive length inside the time grid",
                {"interval": [t_a, t_b], "grid": [float(times[0]), float(times[-1])]},
            )

        state = series.state
        lambda0 = float(state.lambdas[0]) if lambda0 is None else float(lambda0)
        t = times[inside]
        carrier = np.exp(-1j * t * (1.0 + 2.0 * lambda0 - 2.0 * series.c))
        value = complex(trapezoid(series.xi[inside] * carrier, t))

        length = t_b - t_a
        zeta_1 = complex(state.zeta[0]) if state.P else 0j
        gamma_1 = float(state.gamma[0]) if state.P else 0.0
        predicted = -np.sqrt(state.mu_ratio[0] * state.kappa[0]) * zeta_1 * length if state.P else 0j
        asymptotic = -zeta_1 * length / np.sqrt(gamma_1) if gamma_1 > 0.0 else 0j
        return WindowedIntegral(
            interval=(t_a, t_b),
            lambda0=lambda0,
            value=value,
            predicted=complex(predicted),
            predicted_asymptotic=complex(asymptotic),
        )

    # ============ Two-gap divergence family ============

    def _ordered_factors(self, q: np.ndarray, phi_1: float, phi_2: float) -> Tuple[complex, complex]:
        """Label the factors by their large-gap limits e^{i phi_1}, e^{i(phi_2 - phi_1)}."""
        target = np.exp(1j * np.array([phi_1, phi_2 - phi_1]))
        straight = abs(q[0] - target[0]) + abs(q[1] - target[1])
        swapped = abs(q[1] - target[0]) + abs(q[0] - target[1])
        if swapped < straight:
            return complex(q[1]), complex(q[0])
        return complex(q[0]), complex(q[1])

    def two_gap_divergence(self, gamma: float, t: float, N: Optional[int] = None) -> DivergenceSample:
        """Equal actions gamma, zero initial phases, evolved to time t by the exact phase laws."""
        if not gamma > 0.0:
            raise ValueError("gamma must be positive")
        N = N or self.config.get("modes", 256)

        phi_1 = t * (1.0 - 4.0 * gamma)
        phi_2 = phi_1 + t * (3.0 - 2.0 * gamma)
        state = state_from_gaps([gamma, gamma], [phi_1, phi_2])
        M = self.inverse.transfer_matrix(state)
        coeffs = self.inverse.q_polynomial(M)
        field = self.inverse.reconstruct(state, N)
        q_1, q_2 = self._ordered_factors(self.inverse.factor_data(M), phi_1, phi_2)

        logger.debug("Two-gap divergence sample", gamma=gamma, t=t, q1=abs(q_1), q2=abs(q_2))
        return DivergenceSample(
            gamma=gamma,
            t=t,
            state=state,
            field=field,
            q1=q_1,
            q2=q_2,
            alpha=complex(coeffs[1]),
            beta=complex(coeffs[2]),
        )

    def renormalization_gap(
        self, gamma: float, gamma_prime: float, t: float, grid: int = 720
    ) -> float:
        """min over eta of |q1' - e^{i eta} q1| + |q2' - e^{i eta} q2|."""
        a = self.two_gap_divergence(gamma, t, N=4)
        b = self.two_gap_divergence(gamma_prime, t, N=4)

        def misalignment(eta: float) -> float:
            rotation = np.exp(1j * eta)
            return abs(b.q1 - rotation * a.q1) + abs(b.q2 - rotation * a.q2)

        etas = np.linspace(0.0, 2.0 * np.pi, grid, endpoint=False)
        values = np.array([misalignment(eta) for eta in etas])
        best = int(np.argmin(values))
        width = 2.0 * np.pi / grid
        refined = minimize_scalar(
            misalignment,
            bounds=(etas[best] - width, etas[best] + width),
            method="bounded",
            options={"xatol": 1e-10},
        )
        return float(min(values[best], refined.fun))
