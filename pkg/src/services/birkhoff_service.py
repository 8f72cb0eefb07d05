"""
Birkhoff Service - forward nonlinear Fourier transform.

A spectrum of L_u is turned into the coordinates zeta_n = <1|f_n>/sqrt(kappa_n).
The normalizing constants come from product formulas in the eigenvalues, so a
finite-gap state can be rebuilt from its zeta alone (see build_state).
"""

from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from src.domain.errors import NonPositiveKappa
from src.domain.models import BirkhoffState, FrequencyVector, LaxSpectrum, RealField
from src.services.lax_service import LaxService
from src.utils.logging_config import get_logger

logger = get_logger(__name__)


# ============ Product formulas ============

def lambdas_from_gaps(gamma: np.ndarray) -> np.ndarray:
    """lambda_n = n - sum_{k>n} gamma_k for n = 0..P."""
    gamma = np.asarray(gamma, dtype=float)
    tails = np.concatenate([np.cumsum(gamma[::-1])[::-1], [0.0]])
    return np.arange(gamma.size + 1, dtype=float) - tails


def _checked(values: np.ndarray, label: str) -> np.ndarray:
    bad = np.flatnonzero(~np.isfinite(values) | (values <= 0.0))
    if bad.size:
        n = int(bad[0])
        raise NonPositiveKappa(
            f"{label} product is not positive at n={n}",
            {"n": n, "value": float(values[n]), "quantity": label},
        )
    return values


def kappa_products(lam: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    """
    kappa_0 = prod_{p>=1} (1 - gamma_p/(lambda_p - lambda_0)) and, for n >= 1,
    kappa_n = 1/(lambda_n - lambda_0) prod_{p != n} (1 - gamma_p/(lambda_p - lambda_n)).
    """
    lam = np.asarray(lam, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    P = gamma.size
    rows = np.arange(P + 1)[:, None]
    cols = np.arange(1, P + 1)[None, :]
    skip = rows == cols
    diff = np.where(skip, 1.0, lam[None, 1:] - lam[:, None])
    factors = np.where(skip, 1.0, 1.0 - gamma[None, :] / diff)
    kappa = np.prod(factors, axis=1)
    kappa[1:] /= lam[1:] - lam[0]
    return _checked(kappa, "kappa")


def mu_ratio_products(lam: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    """
    mu_{n+1}/kappa_{n+1} = (lambda_n + 1 - lambda_0)
        / prod_{p != n+1} (1 - gamma_p/(lambda_p - lambda_n - 1)), n = 0..P-1.
    """
    lam = np.asarray(lam, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    P = gamma.size
    rows = np.arange(P)[:, None]
    cols = np.arange(1, P + 1)[None, :]
    skip = cols == rows + 1
    diff = np.where(skip, 1.0, lam[None, 1:] - lam[:P, None] - 1.0)
    factors = np.where(skip, 1.0, 1.0 - gamma[None, :] / diff)
    ratio = (lam[:P] + 1.0 - lam[0]) / np.prod(factors, axis=1)
    return _checked(ratio, "mu_ratio")


def build_state(
    zeta: Sequence[complex], mean_c: float = 0.0, tail_action: float = 0.0
) -> BirkhoffState:
    """Finite-gap state with spectral data rebuilt from the actions |zeta_n|^2."""
    zeta = np.asarray(zeta, dtype=complex).ravel()
    gamma = np.abs(zeta) ** 2
    lam = lambdas_from_gaps(gamma)
    return BirkhoffState(
        zeta=zeta,
        gamma=gamma,
        lambdas=lam,
        kappa=kappa_products(lam, gamma),
        mu_ratio=mu_ratio_products(lam, gamma),
        mean_c=mean_c,
        tail_action=tail_action,
    )


def state_from_gaps(
    gammas: Sequence[float], phases: Optional[Sequence[float]] = None, c: float = 0.0
) -> BirkhoffState:
    """zeta_n = sqrt(gamma_n) e^{i phi_n}."""
    gammas = np.asarray(gammas, dtype=float)
    if np.any(gammas < 0.0):
        raise ValueError("actions must be nonnegative")
    phases = np.zeros_like(gammas) if phases is None else np.asarray(phases, dtype=float)
    if phases.shape != gammas.shape:
        raise ValueError("one phase per action is required")
    return build_state(np.sqrt(gammas) * np.exp(1j * phases), mean_c=c)


def random_gap_state(
    rng: np.random.Generator,
    P: int,
    gamma_range: Tuple[float, float] = (0.1, 2.0),
    c: float = 0.0,
) -> BirkhoffState:
    """P gaps with uniform actions in gamma_range and uniform phases."""
    low, high = gamma_range
    gammas = rng.uniform(low, high, size=P)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=P)
    return state_from_gaps(gammas, phases, c)


def translate_state(state: BirkhoffState, a: float) -> BirkhoffState:
    """Coordinates of u(. + a): zeta_n -> zeta_n e^{ina}."""
    n = np.arange(1, state.P + 1)
    return state.with_zeta(state.zeta * np.exp(1j * n * a))


# ============ Service ============

class BirkhoffService:
    """Service for the forward Birkhoff map and the functions of the actions."""

    def __init__(self, lax_service: LaxService, config: Dict[str, Any]):
        """
        Initialize Birkhoff service.

        Args:
            lax_service: Spectral backend for L_u
            config: Service configuration (tol_tail)
        """
        self.lax = lax_service
        self.config = config
        self.tol_tail = config.get("tol_tail", 1e-10)

        logger.info("Initialized BirkhoffService", tol_tail=self.tol_tail)

    def kappa_sequence(self, spectrum: LaxSpectrum) -> np.ndarray:
        """kappa_0..kappa_{N_trust} from the trusted spectrum."""
        gamma = self.lax.gap_sequence(spectrum)
        return kappa_products(spectrum.trusted_eigenvalues, gamma)

    def mu_ratio_sequence(self, spectrum: LaxSpectrum) -> np.ndarray:
        """mu_{n+1}/kappa_{n+1} for n = 0..N_trust-1."""
        gamma = self.lax.gap_sequence(spectrum)
        return mu_ratio_products(spectrum.trusted_eigenvalues, gamma)

    def kappa_crosscheck(self, spectrum: LaxSpectrum, floor: float = 1e-6) -> float:
        """Largest relative gap between |<1|f_n>|^2 and gamma_n kappa_n where gamma_n > floor."""
        gamma = self.lax.gap_sequence(spectrum)
        kappa = kappa_products(spectrum.trusted_eigenvalues, gamma)
        overlap = np.abs(spectrum.vectors[0, 1 : spectrum.n_trust + 1]) ** 2
        keep = gamma > floor
        if not np.any(keep):
            return 0.0
        expected = gamma[keep] * kappa[1:][keep]
        return float(np.max(np.abs(overlap[keep] - expected) / expected))

    def retained_gaps(self, gamma: np.ndarray) -> Tuple[int, float]:
        """
        P is the last gap with gamma_n >= tol_tail; every gap below the threshold,
        inside 1..P or past it, is dropped and its action reported as the tail.
        """
        gamma = np.asarray(gamma, dtype=float)
        small = gamma < self.tol_tail
        significant = np.flatnonzero(~small)
        P = int(significant[-1]) + 1 if significant.size else 0
        return P, float(np.sum(gamma[small]))

    def birkhoff_forward(
        self,
        u: RealField,
        N: Optional[int] = None,
        spectrum: Optional[LaxSpectrum] = None,
    ) -> BirkhoffState:
        """Birkhoff coordinates of u, truncated to the significant gaps."""
        c = u.mean
        try:
            if spectrum is None:
                spectrum = self.lax.spectrum(u.mean_zero(), N)
            gamma = self.lax.gap_sequence(spectrum)
            kappa = kappa_products(spectrum.trusted_eigenvalues, gamma)

            overlaps = np.conj(spectrum.vectors[0, 1 : spectrum.n_trust + 1])
            zeta = overlaps / np.sqrt(kappa[1:])
            zeta[gamma < self.tol_tail] = 0.0

            P, tail = self.retained_gaps(gamma)
            state = build_state(zeta[:P], mean_c=c, tail_action=tail)

            logger.debug(
                "Computed Birkhoff coordinates",
                N=spectrum.vectors.shape[0] - 1,
                n_trust=spectrum.n_trust,
                P=P,
                tail_action=tail,
            )
            return state

        except Exception as e:
            logger.error("Birkhoff forward map failed", error=str(e), exc_info=True)
            raise

    # ============ Functions of the actions ============

    def frequencies(self, state: BirkhoffState, c: float = 0.0) -> FrequencyVector:
        """omega_n - 2cn with omega_n = n^2 - 2 sum_k min(n, k) gamma_k."""
        n = np.arange(1, state.P + 1)
        weights = np.minimum(n[:, None], n[None, :])
        omega = n.astype(float) ** 2 - 2.0 * (weights @ state.gamma) - 2.0 * c * n
        return FrequencyVector(omega=omega, c=c)

    def hamiltonian_B(self, state: BirkhoffState) -> float:
        """sum k^2 gamma_k - sum_k (sum_{p>=k} gamma_p)^2."""
        k = np.arange(1, state.P + 1)
        tails = np.cumsum(state.gamma[::-1])[::-1]
        return float(np.sum(k**2 * state.gamma) - np.sum(tails**2))

    def trace_formula(self, state: BirkhoffState) -> float:
        """2 sum n gamma_n, the squared L2 norm of the mean-zero part."""
        n = np.arange(1, state.P + 1)
        return float(2.0 * np.sum(n * state.gamma))
