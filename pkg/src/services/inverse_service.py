"""
Inverse Service - finite-gap potentials from Birkhoff coordinates.

Pi u(z) = -z Q'(z)/Q(z) with Q(z) = det(I - zM). Writing Q = prod (1 - r_i z),
the Taylor coefficients of -zQ'/Q are the power sums p_k = sum r_i^k, which
follow from the coefficients of Q by Newton's identities.
"""

from typing import Any, Dict

import numpy as np

from src.domain.errors import MissingGap, RootInsideDisc, ZeroDenominator
from src.domain.models import BirkhoffState, RealField, TransferMatrix
from src.utils.logging_config import get_logger

logger = get_logger(__name__)

LEVERRIER_LIMIT = 8


def faddeev_leverrier(A: np.ndarray) -> np.ndarray:
    """Coefficients [1, c_1, ..., c_P] of det(xI - A) = x^P + c_1 x^{P-1} + ... + c_P."""
    P = A.shape[0]
    coeffs = np.zeros(P + 1, dtype=complex)
    coeffs[0] = 1.0
    identity = np.eye(P, dtype=complex)
    Mk = identity
    for k in range(1, P + 1):
        AM = A @ Mk
        coeffs[k] = -np.trace(AM) / k
        Mk = AM + coeffs[k] * identity
    return coeffs


def newton_power_sums(coeffs: np.ndarray, count: int) -> np.ndarray:
    """
    p_1..p_count from Q(z) = sum c_k z^k, c_0 = 1, via
    p_k = -k c_k - sum_{j=1}^{k-1} c_j p_{k-j}.
    """
    degree = coeffs.size - 1
    c = np.zeros(count + 1, dtype=complex)
    c[: min(degree, count) + 1] = coeffs[: min(degree, count) + 1]
    p = np.zeros(count + 1, dtype=complex)
    for k in range(1, count + 1):
        j = np.arange(1, min(k - 1, degree) + 1)
        p[k] = -k * c[k] - np.dot(c[j], p[k - j])
    return p[1:]


class InverseService:
    """Service for the inverse Birkhoff map on finite-gap states."""

    def __init__(self, config: Dict[str, Any]):
        """Initialize inverse service."""
        self.config = config
        self.tol_root = config.get("tol_root", 1e-10)
        self.tol_denominator = config.get("tol_denominator", 1e-12)

        logger.info(
            "Initialized InverseService",
            tol_root=self.tol_root,
            tol_denominator=self.tol_denominator,
        )

    def transfer_matrix(self, state: BirkhoffState) -> TransferMatrix:
        """
        M_np = sqrt(mu_{n+1} kappa_p / kappa_{n+1}) zeta_{n+1} conj(zeta_p)
               / (lambda_p - lambda_n - 1), with zeta_0 = 1.
        """
        P = state.P
        missing = np.flatnonzero(state.gamma <= 0.0)
        if missing.size:
            n = int(missing[0]) + 1
            raise MissingGap(f"retained gap {n} is closed", {"n": n, "P": P})

        zeta = np.concatenate([[1.0 + 0j], state.zeta])
        lam = state.lambdas
        denominator = lam[None, :P] - lam[:P, None] - 1.0
        if P and np.min(np.abs(denominator)) < self.tol_denominator:
            n, p = np.unravel_index(np.argmin(np.abs(denominator)), denominator.shape)
            raise ZeroDenominator(
                "lambda_p - lambda_n - 1 vanishes",
                {"n": int(n), "p": int(p), "value": float(denominator[n, p])},
            )
        scale = np.sqrt(state.mu_ratio[:, None] * state.kappa[None, :P])
        matrix = scale * zeta[1:, None] * np.conj(zeta[None, :P]) / denominator
        return TransferMatrix(matrix=matrix)

    def q_polynomial(self, M: TransferMatrix) -> np.ndarray:
        """Ascending coefficients of Q(z) = det(I - zM); Q(0) = 1."""
        if M.P == 0:
            return np.ones(1, dtype=complex)
        if M.P <= LEVERRIER_LIMIT:
            coeffs = faddeev_leverrier(M.matrix)
        else:
            coeffs = np.poly(np.linalg.eigvals(M.matrix)).astype(complex)
        coeffs[0] = 1.0
        return coeffs

    def q_roots(self, coeffs: np.ndarray) -> np.ndarray:
        """Roots of Q from its companion matrix."""
        if coeffs.size < 2:
            return np.zeros(0, dtype=complex)
        return np.roots(coeffs[::-1])

    def factor_data(self, M: TransferMatrix) -> np.ndarray:
        """q_i with Q(z) = prod (1 + q_i z), i.e. q_i = -eig(M)."""
        return -np.linalg.eigvals(M.matrix)

    def check_roots(self, coeffs: np.ndarray) -> np.ndarray:
        roots = self.q_roots(coeffs)
        if roots.size and np.min(np.abs(roots)) <= 1.0 + self.tol_root:
            closest = float(np.min(np.abs(roots)))
            logger.error("Q has a root in the closed unit disc", modulus=closest)
            raise RootInsideDisc(
                "Q(z) vanishes in the closed unit disc",
                {"modulus": closest, "tol_root": self.tol_root},
            )
        return roots

    def reconstruct(self, state: BirkhoffState, N: int) -> RealField:
        """Potential with Pi u = -zQ'/Q to order N, plus the mean."""
        try:
            positive = np.zeros(N + 1, dtype=complex)
            positive[0] = state.mean_c
            if state.P:
                coeffs = self.q_polynomial(self.transfer_matrix(state))
                self.check_roots(coeffs)
                positive[1:] = newton_power_sums(coeffs, N)

            logger.debug("Reconstructed potential", P=state.P, N=N)
            return RealField.from_positive(positive)

        except Exception as e:
            logger.error("Reconstruction failed", P=state.P, error=str(e), exc_info=True)
            raise

    def first_coefficient(self, state: BirkhoffState) -> complex:
        """u(1) = -sum_{n=0}^{P-1} sqrt(mu_{n+1} kappa_n / kappa_{n+1}) zeta_{n+1} conj(zeta_n)."""
        if state.P == 0:
            return 0j
        zeta = np.concatenate([[1.0 + 0j], state.zeta])
        weights = np.sqrt(state.mu_ratio * state.kappa[: state.P])
        return complex(-np.sum(weights * zeta[1:] * np.conj(zeta[:-1])))

    def roundtrip_error(self, state: BirkhoffState, recovered: BirkhoffState) -> float:
        """Largest action difference between two states, padded to equal length."""
        P = max(state.P, recovered.P)
        a = np.zeros(P)
        b = np.zeros(P)
        a[: state.P] = state.gamma
        b[: recovered.P] = recovered.gamma
        return float(np.max(np.abs(a - b))) if P else 0.0
