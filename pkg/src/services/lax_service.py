"""
Lax Service - truncated Lax operator, its spectrum and generating function.
"""

from typing import Any, Dict, Optional

import numpy as np
import scipy.linalg
from scipy.sparse.linalg import LinearOperator, eigsh

from src.domain.errors import GapViolation, NearPole, PhaseDegenerate
from src.domain.models import EigenBackend, GenFunValue, LaxMatrix, LaxSpectrum, RealField
from src.services.spectral_core import ToeplitzKernel
from src.utils.logging_config import get_logger

logger = get_logger(__name__)


class LaxService:
    """Service for assembling and diagonalizing L_u = D - T_u."""

    def __init__(self, config: Dict[str, Any]):
        """Initialize Lax service."""
        self.config = config
        self.tol_gap = config.get("tol_gap", 1e-8)
        self.tol_phase = config.get("tol_phase", 1e-10)
        self.tol_pole = config.get("tol_pole", 1e-6)
        self.trust_fraction = config.get("trust_fraction", 0.5)

        logger.info(
            "Initialized LaxService",
            tol_gap=self.tol_gap,
            tol_phase=self.tol_phase,
            backend=config.get("eig_backend", "auto"),
        )

    def default_trust(self, N: int) -> int:
        return min(N, max(1, int(N * self.trust_fraction))) if N > 0 else 0

    # ============ Operator ============

    def assemble_lax(self, u: RealField, N: Optional[int] = None) -> LaxMatrix:
        """entry(n, p) = n delta_np - u(n - p) on modes 0..N."""
        N = u.N if N is None else N
        column = u.with_modes(N).positive
        toeplitz = scipy.linalg.toeplitz(column, np.conj(column))
        entries = np.diag(np.arange(N + 1, dtype=float)) - toeplitz
        return LaxMatrix(entries=0.5 * (entries + entries.conj().T))

    # ============ Spectrum ============

    def spectrum(
        self,
        u: RealField,
        N: Optional[int] = None,
        n_trust: Optional[int] = None,
        backend: Optional[str] = None,
    ) -> LaxSpectrum:
        """Diagonalize L_u with the configured backend."""
        N = u.N if N is None else N
        choice = EigenBackend(backend or self.config.get("eig_backend", "auto"))
        if choice is EigenBackend.AUTO:
            dense = N + 1 <= self.config.get("dense_limit", 2048)
            choice = EigenBackend.DENSE if dense else EigenBackend.LANCZOS
        if choice is EigenBackend.DENSE:
            return self.eigendecompose(self.assemble_lax(u, N), n_trust)
        return self.lanczos_spectrum(u, N, self.config.get("lanczos_eigenpairs", 8))

    def eigendecompose(self, L: LaxMatrix, n_trust: Optional[int] = None) -> LaxSpectrum:
        """Dense Hermitian eigendecomposition with the phase chain applied."""
        N = L.N
        n_trust = self.default_trust(N) if n_trust is None else min(n_trust, N)
        eigenvalues, vectors = scipy.linalg.eigh(L.entries)
        vectors = self._fix_phases(vectors, n_trust)

        logger.debug("Eigendecomposed Lax matrix", N=N, n_trust=n_trust, lambda0=eigenvalues[0])
        return LaxSpectrum(
            eigenvalues=eigenvalues,
            vectors=vectors,
            n_trust=n_trust,
            backend=EigenBackend.DENSE,
        )

    def lanczos_spectrum(self, u: RealField, N: int, n_eigs: int) -> LaxSpectrum:
        """Lowest eigenpairs by implicitly restarted Lanczos on an FFT matvec."""
        n_eigs = min(n_eigs, N)
        kernel = ToeplitzKernel(u, N)
        diagonal = np.arange(N + 1, dtype=float)
        real = not np.any(u.coeffs.imag)
        dtype = np.float64 if real else np.complex128

        def matvec(x: np.ndarray) -> np.ndarray:
            x = np.asarray(x).ravel()
            y = diagonal * x - kernel(x)
            return y.real if real else y

        operator = LinearOperator((N + 1, N + 1), matvec=matvec, dtype=dtype)
        start = (1.0 / (1.0 + diagonal)).astype(dtype)
        eigenvalues, vectors = eigsh(
            operator,
            k=n_eigs,
            which="SA",
            v0=start,
            tol=1e-13,
            ncv=min(N + 1, max(4 * n_eigs + 1, 64)),
            maxiter=20 * (N + 1),
        )
        order = np.argsort(eigenvalues)
        eigenvalues = eigenvalues[order]
        vectors = self._fix_phases(vectors[:, order], n_eigs - 1)

        logger.debug("Lanczos spectrum", N=N, n_eigs=n_eigs, lambda0=eigenvalues[0])
        return LaxSpectrum(
            eigenvalues=eigenvalues,
            vectors=vectors,
            n_trust=n_eigs - 1,
            backend=EigenBackend.LANCZOS,
        )

    def _fix_phases(self, vectors: np.ndarray, n_chain: int) -> np.ndarray:
        """<f_0|1> > 0 and <f_{n+1}|S f_n> > 0 for n < n_chain."""
        V = np.array(vectors, copy=True)
        head = V[0, 0]
        if abs(head) < self.tol_phase:
            raise PhaseDegenerate(
                "ground state is orthogonal to the constants",
                {"overlap": float(abs(head))},
            )
        V[:, 0] *= np.conj(head) / abs(head)
        for n in range(min(n_chain, V.shape[1] - 1)):
            # <f_{n+1}|S f_n> = sum_m f_{n+1}(m) conj(f_n(m-1))
            overlap = np.vdot(V[:-1, n], V[1:, n + 1])
            if abs(overlap) < self.tol_phase:
                raise PhaseDegenerate(
                    f"shift overlap vanishes at n={n}",
                    {"n": n, "overlap": float(abs(overlap))},
                )
            V[:, n + 1] *= np.conj(overlap) / abs(overlap)
        return V

    def residuals(self, spectrum: LaxSpectrum, L: LaxMatrix) -> np.ndarray:
        """||L f_n - lambda_n f_n|| for the trusted pairs."""
        count = spectrum.n_trust + 1
        V = spectrum.vectors[:, :count]
        R = L.entries @ V - V * spectrum.eigenvalues[:count]
        return np.linalg.norm(R, axis=0)

    def gap_sequence(self, spectrum: LaxSpectrum) -> np.ndarray:
        """gamma_1..gamma_{N_trust}, checked against tol_gap and clipped at 0."""
        raw = spectrum.raw_gaps
        if raw.size and raw.min() < -self.tol_gap:
            worst = int(np.argmin(raw))
            logger.error("Negative gap", n=worst + 1, gamma=float(raw[worst]))
            raise GapViolation(
                f"gap {worst + 1} is negative beyond tolerance",
                {"n": worst + 1, "gamma": float(raw[worst]), "tol_gap": self.tol_gap},
            )
        return np.maximum(raw, 0.0)

    def trusted_gaps_identity(self, spectrum: LaxSpectrum, mean: float = 0.0) -> Dict[str, float]:
        """
        Residuals of -lambda_0 = sum gamma_n + c and lambda_n = n - c - sum_{k>n} gamma_k.

        Both sums are truncated at N_trust, so the residuals include the tail action.
        """
        lam = spectrum.trusted_eigenvalues
        gamma = self.gap_sequence(spectrum)
        tails = np.concatenate([np.cumsum(gamma[::-1])[::-1], [0.0]])
        rebuilt = np.arange(lam.size) - mean - tails
        return {
            "lambda0": float(abs(lam[0] + mean + gamma.sum())),
            "lambdas": float(np.max(np.abs(lam - rebuilt))),
        }

    def shift_overlaps(self, spectrum: LaxSpectrum) -> np.ndarray:
        """|<f_{n+1}|S f_n>|^2 for n < N_trust; equals mu_{n+1}."""
        V = spectrum.vectors
        count = spectrum.n_trust
        return np.array(
            [abs(np.vdot(V[:-1, n], V[1:, n + 1])) ** 2 for n in range(count)],
            dtype=float,
        )

    # ============ Generating function ============

    def _check_pole(self, eigenvalues: np.ndarray, lambda_arg: complex) -> None:
        distance = float(np.min(np.abs(eigenvalues + lambda_arg)))
        if distance < self.tol_pole:
            raise NearPole(
                "spectral parameter too close to -lambda_n",
                {"lambda": [lambda_arg.real, lambda_arg.imag], "distance": distance},
            )

    def genfun_resolvent(
        self, u: RealField, lambda_arg: complex, N: Optional[int] = None
    ) -> GenFunValue:
        """<(L_u + lambda)^{-1} 1 | 1> from a linear solve."""
        lambda_arg = complex(lambda_arg)
        L = self.assemble_lax(u, N)
        self._check_pole(scipy.linalg.eigvalsh(L.entries), lambda_arg)
        size = L.N + 1
        rhs = np.zeros(size, dtype=complex)
        rhs[0] = 1.0
        w = scipy.linalg.solve(L.entries + lambda_arg * np.eye(size), rhs)
        return GenFunValue(lambda_arg=lambda_arg, value=complex(w[0]))

    def genfun_product(self, spectrum: LaxSpectrum, lambda_arg: complex) -> GenFunValue:
        """1/(lambda_0 + lambda) prod_n (1 - gamma_n/(lambda_n + lambda))."""
        lambda_arg = complex(lambda_arg)
        lam = spectrum.trusted_eigenvalues
        self._check_pole(lam, lambda_arg)
        gamma = self.gap_sequence(spectrum)
        value = np.prod(1.0 - gamma / (lam[1:] + lambda_arg)) / (lam[0] + lambda_arg)
        return GenFunValue(lambda_arg=lambda_arg, value=complex(value))
