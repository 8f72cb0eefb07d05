"""
Spectral core - Fourier/Hardy representation of functions on the torus.

Inner products are normalized, <f|g> = (1/2pi) int f conj(g), so a field's
coefficients are its Fourier modes and Parseval holds without factors.
"""

from typing import Union

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy import fft as sfft

from src.domain.models import HardyField, RealField, SobolevIndex

SobolevLike = Union[SobolevIndex, float]
FieldLike = Union[RealField, HardyField]


def _exponent(s: SobolevLike) -> float:
    return s.s if isinstance(s, SobolevIndex) else float(s)


def sobolev_weights(indices: np.ndarray, s: SobolevLike) -> np.ndarray:
    """<n>^{2s} with <n> = max(1, |n|)."""
    bracket = np.maximum(1.0, np.abs(indices).astype(float))
    return bracket ** (2.0 * _exponent(s))


def sobolev_norm(f: FieldLike, s: SobolevLike = 0.0) -> float:
    """(sum_n <n>^{2s} |f(n)|^2)^{1/2} over the stored index range."""
    if isinstance(f, RealField):
        indices = f.indices
    else:
        indices = np.arange(f.N + 1)
    weights = sobolev_weights(indices, s)
    return float(np.sqrt(np.sum(weights * np.abs(f.coeffs) ** 2)))


def sobolev_distance(a: RealField, b: RealField, s: SobolevLike = 0.0) -> float:
    N = max(a.N, b.N)
    return sobolev_norm(a.with_modes(N) - b.with_modes(N), s)


def szego_project(f: RealField) -> HardyField:
    """Keep the modes n >= 0."""
    return HardyField(coeffs=f.positive)


def hilbert_apply(f: RealField) -> RealField:
    """Fourier multiplier -i sign(n)."""
    return RealField(coeffs=-1j * np.sign(f.indices) * f.coeffs)


class ToeplitzKernel:
    """
    Action of T_u on the Hardy modes 0..N by zero-padded FFT convolution.

    The symbol u(m), |m| <= N, is laid out circularly on a transform of
    length >= 2N+1; the linear convolution with f (support 0..N) spans
    -N..2N, so the retained band 0..N is never wrapped onto.
    """

    def __init__(self, u: RealField, N: int):
        self.N = N
        self.size = sfft.next_fast_len(2 * N + 1)
        reach = min(N, u.N)
        m = np.arange(-reach, reach + 1)
        symbol = np.zeros(self.size, dtype=complex)
        symbol[m % self.size] = u.coeffs[u.N - reach : u.N + reach + 1]
        self._symbol_hat = sfft.fft(symbol)

    def __call__(self, f: np.ndarray) -> np.ndarray:
        product = self._symbol_hat * sfft.fft(f, n=self.size)
        return sfft.ifft(product)[: self.N + 1]


def toeplitz_apply(u: RealField, f: HardyField) -> HardyField:
    """(T_u f)(n) = sum_{p=0..N} u(n-p) f(p), n = 0..N."""
    return HardyField(coeffs=ToeplitzKernel(u, f.N)(f.coeffs))


def disc_eval(f: HardyField, z: complex) -> complex:
    """Evaluate sum_n f(n) z^n inside the unit disc."""
    if abs(z) >= 1.0:
        raise ValueError("disc evaluation requires |z| < 1")
    return complex(npoly.polyval(z, f.coeffs))


def one_gap_potential(q: float, epsilon: float = 1.0, N: int = 256) -> RealField:
    """
    u(x) = 2 Re(eps q e^{ix} / (1 - q e^{ix})), coefficients eps q^n for n >= 1.

    eps = 1 is the one-gap traveling-wave profile u_{0,q}; 0 < eps < q gives
    the family with a deep ground state.
    """
    if not 0.0 < q < 1.0:
        raise ValueError("q must lie in (0, 1)")
    if not 0.0 < epsilon <= 1.0:
        raise ValueError("epsilon must lie in (0, 1]")
    n = np.arange(N + 1)
    positive = epsilon * np.power(q, n.astype(float))
    positive[0] = 0.0
    return RealField.from_positive(positive)


def energy(v: RealField) -> float:
    """H(v) = (1/2pi) int (1/2)(|D|^{1/2} v)^2 - (1/3) v^3 dx."""
    quadratic = 0.5 * float(np.sum(np.abs(v.indices) * np.abs(v.coeffs) ** 2))
    # grid finer than 3N resolves the zero mode of v^3 exactly
    samples = v.values(sfft.next_fast_len(3 * v.N + 2))
    return quadratic - float(np.mean(samples ** 3)) / 3.0


def random_band_limited_field(
    rng: np.random.Generator,
    N: int,
    bandwidth: int = 8,
    amplitude: float = 0.5,
    decay: float = 0.5,
) -> RealField:
    """Mean-zero field with random modes 1..bandwidth of geometric size."""
    if bandwidth > N:
        raise ValueError("bandwidth exceeds the truncation order")
    n = np.arange(1, bandwidth + 1)
    draws = rng.standard_normal((bandwidth, 2))
    modes = amplitude * decay ** (n - 1) * (draws[:, 0] + 1j * draws[:, 1]) / np.sqrt(2.0)
    positive = np.zeros(N + 1, dtype=complex)
    positive[1 : bandwidth + 1] = modes
    return RealField.from_positive(positive)
