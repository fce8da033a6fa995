"""Complex sequence kernels used throughout the beamforming chain.

The transform length 2L + L_E - 2 is rarely a friendly composite, so the
DFT must be exact for arbitrary N. numpy's pocketfft already handles any
length (Bluestein for large prime factors), which the test suite checks
against a direct O(N^2) summation.
"""
from __future__ import annotations

import numpy as np


def convolve(a, b) -> np.ndarray:
    """Full linear convolution; empty input gives an empty output."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.size == 0 or b.size == 0:
        return np.zeros(0, dtype=np.complex128)
    return np.convolve(a, b)


def dft(x, N: int) -> np.ndarray:
    """Forward DFT of x zero-extended to length N (unnormalized)."""
    x = np.asarray(x, dtype=np.complex128)
    if N == 0:
        return np.zeros(0, dtype=np.complex128)
    if N < x.size:
        raise ValueError(f"N={N} shorter than input length {x.size}")
    return np.fft.fft(x, n=N)


def idft(X, N: int) -> np.ndarray:
    """Inverse DFT carrying the 1/N factor."""
    X = np.asarray(X, dtype=np.complex128)
    if N == 0:
        return np.zeros(0, dtype=np.complex128)
    if N < X.size:
        raise ValueError(f"N={N} shorter than input length {X.size}")
    return np.fft.ifft(X, n=N)


def time_reverse_conj(h) -> np.ndarray:
    """Conjugated time reversal: out[n] = conj(h[L-1-n])."""
    h = np.asarray(h, dtype=np.complex128)
    return np.conj(h[::-1])


def energy(x) -> float:
    """Sum of squared magnitudes."""
    x = np.asarray(x, dtype=np.complex128)
    return float(np.sum(np.abs(x) ** 2))
