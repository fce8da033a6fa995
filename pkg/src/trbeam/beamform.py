"""Time-reversal pre-filters, the shared ZF pre-equalizer, and the
end-to-end composite channels they produce.

Conventions
-----------
* TR pre-filter per antenna: conj(time-reversed CIR) / sqrt(P_h), so the
  bank radiates unit power per realization.
* ETR cascades each TR pre-filter with one shared equalizer g of length
  L_E and normalizes by P_g, the total cascade energy.
* Composite taps always carry the 1/sqrt(norm) factor; the transmit
  amplitude sqrt(rho) is applied by the link simulator.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import CirSet, DegenerateChannelError
from .dsp import convolve, energy, time_reverse_conj

MODE_TR = "tr"
MODE_ETR = "etr"

#: Relative spectral floor below which the ZF inverse is declared non-finite.
SPECTRAL_NULL_TOL = 1e-12


class NearSingularChannelError(ArithmeticError):
    """A DFT bin of the summed channel spectrum is numerically null."""


@dataclass(frozen=True)
class PrefilterBank:
    """Normalized per-antenna transmit filters plus their normalization power."""

    filters: np.ndarray  # M x filter_length
    norm: float          # P_h for TR, P_g for ETR
    mode: str


@dataclass(frozen=True)
class EqualizerTaps:
    """Truncated ZF pre-equalizer and its delay bookkeeping.

    ``n0`` is the target delay on the size-(2L+L_E-2) DFT grid;
    ``window_offset`` is where the retained length-L_E window starts in
    the full inverse-DFT sequence, so the effective composite delay is
    ``n0 - window_offset``.
    """

    g: np.ndarray
    n0: int
    window_offset: int


@dataclass(frozen=True)
class CompositeCir:
    """End-to-end equivalent CIR seen by a receiver."""

    taps: np.ndarray
    peak_index: int
    rho: float
    mode: str
    norm: float  # the P_h / P_g used to normalize the taps


def build_tr(cirs: CirSet) -> PrefilterBank:
    """Conventional TR bank: conjugated time-reversed CIRs over sqrt(P_h)."""
    ph = energy(cirs.taps)
    if ph == 0.0:
        raise DegenerateChannelError("zero channel power")
    filters = np.conj(cirs.taps[:, ::-1]) / np.sqrt(ph)
    return PrefilterBank(filters=filters, norm=ph, mode=MODE_TR)


def _autocorr_sum(cirs: CirSet) -> np.ndarray:
    """Sum over antennas of h_i conv conj(reversed h_i), length 2L-1."""
    acc = np.zeros(2 * cirs.L - 1, dtype=np.complex128)
    for i in range(cirs.M):
        h = cirs.taps[i]
        acc += convolve(h, time_reverse_conj(h))
    return acc


def tr_composite(cirs: CirSet, rho: float = 1.0) -> CompositeCir:
    """TR composite channel: scaled CIR autocorrelations peaking at L-1."""
    ph = energy(cirs.taps)
    if ph == 0.0:
        raise DegenerateChannelError("zero channel power")
    taps = _autocorr_sum(cirs) / np.sqrt(ph)
    return CompositeCir(taps=taps, peak_index=cirs.L - 1, rho=rho,
                        mode=MODE_TR, norm=ph)


def zf_equalizer(cirs: CirSet, L_E: int, n0: int | None = None) -> EqualizerTaps:
    """Design the shared ZF pre-equalizer on the zero-padded DFT grid.

    Inverts the summed channel power spectrum with a linear phase
    targeting delay n0, then keeps the maximal-energy contiguous
    length-L_E window of the inverse transform.
    """
    if L_E < 1:
        raise ValueError("L_E must be >= 1")
    L = cirs.L
    N = 2 * L + L_E - 2
    if n0 is None:
        n0 = N // 2
    if not (0 <= n0 <= N - 1):
        raise ValueError(f"n0={n0} outside [0, {N - 1}]")
    H = np.fft.fft(cirs.taps, n=N, axis=1)
    D = np.sum(np.abs(H) ** 2, axis=0)
    floor = SPECTRAL_NULL_TOL * cirs.M * cirs.spec.Gamma
    if np.any(D < floor):
        raise NearSingularChannelError(
            "spectral null in summed channel response; no finite ZF solution")
    k = np.arange(N)
    G = np.exp(-2j * np.pi * (n0 - L + 1) * k / N) / D
    g_full = np.fft.ifft(G)
    e = np.abs(g_full) ** 2
    window = np.convolve(e, np.ones(L_E), mode="valid")  # energy per offset
    w = int(np.argmax(window))
    return EqualizerTaps(g=g_full[w:w + L_E].copy(), n0=int(n0), window_offset=w)


def build_etr(cirs: CirSet, eq: EqualizerTaps) -> PrefilterBank:
    """ETR bank: TR pre-filters cascaded with g, normalized by P_g."""
    cascades = np.stack([convolve(time_reverse_conj(cirs.taps[i]), eq.g)
                         for i in range(cirs.M)])
    pg = energy(cascades)
    if pg == 0.0:
        raise DegenerateChannelError("zero cascade power")
    return PrefilterBank(filters=cascades / np.sqrt(pg), norm=pg, mode=MODE_ETR)


def etr_composite(cirs: CirSet, eq: EqualizerTaps, rho: float = 1.0) -> CompositeCir:
    """ETR composite channel of length 2L + L_E - 2."""
    bank = build_etr(cirs, eq)
    taps = convolve(eq.g, _autocorr_sum(cirs)) / np.sqrt(bank.norm)
    return CompositeCir(taps=taps, peak_index=eq.n0 - eq.window_offset,
                        rho=rho, mode=MODE_ETR, norm=bank.norm)


def composite_for_unintended(cirs_user: CirSet, cirs_other: CirSet, mode: str,
                             eq: EqualizerTaps | None = None,
                             rho: float = 1.0) -> CompositeCir:
    """Composite seen by a receiver whose channel is ``cirs_other`` when the
    bank was matched to ``cirs_user``.

    With ``cirs_other is cirs_user`` this reproduces tr_composite /
    etr_composite exactly.
    """
    cross = np.zeros(2 * cirs_user.L - 1, dtype=np.complex128)
    for i in range(cirs_user.M):
        cross += convolve(time_reverse_conj(cirs_user.taps[i]),
                          cirs_other.taps[i])
    if mode == MODE_TR:
        ph = energy(cirs_user.taps)
        if ph == 0.0:
            raise DegenerateChannelError("zero channel power")
        return CompositeCir(taps=cross / np.sqrt(ph),
                            peak_index=cirs_user.L - 1, rho=rho,
                            mode=MODE_TR, norm=ph)
    if mode == MODE_ETR:
        if eq is None:
            raise ValueError("ETR mode requires equalizer taps")
        bank = build_etr(cirs_user, eq)
        taps = convolve(eq.g, cross) / np.sqrt(bank.norm)
        return CompositeCir(taps=taps, peak_index=eq.n0 - eq.window_offset,
                            rho=rho, mode=MODE_ETR, norm=bank.norm)
    raise ValueError(f"unknown mode {mode!r}")


def power_breakdown(c: CompositeCir) -> dict:
    """Instantaneous signal / ISI power split for unit-power i.i.d. symbols."""
    mags = np.abs(c.taps) ** 2
    p_s = c.rho * float(mags[c.peak_index])
    # sum the off-peak taps directly; total-minus-peak cancels to zero in
    # float64 once the residual ISI drops below the peak's rounding error
    off = np.delete(mags, c.peak_index)
    p_isi = c.rho * float(off.sum())
    return {"P_S_inst": p_s, "P_ISI_inst": p_isi}
