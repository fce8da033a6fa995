"""Monte Carlo link simulator for TR / ETR beamforming.

Each realization is an independent work unit keyed by (seed, index), so
results are bit-identical regardless of how many workers run them. Noise
is generated once per realization at unit variance and scaled per SNR
point (common random numbers across the SNR grid), which keeps BER
curves smooth and makes floor comparisons well paired.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import partial
from typing import Optional

import numpy as np
from scipy.signal import fftconvolve

from .analytics import BPSK, QPSK
from .beamform import (MODE_ETR, MODE_TR, CompositeCir, EqualizerTaps,
                       NearSingularChannelError, composite_for_unintended,
                       etr_composite, power_breakdown, tr_composite,
                       zf_equalizer)
from .channel import CirSet, ConfigError, PdpSpec, draw_cir, realization_rng

#: Confidence multiplier for the reported BER half-widths (95%).
Z_CONF = 1.959963984540054

#: Attempts to replace a near-singular realization before giving up.
REDRAW_BUDGET = 100


class RedrawBudgetExceeded(ArithmeticError):
    """Too many near-singular channel realizations in a row."""


@dataclass(frozen=True)
class SimConfig:
    spec: PdpSpec
    M: int = 4
    mode: str = MODE_TR
    L_E: Optional[int] = None          # defaults to spec.L for ETR
    modulation: str = BPSK
    snr_db_grid: tuple = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
    realizations: int = 100
    symbols_per_realization: int = 100_000
    seed: int = 0
    rho: float = 1.0
    n0: Optional[int] = None

    def __post_init__(self):
        if self.mode not in (MODE_TR, MODE_ETR):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.modulation not in (BPSK, QPSK):
            raise ConfigError(f"unknown modulation {self.modulation!r}")
        if self.realizations < 1:
            raise ConfigError("realizations must be >= 1")
        if self.symbols_per_realization < 1:
            raise ConfigError("symbols_per_realization must be >= 1")
        if len(self.snr_db_grid) == 0:
            raise ConfigError("snr grid must be nonempty")
        if self.rho <= 0:
            raise ConfigError("rho must be positive")

    @property
    def equalizer_length(self) -> int:
        return self.L_E if self.L_E is not None else self.spec.L


@dataclass
class SimResult:
    config: SimConfig
    snr_db: list = field(default_factory=list)
    ber: list = field(default_factory=list)
    ber_half_width: list = field(default_factory=list)
    bits_counted: int = 0
    power_stats: dict = field(default_factory=dict)
    focusing: dict = field(default_factory=dict)
    redraws: int = 0


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("TRBEAM_THREADS", "1")))
    except ValueError:
        return 1


def _map_realizations(fn, n: int):
    """Run fn(0..n-1), optionally in a process pool, preserving order."""
    workers = worker_count()
    if workers > 1 and n > 1:
        chunk = max(1, n // (workers * 4))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, range(n), chunksize=chunk))
    return [fn(r) for r in range(n)]


def _draw_with_composite(config: SimConfig, rng) -> tuple[CirSet, CompositeCir, int]:
    """Draw a CirSet and build its composite, redrawing near-singular ones."""
    redraws = 0
    while True:
        cirs = draw_cir(config.spec, config.M, rng)
        try:
            if config.mode == MODE_TR:
                comp = tr_composite(cirs, config.rho)
            else:
                eq = zf_equalizer(cirs, config.equalizer_length, config.n0)
                comp = etr_composite(cirs, eq, config.rho)
            return cirs, comp, redraws
        except NearSingularChannelError:
            redraws += 1
            if redraws > REDRAW_BUDGET:
                raise RedrawBudgetExceeded(
                    f"{redraws} near-singular realizations in a row")


def _modulate(bits: np.ndarray, modulation: str) -> np.ndarray:
    if modulation == BPSK:
        return (1.0 - 2.0 * bits).astype(np.complex128)
    i = 1.0 - 2.0 * bits[0::2]
    q = 1.0 - 2.0 * bits[1::2]
    return (i + 1j * q) / np.sqrt(2.0)


def _detect(y: np.ndarray, modulation: str) -> np.ndarray:
    if modulation == BPSK:
        return (y.real < 0).astype(np.uint8)
    bits = np.empty(2 * y.size, dtype=np.uint8)
    bits[0::2] = y.real < 0
    bits[1::2] = y.imag < 0
    return bits


def _edge_symbols(config: SimConfig) -> int:
    # exclude ISI transients at burst boundaries
    return 2 * config.spec.L + (config.equalizer_length
                                if config.mode == MODE_ETR else 0)


def _ber_realization(config: SimConfig, r: int):
    rng = realization_rng(config.seed, r)
    _, comp, redraws = _draw_with_composite(config, rng)

    edge = _edge_symbols(config)
    nsym = config.symbols_per_realization + 2 * edge
    bps = 1 if config.modulation == BPSK else 2
    bits = rng.integers(0, 2, size=bps * nsym).astype(np.uint8)
    s = _modulate(bits, config.modulation)

    rx = fftconvolve(s, comp.taps)[comp.peak_index:comp.peak_index + nsym]
    rx *= np.sqrt(config.rho)
    peak = np.sqrt(config.rho) * comp.taps[comp.peak_index]
    derot = np.conj(peak) / np.abs(peak)
    rx *= derot

    noise = (rng.standard_normal(nsym) + 1j * rng.standard_normal(nsym)) \
        / np.sqrt(2.0)

    keep = slice(bps * edge, bps * (nsym - edge))
    tx_bits = bits[keep]
    errors = np.zeros(len(config.snr_db_grid), dtype=np.int64)
    for j, snr_db in enumerate(config.snr_db_grid):
        n0_power = config.rho * config.spec.Gamma / 10.0 ** (snr_db / 10.0)
        y = rx + np.sqrt(n0_power) * noise
        rx_bits = _detect(y, config.modulation)[keep]
        errors[j] = int(np.count_nonzero(rx_bits != tx_bits))
    return errors, tx_bits.size, redraws


def run_ber(config: SimConfig) -> SimResult:
    """Pooled-bit BER over the SNR grid."""
    parts = _map_realizations(partial(_ber_realization, config),
                              config.realizations)
    errors = np.zeros(len(config.snr_db_grid), dtype=np.int64)
    bits = 0
    redraws = 0
    for e, b, rd in parts:
        errors += e
        bits += b
        redraws += rd
    ber = errors / bits
    half = Z_CONF * np.sqrt(np.maximum(ber * (1.0 - ber), 0.0) / bits)
    return SimResult(config=config, snr_db=list(config.snr_db_grid),
                     ber=ber.tolist(), ber_half_width=half.tolist(),
                     bits_counted=bits, redraws=redraws)


def _power_realization(config: SimConfig, r: int):
    rng = realization_rng(config.seed, r)
    cirs, comp, redraws = _draw_with_composite(config, rng)
    b = power_breakdown(comp)
    ph = float(np.sum(np.abs(cirs.taps) ** 2))
    inv_pg = config.rho / comp.norm if config.mode == MODE_ETR else 0.0
    return b["P_S_inst"], b["P_ISI_inst"], ph, inv_pg, redraws


def _mean_se(values: np.ndarray) -> tuple[float, float]:
    n = values.size
    mean = float(values.mean())
    se = float(values.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return mean, se


def measure_powers(config: SimConfig) -> SimResult:
    """Sample means of the instantaneous power components and Var[P_h]."""
    parts = _map_realizations(partial(_power_realization, config),
                              config.realizations)
    arr = np.array([p[:4] for p in parts], dtype=float)
    redraws = sum(p[4] for p in parts)
    ps_mean, ps_se = _mean_se(arr[:, 0])
    pisi_mean, pisi_se = _mean_se(arr[:, 1])
    ph_mean, ph_se = _mean_se(arr[:, 2])
    stats = {
        "mean_P_S": ps_mean, "se_P_S": ps_se,
        "mean_P_ISI": pisi_mean, "se_P_ISI": pisi_se,
        "mean_P_h": ph_mean, "se_P_h": ph_se,
        "var_P_h": float(arr[:, 2].var(ddof=1)) if arr.shape[0] > 1 else 0.0,
        "n": arr.shape[0],
    }
    if config.mode == MODE_ETR:
        m, se = _mean_se(arr[:, 3])
        stats["mean_rho_over_P_g"] = m
        stats["se_rho_over_P_g"] = se
    return SimResult(config=config, power_stats=stats, redraws=redraws)


def _focusing_realization(config: SimConfig, r: int):
    rng = realization_rng(config.seed, r)
    redraws = 0
    while True:
        user = draw_cir(config.spec, config.M, rng)
        other = draw_cir(config.spec, config.M, rng)
        try:
            if config.mode == MODE_TR:
                comp = tr_composite(user, config.rho)
                cross = composite_for_unintended(user, other, MODE_TR,
                                                 rho=config.rho)
                b = power_breakdown(comp)
                pint = config.rho * float(
                    np.abs(cross.taps[cross.peak_index]) ** 2)
                return (b["P_S_inst"], b["P_ISI_inst"], pint, redraws)
            eq = zf_equalizer(user, config.equalizer_length, config.n0)
            comp = etr_composite(user, eq, config.rho)
            cross = composite_for_unintended(user, other, MODE_ETR, eq,
                                             rho=config.rho)
            ptot_user = config.rho * float(np.sum(np.abs(comp.taps) ** 2))
            ptot_other = config.rho * float(np.sum(np.abs(cross.taps) ** 2))
            return (ptot_user, 0.0, ptot_other, redraws)
        except NearSingularChannelError:
            redraws += 1
            if redraws > REDRAW_BUDGET:
                raise RedrawBudgetExceeded(
                    f"{redraws} near-singular realizations in a row")


def measure_focusing(config: SimConfig) -> SimResult:
    """Spatial focusing against an independent unintended receiver.

    Ratios are of mean powers over realizations, matching the
    expectation-ratio definition of the closed forms.
    """
    parts = _map_realizations(partial(_focusing_realization, config),
                              config.realizations)
    arr = np.array([p[:3] for p in parts], dtype=float)
    redraws = sum(p[3] for p in parts)
    a_mean, a_se = _mean_se(arr[:, 0])
    b_mean, b_se = _mean_se(arr[:, 1])
    c_mean, c_se = _mean_se(arr[:, 2])

    def ratio_db(num, den, num_se, den_se):
        ratio = num / den
        rel = np.sqrt((num_se / num) ** 2 + (den_se / den) ** 2)
        return 10.0 * np.log10(ratio), 10.0 / np.log(10.0) * rel

    focusing = {"n": arr.shape[0]}
    if config.mode == MODE_TR:
        eta, eta_se = ratio_db(a_mean, c_mean, a_se, c_se)
        etap, etap_se = ratio_db(a_mean + b_mean, c_mean + b_mean,
                                 np.hypot(a_se, b_se), np.hypot(c_se, b_se))
        focusing.update(mean_P_S=a_mean, mean_P_ISI=b_mean, mean_P_int=c_mean,
                        eta_tr_db=eta, eta_tr_se_db=eta_se,
                        eta_tr_apparent_db=etap, eta_tr_apparent_se_db=etap_se)
    else:
        eta, eta_se = ratio_db(a_mean, c_mean, a_se, c_se)
        focusing.update(mean_P_total_user=a_mean, mean_P_total_other=c_mean,
                        eta_eq_apparent_db=eta, eta_eq_apparent_se_db=eta_se)
    return SimResult(config=config, focusing=focusing, redraws=redraws)


def _sweep_realization(config: SimConfig, le_grid: tuple, r: int):
    rng = realization_rng(config.seed, r)
    cirs = draw_cir(config.spec, config.M, rng)
    out = []
    for le in le_grid:
        eq = zf_equalizer(cirs, le, config.n0)
        b = power_breakdown(etr_composite(cirs, eq, config.rho))
        out.append((b["P_S_inst"], b["P_ISI_inst"]))
    return out


def sweep_equalizer_length(config: SimConfig, le_grid) -> list[dict]:
    """Mean signal / ISI power per equalizer length on a paired
    realization set (the same CirSets are reused for every L_E)."""
    le_grid = tuple(int(v) for v in le_grid)
    if any(v < 1 for v in le_grid):
        raise ConfigError("equalizer lengths must be >= 1")
    parts = _map_realizations(partial(_sweep_realization, config, le_grid),
                              config.realizations)
    arr = np.array(parts, dtype=float)  # n x len(grid) x 2
    rows = []
    for j, le in enumerate(le_grid):
        sig = float(arr[:, j, 0].mean())
        isi = float(arr[:, j, 1].mean())
        rows.append({"L_E": le, "mean_signal_power": sig,
                     "mean_isi_power": isi,
                     "signal_isi_ratio_db":
                         10.0 * np.log10(sig / isi) if isi > 0 else np.inf})
    return rows


def floor_config(config: SimConfig, snr_db_pair=(30.0, 40.0)) -> SimConfig:
    """Config variant probing an ISI floor at two high SNR points."""
    return replace(config, snr_db_grid=tuple(snr_db_pair))
