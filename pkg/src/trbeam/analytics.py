"""Closed-form performance formulas for TR and ETR beamforming.

The sums below are evaluated directly as written for each PDP model
rather than algebraically simplified, so every term can be audited. The
two-cluster forms use the overlap kernel ``C[l, n]`` that mixes the two
exponential branches on the region where the clusters coexist.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, asdict

from scipy.special import erfc

from .channel import ONE_CLUSTER, PdpSpec

MODE_TR = "tr"
MODE_ETR = "etr"
BPSK = "bpsk"
QPSK = "qpsk"


def p_signal(rho: float, M: int, Gamma: float) -> float:
    """Mean desired-signal power at the focusing instant: rho * M * Gamma."""
    return rho * M * Gamma


def _c_kernel(spec: PdpSpec, l: int, n: int) -> float:
    """Two-cluster overlap kernel for the delayed tap index L-1-l+n."""
    Ts, s1, s2 = spec.Ts, spec.sigma1, spec.sigma2
    L, L1, L2, g = spec.L, spec.L1, spec.L2, spec.gamma
    if l - L + 1 <= n <= l - L + L1:
        return math.exp(-(L - 1 - l + n) * Ts / s1)
    if l - L + L1 + 1 <= n <= l - L + L2:
        return (math.exp(-(L - 1 - l + n) * Ts / s1)
                + g * math.exp(-(L - 1 - l + n - L1) * Ts / s2))
    if l - L + L2 + 1 <= n <= l:
        # delayed tap lies in the second cluster, whose profile carries g
        return g * math.exp(-(L - 1 - l + n - L1) * Ts / s2)
    return 0.0


def _cluster_sums(spec: PdpSpec) -> tuple[float, float]:
    """The two geometric sums normalizing the two-cluster profile."""
    Ts, s1, s2 = spec.Ts, spec.sigma1, spec.sigma2
    s_a = sum(math.exp(-n * Ts / s1) for n in range(spec.L2))
    s_b = sum(math.exp(-(n - spec.L1) * Ts / s2)
              for n in range(spec.L1, spec.L))
    return s_a, s_b


def _isi_double_sum_one_cluster(spec: PdpSpec) -> float:
    Ts, sig, L = spec.Ts, spec.sigma, spec.L
    total = 0.0
    for l in range(2 * L - 1):
        if l == L - 1:
            continue
        for n in range(max(0, l - L + 1), min(l, L - 1) + 1):
            total += math.exp(-(L - 1 - l + 2 * n) * Ts / sig)
    return total


def _isi_numerator_two_cluster(spec: PdpSpec) -> float:
    Ts, s1, s2 = spec.Ts, spec.sigma1, spec.sigma2
    L, L1, L2, g = spec.L, spec.L1, spec.L2, spec.gamma
    total = 0.0
    for l in range(2 * L - 1):
        if l == L - 1:
            continue
        for n in range(max(0, l - L + 1), min(l, L2 - 1) + 1):
            total += math.exp(-n * Ts / s1) * _c_kernel(spec, l, n)
        for n in range(max(L1, l - L + 1), min(l, L - 1) + 1):
            total += g * math.exp(-(n - L1) * Ts / s2) * _c_kernel(spec, l, n)
    return total


def p_isi_hat(spec: PdpSpec, rho: float = 1.0) -> float:
    """First-order closed-form approximation of the mean TR ISI power."""
    if spec.variant == ONE_CLUSTER:
        Ts, sig, L = spec.Ts, spec.sigma, spec.L
        num = 1.0 - math.exp(-Ts / sig)
        den = 1.0 - math.exp(-L * Ts / sig)
        return rho * spec.Gamma * (num / den) ** 2 * _isi_double_sum_one_cluster(spec)
    s_a, s_b = _cluster_sums(spec)
    return (rho * spec.Gamma * _isi_numerator_two_cluster(spec)
            / (s_a + spec.gamma * s_b) ** 2)


def usable_power_hat(spec: PdpSpec, M: int) -> float:
    """Usable power ratio U = P_S / P_ISI; +inf when there is no ISI."""
    if spec.variant == ONE_CLUSTER:
        Ts, sig, L = spec.Ts, spec.sigma, spec.L
        dsum = _isi_double_sum_one_cluster(spec)
        if dsum == 0.0:
            return math.inf
        num = M * (1.0 - math.exp(-L * Ts / sig)) ** 2
        return num / ((1.0 - math.exp(-Ts / sig)) ** 2 * dsum)
    s_a, s_b = _cluster_sums(spec)
    dsum = _isi_numerator_two_cluster(spec)
    if dsum == 0.0:
        return math.inf
    return M * (s_a + spec.gamma * s_b) ** 2 / dsum


def _spectral_flatness_factor(spec: PdpSpec) -> float:
    """sum(p^2) / Gamma^2 evaluated from the model closed forms.

    This single factor shows up in the interference power, the effective
    focusing, and Var[P_h].
    """
    if spec.variant == ONE_CLUSTER:
        Ts, sig, L = spec.Ts, spec.sigma, spec.L
        return ((1.0 + math.exp(-L * Ts / sig)) * (1.0 - math.exp(-Ts / sig))
                / ((1.0 + math.exp(-Ts / sig)) * (1.0 - math.exp(-L * Ts / sig))))
    Ts, s1, s2 = spec.Ts, spec.sigma1, spec.sigma2
    L, L1, L2, g = spec.L, spec.L1, spec.L2, spec.gamma
    sq_a = sum(math.exp(-2 * n * Ts / s1) for n in range(L2))
    sq_b = sum(math.exp(-2 * (n - L1) * Ts / s2) for n in range(L1, L))
    cross = sum(math.exp(-n * Ts / s1) * math.exp(-(n - L1) * Ts / s2)
                for n in range(L1, L2))
    s_a, s_b = _cluster_sums(spec)
    return (sq_a + g * g * sq_b + 2 * g * cross) / (s_a + g * s_b) ** 2


def p_int_tr_hat(spec: PdpSpec, rho: float = 1.0) -> float:
    """Mean TR power leaked to an unintended receiver at the focusing lag."""
    return rho * spec.Gamma * _spectral_flatness_factor(spec)


def eta_tr_hat(spec: PdpSpec, M: int) -> float:
    """Effective spatial focusing of conventional TR."""
    return M / _spectral_flatness_factor(spec)


def eta_tr_apparent_hat(spec: PdpSpec, M: int, rho: float = 1.0) -> float:
    """Apparent (total-power) spatial focusing including ISI on both sides."""
    ps = p_signal(rho, M, spec.Gamma)
    pisi = p_isi_hat(spec, rho)
    pint = p_int_tr_hat(spec, rho)
    return (ps + pisi) / (pint + pisi)


def var_ph(spec: PdpSpec, M: int) -> float:
    """Variance of the TR normalization power P_h."""
    return M * spec.Gamma ** 2 * _spectral_flatness_factor(spec)


def p_eq_bound(rho: float, M: int, Gamma: float) -> float:
    """Jensen upper bound on the ETR received power."""
    return rho * M * Gamma


def p_int_eq_hat(rho: float, Gamma: float) -> float:
    """Mean total ETR power at an unintended receiver."""
    return rho * Gamma


def eta_eq_bound(M: int) -> float:
    """Upper bound on the ETR spatial focusing: around M."""
    return float(M)


def q_function(x: float) -> float:
    """Gaussian tail probability Q(x)."""
    return 0.5 * erfc(x / math.sqrt(2.0))


def pe_theoretical(mode: str, modulation: str, P_S: float, P_ISI: float,
                   N: float) -> float:
    """Bit error probability under the Gaussian-ISI approximation.

    ETR assumes the equalizer removed the ISI, so callers pass the ETR
    received power as ``P_S`` and ``P_ISI`` is ignored (treated as 0).
    """
    if N <= 0:
        raise ValueError("noise power N must be positive")
    if mode == MODE_ETR:
        P_ISI = 0.0
    elif mode != MODE_TR:
        raise ValueError(f"unknown mode {mode!r}")
    snr_arg = P_S / (P_ISI + N)
    if modulation == BPSK:
        return q_function(math.sqrt(2.0 * snr_arg))
    if modulation == QPSK:
        return q_function(math.sqrt(snr_arg))
    raise ValueError(f"unknown modulation {modulation!r}")


@dataclass(frozen=True)
class PowerReport:
    """All closed-form power components and ratios for one configuration."""

    P_S: float
    P_ISI_hat: float
    P_int_tr_hat: float
    P_int_eq_hat: float
    P_eq_bound: float
    U_hat: float
    eta_tr_hat: float
    eta_tr_apparent_hat: float
    eta_eq_bound: float
    var_Ph: float
    M: int
    rho: float
    Gamma: float
    spec: PdpSpec

    def to_row(self) -> dict:
        row = asdict(self)
        row.pop("spec")
        row.update(self.spec.to_dict())
        return row


def power_report(spec: PdpSpec, M: int, rho: float = 1.0) -> PowerReport:
    return PowerReport(
        P_S=p_signal(rho, M, spec.Gamma),
        P_ISI_hat=p_isi_hat(spec, rho),
        P_int_tr_hat=p_int_tr_hat(spec, rho),
        P_int_eq_hat=p_int_eq_hat(rho, spec.Gamma),
        P_eq_bound=p_eq_bound(rho, M, spec.Gamma),
        U_hat=usable_power_hat(spec, M),
        eta_tr_hat=eta_tr_hat(spec, M),
        eta_tr_apparent_hat=eta_tr_apparent_hat(spec, M, rho),
        eta_eq_bound=eta_eq_bound(M),
        var_Ph=var_ph(spec, M),
        M=M, rho=rho, Gamma=spec.Gamma, spec=spec,
    )
