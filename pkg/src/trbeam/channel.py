"""Indoor tapped-delay-line channel models.

Two Rayleigh power-delay-profile (PDP) families are supported: a single
exponentially decaying scattering cluster, and a two-cluster variant whose
second cluster starts part-way into the impulse response. Taps are
zero-mean circular-symmetric complex Gaussian, independent across antennas
and delays, with per-tap variance given by the PDP and total gain Gamma
per antenna.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np


class ConfigError(ValueError):
    """A channel or experiment parameterization violates its invariants."""


class DegenerateChannelError(ArithmeticError):
    """All-zero channel realization: normalization by P_h is undefined."""


ONE_CLUSTER = "one_cluster"
TWO_CLUSTER = "two_cluster"


@dataclass(frozen=True)
class PdpSpec:
    """Parameterization of one of the two PDP models.

    Times (``Ts``, ``sigma*``) are in seconds; ``Gamma`` is the total mean
    channel gain per antenna.
    """

    variant: str
    Ts: float
    L: int
    Gamma: float = 1e-2
    sigma: Optional[float] = None
    sigma1: Optional[float] = None
    sigma2: Optional[float] = None
    L1: Optional[int] = None
    L2: Optional[int] = None
    gamma: Optional[float] = None

    def __post_init__(self):
        if self.variant not in (ONE_CLUSTER, TWO_CLUSTER):
            raise ConfigError(f"unknown PDP variant {self.variant!r}")
        if not (self.Ts > 0):
            raise ConfigError("Ts must be positive")
        if not (isinstance(self.L, (int, np.integer)) and self.L >= 1):
            raise ConfigError("L must be an integer >= 1")
        if not (self.Gamma > 0):
            raise ConfigError("Gamma must be positive")
        if self.variant == ONE_CLUSTER:
            if self.sigma is None or not (self.sigma > 0):
                raise ConfigError("one-cluster model requires sigma > 0")
        else:
            if self.sigma1 is None or not (self.sigma1 > 0):
                raise ConfigError("two-cluster model requires sigma1 > 0")
            if self.sigma2 is None or not (self.sigma2 > 0):
                raise ConfigError("two-cluster model requires sigma2 > 0")
            if self.gamma is None or not (self.gamma > 0):
                raise ConfigError("two-cluster model requires gamma > 0")
            if self.L1 is None or self.L2 is None:
                raise ConfigError("two-cluster model requires L1 and L2")
            if not (0 < self.L1 < self.L2 <= self.L):
                raise ConfigError("two-cluster model requires 0 < L1 < L2 <= L")

    @classmethod
    def one_cluster(cls, Ts, sigma, L, Gamma=1e-2):
        return cls(variant=ONE_CLUSTER, Ts=Ts, L=L, Gamma=Gamma, sigma=sigma)

    @classmethod
    def two_cluster(cls, Ts, sigma1, sigma2, L1, L2, L, gamma, Gamma=1e-2):
        return cls(variant=TWO_CLUSTER, Ts=Ts, L=L, Gamma=Gamma,
                   sigma1=sigma1, sigma2=sigma2, L1=L1, L2=L2, gamma=gamma)

    def with_gamma_total(self, Gamma: float) -> "PdpSpec":
        return replace(self, Gamma=Gamma)

    def to_dict(self) -> dict:
        d = {"variant": self.variant, "Ts": self.Ts, "L": self.L, "Gamma": self.Gamma}
        if self.variant == ONE_CLUSTER:
            d["sigma"] = self.sigma
        else:
            d.update(sigma1=self.sigma1, sigma2=self.sigma2,
                     L1=self.L1, L2=self.L2, gamma=self.gamma)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PdpSpec":
        known = {"variant", "Ts", "L", "Gamma", "sigma", "sigma1", "sigma2",
                 "L1", "L2", "gamma"}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown PdpSpec keys: {sorted(unknown)}")
        d = dict(d)
        for key in ("L", "L1", "L2"):
            if key in d and d[key] is not None:
                d[key] = int(d[key])
        for key in ("Ts", "Gamma", "sigma", "sigma1", "sigma2", "gamma"):
            if key in d and d[key] is not None:
                d[key] = float(d[key])
        return cls(**d)


@dataclass(frozen=True)
class PdpProfile:
    """Per-tap variances p[n] = E[|h_i[n]|^2] and normalization constant A."""

    p: np.ndarray
    A: float
    spec: PdpSpec


@dataclass(frozen=True)
class CirSet:
    """One realization of M channel impulse responses, antenna-major (M x L)."""

    taps: np.ndarray
    spec: PdpSpec

    @property
    def M(self) -> int:
        return self.taps.shape[0]

    @property
    def L(self) -> int:
        return self.taps.shape[1]


def pdp_profile(spec: PdpSpec) -> PdpProfile:
    """Evaluate the PDP and solve for A so the taps sum to Gamma."""
    n = np.arange(spec.L)
    if spec.variant == ONE_CLUSTER:
        shape = np.exp(-n * spec.Ts / spec.sigma)
    else:
        first = np.where(n < spec.L2, np.exp(-n * spec.Ts / spec.sigma1), 0.0)
        second = np.where(n >= spec.L1,
                          spec.gamma * np.exp(-(n - spec.L1) * spec.Ts / spec.sigma2),
                          0.0)
        shape = first + second
    A = spec.Gamma / float(shape.sum())
    return PdpProfile(p=A * shape, A=A, spec=spec)


def realization_rng(seed: int, index: int) -> np.random.Generator:
    """Counter-based stream keyed by (seed, realization index).

    Philox keyed per realization makes draws independent of execution
    order, so parallel Monte Carlo reduces deterministically.
    """
    key = np.array([np.uint64(seed), np.uint64(index)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def draw_cir(spec: PdpSpec, M: int, rng: np.random.Generator) -> CirSet:
    """Draw M independent CIRs with per-tap variance from the PDP."""
    if M < 1:
        raise ConfigError("M must be >= 1")
    p = pdp_profile(spec).p
    scale = np.sqrt(p / 2.0)
    re = rng.standard_normal((M, spec.L))
    im = rng.standard_normal((M, spec.L))
    return CirSet(taps=(re + 1j * im) * scale, spec=spec)


def channel_power(cirs: CirSet) -> float:
    """Total channel power P_h summed over antennas and taps."""
    ph = float(np.sum(np.abs(cirs.taps) ** 2))
    if ph == 0.0:
        raise DegenerateChannelError("all-zero channel realization")
    return ph


def _table1(Ts_ns: float, model: int, L: int, sigma_ns=8.0, sigma2_ns=14.0,
            L1: int = 0, L2: int = 0, gamma: float = 0.4786) -> PdpSpec:
    ns = 1e-9
    if model == 1:
        return PdpSpec.one_cluster(Ts=Ts_ns * ns, sigma=sigma_ns * ns, L=L)
    return PdpSpec.two_cluster(Ts=Ts_ns * ns, sigma1=sigma_ns * ns,
                               sigma2=sigma2_ns * ns, L1=L1, L2=L2, L=L,
                               gamma=gamma)


#: Named indoor WLAN presets (tap spacing in ns crossed with the two models).
PRESETS: dict[str, PdpSpec] = {
    "ts2.5-model1": _table1(2.5, 1, L=33),
    "ts5-model1": _table1(5, 1, L=17),
    "ts10-model1": _table1(10, 1, L=9),
    "ts2.5-model2": _table1(2.5, 2, L=33, L1=9, L2=17),
    "ts5-model2": _table1(5, 2, L=17, L1=5, L2=9),
    "ts10-model2": _table1(10, 2, L=9, L1=2, L2=5),
}


def preset(name: str) -> PdpSpec:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown channel preset {name!r}; "
                          f"known: {sorted(PRESETS)}") from None
