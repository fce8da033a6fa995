"""Link-level simulator and closed-form analytics for single-user MISO
time-reversal (TR) and equalized time-reversal (ETR) beamforming over
indoor wideband Rayleigh channels."""

__version__ = "0.1.0"

from .channel import (CirSet, ConfigError, DegenerateChannelError, PdpProfile,
                      PdpSpec, PRESETS, channel_power, draw_cir, pdp_profile,
                      preset, realization_rng)
from .beamform import (CompositeCir, EqualizerTaps, NearSingularChannelError,
                       PrefilterBank, build_etr, build_tr,
                       composite_for_unintended, etr_composite,
                       power_breakdown, tr_composite, zf_equalizer)
from .analytics import (PowerReport, eta_eq_bound, eta_tr_apparent_hat,
                        eta_tr_hat, p_eq_bound, p_int_eq_hat, p_int_tr_hat,
                        p_isi_hat, p_signal, pe_theoretical, power_report,
                        q_function, usable_power_hat, var_ph)
from .linksim import (SimConfig, SimResult, measure_focusing, measure_powers,
                      run_ber, sweep_equalizer_length)

__all__ = [name for name in dir() if not name.startswith("_")]
