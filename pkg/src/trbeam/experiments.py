"""Named experiments that produce the delimited result artifacts.

Every experiment writes one or more CSV files plus a manifest.json into
the chosen output directory. Formatting is fixed (dB columns to 4
decimals, raw powers and BER to 10 significant digits) so identical
configurations always produce byte-identical CSV files.
"""
from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .analytics import (BPSK, QPSK, PowerReport, eta_eq_bound,
                        eta_tr_apparent_hat, eta_tr_hat, pe_theoretical,
                        power_report, q_function)
from .beamform import MODE_ETR, MODE_TR, etr_composite, tr_composite, \
    zf_equalizer
from .channel import PRESETS, ConfigError, PdpSpec, draw_cir, preset, \
    realization_rng
from .linksim import SimConfig, SimResult, measure_focusing, measure_powers, \
    run_ber, sweep_equalizer_length

FORMATS = ("csv", "json", "both")


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    out_dir: Path
    fmt: str = "csv"
    seed: int = 12345
    realizations: int | None = None   # None keeps the per-experiment default
    symbols: int | None = None
    full_scale: bool = False

    def pick(self, desk_realizations: int, desk_symbols: int = 0):
        """Resolve realization / symbol counts from overrides and scale."""
        r = self.realizations
        s = self.symbols
        if r is None:
            r = 1000 if self.full_scale else desk_realizations
        if s is None:
            s = 1_000_000 if self.full_scale else desk_symbols
        return r, s


def validate_config(cfg: ExperimentConfig) -> list[str]:
    """Collect every violation instead of stopping at the first."""
    problems = []
    if cfg.experiment not in EXPERIMENTS:
        problems.append(f"unknown experiment {cfg.experiment!r}; "
                        f"known: {', '.join(sorted(EXPERIMENTS))}")
    if cfg.fmt not in FORMATS:
        problems.append(f"unknown format {cfg.fmt!r}; known: {FORMATS}")
    if cfg.realizations is not None and cfg.realizations < 1:
        problems.append("realizations must be >= 1")
    if cfg.symbols is not None and cfg.symbols < 1:
        problems.append("symbols must be >= 1")
    if not isinstance(cfg.seed, int) or cfg.seed < 0:
        problems.append("seed must be a nonnegative integer")
    return problems


def _fmt(col: str, v) -> str:
    if isinstance(v, str):
        return v
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    f = float(v)
    if not np.isfinite(f):
        return "inf" if f > 0 else ("-inf" if f < 0 else "nan")
    if col.endswith("_db"):
        return f"{f:.4f}"
    return f"{f:.9e}"


def write_table(path: Path, header: list[str], rows: list[dict],
                fmt: str = "csv") -> list[Path]:
    """Emit one table as CSV and/or JSON with fixed number formatting."""
    written = []
    formatted = [[_fmt(col, row.get(col)) for col in header] for row in rows]
    if fmt in ("csv", "both"):
        p = path.with_suffix(".csv")
        with open(p, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(formatted)
        written.append(p)
    if fmt in ("json", "both"):
        p = path.with_suffix(".json")
        with open(p, "w") as fh:
            json.dump([dict(zip(header, r)) for r in formatted], fh,
                      indent=1, sort_keys=True)
            fh.write("\n")
        written.append(p)
    return written


def read_table(path: Path) -> tuple[list[str], list[dict]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ConfigError(f"{path} has no header row")
        return list(reader.fieldnames), list(reader)


def compare_report(sim: SimResult, closed: PowerReport) -> list[dict]:
    """Side-by-side rows of simulated power statistics vs the closed forms."""
    if sim.config.spec != closed.spec or sim.config.M != closed.M:
        raise ConfigError("simulation and closed-form configs differ")
    st = sim.power_stats
    if not st:
        raise ConfigError("SimResult carries no power statistics; "
                          "run measure_powers first")
    pairs = []
    if sim.config.mode == MODE_TR:
        # the signal and ISI closed forms describe the TR composite only
        pairs += [("P_S", st["mean_P_S"], closed.P_S),
                  ("P_ISI", st["mean_P_ISI"], closed.P_ISI_hat)]
    pairs.append(("var_P_h", st["var_P_h"], closed.var_Ph))
    if "mean_rho_over_P_g" in st:
        pairs.append(("P_eq_vs_bound", st["mean_rho_over_P_g"],
                      closed.P_eq_bound))
    rows = []
    for name, s, c in pairs:
        rows.append({"quantity": name, "simulated": s, "closed_form": c,
                     "rel_err": abs(s - c) / abs(c) if c else float("inf")})
    return rows


def _preset_meta(name: str) -> dict:
    spec = preset(name)
    return {"preset": name,
            "model": 1 if spec.variant == "one_cluster" else 2,
            "ts_ns": spec.Ts * 1e9, "L": spec.L}


# ---------------------------------------------------------------- experiments

def time_compression(cfg: ExperimentConfig):
    """Single-realization tap magnitudes: raw CIR vs TR vs ETR composites."""
    name = "ts2.5-model2"
    spec = preset(name)
    M = 4
    rng = realization_rng(cfg.seed, 0)
    cirs = draw_cir(spec, M, rng)
    tr = tr_composite(cirs)
    eq = zf_equalizer(cirs, spec.L)
    etr = etr_composite(cirs, eq)
    meta = _preset_meta(name)
    rows = []

    def emit(series, taps, peak, L_E=None):
        for idx, tap in enumerate(np.abs(np.asarray(taps))):
            rows.append({**meta, "M": M, "L_E": L_E, "series": series,
                         "tap_index": idx, "magnitude": float(tap),
                         "is_peak": int(idx == peak)})

    emit("raw_cir", cirs.taps[0], int(np.argmax(np.abs(cirs.taps[0]))))
    emit("tr_composite", tr.taps, tr.peak_index)
    emit("etr_composite", etr.taps, etr.peak_index, L_E=spec.L)
    header = ["preset", "model", "ts_ns", "L", "M", "L_E", "series",
              "tap_index", "magnitude", "is_peak"]
    return {"time_compression": (header, rows)}


def le_sweep(cfg: ExperimentConfig):
    """Mean ETR signal and residual ISI power vs equalizer length."""
    n, _ = cfg.pick(desk_realizations=200)
    rows = []
    for name in ("ts2.5-model1", "ts2.5-model2"):
        spec = preset(name)
        grid = sorted(set(list(range(1, spec.L + 1, 2)) + [spec.L]))
        sim = SimConfig(spec=spec, M=4, mode=MODE_ETR, realizations=n,
                        seed=cfg.seed)
        meta = _preset_meta(name)
        for r in sweep_equalizer_length(sim, grid):
            rows.append({**meta, "M": 4, **r})
    header = ["preset", "model", "ts_ns", "L", "M", "L_E",
              "mean_signal_power", "mean_isi_power", "signal_isi_ratio_db"]
    return {"le_sweep": (header, rows)}


def _two_cluster_for(L: int, Ts: float) -> PdpSpec:
    L1 = max(1, L // 4)
    L2 = max(L1 + 1, L // 2)
    return PdpSpec.two_cluster(Ts=Ts, sigma1=8e-9, sigma2=14e-9,
                               L1=L1, L2=L2, L=L, gamma=0.4786)


def params_vs_l(cfg: ExperimentConfig):
    """Closed-form focusing and usable-power ratios as L grows."""
    del cfg  # pure closed forms, nothing to sample
    sigma = 8e-9
    rows = []
    M = 4
    for model in (1, 2):
        for ratio in (0.3125, 0.625, 1.25):
            Ts = ratio * sigma
            for L in range(4, 41, 2):
                spec = (PdpSpec.one_cluster(Ts=Ts, sigma=sigma, L=L)
                        if model == 1 else _two_cluster_for(L, Ts))
                rep = power_report(spec, M)
                rows.append({
                    "model": model, "ts_over_sigma": ratio, "L": L, "M": M,
                    "usable_power_db": 10 * np.log10(rep.U_hat),
                    "eta_tr_db": 10 * np.log10(rep.eta_tr_hat),
                    "eta_tr_apparent_db":
                        10 * np.log10(rep.eta_tr_apparent_hat),
                    "eta_eq_bound_db": 10 * np.log10(rep.eta_eq_bound),
                })
    header = ["model", "ts_over_sigma", "L", "M", "usable_power_db",
              "eta_tr_db", "eta_tr_apparent_db", "eta_eq_bound_db"]
    return {"params_vs_l": (header, rows)}


def focusing_table(cfg: ExperimentConfig):
    """Simulated vs closed-form spatial focusing for the named presets."""
    n, _ = cfg.pick(desk_realizations=500)
    M = 4
    rows, cmp_rows = [], []
    for name in sorted(PRESETS):
        spec = preset(name)
        tr = measure_focusing(SimConfig(spec=spec, M=M, mode=MODE_TR,
                                        realizations=n, seed=cfg.seed))
        et = measure_focusing(SimConfig(spec=spec, M=M, mode=MODE_ETR,
                                        realizations=n, seed=cfg.seed))
        rows.append({
            **_preset_meta(name), "M": M,
            "eta_tr_sim_db": tr.focusing["eta_tr_db"],
            "eta_tr_theory_db": 10 * np.log10(eta_tr_hat(spec, M)),
            "eta_tr_apparent_sim_db": tr.focusing["eta_tr_apparent_db"],
            "eta_tr_apparent_theory_db":
                10 * np.log10(eta_tr_apparent_hat(spec, M)),
            "eta_eq_apparent_sim_db": et.focusing["eta_eq_apparent_db"],
            "eta_eq_bound_db": 10 * np.log10(eta_eq_bound(M)),
        })
        pw = measure_powers(SimConfig(spec=spec, M=M, mode=MODE_ETR,
                                      realizations=n, seed=cfg.seed))
        for row in compare_report(pw, power_report(spec, M)):
            cmp_rows.append({**_preset_meta(name), "M": M, **row})
    header = ["preset", "model", "ts_ns", "L", "M", "eta_tr_sim_db",
              "eta_tr_theory_db", "eta_tr_apparent_sim_db",
              "eta_tr_apparent_theory_db", "eta_eq_apparent_sim_db",
              "eta_eq_bound_db"]
    cmp_header = ["preset", "model", "ts_ns", "L", "M", "quantity",
                  "simulated", "closed_form", "rel_err"]
    return {"focusing_table": (header, rows),
            "power_comparison": (cmp_header, cmp_rows)}


_BER_GRID = tuple(float(v) for v in range(0, 32, 2))


def _ber_rows(name: str, sim: SimConfig, extra: dict, bound=None):
    res = run_ber(sim)
    meta = _preset_meta(name)
    rows = []
    for s, b, h in zip(res.snr_db, res.ber, res.ber_half_width):
        row = {**meta, "M": sim.M,
               "mode": sim.mode, "modulation": sim.modulation,
               "L_E": sim.equalizer_length if sim.mode == MODE_ETR else None,
               "snr_db": s, "ber_sim": b, "ber_halfwidth": h, **extra}
        if bound is not None:
            row.update(bound(sim, s))
        rows.append(row)
    return rows


def _awgn_bound(sim: SimConfig, snr_db: float) -> dict:
    snr = 10.0 ** (snr_db / 10.0)
    return {"awgn_bound": q_function(np.sqrt(2.0 * sim.M * snr))}


def _tr_theory(sim: SimConfig, snr_db: float) -> dict:
    rep = power_report(sim.spec, sim.M, sim.rho)
    n0 = sim.rho * sim.spec.Gamma / 10.0 ** (snr_db / 10.0)
    pe = pe_theoretical(MODE_TR, sim.modulation, rep.P_S, rep.P_ISI_hat, n0)
    return {"pe_theory": pe}


def ber_approx(cfg: ExperimentConfig):
    """TR BER vs the closed-form error-probability approximation."""
    n, s = cfg.pick(desk_realizations=40, desk_symbols=20_000)
    rows = []
    for name in ("ts5-model1", "ts5-model2", "ts2.5-model1", "ts2.5-model2"):
        for modulation in (BPSK, QPSK):
            sim = SimConfig(spec=preset(name), M=4, mode=MODE_TR,
                            modulation=modulation, snr_db_grid=_BER_GRID,
                            realizations=n, symbols_per_realization=s,
                            seed=cfg.seed)
            for row in _ber_rows(name, sim, {}, bound=_tr_theory):
                row["abs_gap"] = abs(row["ber_sim"] - row["pe_theory"])
                rows.append(row)
    header = ["preset", "model", "ts_ns", "L", "M", "mode", "modulation",
              "L_E", "snr_db", "ber_sim", "ber_halfwidth", "pe_theory",
              "abs_gap"]
    return {"ber_approx": (header, rows)}


def ber_tr_vs_etr(cfg: ExperimentConfig):
    """TR floor vs ETR waterfall, with the matched-filter AWGN bound."""
    n, s = cfg.pick(desk_realizations=40, desk_symbols=20_000)
    grid = tuple(float(v) for v in range(-2, 18, 2)) + (30.0, 40.0)
    rows = []
    for name in ("ts2.5-model2", "ts5-model1"):
        spec = preset(name)
        runs = [SimConfig(spec=spec, M=4, mode=MODE_TR, snr_db_grid=grid,
                          realizations=n, symbols_per_realization=s,
                          seed=cfg.seed)]
        for le in (spec.L, 4 * spec.L):
            runs.append(SimConfig(spec=spec, M=4, mode=MODE_ETR, L_E=le,
                                  snr_db_grid=grid, realizations=n,
                                  symbols_per_realization=s, seed=cfg.seed))
        for sim in runs:
            rows.extend(_ber_rows(name, sim, {}, bound=_awgn_bound))
    header = ["preset", "model", "ts_ns", "L", "M", "mode", "modulation",
              "L_E", "snr_db", "ber_sim", "ber_halfwidth", "awgn_bound"]
    return {"ber_tr_vs_etr": (header, rows)}


def ber_scenarios(cfg: ExperimentConfig):
    """BER across tap spacings and antenna counts for both modes."""
    n, s = cfg.pick(desk_realizations=40, desk_symbols=20_000)
    rows = []
    for name in ("ts2.5-model1", "ts2.5-model2", "ts10-model1", "ts10-model2"):
        sim = SimConfig(spec=preset(name), M=4, mode=MODE_TR,
                        snr_db_grid=_BER_GRID, realizations=n,
                        symbols_per_realization=s, seed=cfg.seed)
        rows.extend(_ber_rows(name, sim, {"scenario": "spacing_model"},
                              bound=_awgn_bound))
    spec = preset("ts2.5-model2")
    for M in (4, 8):
        for mode, le in ((MODE_TR, None), (MODE_ETR, 4 * spec.L)):
            sim = SimConfig(spec=spec, M=M, mode=mode, L_E=le,
                            snr_db_grid=_BER_GRID, realizations=n,
                            symbols_per_realization=s, seed=cfg.seed)
            rows.extend(_ber_rows("ts2.5-model2", sim,
                                  {"scenario": "antennas"},
                                  bound=_awgn_bound))
    header = ["scenario", "preset", "model", "ts_ns", "L", "M", "mode",
              "modulation", "L_E", "snr_db", "ber_sim", "ber_halfwidth",
              "awgn_bound"]
    return {"ber_scenarios": (header, rows)}


EXPERIMENTS = {
    "time-compression": time_compression,
    "le-sweep": le_sweep,
    "params-vs-l": params_vs_l,
    "focusing-table": focusing_table,
    "ber-approx": ber_approx,
    "ber-tr-vs-etr": ber_tr_vs_etr,
    "ber-scenarios": ber_scenarios,
}


def run_experiment(cfg: ExperimentConfig) -> dict:
    """Run one experiment, write its tables and manifest, return the manifest."""
    problems = validate_config(cfg)
    if problems:
        raise ConfigError("; ".join(problems))
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.time()
    tables = EXPERIMENTS[cfg.experiment](cfg)
    files = {}
    for stem, (header, rows) in tables.items():
        for p in write_table(out / stem, header, rows, cfg.fmt):
            files[p.name] = len(rows)
    manifest = {
        "experiment": cfg.experiment,
        "seed": cfg.seed,
        "realizations": cfg.realizations,
        "symbols": cfg.symbols,
        "full_scale": cfg.full_scale,
        "format": cfg.fmt,
        "version": __version__,
        "elapsed_s": round(time.time() - t0, 3),
        "files": files,
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return manifest
