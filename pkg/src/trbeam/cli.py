"""Command line entry point.

Exit codes: 0 success, 2 configuration problem, 3 I/O failure,
4 numerical failure (degenerate or near-singular channels past the
redraw budget).
"""
from __future__ import annotations

import argparse
import configparser
import sys
from pathlib import Path

from .channel import ConfigError
from .experiments import (EXPERIMENTS, ExperimentConfig, run_experiment,
                          validate_config)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_NUMERIC = 4

_CONFIG_KEYS = {"experiment", "out", "seed", "realizations", "symbols",
                "format", "full_scale"}


def _load_ini(path: str) -> dict:
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise OSError(f"cannot read config file {path}")
    if set(parser.sections()) - {"experiment"}:
        raise ConfigError(f"unknown config sections: "
                          f"{sorted(set(parser.sections()) - {'experiment'})}")
    if not parser.has_section("experiment"):
        raise ConfigError("config file needs an [experiment] section")
    sec = parser["experiment"]
    unknown = set(sec) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    out = {}
    for key in ("experiment", "out", "format"):
        if key in sec:
            out[key] = sec.get(key)
    for key in ("seed", "realizations", "symbols"):
        if key in sec:
            try:
                out[key] = sec.getint(key)
            except ValueError:
                raise ConfigError(f"config key {key} must be an integer")
    if "full_scale" in sec:
        try:
            out["full_scale"] = sec.getboolean("full_scale")
        except ValueError:
            raise ConfigError("config key full_scale must be a boolean")
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="trbeam",
        description="TR / ETR beamforming experiments over indoor wideband "
                    "Rayleigh channels")
    p.add_argument("--experiment", choices=sorted(EXPERIMENTS),
                   help="experiment to run")
    p.add_argument("--config", help="INI file with an [experiment] section; "
                                    "command line flags win")
    p.add_argument("--out", help="output directory for CSVs and manifest")
    p.add_argument("--seed", type=int, help="base RNG seed (default 12345)")
    p.add_argument("--realizations", type=int,
                   help="channel realizations per Monte Carlo average")
    p.add_argument("--symbols", type=int,
                   help="payload symbols per realization for BER runs")
    p.add_argument("--format", choices=("csv", "json", "both"),
                   help="artifact format (default csv)")
    p.add_argument("--full-scale", action="store_true",
                   help="use publication-size realization/symbol counts")
    return p


def _merged_config(args) -> ExperimentConfig:
    merged = {}
    if args.config:
        merged.update(_load_ini(args.config))
    for key, val in (("experiment", args.experiment), ("out", args.out),
                     ("seed", args.seed), ("realizations", args.realizations),
                     ("symbols", args.symbols), ("format", args.format)):
        if val is not None:
            merged[key] = val
    if args.full_scale:
        merged["full_scale"] = True
    if "experiment" not in merged:
        raise ConfigError("no experiment selected (use --experiment or a "
                          "config file)")
    if "out" not in merged:
        raise ConfigError("no output directory (use --out or a config file)")
    return ExperimentConfig(
        experiment=merged["experiment"],
        out_dir=Path(merged["out"]),
        fmt=merged.get("format", "csv"),
        seed=merged.get("seed", 12345),
        realizations=merged.get("realizations"),
        symbols=merged.get("symbols"),
        full_scale=merged.get("full_scale", False),
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _merged_config(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    problems = validate_config(cfg)
    if problems:
        for msg in problems:
            print(f"error: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        manifest = run_experiment(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ArithmeticError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    names = ", ".join(sorted(manifest["files"]))
    print(f"{cfg.experiment}: wrote {names} in {manifest['elapsed_s']}s "
          f"to {cfg.out_dir}")
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
