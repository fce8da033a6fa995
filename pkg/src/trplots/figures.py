"""Figure rendering for the experiment CSV artifacts.

This package only reads the delimited files the simulator CLI writes; it
never imports the simulator itself, so the CSV schema is the whole
contract between the two.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

KINDS = ("stems", "lines", "semilog-ber")

#: Stripping the Software chunk keeps PNG bytes identical across runs.
_SAVEFIG = {"dpi": 110, "metadata": {"Software": None}}


class EmptyTableError(ValueError):
    """The CSV has a header but no data rows, so there is nothing to plot."""


@dataclass(frozen=True)
class FigureSpec:
    csv_path: Path
    out_path: Path
    kind: str
    x: str
    y: tuple = ()
    group_by: tuple = ()
    title: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; "
                             f"known: {KINDS}")


def _load(path: Path) -> tuple[list[str], list[dict]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise EmptyTableError(f"{path} has no header")
        rows = list(reader)
    if not rows:
        raise EmptyTableError(f"{path} has no data rows")
    return list(reader.fieldnames), rows


def _maybe_float(v: str):
    try:
        return float(v)
    except (TypeError, ValueError):
        return None


def _group_label(row: dict, keys: tuple) -> str:
    parts = [f"{k}={row[k]}" for k in keys if row.get(k) not in (None, "")]
    return ", ".join(parts)


def _groups(rows: list[dict], keys: tuple):
    """Split rows by the group columns, preserving first-seen order."""
    if not keys:
        return [("", rows)]
    out: dict[str, list] = {}
    for row in rows:
        out.setdefault(_group_label(row, keys), []).append(row)
    return list(out.items())


def _xy(rows: list[dict], x: str, y: str):
    xs, ys = [], []
    for row in rows:
        xv, yv = _maybe_float(row.get(x)), _maybe_float(row.get(y))
        if xv is not None and yv is not None:
            xs.append(xv)
            ys.append(yv)
    return xs, ys


def _render_stems(spec: FigureSpec, rows):
    groups = _groups(rows, spec.group_by)
    fig, axes = plt.subplots(len(groups), 1, sharex=True,
                             figsize=(7, 2.2 * len(groups)), squeeze=False)
    for ax, (label, grp) in zip(axes[:, 0], groups):
        xs, ys = _xy(grp, spec.x, spec.y[0])
        ax.stem(xs, ys, basefmt=" ")
        ax.set_ylabel(spec.y[0])
        if label:
            ax.set_title(label, fontsize=9)
    axes[-1, 0].set_xlabel(spec.x)
    return fig


def _render_lines(spec: FigureSpec, rows):
    fig, ax = plt.subplots(figsize=(7, 4.5))
    categorical = any(_maybe_float(r.get(spec.x)) is None for r in rows)
    cats = []
    if categorical:
        for r in rows:
            if r.get(spec.x) not in cats:
                cats.append(r.get(spec.x))
    for label, grp in _groups(rows, spec.group_by):
        for ycol in spec.y:
            if categorical:
                xs, ys = [], []
                for r in grp:
                    yv = _maybe_float(r.get(ycol))
                    if yv is not None:
                        xs.append(cats.index(r.get(spec.x)))
                        ys.append(yv)
            else:
                xs, ys = _xy(grp, spec.x, ycol)
            if not xs:
                continue
            name = ", ".join(p for p in (label, ycol if len(spec.y) > 1
                                         else "") if p)
            ax.plot(xs, ys, marker="o", markersize=3, label=name or None)
    if categorical:
        ax.set_xticks(range(len(cats)))
        ax.set_xticklabels(cats, rotation=30, ha="right", fontsize=8)
    ax.set_xlabel(spec.x)
    ax.set_ylabel(", ".join(spec.y))
    ax.grid(True, alpha=0.3)
    if ax.get_legend_handles_labels()[0]:
        ax.legend(fontsize=7)
    return fig


def _render_semilog_ber(spec: FigureSpec, rows):
    fig, ax = plt.subplots(figsize=(7, 4.5))
    positives = [v for r in rows for v in [_maybe_float(r.get(spec.y[0]))]
                 if v is not None and v > 0]
    floor = min(positives) / 10.0 if positives else 1e-8
    zero_marked = False
    for label, grp in _groups(rows, spec.group_by):
        for j, ycol in enumerate(spec.y):
            xs, ys = _xy(grp, spec.x, ycol)
            if not xs:
                continue
            clipped = [max(v, floor) for v in ys]
            style = "-o" if j == 0 else "--"
            name = ", ".join(p for p in (label, ycol if len(spec.y) > 1
                                         else "") if p)
            line, = ax.semilogy(xs, clipped, style, markersize=3,
                                label=name or None)
            if j == 0:
                for xv, yv in zip(xs, ys):
                    if yv == 0.0:
                        ax.annotate("0", (xv, floor), fontsize=7,
                                    ha="center", va="bottom",
                                    color=line.get_color())
                        zero_marked = True
    if zero_marked:
        ax.set_ylim(bottom=floor / 2)
        ax.text(0.99, 0.02, "0 = no errors observed (shown at axis floor)",
                transform=ax.transAxes, ha="right", fontsize=7)
    ax.set_xlabel(spec.x)
    ax.set_ylabel(spec.y[0])
    ax.grid(True, which="both", alpha=0.3)
    if ax.get_legend_handles_labels()[0]:
        ax.legend(fontsize=7)
    return fig


_RENDERERS = {"stems": _render_stems, "lines": _render_lines,
              "semilog-ber": _render_semilog_ber}


def render(spec: FigureSpec) -> Path:
    """Render one figure to spec.out_path and return that path."""
    _, rows = _load(Path(spec.csv_path))
    fig = _RENDERERS[spec.kind](spec, rows)
    if spec.title:
        fig.suptitle(spec.title, fontsize=10)
    fig.tight_layout()
    out = Path(spec.out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, **_SAVEFIG)
    plt.close(fig)
    return out


def _ber_groups(header: list[str]) -> tuple:
    keys = ("scenario", "preset", "mode", "modulation", "M", "L_E")
    return tuple(k for k in keys if k in header)


def default_spec(csv_path: Path, out_dir: Path) -> FigureSpec:
    """Map a known experiment CSV to its figure layout by file name."""
    csv_path = Path(csv_path)
    header, _ = _load(csv_path)
    stem = csv_path.stem
    out = Path(out_dir) / f"{stem}.png"
    if stem == "time_compression":
        return FigureSpec(csv_path, out, "stems", x="tap_index",
                          y=("magnitude",), group_by=("series",),
                          title="Temporal compression")
    if stem == "le_sweep":
        return FigureSpec(csv_path, out, "lines", x="L_E",
                          y=("signal_isi_ratio_db",), group_by=("preset",),
                          title="Residual ISI vs equalizer length")
    if stem == "params_vs_l":
        return FigureSpec(csv_path, out, "lines", x="L",
                          y=("usable_power_db", "eta_tr_apparent_db"),
                          group_by=("model", "ts_over_sigma"),
                          title="Closed-form ratios vs channel length")
    if stem == "focusing_table":
        y = tuple(c for c in header if c.endswith("_db"))
        return FigureSpec(csv_path, out, "lines", x="preset", y=y,
                          title="Spatial focusing by preset")
    if stem == "power_comparison":
        return FigureSpec(csv_path, out, "lines", x="quantity",
                          y=("rel_err",), group_by=("preset",),
                          title="Closed forms vs simulation")
    if stem.startswith("ber"):
        y = ["ber_sim"]
        for extra in ("pe_theory", "awgn_bound"):
            if extra in header:
                y.append(extra)
        return FigureSpec(csv_path, out, "semilog-ber", x="snr_db",
                          y=tuple(y), group_by=_ber_groups(header),
                          title=stem.replace("_", " "))
    raise ValueError(f"no default figure mapping for {csv_path.name}")


def render_all(in_dir: Path, out_dir: Path) -> list[Path]:
    """Render every known CSV in a results directory."""
    in_dir = Path(in_dir)
    csvs = sorted(in_dir.glob("*.csv"))
    if not csvs:
        raise EmptyTableError(f"no CSV files in {in_dir}")
    written = []
    for path in csvs:
        written.append(render(default_spec(path, out_dir)))
    return written
