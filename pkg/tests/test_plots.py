import csv
from pathlib import Path

import pytest

from trplots.cli import main
from trplots.figures import (EmptyTableError, FigureSpec, default_spec,
                             render, render_all)


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


BER_HEADER = ["preset", "mode", "modulation", "M", "L_E", "snr_db",
              "ber_sim", "ber_halfwidth", "awgn_bound"]
BER_ROWS = [["p1", "tr", "bpsk", "4", "", "0.0", "1.0e-2", "1e-4", "9e-3"],
            ["p1", "tr", "bpsk", "4", "", "10.0", "1.0e-3", "1e-4", "2e-4"],
            ["p1", "tr", "bpsk", "4", "", "20.0", "0.000000000e+00",
             "0e0", "1e-9"]]


class TestRenderAll:
    def test_all_seven_experiments(self, artifact_dir, tmp_path):
        written = render_all(artifact_dir, tmp_path)
        names = {p.name for p in written}
        expected = {"time_compression.png", "le_sweep.png",
                    "params_vs_l.png", "focusing_table.png",
                    "power_comparison.png", "ber_approx.png",
                    "ber_tr_vs_etr.png", "ber_scenarios.png"}
        assert names == expected
        assert all(p.stat().st_size > 0 for p in written)

    def test_rerender_is_deterministic(self, artifact_dir, tmp_path):
        first = render_all(artifact_dir, tmp_path / "a")
        second = render_all(artifact_dir, tmp_path / "b")
        for p1, p2 in zip(first, second):
            assert p1.read_bytes() == p2.read_bytes()

    def test_empty_directory(self, tmp_path):
        with pytest.raises(EmptyTableError):
            render_all(tmp_path, tmp_path / "out")


class TestRender:
    def test_zero_ber_plotted_at_floor(self, tmp_path):
        src = tmp_path / "ber_approx.csv"
        write_csv(src, BER_HEADER, BER_ROWS)
        out = render(default_spec(src, tmp_path))
        assert out.exists() and out.stat().st_size > 0

    def test_empty_csv_raises(self, tmp_path):
        src = tmp_path / "ber_approx.csv"
        write_csv(src, BER_HEADER, [])
        with pytest.raises(EmptyTableError):
            render(default_spec(src, tmp_path))

    def test_unknown_file_name(self, tmp_path):
        src = tmp_path / "mystery.csv"
        write_csv(src, ["a", "b"], [["1", "2"]])
        with pytest.raises(ValueError):
            default_spec(src, tmp_path)

    def test_bad_kind(self, tmp_path):
        with pytest.raises(ValueError):
            FigureSpec(csv_path=tmp_path / "x.csv",
                       out_path=tmp_path / "x.png", kind="pie", x="a")


class TestCli:
    def test_single_csv(self, tmp_path):
        src = tmp_path / "ber_scenarios.csv"
        write_csv(src, BER_HEADER, BER_ROWS)
        out = tmp_path / "fig.png"
        assert main(["--csv", str(src), "--out", str(out)]) == 0
        assert out.exists()

    def test_render_all(self, artifact_dir, tmp_path):
        assert main(["--render-all", str(artifact_dir),
                     "--out", str(tmp_path)]) == 0
        assert (tmp_path / "le_sweep.png").exists()

    def test_empty_csv_exits_nonzero(self, tmp_path, capsys):
        src = tmp_path / "ber_approx.csv"
        write_csv(src, BER_HEADER, [])
        rc = main(["--csv", str(src), "--out", str(tmp_path / "f.png")])
        assert rc == 2
        assert "no data rows" in capsys.readouterr().err

    def test_requires_exactly_one_input(self, tmp_path):
        assert main(["--out", str(tmp_path)]) == 2
