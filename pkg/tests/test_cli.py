import json
import math

import numpy as np
import pytest

from photocorr.cli import EXIT_DATA, EXIT_OK, EXIT_VALIDATION, main


def write_config(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def run(args):
    return main([str(a) for a in args])


class TestSimulate:
    def test_reruns_are_byte_identical(self, tmp_path):
        cfg = write_config(tmp_path, "sim.json", {
            "source": "twin_beam", "n_mean": 2.0, "mu": 2,
            "eta": [0.6, 0.7], "shots": 5, "seed": 9,
        })
        assert run(["simulate", "--config", cfg, "--out", tmp_path / "a"]) == EXIT_OK
        assert run(["simulate", "--config", cfg, "--out", tmp_path / "b"]) == EXIT_OK
        a = (tmp_path / "a" / "shots.csv").read_bytes()
        b = (tmp_path / "b" / "shots.csv").read_bytes()
        assert a == b

    def test_seed_flag_overrides(self, tmp_path):
        cfg = write_config(tmp_path, "sim.json", {
            "source": "twin_beam", "n_mean": 2.0, "eta": [0.6, 0.7],
            "shots": 50, "seed": 9,
        })
        run(["simulate", "--config", cfg, "--out", tmp_path / "a", "--seed", 10])
        run(["simulate", "--config", cfg, "--out", tmp_path / "b"])
        assert (tmp_path / "a" / "shots.csv").read_text() != (tmp_path / "b" / "shots.csv").read_text()
        meta = json.loads((tmp_path / "a" / "shots.json").read_text())
        assert meta["config"]["seed"] == 10

    def test_unit_efficiency_columns_equal(self, tmp_path):
        cfg = write_config(tmp_path, "sim.json", {
            "source": "twin_beam", "n_mean": 3.0, "mu": 2,
            "eta": [1.0, 1.0], "shots": 200, "seed": 1,
        })
        run(["simulate", "--config", cfg, "--out", tmp_path])
        rows = (tmp_path / "shots.csv").read_text().splitlines()[1:]
        for row in rows:
            _, m1, m2 = row.split(",")
            assert m1 == m2

    def test_bad_source_exits_2(self, tmp_path):
        cfg = write_config(tmp_path, "sim.json", {
            "source": "laser", "n_mean": 1.0, "eta": [0.5, 0.5], "shots": 10,
        })
        assert run(["simulate", "--config", cfg, "--out", tmp_path]) == EXIT_VALIDATION

    def test_missing_config_file_exits_2(self, tmp_path):
        assert run(["simulate", "--config", tmp_path / "none.json", "--out", tmp_path]) == EXIT_VALIDATION


class TestAnalyze:
    def make_series(self, tmp_path, **overrides):
        payload = {
            "source": "split_thermal", "n_mean": 20.0, "mu": 2,
            "eta": [0.71, 0.71], "shots": 100000, "seed": 4, "name": "shots.csv",
        }
        payload.update(overrides)
        cfg = write_config(tmp_path, "sim.json", payload)
        assert run(["simulate", "--config", cfg, "--out", tmp_path]) == EXIT_OK
        return tmp_path / "shots.csv"

    def test_report_contents(self, tmp_path):
        csv = self.make_series(tmp_path)
        cfg = write_config(tmp_path, "ana.json", {"input": str(csv), "lags": [0, 1]})
        assert run(["analyze", "--config", cfg, "--out", tmp_path]) == EXIT_OK
        report = json.loads((tmp_path / "analysis.json").read_text())
        assert report["shots"] == 100000
        # thermal correlation at these settings, from the closed form
        n = 20.0 / 2
        want = n * 0.71 / (1 + 0.71 * n)
        assert abs(report["correlation_raw"] - want) < 0.01
        assert abs(report["correlation_function"]["1"]) < 3.0 / math.sqrt(100000)
        assert "difference_histogram" in report
        assert report["config"]["input"] == str(csv)

    def test_perfect_copy_input(self, tmp_path):
        csv = self.make_series(tmp_path, source="twin_beam", eta=[1.0, 1.0], shots=2000)
        cfg = write_config(tmp_path, "ana.json", {"input": str(csv)})
        run(["analyze", "--config", cfg, "--out", tmp_path])
        report = json.loads((tmp_path / "analysis.json").read_text())
        assert report["correlation_raw"] == pytest.approx(1.0, abs=1e-12)
        assert report["sigma2_difference"] == 0.0

    def test_malformed_csv_exits_3(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("shot,m1,m2\n0,1,x\n")
        cfg = write_config(tmp_path, "ana.json", {"input": str(bad)})
        assert run(["analyze", "--config", cfg, "--out", tmp_path]) == EXIT_DATA

    def test_fit_section(self, tmp_path):
        csv = self.make_series(tmp_path, n_mean=100.0, mu=5, shots=20000)
        cfg = write_config(tmp_path, "ana.json", {"input": str(csv), "fit": True})
        run(["analyze", "--config", cfg, "--out", tmp_path])
        report = json.loads((tmp_path / "analysis.json").read_text())
        assert report["multithermal_fit_channel1"]["mu"] >= 1


class TestFitCommand:
    def test_fit_channel(self, tmp_path):
        sim = write_config(tmp_path, "sim.json", {
            "source": "split_thermal", "n_mean": 200.0, "mu": 14,
            "eta": [0.7, 0.7], "shots": 50000, "seed": 6, "name": "shots.csv",
        })
        run(["simulate", "--config", sim, "--out", tmp_path])
        cfg = write_config(tmp_path, "fit.json", {
            "input": str(tmp_path / "shots.csv"), "channel": 1,
        })
        assert run(["fit", "--config", cfg, "--out", tmp_path]) == EXIT_OK
        report = json.loads((tmp_path / "fit.json").read_text())
        # detected counts of a 14-mode thermal beam keep the mode count
        assert report["mu"] == pytest.approx(14, abs=1)


class TestAnalytic:
    def test_tables_and_report(self, tmp_path):
        cfg = write_config(tmp_path, "an.json", {"eta": [0.6, 0.6], "n_mean": 1.0})
        assert run(["analytic", "--config", cfg, "--out", tmp_path]) == EXIT_OK
        report = json.loads((tmp_path / "analytic.json").read_text())
        assert report["threshold_n"] == "unbounded"
        twb = report["sources"]["twin_beam"]
        coh = report["sources"]["coherent_pair"]
        assert twb["sigma2_d"] < coh["sigma2_d"]
        assert twb["below_shot_noise"]
        table = (tmp_path / "diff_twin_beam.tsv").read_text().splitlines()
        assert table[0] == "d\tp"
        probs = [float(line.split("\t")[1]) for line in table[1:]]
        assert sum(probs) == pytest.approx(1.0, abs=1e-9)

    def test_multimode_table_matches_closed_variance(self, tmp_path):
        cfg = write_config(tmp_path, "an.json", {"eta": [0.5, 0.7], "n_mean": 2.0, "mu": 4})
        run(["analytic", "--config", cfg, "--out", tmp_path])
        report = json.loads((tmp_path / "analytic.json").read_text())
        rows = (tmp_path / "diff_twin_beam.tsv").read_text().splitlines()[1:]
        d = np.array([float(r.split("\t")[0]) for r in rows])
        p = np.array([float(r.split("\t")[1]) for r in rows])
        mean = d @ p
        var = (d - mean) ** 2 @ p
        assert var == pytest.approx(report["sources"]["twin_beam"]["sigma2_d"], rel=1e-6)

    def test_vacuum_tables_are_deltas(self, tmp_path):
        cfg = write_config(tmp_path, "an.json", {"eta": [0.5, 0.7], "n_mean": 0.0})
        run(["analytic", "--config", cfg, "--out", tmp_path])
        for kind in ("twin_beam", "coherent_pair", "split_thermal"):
            rows = (tmp_path / f"diff_{kind}.tsv").read_text().splitlines()[1:]
            table = {int(r.split("\t")[0]): float(r.split("\t")[1]) for r in rows}
            assert table[0] == pytest.approx(1.0, abs=1e-12)
            assert all(p == 0.0 for d, p in table.items() if d != 0)

    def test_joint_table(self, tmp_path):
        cfg = write_config(tmp_path, "an.json", {"eta": [0.6, 0.8], "n_mean": 1.0,
                                                 "joint": True})
        run(["analytic", "--config", cfg, "--out", tmp_path])
        rows = (tmp_path / "joint_coherent_pair.tsv").read_text().splitlines()
        assert rows[0] == "n1\tn2\tp"
        total = sum(float(r.split("\t")[2]) for r in rows[1:])
        assert total == pytest.approx(1.0, abs=1e-9)

    def test_format_selector(self, tmp_path):
        cfg = write_config(tmp_path, "an.json", {"eta": [0.6, 0.6], "n_mean": 1.0})
        run(["analytic", "--config", cfg, "--out", tmp_path / "c", "--format", "csv"])
        header = (tmp_path / "c" / "diff_twin_beam.csv").read_text().splitlines()[0]
        assert header == "d,p"
        run(["analytic", "--config", cfg, "--out", tmp_path / "j", "--format", "json"])
        rows = json.loads((tmp_path / "j" / "diff_twin_beam.json").read_text())
        assert sum(r["p"] for r in rows) == pytest.approx(1.0, abs=1e-9)


class TestSweep:
    def test_crossing_at_threshold(self, tmp_path):
        cfg = write_config(tmp_path, "sw.json", {
            "eta": [0.5, 0.7], "n_min": 16.0, "n_max": 19.0, "n_points": 61,
        })
        assert run(["sweep", "--config", cfg, "--out", tmp_path]) == EXIT_OK
        rows = (tmp_path / "sweep_n.tsv").read_text().splitlines()[1:]
        crossings = []
        prev = None
        for row in rows:
            n, coh, twb, _ = (float(v) for v in row.split("\t"))
            sign = twb - coh
            if prev is not None and prev[1] < 0 <= sign:
                crossings.append(0.5 * (prev[0] + n))
            prev = (n, sign)
        assert len(crossings) == 1
        assert abs(crossings[0] - 17.5) < 0.05

    def test_balanced_sweep_orders_columns(self, tmp_path):
        cfg = write_config(tmp_path, "sw.json", {
            "eta": [0.6, 0.6], "n_min": 0.5, "n_max": 10.0, "n_points": 20,
        })
        run(["sweep", "--config", cfg, "--out", tmp_path])
        for row in (tmp_path / "sweep_n.tsv").read_text().splitlines()[1:]:
            n, coh, twb, th = (float(v) for v in row.split("\t"))
            assert twb < coh == th


class TestNoiseBudget:
    def test_paper_style_summary(self, tmp_path):
        cfg = write_config(tmp_path, "nb.json", {
            "sigma2_measured": 2.124e11, "m1": 7.225e6, "m2": 7.212e6, "mu": 14,
            "source": "twin_beam", "eta_nominal": 0.67, "reference_x": 0.0224,
            "eta_grid": {"lo": 0.5, "hi": 0.9, "points": 5},
        })
        assert run(["noise-budget", "--config", cfg, "--out", tmp_path]) == EXIT_OK
        summary = json.loads((tmp_path / "noise_budget.json").read_text())
        assert 0.01 <= summary["x_at_nominal"] <= 0.04
        assert summary["reference_x"] == 0.0224
        lo, hi = summary["imbalance_interval"]
        assert 0.12 <= lo <= hi <= 0.22
        surface = (tmp_path / "noise_surface.tsv").read_text().splitlines()
        assert surface[0] == "eta1\teta2\tx\tcorrected_sigma2\tshot_noise_plane"
        assert len(surface) == 1 + 25

    def test_thermal_surface_above_plane(self, tmp_path):
        cfg = write_config(tmp_path, "nb.json", {
            "sigma2_measured": 4.097e13, "m1": 2.22e8, "m2": 2.22e8, "mu": 15,
            "source": "split_thermal", "eta_nominal": 0.71,
            "eta_grid": {"lo": 0.5, "hi": 0.9, "points": 4},
        })
        run(["noise-budget", "--config", cfg, "--out", tmp_path])
        rows = (tmp_path / "noise_surface.tsv").read_text().splitlines()[1:]
        for row in rows:
            _, _, _, corrected, plane = (float(v) for v in row.split("\t"))
            assert corrected >= plane * (1 - 1e-12)

    def test_at_floor_gives_zero_column(self, tmp_path):
        cfg = write_config(tmp_path, "nb.json", {
            "sigma2_measured": 100.0, "m1": 600.0, "m2": 700.0, "mu": 14,
            "source": "twin_beam", "eta_nominal": 0.65,
            "eta_grid": {"lo": 0.6, "hi": 0.7, "points": 3},
        })
        assert run(["noise-budget", "--config", cfg, "--out", tmp_path]) == EXIT_OK
        rows = (tmp_path / "noise_surface.tsv").read_text().splitlines()[1:]
        assert all(float(r.split("\t")[2]) == 0.0 for r in rows)

    def test_missing_key_exits_2(self, tmp_path):
        cfg = write_config(tmp_path, "nb.json", {"sigma2_measured": 1.0})
        assert run(["noise-budget", "--config", cfg, "--out", tmp_path]) == EXIT_VALIDATION
