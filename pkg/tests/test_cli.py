import csv
import math
import os
import re

import pytest

from gausslab import cli, theory, verify
from gausslab.cli import main
from gausslab.discrepancy import prefix_counts
from gausslab.moments import Statistic, sharp_second_moment
from gausslab.rk import build_rk_table, load_table


def run_cli(args):
    return main(args)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestTable:
    def test_build_and_cache_file(self, tmp_path, capsys):
        code = run_cli(["table", "--k", "3", "--n-max", "5000", "--cache-dir", str(tmp_path)])
        assert code == 0
        path = tmp_path / "rk3_5000.rktb"
        assert path.exists()
        assert os.path.getsize(path) == 4 + 4 + 4 + 8 + 8 * 5001 + 8
        table = load_table(path)
        assert table.counts[:6].tolist() == [1, 6, 12, 8, 6, 24]

    def test_rebuild_skips_valid_cache(self, tmp_path, capsys):
        run_cli(["table", "--k", "2", "--n-max", "1000", "--cache-dir", str(tmp_path)])
        capsys.readouterr()
        code = run_cli(["table", "--k", "2", "--n-max", "1000", "--cache-dir", str(tmp_path)])
        assert code == 0
        assert "skipping" in capsys.readouterr().out

    def test_corrupt_cache_rebuilt_loudly(self, tmp_path, capsys):
        run_cli(["table", "--k", "2", "--n-max", "500", "--cache-dir", str(tmp_path)])
        path = tmp_path / "rk2_500.rktb"
        data = bytearray(path.read_bytes())
        data[40] ^= 0x55
        path.write_bytes(bytes(data))
        capsys.readouterr()
        code = run_cli(["table", "--k", "2", "--n-max", "500", "--cache-dir", str(tmp_path)])
        assert code == 0
        assert "rebuilding" in capsys.readouterr().err
        assert load_table(path).counts[2] == 4

    def test_k_out_of_range_usage_error(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            run_cli(["table", "--k", "9", "--n-max", "10", "--cache-dir", str(tmp_path)])
        assert exc.value.code == 2

    def test_env_cache_dir(self, tmp_path, monkeypatch):
        monkeypatch.setenv("GAUSSLAB_CACHE_DIR", str(tmp_path))
        assert run_cli(["table", "--k", "1", "--n-max", "100"]) == 0
        assert (tmp_path / "rk1_100.rktb").exists()


class TestMoments:
    def test_rows_positive_and_increasing(self, tmp_path):
        out = tmp_path / "m.csv"
        code = run_cli(
            [
                "moments",
                "--k", "3",
                "--x-min", "100",
                "--x-max", "400",
                "--points", "3",
                "--stat", "SmoothSecond",
                "--out", str(out),
            ]
        )
        assert code == 0
        rows = read_csv(out)
        assert rows[0] == cli.MOMENTS_HEADER
        values = [float(r[3]) for r in rows[1:]]
        assert len(values) == 3
        assert all(v > 0 for v in values)
        assert values == sorted(values)

    def test_predicted_blank_without_c3_for_k3(self, tmp_path):
        out = tmp_path / "m.csv"
        run_cli(
            [
                "moments",
                "--k", "3",
                "--x-min", "100",
                "--x-max", "200",
                "--points", "2",
                "--stat", "SmoothSecond",
                "--out", str(out),
            ]
        )
        rows = read_csv(out)
        assert all(r[5] == "" for r in rows[1:])

    def test_predicted_filled_with_c3(self, tmp_path):
        out = tmp_path / "m.csv"
        run_cli(
            [
                "moments",
                "--k", "3",
                "--x-min", "100",
                "--x-max", "200",
                "--points", "2",
                "--stat", "SmoothSecond",
                "--c3", "10.6",
                "--out", str(out),
            ]
        )
        rows = read_csv(out)
        for r in rows[1:]:
            want = theory.predicted_smooth(3, float(r[1]), c3=10.6)
            assert abs(float(r[5]) - want) <= 1e-9 * want

    def test_k4_predicted_column(self, tmp_path):
        out = tmp_path / "m.csv"
        run_cli(
            [
                "moments",
                "--k", "4",
                "--x-min", "50",
                "--x-max", "100",
                "--points", "2",
                "--stat", "SmoothSecond",
                "--out", str(out),
            ]
        )
        rows = read_csv(out)
        for r in rows[1:]:
            want = theory.predicted_smooth(4, float(r[1]))
            assert abs(float(r[5]) - want) <= 1e-9 * abs(want)

    def test_deterministic_apart_from_runtime(self, tmp_path):
        args = [
            "moments",
            "--k", "3",
            "--x-min", "50",
            "--x-max", "200",
            "--points", "4",
            "--stat", "SmoothSecond",
            "--stat", "SharpSecond",
        ]
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        run_cli(args + ["--out", str(out1), "--threads", "1"])
        run_cli(args + ["--out", str(out2), "--threads", "2"])
        strip = lambda rows: [r[:-1] for r in rows]
        assert strip(read_csv(out1)) == strip(read_csv(out2))

    def test_empty_grid_usage_error(self, tmp_path):
        code = run_cli(
            [
                "moments",
                "--k", "3",
                "--x-min", "100",
                "--x-max", "50",
                "--points", "2",
                "--stat", "SmoothSecond",
                "--out", str(tmp_path / "m.csv"),
            ]
        )
        assert code == 2

    def test_infeasible_x_row_level_error(self, tmp_path):
        out = tmp_path / "m.csv"
        code = run_cli(
            [
                "moments",
                "--k", "3",
                "--x-min", "100",
                "--x-max", "1000",
                "--points", "2",
                "--stat", "SharpSecond",
                "--n-max", "500",
                "--out", str(out),
            ]
        )
        assert code == 2
        rows = read_csv(out)
        assert rows[1][3].startswith("ERROR") or rows[2][3].startswith("ERROR")
        assert any(not r[3].startswith("ERROR") for r in rows[1:])

    def test_crlf_line_endings(self, tmp_path):
        out = tmp_path / "m.csv"
        run_cli(
            [
                "moments",
                "--k", "3",
                "--x-min", "100",
                "--x-max", "100",
                "--points", "1",
                "--stat", "SmoothSecond",
                "--out", str(out),
            ]
        )
        raw = out.read_bytes()
        assert b"\r\n" in raw


class TestFitCommand:
    def _write_synthetic(self, path, c3=10.6):
        xs = [2e3 * (10.0) ** (j / 11.0) for j in range(12)]
        rows = [cli.MOMENTS_HEADER]
        for x in xs:
            rows.append(
                [
                    "3",
                    format(x, ".17g"),
                    "SmoothSecond",
                    format(theory.predicted_smooth(3, x, c3=c3), ".17g"),
                    "0",
                    "",
                    "0.0",
                ]
            )
        with open(path, "w", newline="") as fh:
            csv.writer(fh, lineterminator="\r\n").writerows(rows)

    def test_synthetic_round_trip(self, tmp_path, capsys):
        path = tmp_path / "synth.csv"
        self._write_synthetic(path)
        assert run_cli(["fit", str(path), "--mode", "smooth"]) == 0
        out = capsys.readouterr().out
        est = float(re.search(r"c3_estimate: ([-\d.e+]+)", out).group(1))
        dev = float(re.search(r"deviation_from_10.6: ([-\d.e+]+)", out).group(1))
        assert abs(est - 10.6) < 1e-8
        assert dev < 1e-8

    def test_malformed_csv_reports_line(self, tmp_path, capsys):
        path = tmp_path / "bad.csv"
        self._write_synthetic(path)
        lines = path.read_text().splitlines()
        lines[3] = "3,not_a_number,SmoothSecond,1.0,0,,0"
        path.write_text("\n".join(lines))
        code = run_cli(["fit", str(path), "--mode", "smooth"])
        assert code == 2
        err = capsys.readouterr().err
        assert ":4:" in err  # 1-based line number of the bad row

    def test_missing_file_io_error(self, tmp_path):
        assert run_cli(["fit", str(tmp_path / "nope.csv")]) == 3


class TestVerifyCommand:
    def test_exit_zero_on_all_pass(self, monkeypatch, capsys):
        fake = [("alpha", lambda q, t: verify.CheckResult("alpha", True, "ok"))]
        monkeypatch.setattr(verify, "BATTERY", fake)
        assert run_cli(["verify", "--level", "quick"]) == 0
        assert "[PASS] alpha" in capsys.readouterr().out

    def test_exit_one_on_failure(self, monkeypatch, capsys):
        fake = [
            ("alpha", lambda q, t: verify.CheckResult("alpha", True, "ok")),
            ("beta", lambda q, t: verify.CheckResult("beta", False, "broken")),
        ]
        monkeypatch.setattr(verify, "BATTERY", fake)
        assert run_cli(["verify", "--level", "quick"]) == 1
        out = capsys.readouterr().out
        assert "[FAIL] beta" in out and "failed: beta" in out

    def test_fault_injection_caught_by_oracle_check(self):
        # off-by-one in a k=3 table must be reported by name
        table = build_rk_table(3, 2000)
        counts = table.counts.copy()
        counts[1500] += 1
        bad = type(table)(k=3, n_max=2000, counts=counts)
        res = verify.check_oracle_equivalence(False, verify._Tables({3: bad}))
        assert not res.passed
        assert "n=1500" in res.detail


class TestShortInterval:
    def test_finite_positive_ratios(self, tmp_path):
        out = tmp_path / "s.csv"
        code = run_cli(
            [
                "shortinterval",
                "--x-min", "2000",
                "--x-max", "10000",
                "--points", "2",
                "--beta", "0.9",
                "--out", str(out),
            ]
        )
        assert code == 0
        rows = read_csv(out)
        ratios = [float(r[6]) for r in rows[1:]]
        assert all(math.isfinite(r) and r > 0 for r in ratios)

    def test_beta_one_telescopes_to_sharp_sum(self, tmp_path):
        out = tmp_path / "s.csv"
        run_cli(
            [
                "shortinterval",
                "--x-min", "3000",
                "--x-max", "3000",
                "--points", "1",
                "--beta", "1.0",
                "--out", str(out),
            ]
        )
        rows = read_csv(out)
        window = float(rows[1][5])
        series = prefix_counts(build_rk_table(3, 6000))
        want = sharp_second_moment(series, 6000).value
        assert abs(window - want) <= 1e-11 * want

    def test_bad_beta(self, tmp_path):
        code = run_cli(
            ["shortinterval", "--x-min", "10", "--x-max", "20", "--beta", "1.5"]
        )
        assert code == 2


class TestConstantsCommand:
    def test_csv_rows(self, tmp_path):
        out = tmp_path / "c.csv"
        assert run_cli(["constants", "--k", "4", "--out", str(out)]) == 0
        rows = read_csv(out)
        as_dict = {r[1]: float(r[2]) for r in rows[1:]}
        assert abs(as_dict["c_k"] - (math.pi**4 / 6 + 2 * math.pi**2)) < 1e-10
        assert as_dict["c4_prime"] < 0
        assert "c3_prime" not in as_dict

    def test_k_range(self, tmp_path):
        assert run_cli(["constants", "--k", "2"]) == 2


class TestLock:
    def test_second_locker_fails(self, tmp_path):
        with cli._CacheLock(str(tmp_path)):
            with pytest.raises(RuntimeError):
                cli._CacheLock(str(tmp_path)).__enter__()


class TestExperimentConfig:
    def test_grid_must_ascend(self):
        with pytest.raises(ValueError):
            cli.ExperimentConfig(k=3, x_grid=[100.0, 50.0], statistics=[Statistic.SMOOTH_SECOND])

    def test_needs_statistics(self):
        with pytest.raises(ValueError):
            cli.ExperimentConfig(k=3, x_grid=[100.0], statistics=[])

    def test_needs_grid(self):
        with pytest.raises(ValueError):
            cli.ExperimentConfig(k=3, x_grid=[], statistics=[Statistic.SMOOTH_SECOND])
