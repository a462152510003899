import csv
import io
import json

import numpy as np
import pytest

from shapedbmd.cli import RunConfig, main, read_config_file, resolve_config


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows_of(text):
    return list(csv.reader(io.StringIO(text)))


class TestConfig:
    def test_defaults(self):
        cfg, _ = resolve_config(["rate-curve"])
        assert cfg.m == 5 and cfg.quad_nodes == 16 and cfg.format == "csv"

    def test_precedence(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("# settings\nm = 2\nsnr-min = 3\nrates = capacity, sgmi\n")
        cfg, _ = resolve_config(["rate-curve", "--config", str(path), "--snr-min", "4"])
        assert cfg.m == 2 and cfg.snr_min == 4.0 and cfg.rates == ("capacity", "sgmi")

    def test_bad_config_key(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("colour = blue\n")
        with pytest.raises(ValueError):
            read_config_file(path)

    def test_grid_size(self):
        cfg = RunConfig(snr_min=10, snr_max=28, snr_step=0.5)
        assert len(cfg.snr_grid()) == 37

    def test_bad_step(self, capsys):
        code, _, err = run(capsys, "rate-curve", "--snr-step", "0")
        assert code == 2 and "step" in err

    def test_unknown_rate(self, capsys):
        code, _, _ = run(capsys, "rate-curve", "--rates", "capacity,lm")
        assert code == 2


class TestRateCurve:
    def test_bpsk_capacity_monotone(self, capsys):
        code, out, _ = run(capsys, "rate-curve", "--m", "1", "--snr-min", "0", "--snr-max", "10",
                           "--snr-step", "1", "--rates", "capacity")
        rows = rows_of(out)
        assert code == 0 and rows[0] == ["snr_db", "capacity"] and len(rows) == 12
        vals = [float(r[1]) for r in rows[1:]]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_all_columns(self, capsys):
        code, out, _ = run(capsys, "rate-curve", "--m", "2", "--snr-min", "4", "--snr-max", "6", "--snr-step", "1")
        rows = rows_of(out)
        assert rows[0] == ["snr_db", "capacity", "shaped_bmd", "sgmi", "bitshaped_bmd", "uniform_bmd", "uniform_sgmi"]
        assert len(rows) == 4
        for r in rows[1:]:
            v = [float(x) for x in r]
            assert v[2] <= v[1] + 1e-12
            assert v[4] <= v[1] + 1e-12 and v[5] <= v[4] + 1e-12

    def test_column_order_is_fixed(self, capsys):
        _, out, _ = run(capsys, "rate-curve", "--m", "2", "--snr-min", "5", "--snr-max", "5",
                        "--rates", "uniform-bmd,capacity")
        assert rows_of(out)[0] == ["snr_db", "capacity", "uniform_bmd"]

    def test_nine_significant_digits(self, capsys):
        _, out, _ = run(capsys, "rate-curve", "--m", "2", "--snr-min", "5", "--snr-max", "5", "--rates", "capacity")
        value = rows_of(out)[1][1]
        assert len(value.replace(".", "").lstrip("0")) == 9

    def test_json(self, capsys):
        _, out, _ = run(capsys, "rate-curve", "--m", "1", "--snr-min", "0", "--snr-max", "1",
                        "--rates", "capacity,uniform-bmd", "--format", "json")
        data = json.loads(out)
        assert len(data) == 3 and set(data[0]) == {"snr_db", "capacity", "uniform_bmd"}

    def test_fixed_distribution(self, capsys, tmp_path):
        path = tmp_path / "d.txt"
        path.write_text("00 0.25\n01 0.25\n10 0.25\n11 0.25\n")
        _, fixed, _ = run(capsys, "rate-curve", "--m", "2", "--snr-min", "5", "--snr-max", "5",
                          "--rates", "shaped-bmd,uniform-bmd", "--dist-file", str(path))
        r = rows_of(fixed)[1]
        assert r[1] == r[2]

    def test_unwritable_output(self, capsys, tmp_path):
        code, _, _ = run(capsys, "rate-curve", "--m", "1", "--snr-min", "0", "--snr-max", "0",
                         "--rates", "capacity", "--out", str(tmp_path / "missing" / "x.csv"))
        assert code == 2

    def test_deterministic_file(self, capsys, tmp_path):
        outs = []
        for k in range(2):
            path = tmp_path / f"c{k}.csv"
            assert main(["rate-curve", "--m", "2", "--snr-min", "3", "--snr-max", "4",
                         "--rates", "bitshaped-bmd,sgmi", "--out", str(path)]) == 0
            outs.append(path.read_bytes())
        assert outs[0] == outs[1]


class TestGap:
    def test_m2_reproducible(self, capsys):
        args = ["gap", "--m", "2", "--target-rate", "1.0", "--rates", "capacity,shaped-bmd,sgmi,uniform-bmd"]
        code, first, _ = run(capsys, *args)
        _, second, _ = run(capsys, *args)
        assert code == 0 and first == second
        rows = rows_of(first)
        assert rows[0] == ["functional", "snr_db", "gap_db"]
        assert rows[1][0] == "capacity" and float(rows[1][2]) == 0.0
        assert all(float(r[2]) >= -1e-5 for r in rows[1:])

    def test_needs_target(self, capsys):
        assert run(capsys, "gap", "--m", "2")[0] == 2

    def test_target_out_of_range(self, capsys):
        assert run(capsys, "gap", "--m", "2", "--target-rate", "2.5")[0] == 2


class TestExamples:
    def test_passes(self, capsys):
        code, out, _ = run(capsys, "examples")
        rows = rows_of(out)
        assert code == 0 and len(rows) == 5
        assert all(r[-1] == "ok" for r in rows[1:])

    def test_mismatch_exits_nonzero(self, capsys, monkeypatch):
        from shapedbmd import cli

        real = cli.rate_bmd
        monkeypatch.setattr(cli, "rate_bmd", lambda ch, d: type(real(ch, d))(real(ch, d).raw + 1e-8, real(ch, d).clipped))
        assert run(capsys, "examples")[0] == 1


class TestSimulate:
    def test_identity(self, capsys, tmp_path):
        dist = tmp_path / "dep.txt"
        dist.write_text("01 0.5\n10 0.5\n")
        code, out, _ = run(capsys, "simulate", "--channel", "identity", "--dist-file", str(dist),
                           "--n-list", "8,16", "--rate-list", "0.5", "--trials", "200")
        rows = rows_of(out)
        assert code == 0 and rows[0] == ["n", "rate", "trials", "errors", "fer", "ties"]
        assert [r[3] for r in rows[1:]] == ["0", "0"]

    def test_channel_file_and_bytes(self, capsys, tmp_path):
        chan = tmp_path / "c.txt"
        chan.write_text("1 2\n0.9 0.1\n0.1 0.9\n")
        files = []
        for k in range(2):
            out = tmp_path / f"s{k}.csv"
            assert main(["simulate", "--channel-file", str(chan), "--n-list", "8", "--rate-list", "0.25,0.5",
                         "--trials", "300", "--seed", "11", "--out", str(out)]) == 0
            files.append(out.read_bytes())
        assert files[0] == files[1]

    def test_empty_rate_list(self, capsys):
        assert run(capsys, "simulate", "--channel", "identity", "--n-list", "8", "--rate-list", "")[0] == 2

    def test_cap(self, capsys):
        assert run(capsys, "simulate", "--channel", "identity", "--n-list", "30", "--rate-list", "1")[0] == 2


class TestRatesAndOptimize:
    def test_rates_on_channel_file(self, capsys, tmp_path):
        chan = tmp_path / "c.txt"
        chan.write_text("2 4\n1 0 0 0\n0 1 0 0\n0 0 1 0\n0 0 0 1\n")
        dist = tmp_path / "d.txt"
        dist.write_text("01 0.5\n10 0.5\n")
        code, out, _ = run(capsys, "rates", "--channel-file", str(chan), "--dist-file", str(dist), "--format", "json")
        rep = json.loads(out)
        assert code == 0 and rep["bmd"] == 1.0 and rep["capacity_mi"] == 1.0

    def test_optimize(self, capsys):
        code, out, _ = run(capsys, "optimize", "--m", "2", "--snr-min", "6", "--snr-max", "6",
                           "--rates", "capacity,bitshaped-bmd")
        rows = rows_of(out)
        assert code == 0 and [r[1] for r in rows[1:]] == ["capacity", "bitshaped-bmd"]
        probs = np.array([float(x) for x in rows[1][4:]])
        assert probs.sum() == pytest.approx(1.0, abs=1e-8)
        assert float(rows[1][2]) >= float(rows[2][2])
