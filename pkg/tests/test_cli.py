import csv
import io
import json
from importlib import resources

import jsonschema
import numpy as np
import pytest

from optact import brunovsky
from optact.cli import main

SCHEMA = json.loads(resources.files("optact").joinpath("schemas/report.schema.json").read_text())


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    report = json.loads(out)
    jsonschema.validate(report, SCHEMA)
    return report


def rows(text):
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    return header, np.array([[float(v) for v in r] for r in reader])


def strip_timing(report):
    report = dict(report)
    report.pop("timing")
    return report


class TestOptimize:
    def test_heat2(self, capsys):
        rep = run_json(capsys, "optimize", "--system", "heat", "--n", "2")
        assert rep["command"] == "optimize"
        assert rep["result"]["best_value"] == pytest.approx(0.2, abs=1e-6)
        assert len(rep["result"]["orbit"]) == 4
        assert rep["paper_reference"]["reported_value"] == 0.24913

    def test_advection_reference(self, capsys):
        rep = run_json(capsys, "optimize", "--system", "advection-plus", "--n", "2")
        ref = rep["paper_reference"]
        assert ref["reported_value"] == 0.32236
        assert ref["measured_value"] == rep["result"]["best_value"]
        assert len(ref["objective_at_reported_maximizers"]) == 2

    def test_seeded_runs_identical(self, capsys):
        a = run_json(capsys, "optimize", "--system", "heat", "--n", "2", "--seed", "7")
        b = run_json(capsys, "optimize", "--system", "heat", "--n", "2", "--seed", "7")
        assert json.dumps(strip_timing(a)) == json.dumps(strip_timing(b))

    def test_overrides(self, capsys):
        rep = run_json(capsys, "optimize", "--system", "heat", "--n", "3", "--pop", "10", "--gens", "5",
                       "--starts", "2")
        assert rep["result"]["generations"] <= 5
        assert rep["result"]["evaluations"] <= 2 * 10 * 6
        assert rep["config"]["starts"] == 2

    def test_non_controllable(self, capsys, tmp_path):
        p = tmp_path / "id.csv"
        p.write_text("1,0\n0,1\n")
        code, out, err = run(capsys, "optimize", "--matrix", str(p))
        assert code == 2 and out == ""
        assert json.loads(err)["error"] == "non-controllable"

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "r.json"
        code, out, _ = run(capsys, "optimize", "--out", str(target))
        assert code == 0 and out == ""
        jsonschema.validate(json.loads(target.read_text()), SCHEMA)


class TestSample:
    def test_resolution8_contains_axis(self, capsys):
        code, out, _ = run(capsys, "sample", "--system", "heat", "--n", "2", "--resolution", "8")
        header, data = rows(out)
        assert header == ["theta", "b1", "b2", "lambda1"]
        assert data.shape == (8, 4)
        assert data[0, 3] == pytest.approx(3 - 2 * np.sqrt(2), abs=1e-12)

    def test_heat_shape(self, capsys):
        code, out, _ = run(capsys, "sample", "--resolution", "3600")
        _, data = rows(out)
        assert data[:, 3].max() == pytest.approx(0.2, abs=1e-5)
        for k in (450, 1350, 2250, 3150):
            assert data[k, 3] <= 1e-10
            assert abs(abs(data[k, 1]) - abs(data[k, 2])) <= 1e-12

    def test_wave_equals_heat(self, capsys):
        _, heat, _ = run(capsys, "sample", "--system", "heat", "--resolution", "360")
        _, wave, _ = run(capsys, "sample", "--system", "wave", "--resolution", "360")
        _, h = rows(heat)
        _, w = rows(wave)
        np.testing.assert_array_equal(h[:, :3], w[:, :3])
        assert np.max(np.abs(h[:, 3] - w[:, 3])) <= 1e-10

    @pytest.mark.parametrize("n", ["2", "3"])
    def test_nested_grids(self, capsys, n):
        _, coarse, _ = run(capsys, "sample", "--n", n, "--resolution", "10")
        _, fine, _ = run(capsys, "sample", "--n", n, "--resolution", "20", "--workers", "3")
        _, c = rows(coarse)
        _, f = rows(fine)
        if n == "2":
            sub = f[::2]
        else:
            sub = f.reshape(20, 20, -1)[::2, ::2].reshape(100, -1)
        assert np.max(np.abs(sub - c)) <= 1e-14

    def test_sphere_rows(self, capsys):
        _, out, _ = run(capsys, "sample", "--n", "3", "--scale", "h2", "--resolution", "12")
        header, data = rows(out)
        assert header == ["polar", "azimuth", "b1", "b2", "b3", "lambda1"]
        assert data.shape == (144, 6)

    def test_rfc4180_line_endings(self, capsys):
        _, out, _ = run(capsys, "sample", "--resolution", "8")
        assert out.count("\r\n") == 9

    def test_grid_rejects_n4(self, capsys):
        code, out, err = run(capsys, "sample", "--n", "4")
        assert code == 1
        assert "--samples" in json.loads(err)["message"]

    def test_random_mode(self, capsys):
        code, out, _ = run(capsys, "sample", "--n", "4", "--samples", "25", "--seed", "3")
        header, data = rows(out)
        assert code == 0 and data.shape == (25, 6) and header[0] == "index"
        _, again, _ = run(capsys, "sample", "--n", "4", "--samples", "25", "--seed", "3")
        assert out == again

    def test_low_resolution(self, capsys):
        assert run(capsys, "sample", "--resolution", "7")[0] == 1

    def test_json_format(self, capsys):
        rep = run_json(capsys, "sample", "--resolution", "8", "--format", "json")
        assert len(rep["result"]["rows"]) == 8


class TestVerify:
    def test_default_run_passes(self, capsys):
        rep = run_json(capsys, "verify")
        assert rep["result"]["passed"]
        assert len(rep["result"]["suites"]) == 7

    def test_corrupted_companion_exits_3(self, capsys, monkeypatch):
        real = brunovsky.companion

        def corrupted(cp):
            C = real(cp)
            C[-1, -1] += 1.0
            return C

        monkeypatch.setattr(brunovsky, "companion", corrupted)
        code, out, err = run(capsys, "verify")
        assert code == 3
        assert "brunovsky-intertwining" in json.loads(err)["failed"]
        jsonschema.validate(json.loads(out), SCHEMA)


class TestCost:
    def test_blowup_slope(self, capsys):
        rep = run_json(capsys, "cost", "--T", "0.001,0.0015,0.0025,0.004,0.006,0.01", "--samples", "2")
        assert rep["result"]["blowup_exponent"] == pytest.approx(-1.5, abs=0.15)

    def test_random_ratios(self, capsys):
        rep = run_json(capsys, "cost", "--samples", "50", "--T", "1")
        assert len(rep["result"]["reports"]) == 50
        assert rep["result"]["max_ratio"] <= 1.0001
        assert rep["result"]["blowup_exponent"] is None

    def test_companion_pair(self, capsys, tmp_path):
        p = tmp_path / "c.csv"
        p.write_text("0,1\n-3,-4\n")
        rep = run_json(capsys, "cost", "--matrix", str(p), "--b", "0,1", "--T", "1")
        assert rep["result"]["reports"][0]["ratio"] == pytest.approx(1.0, abs=1e-8)

    def test_non_cyclic(self, capsys):
        code, _, err = run(capsys, "cost", "--b", "1,1")
        assert code == 2

    def test_wave(self, capsys):
        rep = run_json(capsys, "cost", "--system", "wave", "--b", "1,0", "--T", "1")
        assert rep["result"]["reports"][0]["ratio"] <= 1.0001


class TestSpectrum:
    def test_system(self, capsys):
        rep = run_json(capsys, "spectrum", "--n", "2")
        assert rep["result"]["eigenvalues"] == pytest.approx([-3.0, -1.0], abs=1e-14)

    def test_gram(self, capsys):
        rep = run_json(capsys, "spectrum", "--b", "1,0")
        assert rep["result"]["eigenvalues"][0] == pytest.approx(3 - 2 * np.sqrt(2), abs=1e-14)

    def test_nonsymmetric_needs_b(self, capsys):
        assert run(capsys, "spectrum", "--system", "advection-plus")[0] == 1


class TestConfigErrors:
    @pytest.mark.parametrize("argv", [
        ["optimize", "--system", "custom"],
        ["optimize", "--matrix", "/nonexistent.csv"],
        ["optimize", "--n", "1"],
        ["optimize", "--pop", "2"],
        ["optimize", "--workers", "0"],
        ["cost", "--T", "abc"],
        ["cost", "--T", "0"],
        ["spectrum", "--b", "0,0"],
        ["frobnicate"],
        [],
    ])
    def test_exit_1(self, capsys, argv):
        code, out, err = run(capsys, *argv)
        assert code == 1
        payload = json.loads(err)
        assert payload["exit_code"] == 1 and payload["error"] == "config"
