import csv
import io
import json
import math

import numpy as np
import pytest

from topoteleport import __version__, sweep
from topoteleport.cli import main
from topoteleport.figures import FIGURES, UnknownFigureError, figure_config, reproduce_figure
from topoteleport.sweep import (
    DEFAULTS,
    ConfigError,
    config_hash,
    parse_config,
    run_sweep,
    write_csv,
    write_json,
)

BASIC = """\
# demo
B1 = 0.5
sweep.Q2 = 1, 4, 4
outputs = qfi, f_avg, alpha1, alpha2
time = 0, 2, 11
"""


def csv_text(cfg, threads=1, fmt="csv"):
    buf = io.StringIO()
    (write_csv if fmt == "csv" else write_json)(run_sweep(cfg, threads=threads), cfg, buf)
    return buf.getvalue()


def read_rows(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


class TestConfig:
    def test_parse(self):
        cfg = parse_config(BASIC)
        assert cfg.fixed == {"B1": 0.5}
        assert [a.name for a in cfg.swept] == ["Q2"]
        assert cfg.outputs == ("qfi", "f_avg", "alpha1", "alpha2")
        assert cfg.time_grid == (0.0, 2.0, 11)

    @pytest.mark.parametrize("text,line,key", [
        ("Q1 = 1\nfoo = 2\n", 2, "foo"),
        ("Q1 = 1\nQ1 = 2\n", 2, "Q1"),
        ("B1 = abc\n", 1, "B1"),
        ("\n\nsweep.Q2 = 1, 4, 1\n", 3, "sweep.Q2"),
        ("sweep.Q2 = 1, 4\n", 1, "sweep.Q2"),
        ("outputs = qfi, bogus\n", 1, "outputs"),
        ("time = -1, 2, 5\n", 1, "time"),
        ("sweep.Q2 = 1, 4, 3\ntie.Q1 = Q3\n", 2, "tie.Q1"),
        ("gamma1 = 0\n", 1, "gamma1"),
        ("theta = 4\n", 1, "theta"),
        ("just text\n", 1, None),
        ("sweep.Q1 = 0,1,2\nsweep.Q2 = 0,1,2\nsweep.B1 = 0,1,2\nsweep.B2 = 0,1,2\n", None, "sweep"),
    ])
    def test_diagnostics(self, text, line, key):
        with pytest.raises(ConfigError) as exc:
            parse_config(text, source="cfg.txt")
        assert exc.value.line == line
        assert exc.value.key == key
        assert str(exc.value).startswith("cfg.txt")

    def test_fixed_and_swept(self):
        with pytest.raises(ConfigError) as exc:
            parse_config("Q2 = 1\nsweep.Q2 = 1, 2, 3\n")
        assert exc.value.line == 1

    def test_hash_stable(self):
        assert config_hash(parse_config(BASIC)) == config_hash(parse_config("\n" + BASIC))


class TestSweep:
    def test_order_and_columns(self):
        cfg = parse_config(BASIC)
        rows = read_rows(csv_text(cfg))
        assert list(rows[0]) == ["Q2", "t", "qfi", "f_avg", "alpha1", "alpha2", "flag", "error"]
        keys = [(float(r["Q2"]), float(r["t"])) for r in rows]
        assert keys == sorted(keys) and len(keys) == 44

    def test_header(self):
        text = csv_text(parse_config(BASIC))
        assert text.splitlines()[0] == f"# topoteleport {__version__}"
        assert text.splitlines()[1] == f"# config-sha256 {config_hash(parse_config(BASIC))}"

    def test_deterministic_across_threads(self):
        cfg = parse_config(BASIC)
        ref = csv_text(cfg)
        assert csv_text(cfg) == ref
        assert csv_text(cfg, threads=4) == ref
        assert csv_text(cfg, threads=3, fmt="json") == csv_text(cfg, fmt="json")

    def test_continuity_flag(self):
        rows = read_rows(csv_text(parse_config(BASIC)))
        t0 = [r for r in rows if float(r["t"]) == 0.0]
        assert all(r["flag"] == "qfi:continuity" and float(r["qfi"]) == 0.0 for r in t0)
        assert all(r["flag"] == "" for r in rows if float(r["t"]) > 0)

    def test_fields_off(self):
        cfg = parse_config("B1 = 0\nB2 = 0\noutputs = alpha1, alpha2, f_avg\ntime = 0, 10, 21\n")
        for r in read_rows(csv_text(cfg)):
            assert float(r["alpha1"]) == float(r["alpha2"]) == float(r["f_avg"]) == 1.0

    def test_sudden_death_crossing(self):
        cfg = parse_config("sweep.B2 = 0, 1, 201\nB1 = 0.2\nQ1 = 3\nQ2 = 3\ntime = 1, 1, 1\n"
                           "outputs = concurrence_out, alpha1, alpha2\n")
        rows = read_rows(csv_text(cfg))
        c = np.array([float(r["concurrence_out"]) for r in rows])
        a = np.array([float(r["alpha1"]) * float(r["alpha2"]) for r in rows])
        i = int(np.argmax(c <= 0))
        assert 0 < i < len(c)
        assert a[i] <= math.sqrt(math.sqrt(2) - 1) <= a[i - 1]

    def test_ties(self):
        cfg = parse_config("sweep.Q2 = 1, 3, 3\ntie.Q1 = Q2\noutputs = alpha1, alpha2\ntime = 0.5, 0.5, 1\n")
        for r in read_rows(csv_text(cfg)):
            assert r["alpha1"] == r["alpha2"]

    def test_error_rows(self, monkeypatch):
        real = sweep._evaluate

        def flaky(params, t, outputs):
            if t > 1.5:
                raise ArithmeticError("boom")
            return real(params, t, outputs)

        monkeypatch.setattr(sweep, "_evaluate", flaky)
        buf = io.StringIO()
        n = write_csv(run_sweep(parse_config(BASIC)), parse_config(BASIC), buf)
        rows = read_rows(buf.getvalue())
        assert n == sum(1 for r in rows if r["error"]) == 12
        assert all(r["qfi"] == "" for r in rows if r["error"])

    def test_json(self):
        doc = json.loads(csv_text(parse_config(BASIC), fmt="json"))
        assert doc["columns"][:2] == ["Q2", "t"] and len(doc["rows"]) == 44
        assert doc["meta"]["version"] == __version__


class TestFigures:
    def test_registry(self):
        assert set(FIGURES) == {"fig1a", "fig1b", "conB2", "conQ2", "conG2", "FQ", "FG", "comparison"}

    def test_unknown(self):
        with pytest.raises(UnknownFigureError):
            figure_config("fig9")

    def test_fig1a(self, tmp_path):
        paths, errors = reproduce_figure("fig1a", out_dir=tmp_path)
        assert errors == 0
        rows = read_rows(paths[0].read_text())
        assert set(rows[0]) == {"Q2", "t", "qfi", "flag", "error"}
        assert sorted({float(r["Q2"]) for r in rows}) == [1.0, 2.0, 3.0, 4.0]

    def test_manifest(self, tmp_path):
        paths, _ = reproduce_figure("conQ2", out_dir=tmp_path)
        man = json.loads(paths[1].read_text())
        params = man["parameters"]
        assert set(params) == set(DEFAULTS) | {"t"}
        assert params["Q1"]["source"] == params["Q2"]["source"] == "swept"
        assert params["t"]["source"] == "published" and params["t"]["start"] == 0.7
        assert params["B1"] == {"source": "default", "value": 1.0, "defaulted": True}
        assert man["config_sha256"] in paths[0].read_text()

    def test_conq2_at_t0(self, tmp_path):
        paths, _ = reproduce_figure("conQ2", {"t": 0.0}, out_dir=tmp_path)
        rows = read_rows(paths[0].read_text())
        assert len(rows) == 4 * 61
        assert all(float(r["concurrence_out"]) == 1.0 for r in rows)
        man = json.loads(paths[1].read_text())
        assert man["parameters"]["t"]["source"] == "override"

    def test_override_removes_axis(self):
        cfg, prov = figure_config("FQ", {"Q2": 2.5})
        assert cfg.swept == [] and cfg.ties == {}
        assert cfg.fixed["Q1"] == cfg.fixed["Q2"] == 2.5
        assert prov["Q2"]["source"] == "override"

    def test_comparison_columns(self, tmp_path):
        paths, _ = reproduce_figure("comparison", out_dir=tmp_path)
        header = read_rows(paths[0].read_text())[0]
        assert list(header) == ["t", "f_avg", "concurrence_ch", "concurrence_out", "discord_ch",
                                "discord_out", "coherence_ch", "coherence_out", "flag", "error"]
        man = json.loads(paths[1].read_text())
        assert man["parameters"]["Q1"] == {"source": "chosen", "value": 6.0}


class TestCLI:
    def test_figure(self, tmp_path):
        assert main(["figure", "FG", "--out", str(tmp_path), "--threads", "2"]) == 0
        assert (tmp_path / "FG.csv").exists() and (tmp_path / "FG.manifest.json").exists()

    def test_figure_bytes_across_threads(self, tmp_path):
        main(["figure", "conB2", "--out", str(tmp_path / "a")])
        main(["figure", "conB2", "--out", str(tmp_path / "b"), "--threads", "4"])
        for name in ("conB2.csv", "conB2.manifest.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_unknown_figure(self, tmp_path, capsys):
        assert main(["figure", "nope", "--out", str(tmp_path)]) == 1
        assert "unknown figure" in capsys.readouterr().err

    def test_sweep(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(BASIC)
        assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path)]) == 0
        assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path), "--format", "json"]) == 0
        assert (tmp_path / "run.csv").exists() and (tmp_path / "run.json").exists()

    def test_config_error(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("Q1 = 1\nsweep.Q9 = 0, 1, 3\n")
        assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path)]) == 1
        assert "bad.cfg:2" in capsys.readouterr().err

    def test_missing_config(self, tmp_path):
        assert main(["sweep", "--out", str(tmp_path)]) == 1
        assert main(["sweep", "--config", str(tmp_path / "absent.cfg")]) == 1

    def test_usage_error(self):
        assert main(["frobnicate"]) == 1

    def test_error_rows_exit(self, tmp_path, monkeypatch):
        def broken(params, t, outputs):
            raise ArithmeticError("singular")

        monkeypatch.setattr(sweep, "_evaluate", broken)
        assert main(["figure", "FG", "--out", str(tmp_path)]) == 2

    def test_dynamics(self, tmp_path):
        assert main(["dynamics", "--out", str(tmp_path), "--set", "B1=0", "--set", "B2=0"]) == 0
        rows = read_rows((tmp_path / "dynamics.csv").read_text())
        assert all(float(r["f_avg"]) == 1.0 for r in rows)
        assert main(["dynamics", "--out", str(tmp_path), "--set", "t=1.5"]) == 0
        assert len(read_rows((tmp_path / "dynamics.csv").read_text())) == 1

    def test_dynamics_rejects_axes(self, tmp_path):
        cfg = tmp_path / "s.cfg"
        cfg.write_text(BASIC)
        assert main(["dynamics", "--config", str(cfg), "--out", str(tmp_path)]) == 1
        assert main(["dynamics", "--set", "Q7=1", "--out", str(tmp_path)]) == 1

    def test_validate(self, tmp_path):
        good = tmp_path / "good"
        good.mkdir()
        (good / "test_ok.py").write_text("def test_ok():\n    assert True\n")
        bad = tmp_path / "bad"
        bad.mkdir()
        (bad / "test_no.py").write_text("def test_no():\n    assert False\n")
        assert main(["validate", "--tests", str(good), "--seed", "7"]) == 0
        assert main(["validate", "--tests", str(bad)]) == 3
