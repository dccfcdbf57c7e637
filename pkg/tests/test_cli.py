import csv
import io
import math
import os

import pytest

from fading_dirt import sweep as sw
from fading_dirt.cli import run_command
from fading_dirt.core import ChannelParams


def _rows(text):
    return list(csv.DictReader(io.StringIO("".join(l + "\n" for l in text.splitlines() if not l.startswith("#")))))


def test_bounds_binomial_lem1(capsys):
    assert run_command(["bounds", "--dist", "binomial", "--p", "3", "--q", "8", "--delta", "1.5707963268"]) == 0
    rows = {r["bound"]: r for r in _rows(capsys.readouterr().out)}
    assert float(rows["lem1_outer"]["value"]) == 3.5
    assert set(rows) == {"th2_inner", "th3_outer", "th4_outer", "lem1_outer", "th5_inner", "lem2_inner",
                         "trivial_outer", "trivial_inner"}
    for r in rows.values():
        assert float(r["clamped_value"]) == max(0.0, float(r["value"]))


def test_bounds_uniform_trivial(capsys):
    assert run_command(["bounds", "--dist", "uniform", "--p", "0", "--q", "0"]) == 0
    rows = {r["bound"]: r for r in _rows(capsys.readouterr().out)}
    assert float(rows["th6_outer"]["value"]) == 1.5
    assert rows["th6_outer"]["delta"] == ""
    assert set(rows) == {"th2_inner", "th6_outer", "th7_inner", "th7_exact_inner", "trivial_outer", "trivial_inner"}


def test_bounds_skips_inapplicable(capsys):
    assert run_command(["bounds", "--dist", "binomial", "--p", "3", "--q", "0", "--delta", "0.3"]) == 0
    labels = {r["bound"] for r in _rows(capsys.readouterr().out)}
    assert not labels & {"th3_outer", "th4_outer", "lem1_outer"}


def test_gap_uniform_pass(capsys):
    assert run_command(["gap", "--dist", "uniform", "--assert-max", "6.0"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("PASS max_gap=5.757")
    assert "Q=100" in out


def test_gap_uniform_fail(tmp_path, capsys):
    out = tmp_path / "gap.csv"
    assert run_command(["gap", "--dist", "uniform", "--assert-max", "5.5", "--out", str(out)]) == 1
    assert capsys.readouterr().out.startswith("FAIL")
    assert len(_rows(out.read_text())) == 18


def test_gap_custom_grid(capsys):
    assert run_command(["gap", "--dist", "uniform", "--assert-max", "5.5", "--q-ratio", "10"]) == 0
    assert "points=6" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    [],
    ["bounds", "--dist", "binomial", "--p", "3"],
    ["bounds", "--dist", "binomial", "--p", "-3", "--q", "1"],
    ["bounds", "--dist", "binomial", "--p", "3", "--q", "1", "--delta", "2.0"],
    ["sweep", "--dist", "uniform", "--p-start", "1", "--p-stop", "2", "--p-steps", "2", "--out", "x.csv"],
    ["sweep", "--dist", "uniform", "--p-start", "5", "--p-stop", "2", "--p-steps", "2", "--q-ratio", "1",
     "--out", "x.csv"],
    ["nosuch"],
])
def test_argument_errors(argv, capsys):
    assert run_command(argv) == 2
    assert "usage" in capsys.readouterr().err


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# point\ndist = uniform\np=8\nq = 2\n")
    assert run_command(["bounds", "--config", str(cfg)]) == 0
    rows = {r["bound"]: r for r in _rows(capsys.readouterr().out)}
    assert float(rows["th6_outer"]["value"]) == pytest.approx(4.41644501, abs=1e-8)
    # command-line flags win over the file
    assert run_command(["bounds", "--config", str(cfg), "--p", "0", "--q", "0"]) == 0
    rows = {r["bound"]: r for r in _rows(capsys.readouterr().out)}
    assert float(rows["th6_outer"]["value"]) == 1.5


def test_config_errors(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour=blue\n")
    assert run_command(["bounds", "--config", str(bad), "--dist", "uniform", "--p", "1", "--q", "1"]) == 2
    bad.write_text("just words\n")
    assert run_command(["bounds", "--config", str(bad)]) == 2
    assert run_command(["bounds", "--config", str(tmp_path / "missing.cfg")]) == 2


def test_sweep_writes_sorted_csv(tmp_path):
    out = tmp_path / "s.csv"
    argv = ["sweep", "--dist", "uniform", "--p-start", "1", "--p-stop", "100", "--p-steps", "3", "--p-scale", "log",
            "--q-fixed", "10", "--bounds", "th6_outer,th7_inner", "--out", str(out)]
    assert run_command(argv) == 0
    rows = _rows(out.read_text())
    assert [(r["P"], r["bound"]) for r in rows] == [
        ("1", "th6_outer"), ("1", "th7_inner"), ("10", "th6_outer"), ("10", "th7_inner"),
        ("100", "th6_outer"), ("100", "th7_inner")]
    first = out.read_bytes()
    assert run_command(argv) == 0
    assert out.read_bytes() == first


def test_sweep_workers_match_serial():
    spec = sw.SweepSpec(1, 50, 4, "linear", ("ratio", 2.0), sw.Binomial(1.0))
    bounds = ("th3_outer", "th5_inner", "lem2_inner")
    assert sw.format_csv(sw.sweep(spec, bounds, workers=2)) == sw.format_csv(sw.sweep(spec, bounds, workers=1))


def test_write_csv_format(tmp_path):
    p = tmp_path / "empty.csv"
    sw.write_csv([], p)
    assert p.read_bytes() == b"dist,delta,P,Q,bound,value,clamped_value,params\n"
    row = sw.Row("binomial", math.pi / 2, 3.0, 8.0, "th5_inner", -1 / 3, {"alpha": 0.25, "beta": 2 / 3})
    sw.write_csv([row], p)
    data = p.read_bytes()
    assert data.count(b"\n") == 2 and b"\r" not in data
    assert data.splitlines()[1] == b"binomial,1.57079633,3,8,th5_inner,-0.333333333,0,alpha=0.25;beta=0.666666667"
    sw.write_csv([row], p)
    assert p.read_bytes() == data


def test_write_csv_failure_leaves_nothing(tmp_path):
    target = tmp_path / "nodir" / "x.csv"
    with pytest.raises(OSError) as e:
        sw.write_csv([], target)
    assert "x.csv" in str(e.value)
    assert not (tmp_path / "nodir").exists()
    assert os.listdir(tmp_path) == []


def test_write_csv_keeps_old_file_on_error(tmp_path, monkeypatch):
    p = tmp_path / "keep.csv"
    p.write_text("old\n")

    def boom(*a, **k):
        raise OSError("disk full")

    monkeypatch.setattr(sw.os, "replace", boom)
    with pytest.raises(OSError):
        sw.write_csv([], p)
    assert p.read_text() == "old\n"
    assert os.listdir(tmp_path) == ["keep.csv"]


def test_verify_passes(capsys):
    assert run_command(["verify", "--seed", "5", "--samples", "20000"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 5 and all(l.startswith("PASS") for l in lines)


def test_verify_flags_unsound_csv(tmp_path, capsys):
    rows = [sw.Row("uniform", None, 1.0, 1.0, "th7_inner", 5.0), sw.Row("uniform", None, 1.0, 1.0, "th6_outer", 2.0),
            sw.Row("uniform", None, 1.0, 1.0, "trivial_outer", 0.1)]
    p = tmp_path / "bad.csv"
    sw.write_csv(rows, p)
    assert run_command(["verify", "--samples", "1000", "--csv", str(p)]) == 1
    assert "FAIL csv_soundness: 1 inner>outer" in capsys.readouterr().out


def test_fig3_preset(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run_command(["fig3", "--out", str(a)]) == 0
    assert run_command(["fig3", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    text = a.read_text()
    assert text.startswith("# fig3 preset")
    rows = _rows(text)
    assert len(rows) == 6 * 3 * 3
    gaps = {}
    for r in rows:
        if r["bound"] == sw.GAP_LABEL:
            gaps.setdefault(float(r["P"]), []).append(float(r["value"]))
    assert sorted(gaps) == [500, 600, 700, 800, 900, 1000]
    for vals in gaps.values():
        assert len(vals) == 3 and max(vals) - min(vals) < 1.5


def test_sweep_spec_points():
    spec = sw.SweepSpec(10, 1000, 3, "log", ("fixed", 7.0), sw.Uniform())
    assert [(p.p, p.q) for p in spec.points()] == [(10, 7), (pytest.approx(100), 7), (pytest.approx(1000), 7)]
    assert sw.SweepSpec(5, 5, 1).points() == [ChannelParams(5, 50)]
    with pytest.raises(ValueError):
        sw.SweepSpec(1, 2, 0)
    with pytest.raises(ValueError):
        sw.SweepSpec(1, 2, 2, q_mode=("both", 1))


def test_gap_report_passed_flag():
    rep = sw.gap_report("uniform", 4.9, [ChannelParams(500, 5000)])
    assert rep.max_gap == pytest.approx(4.896348, abs=1e-6)
    assert rep.passed
    assert not sw.gap_report("uniform", 4.8, [ChannelParams(500, 5000)]).passed
