import json
import math

import pytest

from critprobe.cli import PRESETS, build_parser, main, resolve

SWEEP = ["phase-sweep", "--N", "40", "--T", "5", "--grid", "lambda:0.2:1.4:7", "--theta-q", "0.6"]


def _rows(text):
    return [line for line in text.splitlines() if not line.startswith("#")]


def test_sweep_output_is_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(SWEEP + ["--out", str(a)]) == 0
    assert main(SWEEP + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert b"\r" not in a.read_bytes()


def test_sweep_jobs_do_not_change_bytes(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(SWEEP + ["--out", str(a)])
    main(SWEEP + ["--out", str(b), "--jobs", "2"])
    assert a.read_bytes() == b.read_bytes()


def test_subrange_reproduces_rows(tmp_path):
    full, part = tmp_path / "full.csv", tmp_path / "part.csv"
    main(SWEEP + ["--out", str(full)])
    main(["phase-sweep", "--N", "40", "--T", "5", "--grid", "lambda:0.6:1.0:3",
          "--theta-q", "0.6", "--out", str(part)])
    full_rows = set(_rows(full.read_text())[1:])
    assert set(_rows(part.read_text())[1:]) <= full_rows


def test_header_records_resolved_settings(tmp_path):
    out = tmp_path / "s.csv"
    main(SWEEP + ["--out", str(out)])
    text = out.read_text()
    assert text.startswith("# critprobe v1\n")
    assert "# N=40\n" in text and "# grid=lambda:0.2:1.4:7\n" in text
    header = _rows(text)[0]
    assert header.split(",")[:3] == ["lambda", "gamma", "phi_g"]
    assert "wall_time_ms" not in header


def test_timing_column(tmp_path):
    out = tmp_path / "t.csv"
    main(SWEEP + ["--out", str(out), "--timing"])
    assert _rows(out.read_text())[0].endswith(",wall_time_ms")


def test_summary_goes_to_stderr_with_stdout_csv(capsys):
    assert main(SWEEP) == 0
    captured = capsys.readouterr()
    assert captured.out.startswith("# critprobe v1")
    assert "summary:" in captured.err and "summary:" not in captured.out


def test_precedence_defaults_preset_config_flags(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"N": 100, "g": 0.2}))
    args = build_parser().parse_args(["phase-sweep", "--preset", "wide-sweep", "--config", str(cfg), "--g", "0.05"])
    s = resolve(args)
    assert s["N"] == 100
    assert s["g"] == 0.05
    assert s["max_steps"] == PRESETS["wide-sweep"]["max_steps"]
    assert s["theta_q"] == pytest.approx(math.pi / 4)


@pytest.mark.parametrize(
    "argv",
    [
        ["phase-sweep", "--N", "41", "--T", "5", "--grid", "lambda:0:1:3"],
        ["phase-sweep", "--N", "40", "--grid", "lambda:0:1:3"],
        ["phase-sweep", "--N", "40", "--T", "5"],
        ["phase-sweep", "--N", "40", "--T", "5", "--grid", "lambda:0:1"],
        ["dissipative", "--T", "2"],
    ],
)
def test_bad_input_exits_2(argv, capsys):
    assert main(argv) == 2
    assert "error:" in capsys.readouterr().err


def test_unknown_config_key_exits_2(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"temperature": 1}))
    assert main(SWEEP + ["--config", str(cfg)]) == 2


def test_strict_exits_3_when_cap_reached(tmp_path):
    argv = ["phase-sweep", "--N", "200", "--T", "10", "--grid", "lambda:0.6:0.7:2",
            "--theta-q", "0.6", "--max-steps", "32", "--out", str(tmp_path / "s.csv")]
    assert main(argv) == 0
    assert main(argv + ["--strict"]) == 3


def test_verify_exit_codes(capsys):
    assert main(["verify"]) == 0
    assert main(["verify", "--tol-scale", "1e-30"]) == 4
    assert "FAIL" in capsys.readouterr().out


def test_echo_trace_without_coupling(tmp_path):
    out = tmp_path / "e.csv"
    assert main(["echo-trace", "--N", "64", "--lambda", "0.5", "--g", "0", "--T", "2",
                 "--out", str(out)]) == 0
    rows = _rows(out.read_text())[1:]
    assert len(rows) == 17
    for row in rows:
        _, re_f, im_f, abs_f, _ = map(float, row.split(","))
        assert (re_f, im_f, abs_f) == (1.0, 0.0, 1.0)


def _min_echo(tmp_path, lam):
    out = tmp_path / f"e{lam}.csv"
    main(["echo-trace", "--N", "400", "--lambda", str(lam), "--g", "0.05", "--T", "30",
          "--steps", "600", "--out", str(out)])
    return min(float(r.split(",")[3]) for r in _rows(out.read_text())[1:])


def test_echo_dips_deeper_near_criticality(tmp_path):
    assert _min_echo(tmp_path, 1.02) < _min_echo(tmp_path, 3.0)


def test_scaling_command(tmp_path, capsys):
    out = tmp_path / "s.csv"
    assert main(["scaling", "--N-list", "128,256,512,1024", "--gamma-list", "0.5",
                 "--out", str(out)]) == 0
    text = out.read_text()
    assert "# slope_N[gamma=0.5]=" in text
    line = next(l for l in text.splitlines() if l.startswith("# slope_N"))
    assert float(line.split("=")[-1]) == pytest.approx(2.0, abs=0.15)


def test_dissipative_command(tmp_path):
    ens = tmp_path / "levels.txt"
    ens.write_text("# E p\n-1.0 0.6\n0.5 0.4\n")
    out = tmp_path / "d.csv"
    assert main(["dissipative", "--ensemble", str(ens), "--T", "4", "--out", str(out)]) == 0
    text = out.read_text()
    assert "# phi_g=" in text
    rows = _rows(text)[1:]
    for row in rows:
        trace = float(row.split(",")[5])
        assert abs(trace - 1.0) < 1e-12
