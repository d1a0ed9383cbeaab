"""Command-line surface: output contracts, determinism, exit codes."""

import json
import subprocess
import sys

import pytest
from pytest import approx

from weakmeter.cli import main


def _parse_report(text):
    out = {}
    for line in text.strip().splitlines():
        key, _, value = line.partition(" = ")
        out[key.strip()] = value
    return out


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestRun:
    def test_bundled_interference_scenario(self, capsys):
        code, out, _ = _run(capsys, "run", "hardy_nono.json")
        assert code == 0
        report = _parse_report(out)
        assert float(report["weak_value_re"]) == approx(-1.0, rel=1e-12)
        assert float(report["delta_q_exact"]) == approx(-0.52039956298959116151, rel=1e-12)
        # the scenario carries a pointer_grid, so the oracle rows appear
        assert float(report["delta_q_grid"]) == approx(
            float(report["delta_q_exact"]), abs=1e-8
        )
        assert float(report["postselect_prob"]) == approx(0.1225010324718016, rel=1e-10)

    def test_first_and_second_order_rows(self, capsys):
        code, out, _ = _run(capsys, "run", "anomalous_qubit.json")
        assert code == 0
        report = _parse_report(out)
        assert float(report["weak_value_re"]) == approx(-3.0, rel=1e-10)
        assert float(report["delta_q_first_order"]) == approx(-0.15, rel=1e-10)
        assert float(report["delta_q_second_order"]) == approx(-0.15 / 1.0075, rel=1e-10)
        assert "delta_q_grid" not in report

    def test_scenario_file_from_disk(self, capsys, tmp_path):
        path = tmp_path / "case.json"
        path.write_text(
            json.dumps(
                {
                    "dimension": 2,
                    "observable": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]],
                    "preselect": [[1.0, 0.0], [0.0, 0.0]],
                    "postselect": [[1.0, 0.0], [0.0, 0.0]],
                    "g": 0.3,
                    "delta": 1.0,
                }
            )
        )
        code, out, _ = _run(capsys, "run", str(path))
        assert code == 0
        assert float(_parse_report(out)["delta_q_exact"]) == approx(0.3, rel=1e-12)

    def test_missing_scenario_exits_2(self, capsys):
        code, _, err = _run(capsys, "run", "no_such_scenario.json")
        assert code == 2
        assert err.startswith("error:")

    def test_malformed_scenario_names_field(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        data = {
            "dimension": 2,
            "observable": [[[1.0, 0.0], [0.0, "x"]], [[0.0, 0.0], [0.0, 0.0]]],
            "preselect": [[1.0, 0.0], [0.0, 0.0]],
            "postselect": [[1.0, 0.0], [0.0, 0.0]],
            "g": 0.3,
            "delta": 1.0,
        }
        path.write_text(json.dumps(data))
        code, _, err = _run(capsys, "run", str(path))
        assert code == 2
        assert "observable[0][1][1]" in err

    def test_orthogonal_selection_exits_3(self, capsys, tmp_path):
        path = tmp_path / "orth.json"
        data = {
            "dimension": 2,
            "observable": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]],
            "preselect": [[1.0, 0.0], [0.0, 0.0]],
            "postselect": [[0.0, 0.0], [1.0, 0.0]],
            "g": 0.3,
            "delta": 1.0,
        }
        path.write_text(json.dumps(data))
        code, _, err = _run(capsys, "run", str(path))
        assert code == 3
        assert err.startswith("error:")


class TestSweepCSV:
    def test_header_units_and_roundtrip(self, capsys):
        code, out, _ = _run(
            capsys, "hardy-sweep", "--g-min", "0.001", "--g-max", "10", "--points", "7"
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0].startswith("# units:")
        assert lines[1] == "g,prob_oo,prob_ono,prob_noo,prob_nono"
        assert len(lines) == 2 + 7
        assert "\r" not in out
        for line in lines[2:]:
            for token in line.split(","):
                # 17 significant digits reproduce the double exactly
                assert format(float(token), ".17g") == token

    def test_endpoint_values(self, capsys):
        _, out, _ = _run(
            capsys, "hardy-sweep", "--g-min", "0.001", "--g-max", "10", "--points", "5"
        )
        rows = [line.split(",") for line in out.splitlines()[2:]]
        assert float(rows[0][4]) == approx(-0.99999925000042187476, rel=1e-9)
        assert float(rows[-1][4]) == approx(0.19999910560057220795, rel=1e-9)

    def test_byte_identical_between_runs(self, capsys, tmp_path):
        args = ["hardy-sweep", "--points", "25", "--out"]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(args + [str(a)]) == 0
        assert main(args + [str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
        assert a.read_bytes().endswith(b"\n")

    def test_info_sweep_columns(self, capsys):
        code, out, _ = _run(
            capsys, "info-sweep", "--g-min", "0.01", "--g-max", "10", "--points", "5"
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[1] == "g,lambda,i_a_bits,q_min"
        assert "i_a_bits=bits" in lines[0]
        last = lines[-1].split(",")
        assert float(last[2]) == approx(0.99999999998998196613, rel=1e-9)

    def test_info_sweep_requires_positive_start(self, capsys):
        code, _, err = _run(capsys, "info-sweep", "--g-min", "0")
        assert code == 2
        assert "g-min" in err


class TestBoundsOptimize:
    def test_report_and_determinism(self, capsys, tmp_path):
        args = [
            "bounds-optimize", "--dim", "2", "--g", "1.0",
            "--restarts", "2", "--seed", "7", "--out",
        ]
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        assert main(args + [str(a)]) == 0
        assert main(args + [str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
        report = _parse_report(a.read_text())
        assert float(report["envelope_q_max"]) == approx(1.5631100206690507985, rel=1e-12)
        assert float(report["gap_relative"]) < 5e-3
        assert len(report["preselect_re"].split()) == 2

    def test_identity_observable_is_flat(self, capsys):
        code, out, _ = _run(
            capsys, "bounds-optimize", "--observable", "identity",
            "--g", "0.7", "--restarts", "2",
        )
        assert code == 0
        report = _parse_report(out)
        assert float(report["envelope_q_max"]) == approx(0.7, rel=1e-14)
        assert float(report["best_delta_q_max"]) == approx(0.7, rel=1e-14)
        assert float(report["gap_to_envelope"]) == approx(0.0, abs=1e-15)


class TestVerifySubcommand:
    def test_single_suite_line_format(self, capsys):
        code, out, _ = _run(capsys, "verify", "--suite", "hardy")
        assert code == 0
        assert out.splitlines()[0].startswith("hardy")
        assert "PASS" in out
        assert "instances=200" in out
        assert "worst_margin=" in out


class TestFlagErrors:
    def test_unknown_subcommand(self, capsys):
        assert _run(capsys, "frobnicate")[0] == 2

    def test_bad_choice(self, capsys):
        assert _run(capsys, "hardy-sweep", "--spacing", "cubic")[0] == 2

    def test_no_subcommand(self, capsys):
        assert _run(capsys)[0] == 2


def test_console_entry_point():
    """The installed executable must behave like main()."""
    proc = subprocess.run(
        [sys.executable, "-m", "weakmeter.cli", "run", "anomalous_qubit.json"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "delta_q_exact" in proc.stdout
