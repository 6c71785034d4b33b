"""Unit tests for the sweep runners, CSV output and command-line interface."""

from __future__ import annotations

import io
import math

import pytest

from cdising import CouplingKind, CouplingModel, cos_multiple_expansion
from cdising.cli import main
from cdising.experiments import (
    Check,
    RunManifest,
    _chebyshev_shifted,
    run_coeffs,
    run_size_sweep,
    run_trace,
    run_truncation_sweep,
    run_verification,
    save_csv,
    verification_report,
    write_csv,
)

EXACT = CouplingModel(CouplingKind.EXACT)


def data_rows(text: str) -> list[str]:
    lines = [line for line in text.splitlines() if line and not line.startswith("#")]
    return lines[1:]  # drop the header row


def test_manifest_lines():
    manifest = RunManifest("demo", {"n": 4, "g0": 1.5})
    lines = manifest.lines()
    assert lines[0] == "# command = demo"
    assert lines[1].startswith("# version = cdising ")
    assert lines[2].startswith("# timestamp = ")
    assert lines[3] == "# g0 = 1.5"
    assert lines[4] == "# n = 4"


def test_write_csv_layout_and_float_repr():
    stream = io.StringIO()
    manifest = RunManifest("demo", {"n": 2})
    write_csv(stream, manifest, ("a", "b"), [(1, 1.0 / 3.0), (2, 0.05)])
    lines = stream.getvalue().splitlines()
    header_at = next(i for i, line in enumerate(lines) if not line.startswith("#"))
    assert lines[header_at] == "a,b"
    assert lines[header_at + 1] == "1,0.3333333333333333"
    assert lines[header_at + 2] == "2,0.05"
    # repr round-trips: parsing the cell recovers the exact float
    assert float(lines[header_at + 1].split(",")[1]) == 1.0 / 3.0


def test_save_csv_stdout_and_file(tmp_path, capsys):
    manifest = RunManifest("demo", {})
    save_csv(None, manifest, ("x",), [(1,)])
    out = capsys.readouterr().out
    assert "# command = demo" in out and out.endswith("1\n")
    path = tmp_path / "out.csv"
    save_csv(str(path), manifest, ("x",), [(1,)])
    raw = path.read_bytes()
    assert b"\r" not in raw
    assert raw.endswith(b"x\n1\n")


def test_run_coeffs_rows():
    assert run_coeffs(4, 1.0, EXACT) == [(1, 0.125), (2, 0.125)]
    rows = run_coeffs(2, 2.0, EXACT)
    assert rows[0][0] == 1 and math.isclose(rows[0][1], 0.05, rel_tol=1e-14)


def test_run_truncation_sweep_small():
    rows = run_truncation_sweep([4], t_final=1.0)
    assert [(n, m) for n, m, _ in rows] == [(4, 0), (4, 1), (4, 2)]
    # full range reproduces the exact drive; the bare ramp does not
    assert abs(rows[-1][2] - 1.0) < 1e-8
    assert rows[0][2] < rows[-1][2]
    # m_max grids can be restricted per chain length
    short = run_truncation_sweep([4], t_final=1.0, m_grids={4: [0, 2]})
    assert [(n, m) for n, m, _ in short] == [(4, 0), (4, 2)]
    assert short[0][2] == rows[0][2]


def test_run_size_sweep_small_and_parallel():
    serial = run_size_sweep([4, 6], t_values=[1.0], jobs=1)
    assert [(n, t) for n, t, _ in serial] == [(4, 1.0), (6, 1.0)]
    parallel = run_size_sweep([4, 6], t_values=[1.0], jobs=2)
    assert serial == parallel


def test_run_trace_small():
    rows = run_trace(n=4, t_final=1.0, samples=5)
    assert len(rows) == 5
    assert rows[0][0] == 0.0 and rows[-1][0] == 1.0
    assert abs(rows[0][2] - 1.0) < 1e-12


def test_run_verification_clean_and_corrupt():
    checks = run_verification([2, 4], [0.5, 2.0], oracle_sizes=[2])
    assert all(check.passed for check in checks)
    names = {check.name for check in checks}
    assert "coupling closed vs sum" in names
    assert "dense vs fermionic evolution" in names
    corrupted = run_verification([2, 4], [0.5, 2.0], oracle_sizes=[], corrupt=True)
    failed = [check for check in corrupted if not check.passed]
    assert [check.name for check in failed] == ["coupling closed vs sum"]


def test_verification_report_format():
    stream = io.StringIO()
    ok = verification_report(
        [Check("demo", "m=1 g=2 n=4", 1e-15, 1e-12)], stream
    )
    assert ok
    text = stream.getvalue()
    assert text.startswith("pass  demo:")
    assert "m=1 g=2 n=4" in text
    stream = io.StringIO()
    ok = verification_report([Check("demo", "scope", 1.0, 1e-12)], stream)
    assert not ok and "FAIL" in stream.getvalue()


def test_chebyshev_route_matches_expansions():
    polys = _chebyshev_shifted(10)
    for m in range(11):
        assert polys[m] == cos_multiple_expansion(m)


def test_cli_coeffs_to_file(tmp_path):
    path = tmp_path / "coeffs.csv"
    assert main(["coeffs", "--n", "4", "--g0", "1.0", "--out", str(path)]) == 0
    text = path.read_text()
    assert "# command = coeffs" in text
    assert data_rows(text) == ["1,0.125", "2,0.125"]


def test_cli_reruns_are_byte_identical(tmp_path):
    first = tmp_path / "a.csv"
    second = tmp_path / "b.csv"
    args = ["coeffs", "--n", "6", "--g0", "0.8"]
    assert main(args + ["--out", str(first)]) == 0
    assert main(args + ["--out", str(second)]) == 0
    assert data_rows(first.read_text()) == data_rows(second.read_text())


def test_cli_bad_arguments_exit_2(capsys):
    assert main(["coeffs", "--n", "3"]) == 2
    assert "error:" in capsys.readouterr().err
    assert main(["coeffs", "--coupling", "truncated"]) == 2
    assert main(["evolve", "--n", "4", "--coupling", "exact", "--m-max", "2"]) == 2
    with pytest.raises(SystemExit):
        main(["coeffs", "--no-such-flag"])
    with pytest.raises(SystemExit):
        main(["no-such-command"])


def test_cli_unwritable_path_exits_3(capsys):
    assert main(["coeffs", "--n", "4", "--out", "/nonexistent/dir/x.csv"]) == 3
    assert "error:" in capsys.readouterr().err


def test_cli_verify_small_scope(tmp_path, capsys):
    path = tmp_path / "verify.csv"
    code = main(["verify", "--n", "2,4", "--g-grid", "0.5,2.0", "--out", str(path)])
    out = capsys.readouterr().out
    assert code == 0
    assert "pass" in out and "FAIL" not in out
    text = path.read_text()
    assert "name,scope,residual,threshold,passed" in text
    assert all(row.endswith("True") for row in data_rows(text))


def test_cli_verify_self_test_corrupt(capsys):
    code = main(["verify", "--n", "2,4", "--g-grid", "0.5,2.0", "--self-test-corrupt"])
    assert code == 1
    assert "FAIL" in capsys.readouterr().out


def test_cli_trace_small(tmp_path):
    path = tmp_path / "trace.csv"
    code = main(
        ["trace", "--n", "4", "--t-final", "1", "--samples", "5", "--out", str(path)]
    )
    assert code == 0
    text = path.read_text()
    assert "# command = trace" in text and "# samples = 5" in text
    rows = data_rows(text)
    assert len(rows) == 5
    first = rows[0].split(",")
    assert float(first[0]) == 0.0
    assert abs(float(first[2]) - 1.0) < 1e-12


def test_cli_evolve_and_oracle(tmp_path):
    evolve_path = tmp_path / "evolve.csv"
    code = main(
        ["evolve", "--n", "4", "--t-final", "1", "--coupling", "exact",
         "--out", str(evolve_path)]
    )
    assert code == 0
    row = data_rows(evolve_path.read_text())[0].split(",")
    assert row[0] == "4" and row[2] == "exact"
    assert abs(float(row[3]) - 1.0) < 1e-8

    oracle_path = tmp_path / "oracle.csv"
    code = main(["oracle", "--n", "2", "--t-final", "1", "--out", str(oracle_path)])
    assert code == 0
    row = data_rows(oracle_path.read_text())[0].split(",")
    assert row[0] == "exact"
    assert float(row[3]) <= 1e-6


def test_cli_oracle_truncated_scans_all_ranges(tmp_path):
    path = tmp_path / "oracle.csv"
    code = main(
        ["oracle", "--n", "4", "--t-final", "1", "--coupling", "truncated",
         "--out", str(path)]
    )
    assert code == 0
    labels = [row.split(",")[0] for row in data_rows(path.read_text())]
    assert labels == [
        "truncated(m_max=0)", "truncated(m_max=1)", "truncated(m_max=2)",
    ]


def test_cli_sweeps_small(tmp_path):
    trunc = tmp_path / "trunc.csv"
    code = main(["sweep-truncation", "--n", "4", "--t-final", "1", "--out", str(trunc)])
    assert code == 0
    assert len(data_rows(trunc.read_text())) == 3

    size = tmp_path / "size.csv"
    code = main(
        ["sweep-size", "--n", "4,6", "--t-final", "1", "--coupling", "thermo",
         "--out", str(size)]
    )
    assert code == 0
    rows = data_rows(size.read_text())
    assert [row.split(",")[0] for row in rows] == ["4", "6"]


def test_cli_config_file_defaults_and_override(tmp_path):
    config = tmp_path / "run.conf"
    config.write_text("n = 4\nt_final = 1\n# comment\n\ncoupling = exact\n")
    out = tmp_path / "a.csv"
    assert main(["evolve", "--config", str(config), "--out", str(out)]) == 0
    text = out.read_text()
    assert "# n = 4" in text and "# t_final = 1.0" in text
    # explicit flags beat config values
    out2 = tmp_path / "b.csv"
    assert main(["evolve", "--config", str(config), "--n", "6", "--out", str(out2)]) == 0
    assert "# n = 6" in out2.read_text()


def test_cli_config_file_rejects_garbage(tmp_path, capsys):
    config = tmp_path / "bad.conf"
    config.write_text("not a key value line\n")
    assert main(["evolve", "--config", str(config)]) == 2
    assert "expected key=value" in capsys.readouterr().err


def test_cli_missing_config_file_exits_3(capsys):
    assert main(["evolve", "--config", "/nonexistent/run.conf"]) == 3
    capsys.readouterr()
