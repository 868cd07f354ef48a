import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from packbound.cli import _parse_dims, main
from packbound.optimizer import terminal_gap


def run_main(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


@pytest.fixture(scope="module")
def schema():
    text = resources.files("packbound").joinpath("cli-output.schema.json").read_text()
    obj = json.loads(text)
    jsonschema.Draft7Validator.check_schema(obj)
    return obj


def test_parse_dims():
    assert _parse_dims("3,4,5") == [3, 4, 5]
    assert _parse_dims("3..8") == [3, 4, 5, 6, 7, 8]
    assert _parse_dims("2,5..7,9") == [2, 5, 6, 7, 9]
    with pytest.raises(ValueError):
        _parse_dims("5..3")
    with pytest.raises(ValueError):
        _parse_dims(",")


def test_table_step_csv(capsys):
    code, out = run_main(capsys, ["table", "--dims", "3", "--model", "step"])
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "d,sigma_star,Z_star,phi_star,ratio,k_min"
    cells = lines[1].split(",")
    assert cells[0] == "3"
    assert float(cells[3]) == 0.125


def test_table_gap_matches_optimizer(capsys):
    rec = terminal_gap(3)
    code, out = run_main(capsys, ["table", "--dims", "3", "--model", "gap"])
    assert code == 0
    cells = out.strip().split("\n")[1].split(",")
    assert float(cells[1]) == pytest.approx(rec.sigma_star, rel=1e-6)
    assert float(cells[2]) == pytest.approx(rec.Z_star, rel=1e-6)
    assert float(cells[3]) == pytest.approx(rec.phi_star, rel=1e-6)


def test_exit_codes(capsys):
    assert main(["table", "--dims", "1", "--model", "gap"]) == 2
    assert main(["sk", "--model", "step", "--d", "1", "--phi", "0.5", "--samples", "0"]) == 2
    assert main(["asymptotics", "--d", "10"]) == 2
    assert main(["yamada", "--model", "step", "--d", "3", "--phi", "1.5"]) == 2
    assert main(["matern", "--d", "1", "--L", "2", "--T", "5"]) == 2
    assert main(["classical", "--dims", "1"]) == 2
    capsys.readouterr()


def test_table_error_rows_annotated(capsys, monkeypatch):
    import packbound.cli as cli

    real = cli._record_row

    def flaky(kind, d):
        if d == 4:
            raise RuntimeError("contrived failure")
        return real(kind, d)

    monkeypatch.setattr(cli, "_record_row", flaky)
    code, out = run_main(capsys, ["table", "--dims", "3,4,5", "--model", "delta"])
    assert code == 3
    lines = out.strip().split("\n")
    assert lines[2] == "4,nan,nan,nan,nan,nan"
    assert lines[3].startswith("# error d=4:")
    assert lines[4].startswith("5,")

    code, out = run_main(capsys, ["table", "--dims", "3,4", "--model", "delta", "--format", "json"])
    assert code == 3
    rows = json.loads(out)["rows"]
    assert "error" in rows[1] and rows[1]["d"] == 4


def test_threads_match_sequential(capsys):
    code1, seq = run_main(capsys, ["table", "--dims", "2..5", "--model", "delta"])
    code2, par = run_main(capsys, ["table", "--dims", "2..5", "--model", "delta", "--threads", "3"])
    assert code1 == code2 == 0
    assert seq == par


def test_json_outputs_validate(capsys, schema):
    invocations = [
        ["table", "--dims", "2,3", "--model", "gap", "--format", "json"],
        ["sk", "--model", "step", "--d", "1", "--phi", "0.5", "--samples", "64", "--format", "json"],
        ["asymptotics", "--d", "24", "--skip-numeric", "--format", "json"],
        ["yamada", "--model", "delta", "--d", "1", "--format", "json"],
        ["matern", "--d", "1", "--L", "30", "--T", "4", "--seed", "5", "--format", "json"],
        ["classical", "--dims", "56,60", "--format", "json"],
    ]
    for argv in invocations:
        code, out = run_main(capsys, argv)
        assert code == 0, argv
        jsonschema.validate(json.loads(out), schema)


def test_yamada_gap_default_density(capsys):
    code, out = run_main(capsys, ["yamada", "--model", "gap", "--d", "2", "--format", "json"])
    assert code == 0
    obj = json.loads(out)
    assert obj["violations"] == []
    rec = terminal_gap(2)
    assert obj["phi"] == pytest.approx(rec.phi_star, rel=1e-6)


def test_matern_csv_layout(capsys, tmp_path):
    centers = tmp_path / "centers.csv"
    code, out = run_main(
        capsys,
        ["matern", "--d", "2", "--L", "12", "--T", "3", "--seed", "3", "--centers-out", str(centers)],
    )
    assert code == 0
    lines = out.strip().split("\n")
    meta = [ln for ln in lines if ln.startswith("#")]
    assert any(ln.startswith("# phi_hat,") for ln in meta)
    header_idx = next(i for i, ln in enumerate(lines) if not ln.startswith("#"))
    assert lines[header_idx] == "r,g2_hat,stderr,g2_analytic"
    assert centers.read_text().startswith("x1,x2")


def test_classical_terminal_column(capsys):
    code, out = run_main(capsys, ["classical", "--dims", "60", "--terminal"])
    assert code == 0
    cells = out.strip().split("\n")[1].split(",")
    densest, phi_star = float(cells[7]), float(cells[8])
    assert phi_star > densest


def test_out_flag_writes_file(capsys, tmp_path):
    target = tmp_path / "t.csv"
    code, out = run_main(capsys, ["table", "--dims", "3", "--model", "step", "--out", str(target)])
    assert code == 0
    assert out == ""
    assert target.read_text().startswith("d,sigma_star")


def test_byte_identical_reruns():
    argv = [sys.executable, "-m", "packbound.cli", "matern", "--d", "1", "--L", "50",
            "--T", "4", "--seed", "11", "--format", "json"]
    a = subprocess.run(argv, capture_output=True).stdout
    b = subprocess.run(argv, capture_output=True).stdout
    assert a == b and len(a) > 0


def test_sk_gap_curve_hyperuniform(capsys):
    rec = terminal_gap(12)
    code, out = run_main(capsys, [
        "sk", "--model", "gap", "--d", "12", "--phi", f"{rec.phi_star:.17g}",
        "--sigma", f"{rec.sigma_star:.17g}", "--Z", f"{rec.Z_star:.17g}",
    ])
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "k,S"
    first = lines[1].split(",")
    assert float(first[1]) == pytest.approx(0.0, abs=1e-7)
    values = [float(ln.split(",")[1]) for ln in lines[1:]]
    assert min(values) >= -1e-7