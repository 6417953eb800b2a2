import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from polypotential.cli import (
    EXIT_FAIL,
    EXIT_OK,
    EXIT_RESOURCE,
    EXIT_USAGE,
    RunConfig,
    cmd_identities,
    main,
    parse_float_range,
    parse_int_list,
)
from polypotential.errors import SchemaError
from polypotential.problem import oracle_spec


def _read_csv(path):
    return list(csv.DictReader(io.StringIO(path.read_text(encoding="utf-8"))))


def test_range_parsing():
    assert parse_int_list("3,4") == [3, 4]
    assert parse_int_list("3..5") == [3, 4, 5]
    assert parse_float_range("1.0..2.0:0.1") == [round(1 + 0.1 * i, 12) for i in range(11)]
    assert parse_float_range("1,1.5") == [1.0, 1.5]


def test_runconfig_rejects_unknown_keys():
    with pytest.raises(SchemaError):
        RunConfig.from_mapping({"command": "identities", "colour": "red"})
    with pytest.raises(SchemaError):
        RunConfig(command="identities", budget={"levels": 3})
    with pytest.raises(SchemaError):
        RunConfig(command="identities", seed=-1)
    with pytest.raises(SchemaError):
        RunConfig(command="plot")


def test_identities_command(tmp_path):
    out = tmp_path / "report.json"
    assert main(["identities", "--n", "3", "--samples", "4", "--out", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text(encoding="utf-8"))
    assert doc["schema_version"] == 1
    assert doc["meta"]["seed"] == 0
    assert doc["passed"] and all(r["passed"] for r in doc["rows"])


def test_identities_failure_exit_code(tmp_path):
    code = main(["identities", "--n", "3", "--samples", "2", "--tol", "1e-12", "--out", str(tmp_path / "r.json")])
    assert code == EXIT_FAIL


@pytest.mark.parametrize("bad", ["3,x", "6", "", "5..3"])
def test_identities_malformed_n(bad, capsys):
    assert main(["identities", "--n", bad]) == EXIT_USAGE


def test_identities_is_byte_identical(tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        cfg = RunConfig(command="identities", output=str(p), format="csv", seed=3)
        assert cmd_identities(cfg, [3], samples=3) == EXIT_OK
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_config_file(tmp_path):
    cfg = tmp_path / "cfg.json"
    out = tmp_path / "r.json"
    cfg.write_text(json.dumps({"seed": 5, "tolerance": {"rel": 1e-3}, "budget": {"radial": 32}}), encoding="utf-8")
    assert main(["identities", "--config", str(cfg), "--samples", "2", "--out", str(out)]) == EXIT_OK
    meta = json.loads(out.read_text(encoding="utf-8"))["meta"]
    assert meta["seed"] == 5 and meta["budget"] == {"radial": 32}
    cfg.write_text(json.dumps({"seed": 5, "unknown": 1}), encoding="utf-8")
    assert main(["identities", "--config", str(cfg)]) == EXIT_USAGE


def _write_spec(tmp_path, spec_doc):
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(spec_doc), encoding="utf-8")
    return path


def _write_points(tmp_path, pts, header=True):
    path = tmp_path / "points.csv"
    lines = (["x1,x2,x3"] if header else []) + [",".join(repr(float(v)) for v in p) for p in pts]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def test_solve_oracle_m2(tmp_path):
    spec = _write_spec(tmp_path, oracle_spec(3, 2).to_json())
    pts = _write_points(tmp_path, [[0, 0, 0], [0.3, 0.2, 0.1]])
    out = tmp_path / "vals.csv"
    assert main(["solve", "--spec", str(spec), "--points", str(pts), "--out", str(out)]) == EXIT_OK
    rows = _read_csv(out)
    assert float(rows[0]["f1"]) == pytest.approx(1.0, abs=1e-2)
    assert float(rows[1]["f1"]) == pytest.approx(1 - 0.14, abs=1e-2)
    assert rows[0]["schema_version"] == "1" and rows[0]["seed"] == "0"
    assert [r["index"] for r in rows] == ["0", "1"]


def test_solve_oracle_m3(tmp_path):
    spec = _write_spec(tmp_path, oracle_spec(3, 3).to_json())
    g = np.linspace(-0.5, 0.5, 3)
    grid = np.array([[a, b, c] for a in g for b in g for c in g])
    pts = _write_points(tmp_path, grid, header=False)
    out = tmp_path / "vals.json"
    assert main(["solve", "--spec", str(spec), "--points", str(pts), "--out", str(out)]) == EXIT_OK
    rows = json.loads(out.read_text(encoding="utf-8"))["rows"]
    for x, row in zip(grid, rows):
        assert row["f1"] == pytest.approx(1 - (x @ x) ** 2, abs=1e-2)


def test_solve_zero_spec(tmp_path):
    doc = {"n": 3, "m": 2, "phi": [{"preset": "zero"}] * 3}
    spec = _write_spec(tmp_path, doc)
    pts = _write_points(tmp_path, [[0.1, 0.2, 0.3], [0.5, 0, 0]])
    out = tmp_path / "vals.csv"
    assert main(["solve", "--spec", str(spec), "--points", str(pts), "--out", str(out)]) == EXIT_OK
    assert all(float(r["f1"]) == 0.0 for r in _read_csv(out))


def test_solve_schema_error(tmp_path):
    spec = _write_spec(tmp_path, {"n": 3, "phi": []})
    pts = _write_points(tmp_path, [[0, 0, 0]])
    assert main(["solve", "--spec", str(spec), "--points", str(pts)]) == EXIT_USAGE


def test_solve_points_outside(tmp_path):
    spec = _write_spec(tmp_path, oracle_spec(3, 2).to_json())
    pts = _write_points(tmp_path, [[2, 0, 0]])
    assert main(["solve", "--spec", str(spec), "--points", str(pts)]) == EXIT_USAGE


def test_solve_budget_exhaustion_writes_nothing(tmp_path):
    spec = _write_spec(tmp_path, oracle_spec(3, 2).to_json())
    pts = _write_points(tmp_path, [[0.1, 0, 0]])
    out = tmp_path / "vals.csv"
    code = main(["solve", "--spec", str(spec), "--points", str(pts), "--radial", "100000", "--out", str(out)])
    assert code == EXIT_RESOURCE
    assert not out.exists()


def test_constants_table(tmp_path):
    norms = tmp_path / "norms.json"
    norms.write_text("[[0, 0], [1, 0.5]]", encoding="utf-8")
    out = tmp_path / "table.csv"
    args = ["constants", "--n", "3..4", "--K", "1.0..1.2:0.1", "--norms", str(norms), "--out", str(out)]
    assert main(args) == EXIT_OK
    rows = _read_csv(out)
    assert len(rows) == 2 * 3 * 2
    first = rows[0]
    assert (first["n"], first["K"], first["norms"]) == ("3", "1.0", "0.0 0.0")
    assert float(first["M1"]) == 1.0 and float(first["N1"]) == 0.0
    assert float(first["L"]) == pytest.approx(0.4142, abs=1e-4)
    M1 = [float(r["M1"]) for r in rows if r["n"] == "3" and r["norm_set"] == "0"]
    assert M1 == sorted(M1)
    assert all(r["branch"] for r in rows)


def test_constants_divergent_branch_continues(tmp_path):
    out = tmp_path / "table.json"
    assert main(["constants", "--n", "3", "--K", "1.0,2.0", "--q", "50", "--out", str(out)]) == EXIT_OK
    rows = json.loads(out.read_text(encoding="utf-8"))["rows"]
    assert len(rows) == 2
    assert rows[1]["mu5"] is None and rows[1]["branch"].startswith("prime")


def test_constants_bad_input(tmp_path):
    assert main(["constants", "--K", "0.5"]) == EXIT_USAGE
    norms = tmp_path / "norms.json"
    norms.write_text('{"a": 1}', encoding="utf-8")
    assert main(["constants", "--norms", str(norms)]) == EXIT_USAGE


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "polypotential", "constants", "--n", "3", "--format", "json"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["rows"][0]["M1"] == 1.0


def test_help_exit_code(capsys):
    assert main(["--help"]) == 0
    assert main([]) == EXIT_USAGE
