import argparse
import csv
import io
import json
import math

import pytest

from oscoeff import cli

from .conftest import NU

GOLDEN_COLUMNS = ("profile,nu,alpha0,c0_re,c0_im,lambda_re,lambda_im,phi0_re,phi0_im,"
                  "A_re,A_im,res_eigen,res_adjoint,refine_delta,wall_ms,status")


def run(argv, tmp_path, name="out"):
    path = tmp_path / name
    code = cli.main(argv + ["--out", str(path)])
    return code, path.read_text()


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.fixture(scope="module")
def eigen_csv(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("eigen")
    return run(["eigen", "--profile", "exp", "--nu", "1e-30", "--alpha0", "1.5"], tmp)


def test_column_schema_is_golden():
    assert ",".join(cli.COLUMNS) == GOLDEN_COLUMNS


def test_parse_range():
    assert cli.parse_range("0.5:0.6:0.1") == (0.5, 0.6)
    assert cli.parse_range("0.2:3:0.1")[-1] == 3.0
    assert len(cli.parse_range("0.2:3:0.1")) == 29
    for bad in ("0.6:0.5:0.1", "1:2", "1:2:0", "a:b:c"):
        with pytest.raises(argparse.ArgumentTypeError):
            cli.parse_range(bad)


@pytest.mark.parametrize("argv", [
    ["eigen", "--nu", "-1e-30", "--alpha0", "1.5"],
    ["eigen", "--nu=0", "--alpha0", "1.5"],
    ["eigen", "--nu", "1e-30", "--alpha0", "1.5", "--h", "-1"],
    ["eigen", "--nu", "1e-30"],
    ["eigen", "--nu", "1e-30", "--alpha0-range", "0.6:0.5:0.1"],
])
def test_usage_errors_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(argv)
    assert info.value.code == 2


def test_eigen_row(eigen_csv):
    code, text = eigen_csv
    assert code == 0
    assert text.splitlines()[0] == GOLDEN_COLUMNS
    (row,) = rows_of(text)
    assert row["status"] == "ok" and row["profile"] == "exp"
    assert float(row["lambda_re"]) == pytest.approx(4.8e-16, rel=0.01)
    assert float(row["lambda_im"]) == pytest.approx(-3.7e-15, rel=0.015)
    assert row["A_re"] == "" and row["refine_delta"] == ""
    assert float(row["res_eigen"]) <= 1e-10


def test_floats_round_trip_with_17_digits(eigen_csv, exp_pipeline):
    (row,) = rows_of(eigen_csv[1])
    assert float(row["c0_re"]) == exp_pipeline.eigen.c0.real
    assert float(row["lambda_im"]) == exp_pipeline.eigen.lam.imag


def test_output_is_deterministic(eigen_csv, tmp_path):
    _, again = run(["eigen", "--profile", "exp", "--nu", "1e-30", "--alpha0", "1.5"], tmp_path)

    def masked(text):
        return [{k: v for k, v in r.items() if k != "wall_ms"} for r in rows_of(text)]

    assert masked(again) == masked(eigen_csv[1])


def test_sweep_gives_one_row_per_wavenumber_in_order(tmp_path):
    code, text = run(["eigen", "--nu", "1e-30", "--alpha0-range", "0.5:0.6:0.1"], tmp_path)
    rows = rows_of(text)
    assert code == 0
    assert [float(r["alpha0"]) for r in rows] == [0.5, 0.6]
    assert all(r["status"] == "ok" for r in rows)


def test_failed_row_is_isolated(monkeypatch, tmp_path):
    real = cli.find_eigenvalue

    def flaky(profile, nu, alpha0, **kw):
        if alpha0 == 0.5:
            raise RuntimeError("injected")
        return real(profile, nu, alpha0, **kw)

    monkeypatch.setattr(cli, "find_eigenvalue", flaky)
    monkeypatch.setenv("OSCOEFF_THREADS", "1")
    code, text = run(["eigen", "--nu", "1e-30", "--alpha0-range", "0.5:0.6:0.1"], tmp_path)
    rows = rows_of(text)
    assert code == 1
    assert rows[0]["status"] == "failed: RuntimeError: injected" and rows[0]["c0_re"] == ""
    assert rows[1]["status"] == "ok"


def test_landau_json_document(blasius_pipeline, tmp_path):
    code, text = run(["landau", "--profile", "blasius", "--nu", "1e-30", "--alpha0", "0.5", "--format", "json"],
                     tmp_path)
    assert code == 0
    doc = json.loads(text)
    assert set(doc) == {"schema_version", "version", "config", "columns", "rows"}
    assert doc["schema_version"] == cli.SCHEMA_VERSION
    assert doc["columns"] == GOLDEN_COLUMNS.split(",")
    assert doc["config"]["profile"] == "blasius" and doc["config"]["alpha0"] == [0.5]
    assert doc["config"]["nu"] == NU
    (row,) = doc["rows"]
    assert list(row) == doc["columns"]
    assert row["status"] == "ok"
    A = blasius_pipeline.landau.A
    assert row["A_re"] == A.real and row["A_im"] == A.imag
    assert row["A_re"] < 0
    assert all(math.isfinite(row[k]) for k in ("c0_re", "lambda_re", "phi0_re", "res_adjoint"))


def test_profile_exponential_table(tmp_path):
    code, text = run(["profile", "--profile", "exp", "--delta", "2", "--samples", "11", "--ymax", "1"], tmp_path)
    assert code == 0
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    assert lines[0] == "y,U,dU,d2U"
    table = list(csv.DictReader(io.StringIO("\n".join(lines))))
    assert len(table) == 11
    last = table[-1]
    assert float(last["y"]) == 1.0
    assert float(last["U"]) == pytest.approx(1 - math.exp(-2), rel=1e-15)


def test_profile_blasius_json(tmp_path):
    code, text = run(["profile", "--profile", "blasius", "--format", "json", "--samples", "5"], tmp_path)
    doc = json.loads(text)
    assert code == 0
    assert doc["f2_0"] == pytest.approx(0.332057, abs=1e-4)
    assert len(doc["samples"]) == 5
    assert doc["samples"][0]["U"] == 0.0
