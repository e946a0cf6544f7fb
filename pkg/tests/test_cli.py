import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from gthchain.censoring import censor_stationary
from gthchain.cli import run
from gthchain.families import birth_death, random_chain
from gthchain.gth import gth_solve
from gthchain.stmx import format_stmx, read_stmx

DATA = Path(__file__).parent / "data"
TWO_STATE = str(DATA / "two_state.stmx")


def _run(argv, capsys):
    code = run(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_golden(capsys):
    code, out, _ = _run(["solve", "--input", TWO_STATE], capsys)
    assert code == 0
    assert out == (DATA / "two_state_solve.csv").read_text()


def test_solve_json(capsys):
    code, out, _ = _run(["solve", "--input", TWO_STATE, "--format", "json"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["state"] == [1, 2]
    np.testing.assert_allclose(doc["probability"], [1 / 3, 2 / 3], rtol=1e-15)


def test_censor_full_set_identity(tmp_path, capsys):
    p = random_chain(5, 3)
    src = tmp_path / "p.stmx"
    src.write_text(format_stmx(p))
    out = tmp_path / "c.stmx"
    assert _run(["censor", "--input", str(src), "--subset", "E=1..5", "--out", str(out)], capsys)[0] == 0
    assert np.array_equal(read_stmx(out), p)


def test_censor_round_trip(tmp_path, capsys):
    p = random_chain(7, 12)
    src, cen = tmp_path / "p.stmx", tmp_path / "c.stmx"
    src.write_text(format_stmx(p))
    run(["censor", "--input", str(src), "--subset", "E=2,3,6", "--out", str(cen)])
    code, out, _ = _run(["solve", "--input", str(cen), "--format", "json"], capsys)
    lhs = np.array(json.loads(out)["probability"])
    rhs = censor_stationary(gth_solve(p), [2, 3, 6])
    assert code == 0 and np.abs(lhs - rhs).sum() <= 1e-10


def test_factorize_and_interpret(capsys):
    code, out, _ = _run(["factorize", "--input", TWO_STATE], capsys)
    assert code == 0 and out.startswith("2\nR\n") and "# reconstruction_residual" in out
    code, out, _ = _run(["interpret", "--input", TWO_STATE, "--level", "2"], capsys)
    lines = out.splitlines()
    assert code == 0 and lines[0] == "quantity,from,to,value"
    assert "1,2,2,10" in lines and "2,1,2,2" in lines and "3,2,1,1" in lines


def test_countable_family_solve(capsys):
    code, out, _ = _run(["solve", "--family", "bd:p=0.3", "--N", "4"], capsys)
    assert code == 0
    vals = [float(l.split(",")[1]) for l in out.splitlines()[1:]]
    pi = birth_death(0.3).stationary_vector(4)
    np.testing.assert_allclose(vals, pi / pi.sum(), rtol=1e-11)


def test_truncate_compare_censored_minimal(capsys):
    code, out, _ = _run(["truncate-compare", "--family", "bd:p=0.3", "--N", "5,10,20", "--no-timing"], capsys)
    assert code == 0
    rows = [l.split(",") for l in out.splitlines()[1:]]
    for n in ("5", "10", "20"):
        errs = {r[1]: float(r[3]) for r in rows if r[2] == n}
        assert all(errs["censored"] <= e + 1e-12 for e in errs.values())


def test_stability_bench_header(capsys):
    code, out, _ = _run(["stability-bench", "--N", "4", "--eps", "1e-8", "--no-timing"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "family,N,eps,gth_relerr,ge_relerr,gth_ms,ge_ms"
    assert float(out.splitlines()[1].split(",")[3]) <= 1e-12


@pytest.mark.parametrize(
    "argv",
    [
        ["solve", "--family", "nosuch:n=3"],
        ["censor", "--input", TWO_STATE, "--subset", "E=3"],
        ["solve", "--input", "/nonexistent/path.stmx"],
        ["solve", "--family", "bd:p=0.3", "--N", "4,5"],
    ],
)
def test_validation_errors_exit_1(argv, capsys):
    assert _run(argv, capsys)[0] == 1


def test_missing_source_exit_1(capsys):
    with pytest.raises(SystemExit) as exc:
        run(["solve"])
    assert exc.value.code == 1


def test_malformed_file_exit_1(tmp_path, capsys):
    bad = tmp_path / "bad.stmx"
    bad.write_text("2\n0.5 0.5\n0.5 zz\n")
    code, _, err = _run(["solve", "--input", str(bad)], capsys)
    assert code == 1 and "line 3" in err and "column 2" in err


def test_reducible_input_exit_1(tmp_path, capsys):
    f = tmp_path / "r.stmx"
    f.write_text("2\n1 0\n0.5 0.5\n")
    assert _run(["solve", "--input", str(f)], capsys)[0] == 1


def test_numerical_failure_exit_2(capsys):
    code, _, err = _run(["truncate-compare", "--family", "reset:p=0.45,q=0.45", "--N", "5",
                         "--strategies", "censored", "--omega-cap", "24"], capsys)
    assert code == 2 and "numerical" in err


def test_main_entry_point(tmp_path):
    out = subprocess.run(
        [sys.executable, "-m", "gthchain", "solve", "--input", TWO_STATE],
        capture_output=True, text=True, check=True,
    )
    assert out.stdout == (DATA / "two_state_solve.csv").read_text()


@pytest.mark.parametrize(
    "argv",
    [
        ["solve", "--family", "random:n=9", "--seed", "3"],
        ["truncate-compare", "--family", "bd:p=0.45", "--N", "5,10", "--no-timing"],
        ["stability-bench", "--family", "random", "--N", "5,6", "--no-timing", "--seed", "2"],
    ],
)
def test_byte_identical_reruns(argv, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(argv + ["--out", str(a)]) == 0
    assert run(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()

