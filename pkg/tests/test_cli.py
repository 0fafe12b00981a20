import csv
import json
import subprocess
import sys

import pytest

from dpie.cli import UsageError, main, parse_args


def _body(text):
    return [l for l in text.splitlines() if not l.startswith("# generated")]


def _rows(text):
    return list(csv.DictReader(l for l in text.splitlines() if not l.startswith("#")))


def test_parse_cond_sweep():
    cfg = parse_args(
        "cond-sweep --k-min 1e-6 --k-max 10 --points 40 "
        "--formulations dpies,dpiev,dpiev-scaled,efie".split()
    )
    assert cfg.subcommand == "cond-sweep" and cfg.n_points == 40
    assert cfg.formulations == ["dpies", "dpiev", "dpiev-scaled", "efie"]


def test_parse_scatter(tmp_path):
    pts = tmp_path / "pts.csv"
    pts.write_text("x,y,z\n2,0,0\n")
    cfg = parse_args(
        f"scatter --k 1 --pol 1,0,0 --dir 0,0,1 --points {pts} --out fields.csv".split()
    )
    assert cfg.pol == [1, 0, 0] and cfg.direction == [0, 0, 1]


@pytest.mark.parametrize(
    "argv",
    [
        "scatter --k 1 --pol 1,0,0 --dir 1,0,0",
        "scatter --k 1 --pol 1,0 --dir 0,0,1",
        "scatter --k 1 --pol a,b,c --dir 0,0,1",
        "scatter --k 1",
        "spectrum --k 1",
        "spectrum --formulation nope --k 1",
        "cond-sweep --k-min 1 --k-max 0.1",
        "cond-sweep --k-min 0 --k-max 1 --formulations efie --points 1",
        "signatures --k -1",
        "selftest --suites nonsense",
        "frobnicate",
        "",
    ],
)
def test_usage_errors(argv, capsys):
    with pytest.raises(UsageError):
        parse_args(argv.split())
    assert main(argv.split()) == 1


def test_signatures_output(capsys):
    assert main("signatures --k 0 --n-max 3 --no-timestamp".split()) == 0
    out = capsys.readouterr().out
    rows = _rows(out)
    assert out.startswith("# dpie signatures")
    s = [r for r in rows if r["op"] == "S"]
    assert float(s[2]["re"]) == pytest.approx(0.2)
    assert s[2]["re"] == f"{0.2:.16e}"


def test_spectrum_three_branches(capsys):
    assert main("spectrum --formulation dpiev-scaled --k 10 --n-max 60 --no-timestamp".split()) == 0
    rows = _rows(capsys.readouterr().out)
    assert {int(r["branch"]) for r in rows if int(r["n"]) > 0} == {1, 2, 3}
    assert len([r for r in rows if int(r["n"]) == 60]) == 3


def test_cond_sweep_and_determinism(capsys):
    argv = "cond-sweep --k-min 1e-3 --k-max 1 --points 4 --formulations dpies,efie --no-timestamp"
    assert main(argv.split()) == 0
    a = capsys.readouterr().out
    assert main(argv.split()) == 0
    b = capsys.readouterr().out
    assert a == b
    rows = _rows(a)
    assert len(rows) == 8 and float(rows[0]["cond"]) >= 1


def test_timestamp_line_is_the_only_difference(capsys):
    argv = "signatures --k 1 --n-max 2".split()
    main(argv)
    a = capsys.readouterr().out
    main(argv)
    b = capsys.readouterr().out
    assert _body(a) == _body(b)
    assert any(l.startswith("# generated") for l in a.splitlines())


def test_scatter_writes_fields_and_report(tmp_path):
    pts = tmp_path / "pts.csv"
    pts.write_text("# points\nx,y,z\n2,0,0\n0,3,1\n")
    out = tmp_path / "fields.csv"
    rc = main(
        f"scatter --k 1 --pol 1,0,0 --dir 0,0,1 --points {pts} --out {out} --no-timestamp".split()
    )
    assert rc == 0
    rows = _rows(out.read_text())
    assert len(rows) == 2 and "ImHz" in rows[0]
    rep = json.loads((tmp_path / "fields.csv.json").read_text())
    assert set(rep) >= {"bc_tangE", "bc_normH", "gauge_link", "net_charge", "params"}
    assert rep["bc_tangE"] < 1e-8


def test_scatter_json_and_multipole(tmp_path):
    out = tmp_path / "f.json"
    rc = main(f"scatter --k 0.5 --multipole electric,2,1 --n-random 3 --format json --out {out}".split())
    assert rc == 0
    payload = json.loads(out.read_text())
    assert len(payload["rows"]) == 3 and payload["residuals"]["gauge_link"] < 1e-7


def test_computation_failure_exit_code(capsys):
    assert main("scatter --k 30 --pol 1,0,0 --dir 0,0,1 --n-max 5".split()) == 2
    assert "TruncationError" in capsys.readouterr().err


def test_selftest_subset(tmp_path):
    out = tmp_path / "st.json"
    assert main(f"selftest --suites specfun,gauge --out {out}".split()) == 0
    rep = json.loads(out.read_text())
    assert rep["ok"] and [s["name"] for s in rep["suites"]] == ["specfun", "gauge"]


def test_selftest_failure_exit_code(monkeypatch, capsys):
    from dpie import selftest
    from dpie.selftest import Check

    monkeypatch.setitem(selftest.SUITES, "specfun", lambda: [Check("forced", 1.0, 0.0)])
    assert main("selftest --suites specfun".split()) == 3
    rep = json.loads(capsys.readouterr().out)
    assert rep["failed"] == 1 and rep["suites"][0]["failures"][0]["name"] == "forced"


def test_threads_env(monkeypatch):
    monkeypatch.setenv("DPIE_THREADS", "2")
    assert parse_args("signatures --k 1".split()).threads == 2
    monkeypatch.setenv("DPIE_THREADS", "x")
    with pytest.raises(UsageError):
        parse_args("signatures --k 1".split())


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "dpie", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "dpie" in res.stdout
