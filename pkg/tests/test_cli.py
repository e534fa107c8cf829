import csv
import hashlib
import io
import json
import subprocess
import sys

import pytest

from hgk3 import elliptic
from hgk3.cache import CountCache
from hgk3.cli import ZetaReport, main
from hgk3.errors import CacheCorruption, CacheDivergence


@pytest.fixture(autouse=True)
def fresh_counts(monkeypatch):
    monkeypatch.delenv("HGK3_CACHE", raising=False)
    elliptic.clear_memory_cache()
    yield
    elliptic.clear_memory_cache()


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_predict_text(capsys):
    code, out, _ = run(capsys, "predict", "--alpha", "half", "--p", "7", "--a", "4")
    assert code == 0
    assert "(1 - 7T)(1 - 2T + 49T^2)" in out


def test_predict_via_c_matches(capsys):
    _, e, _ = run(capsys, "predict", "--alpha", "half", "--p", "7", "--a", "4", "--json")
    _, c, _ = run(capsys, "predict", "--alpha", "half", "--p", "7", "--a", "4", "--via", "C", "--json")
    assert json.loads(e)["coeffs"] == json.loads(c)["coeffs"] == [-9, 63, -343]


def test_predict_json_schema_and_roundtrip(capsys):
    code, out, _ = run(capsys, "predict", "--alpha", "quarter", "--p", "13", "--a", "5", "--chi", "-1", "--json")
    assert code == 0
    data = json.loads(out)
    assert set(data) == {"triple", "p", "a", "case", "chi", "A", "coeffs", "factors", "provenance"}
    assert data["factors"]["quad"][1] == 169
    report = ZetaReport.from_json(out)
    assert report.to_json() == out.strip()
    assert ZetaReport.from_json(report.to_json()) == report
    assert list(report.charpoly().coeffs) == report.coeffs


@pytest.mark.parametrize("argv", [
    ["predict", "--alpha", "half", "--p", "7", "--a", "7"],
    ["predict", "--alpha", "half", "--p", "7", "--a", "1", "--via", "C"],
    ["predict", "--alpha", "third", "--p", "7", "--a", "2", "--via", "C"],
    ["predict", "--alpha", "half", "--p", "9", "--a", "2"],
    ["predict", "--alpha", "half", "--p", "7", "--a", "2", "--chi", "3"],
    ["oracle", "--family", "dwork", "--pmax", "200"],
])
def test_input_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert "error" in json.loads(err.strip().splitlines()[-1])


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--suite", "nonsense"])
    assert exc.value.code == 2


@pytest.mark.parametrize("suite", ["clausen", "xmatrix", "odes"])
def test_verify_suites(capsys, suite):
    code, out, _ = run(capsys, "verify", "--suite", suite)
    assert code == 0 and "0 failed" in out


def test_verify_grid_suite_small(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "weil", "--pmax", "23")
    assert code == 0


def test_verify_failure_exit_1(capsys, monkeypatch):
    from hgk3 import cli, suites

    def broken(**_):
        res = suites.SuiteResult("clausen")
        res.record(False, {"a": "1/4", "index": 3})
        return res

    monkeypatch.setattr(cli, "run_suite", lambda *a, **k: broken())
    code, out, _ = run(capsys, "verify", "--suite", "clausen")
    assert code == 1
    assert json.loads(out.split("first failure: ")[1]) == {"a": "1/4", "index": 3}


def test_oracle_dwork_csv(capsys):
    code, out, _ = run(capsys, "oracle", "--family", "dwork", "--pmax", "11")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["family", "p", "a", "case", "A", "c1", "c2", "c3", "observed", "n_quotient", "pass"]
    assert len(rows) == 3 + 5 + 9
    assert all(r["pass"] == "True" for r in rows)


def test_oracle_aop_matches_triple(capsys):
    code, out, err = run(capsys, "oracle", "--family", "aop", "--pmax", "29", "--train", "5,7,11,13")
    assert code == 0
    assert "differ from TripleProduct at 0 points" in err


def test_oracle_failure_exit_1(capsys, monkeypatch):
    from hgk3 import k3_oracle
    real = k3_oracle.dwork_divisibility_check

    def tampered(a, p, chi=1):
        return real(a, p, -chi)

    monkeypatch.setattr(k3_oracle, "dwork_divisibility_check", tampered)
    code, _, _ = run(capsys, "oracle", "--family", "dwork", "--pmax", "7")
    assert code == 1


def test_cm_table(capsys):
    code, out, _ = run(capsys, "cm-table", "--alpha", "half", "--a", "2", "--a=-1/8")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("a=2 CM=false")
    assert lines[1].startswith("a=-1/8 CM=true")


def _checksum(key, count, version):
    return hashlib.sha256(json.dumps([key, count, version], separators=(",", ":")).encode()).hexdigest()


def test_cache_warm_runs_identical(capsys, tmp_path):
    path = tmp_path / "counts.jsonl"
    argv = ["--cache", str(path), "predict", "--alpha", "third", "--p", "17", "--a", "5", "--json"]
    _, cold, _ = run(capsys, *argv)
    elliptic.clear_memory_cache()
    _, warm1, _ = run(capsys, *argv)
    elliptic.clear_memory_cache()
    _, warm2, _ = run(capsys, *argv)
    assert warm1 == warm2
    assert json.loads(cold)["coeffs"] == json.loads(warm1)["coeffs"]
    assert json.loads(warm1)["provenance"]["cache_hits"] == 1
    assert len(path.read_text().splitlines()) == 1


def test_cache_env_var(capsys, tmp_path, monkeypatch):
    path = tmp_path / "env.jsonl"
    monkeypatch.setenv("HGK3_CACHE", str(path))
    run(capsys, "predict", "--alpha", "half", "--p", "11", "--a", "3")
    assert path.exists() and len(CountCache(path)) == 1


def test_cache_corruption_exit_1(capsys, tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text(json.dumps({"key": "k", "count": 3, "version": "1", "ts": 0, "sha": "0" * 64}) + "\n")
    with pytest.raises(CacheCorruption):
        CountCache(path)
    code, _, err = run(capsys, "--cache", str(path), "predict", "--alpha", "half", "--p", "7", "--a", "4")
    assert code == 1 and "CacheCorruption" in err
    path.write_text("not json\n")
    with pytest.raises(CacheCorruption):
        CountCache(path)


def test_cache_divergence(tmp_path):
    path = tmp_path / "div.jsonl"
    lines = [
        json.dumps({"key": "k", "count": c, "version": "1", "ts": 0, "sha": _checksum("k", c, "1")})
        for c in (3, 4)
    ]
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(CacheDivergence):
        CountCache(path)
    cache = CountCache(tmp_path / "ok.jsonl")
    cache.put("k", 3)
    cache.put("k", 3)
    assert cache.writes == 1
    with pytest.raises(CacheDivergence):
        cache.put("k", 4)


def test_parallel_suite_matches_serial():
    from hgk3.suites import run_suite
    a = run_suite("cross", pmax=23, jobs=1)
    b = run_suite("cross", pmax=23, jobs=2)
    assert (a.passed, a.total) == (b.passed, b.total)


def test_console_script_exit_codes(tmp_path):
    ok = subprocess.run([sys.executable, "-m", "hgk3.cli", "predict", "--alpha", "half", "--p", "7", "--a", "4"],
                        capture_output=True, text=True)
    assert ok.returncode == 0 and "(1 - 7T)" in ok.stdout
    bad = subprocess.run([sys.executable, "-m", "hgk3.cli", "predict", "--alpha", "half", "--p", "7", "--a", "7"],
                         capture_output=True, text=True)
    assert bad.returncode == 2
    assert json.loads(bad.stderr)["error"] == "BadParameter"
