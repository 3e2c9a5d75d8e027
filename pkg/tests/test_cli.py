import json
import subprocess
import sys

import pytest

from etaq import qseries as qs
from etaq.cache import SeriesCache
from etaq.cli import main


@pytest.fixture
def run(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("ETAQ_CACHE", str(tmp_path / "cache"))

    def _run(*argv):
        code = main(list(argv))
        out, err = capsys.readouterr()
        return code, out, err
    return _run


def test_partition_series_csv(run):
    code, out, _ = run("partition-series", "--k", "5", "--r1", "1", "--r2", "1",
                       "--precision", "10", "--output", "csv")
    assert code == 0
    rows = out.strip().splitlines()
    assert rows[0] == "n,value"
    assert [int(r.split(",")[1]) for r in rows[1:]] == [1, 1, 2, 3, 5, 6, 10, 13, 19, 25]


def test_check_eta_json(run):
    code, out, _ = run("check-eta", "N=5; 5^1 * 1^43", "--output", "json")
    data = json.loads(out)
    assert code == 0 and data["schema"] == 1
    assert data["ghn"] is True and data["weight"] == 22
    assert data["cusp_orders"] == {"1": 9, "5": 2}
    assert data["verdict"] == "cusp-form"


def test_check_eta_rational_orders(run):
    code, out, _ = run("check-eta", "N=4; 2^1", "--output", "json")
    data = json.loads(out)
    assert data["weight"] == "1/2" and data["verdict"] == "not-cusp-form"


def test_expand_eta(run):
    code, out, _ = run("expand-eta", "N=1; 1^24", "--precision", "5", "--denom", "1",
                       "--output", "json")
    assert code == 0 and json.loads(out)["coefficients"] == [1, -24, 252, -1472]


def test_derive_params(run):
    code, out, _ = run("derive-params", "--p", "5", "--M", "1", "--r", "1", "--m", "11",
                       "--output", "json")
    data = json.loads(out)
    assert (data["a"], data["b"], data["kappa"], data["d"]) == (0, 4, 22, 4)
    assert data["form"] == "N=5; 5^1 * 1^43" and data["sturm_bound"] == 721


def test_verify_pipeline_exit_zero(run):
    code, out, _ = run("verify-pipeline", "--p", "5", "--M", "1", "--r", "1", "--m", "11",
                       "--precision", "500", "--output", "json")
    data = json.loads(out)
    assert code == 0 and data["verified"] and data["mismatches"] == []


def test_verify_congruence_failure_exit_one(run):
    code, out, _ = run("verify-congruence", "--p", "5", "--M", "1", "--r", "1", "--m", "11",
                       "--ell", "1979", "--n-max", "10", "--output", "json")
    data = json.loads(out)
    assert code == 1 and data["violations"][0] == {"n": 1, "argument": 3628, "value": 1}


@pytest.mark.parametrize("argv", [
    ["derive-params", "--p", "5", "--M", "1", "--r", "1", "--m", "5"],
    ["derive-params", "--p", "5", "--M", "1", "--r", "1"],
    ["check-eta", "N=5; 5^x"],
    ["expand-eta", "N=5; 5^1 * 1^43", "--precision", "0"],
    ["expand-eta", "N=5; 5^1 * 1^43", "--precision", "1"],
    ["nonsense"],
    [],
])
def test_input_errors_exit_two(run, argv):
    code, _, err = run(*argv)
    assert code == 2 and err


def test_hypothesis_violations_listed(run):
    code, _, err = run("derive-params", "--p", "7", "--M", "1", "--r", "11", "--m", "11")
    assert code == 2
    assert "gcd(m, r1)" in err and "not even" in err


def test_warm_cache_is_byte_identical(run, tmp_path):
    argv = ["verify-pipeline", "--p", "5", "--M", "1", "--r", "1", "--m", "13",
            "--precision", "200", "--output", "json"]
    first = run(*argv)
    files = sorted((tmp_path / "cache").glob("*.qs1"))
    assert files
    second = run(*argv)
    assert first == second
    assert sorted((tmp_path / "cache").glob("*.qs1")) == files
    for path in files:
        assert qs.dumps(qs.loads(path.read_text())) == path.read_text()


def test_cache_dir_flag_overrides_env(run, tmp_path):
    run("expand-eta", "N=1; 1^24", "--precision", "5", "--cache-dir", str(tmp_path / "other"))
    assert list((tmp_path / "other").glob("*.qs1"))
    assert not (tmp_path / "cache").exists()


def test_cache_roundtrip(tmp_path):
    cache = SeriesCache(tmp_path)
    f = qs.QSeries([3, -10**30, 0, 7], offset=-5, denom=24)
    got = cache.get_or_compute(("x",), lambda: f)
    again = cache.get_or_compute(("x",), lambda: pytest.fail("should hit"))
    assert got == again == f and (cache.hits, cache.misses) == (1, 1)
    assert not list(tmp_path.glob(".tmp-*"))


def test_search_workers_byte_identical(run):
    base = ["search-ell", "--p", "5", "--M", "1", "--r", "1", "--m", "11",
            "--ell-limit", "20000", "--check-depth", "10", "--output", "json"]
    one = run(*base, "--workers", "1")
    four = run(*base, "--workers", "4")
    assert one == four and one[0] == 0


def test_console_script_module():
    proc = subprocess.run([sys.executable, "-m", "etaq.cli", "check-eta", "N=1; 1^24",
                           "--no-cache"], capture_output=True, text=True)
    assert proc.returncode == 0 and "verdict: cusp-form" in proc.stdout
