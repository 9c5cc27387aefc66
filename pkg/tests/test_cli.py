import json

import pytest

from dissoc import cache
from dissoc.cli import EXIT_CAP, EXIT_FAIL, EXIT_OK, EXIT_USAGE, main


@pytest.fixture(autouse=True)
def cache_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("DISSOC_CACHE_DIR", str(tmp_path / "cache"))
    return tmp_path / "cache"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_enumerate(capsys):
    code, out, _ = run(capsys, "enumerate", "3")
    assert code == EXIT_OK and len(out.strip().splitlines()) == 2
    code, out, _ = run(capsys, "enumerate", "4", "--format", "json")
    rec = json.loads(out)
    assert rec["schema"] == "dissoc.enumerate/1" and rec["count"] == 5
    code, out, _ = run(capsys, "enumerate", "1")
    assert "x0" in out
    code, out, _ = run(capsys, "enumerate", "5", "--format", "csv")
    assert out.splitlines()[0] == "rank,rpn,infix" and len(out.splitlines()) == 15


def test_analyze(capsys):
    code, out, _ = run(capsys, "analyze", "E", "--k-max", "6", "--format", "json")
    rec = json.loads(out)
    assert code == EXIT_OK and rec["sat"] == [2, 5, 10, 21] and rec["first_failure"] == 5
    code, out, _ = run(capsys, "analyze", "2:10", "--k-max", "4", "--format", "json")
    assert json.loads(out)["first_failure"] == 4
    code, out, _ = run(capsys, "analyze", "2:7", "--k-max", "5", "--format", "json")
    assert json.loads(out)["sat"] == [1, 1, 1]


def test_certify(capsys):
    code, out, _ = run(capsys, "certify", "B", "--T", "0,1,2,3", "--K", "10")
    assert code == EXIT_OK and "certified-to-10" in out
    code, out, _ = run(capsys, "certify", "2:13", "--T", "0,1", "--K", "10")
    assert code == EXIT_OK
    code, out, _ = run(capsys, "certify", "2:14", "--K", "6")
    assert code == EXIT_FAIL and "no yieldable" in out


def test_census_and_cache(capsys, cache_dir):
    code, fresh, _ = run(capsys, "census", "2", "4", "--k-max", "6", "--format", "csv")
    assert code == EXIT_OK
    rows = fresh.strip().splitlines()[1:]
    assert len(rows) == 16
    free = {r.split(",")[0] for r in rows if r.split(",")[4] == ""}
    assert free == {f"2:{j}" for j in (2, 4, 8, 11, 13, 14)}
    assert any(cache_dir.iterdir())
    code, again, _ = run(capsys, "census", "2", "4", "--k-max", "6", "--format", "csv")
    assert again == fresh
    code, nocache, _ = run(capsys, "census", "2", "4", "--k-max", "6", "--format", "csv",
                           "--no-cache")
    assert nocache == fresh


def test_cache_key_depends_on_params():
    assert cache.cache_key("census", {"n": 2}) != cache.cache_key("census", {"n": 3})
    assert cache.cache_key("census", {"a": 1, "b": 2}) == cache.cache_key("census", {"b": 2, "a": 1})


def test_mnk(capsys):
    code, out, _ = run(capsys, "mnk", "2", "3", "--format", "json")
    rec = json.loads(out)
    assert rec["value"] == 0 and rec["witnesses"] == ["2:10", "2:12"]


def test_represent(capsys):
    code, out, _ = run(capsys, "represent", "32")
    assert code == EXIT_FAIL
    code, out, _ = run(capsys, "represent", "32", "--mode", "propagate", "--format", "json")
    assert code == EXIT_FAIL and json.loads(out)["walls"]
    code, out, _ = run(capsys, "represent", "0f")
    assert code == EXIT_OK and "representable" in out
    code, out, _ = run(capsys, "represent", "abc")
    assert code == EXIT_USAGE


def test_identity(capsys):
    beta = "((x*y)*z)*z = ((x*y)*(x*z))*(x*z)"
    assert run(capsys, "identity", beta, "B")[0] == EXIT_OK
    code, out, _ = run(capsys, "identity", beta, "D")
    assert code == EXIT_FAIL and "fails" in out
    assert run(capsys, "identity", "x*y*z = x", "B")[0] == EXIT_USAGE


def test_nand_check(capsys):
    code, out, _ = run(capsys, "nand-check", "--max-arity", "5", "--injectivity-to", "5",
                       "--random", "20", "--format", "json")
    rec = json.loads(out)
    assert code == EXIT_OK and rec["ok"] and rec["worked_example"] == "x | z"


def test_check_subset(capsys):
    code, out, _ = run(capsys, "paper-check", "--only", "1,2,12")
    assert code == EXIT_OK
    assert out.count("[PASS]") == 3


def test_usage_and_caps(capsys):
    assert run(capsys, "analyze", "no-such-table")[0] == EXIT_USAGE
    assert run(capsys, "enumerate", "40")[0] == EXIT_CAP
    assert run(capsys, "census", "4", "3")[0] == EXIT_CAP
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == EXIT_USAGE
    capsys.readouterr()
