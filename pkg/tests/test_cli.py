import csv
import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from zetadeform.cache import CacheEntry, NullCache, ResultCache
from zetadeform.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("n, k, value", [("1", "2", "5/4"), ("1", "1,1", "23/12"), ("2", "2", "49/36")])
def test_tn(capsys, n, k, value):
    code, out, _ = run(capsys, "tn", "-n", n, "-k", k)
    assert code == 0
    assert out.splitlines()[0] == value
    assert "±0" in out


def test_eta_ones_encloses_e(capsys):
    code, out, _ = run(capsys, "eta", "-n", "1", "--tail", "ones", "--format", "json")
    record = json.loads(out)
    assert Fraction(record["lo"]) < Fraction(2718281828459046, 10**15)
    assert Fraction(record["hi"]) > Fraction(2718281828459045, 10**15)


def test_eta_twos(capsys):
    _, out, _ = run(capsys, "eta", "-n", "1", "--tail", "twos")
    assert "1.37789689539" in out


def test_hn_site(capsys):
    _, out, _ = run(capsys, "hn", "-n", "1", "--site", "1")
    assert "0.218281828459045" in out
    _, out2, _ = run(capsys, "hn", "-n", "1", "-x", "1/2")
    assert out2 == out


def test_output_has_no_bare_floats(capsys):
    _, out, _ = run(capsys, "fn", "-n", "1", "-x", "1/3", "--depth", "8")
    assert out.startswith("F_1(1/3) in [") and "±" in out


def test_hsum_and_gn(capsys):
    code, out, _ = run(capsys, "hsum", "-n", "1", "-x", "1", "--weight-cutoff", "12")
    assert code == 0 and "H_1(1/1)" in out
    code, out, _ = run(capsys, "gn", "-n", "1", "-x", "1/2", "--weight-cutoff", "12", "--format", "json")
    rec = json.loads(out)
    assert Fraction(rec["lo"]) < Fraction(rec["hi"])


def test_curve_csv(capsys, tmp_path):
    path = tmp_path / "g.csv"
    code, _, _ = run(capsys, "curve", "gn", "-n", "1", "--points", "20", "--out", str(path))
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(path.read_text())))
    assert list(rows[0]) == ["x", "lo", "hi"]
    xs = [Fraction(r["x"]) for r in rows]
    assert xs == sorted(xs) and len(xs) == 20
    los = [float(r["lo"]) for r in rows]
    assert los == sorted(los)


def test_curve_hn_shows_jump(capsys):
    _, out, _ = run(capsys, "curve", "hn", "-n", "1", "--grid", "dyadic", "--bits", "4", "--format", "json")
    rows = {r["x"]: Fraction(r["lo"]) for r in json.loads(out)}
    # sites below 9/16 but not below 1/2 are 1/2 itself plus deeper sites
    jump = rows["9/16"] - rows["1/2"]
    assert jump > Fraction(2182, 10**4)


def test_curve_unwritable(capsys, tmp_path):
    code, _, err = run(capsys, "curve", "fn", "--points", "3", "--out", str(tmp_path / "no" / "x.csv"))
    assert code == 2 and "cannot write" in err


def test_points_and_dim(capsys):
    _, out, _ = run(capsys, "points", "cantor", "-m", "3", "--depth", "2")
    assert out.split() == ["0/1", "2/9", "2/3", "8/9"]
    _, out, _ = run(capsys, "dim", "e2", "--format", "json")
    enc = json.loads(out)["moran"]
    assert abs(float(Fraction(enc["lo"])) - 0.6942419136) < 1e-9


def test_preimage(capsys):
    code, out, _ = run(capsys, "preimage", "-n", "1", "-y", "2", "--tol", "1/1048576")
    assert code == 0 and out.startswith("x in [")


@pytest.mark.parametrize("argv", [
    ["verify", "lemma-del", "-n", "1", "-W", "8"],
    ["verify", "order-t2", "-n", "1", "--weight", "8"],
    ["verify", "moran"],
])
def test_verify_examples(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    assert all(line.startswith("PASS") for line in out.splitlines())


def test_verify_failure_exit_code(capsys, monkeypatch):
    from zetadeform import verify

    def failing(**kwargs):
        return [verify.VerificationReport("broken", verify.Status.FAIL)]

    monkeypatch.setitem(verify.SUITES, "moran", failing)
    code, out, _ = run(capsys, "verify", "moran")
    assert code == 1 and out.startswith("FAIL")


@pytest.mark.parametrize("argv", [
    ["tn", "-n", "0", "-k", "2"],
    ["tn", "-n", "1", "-k", "2,x"],
    ["tn", "-n", "1", "-k", ""],
    ["fn", "-x", "3/2"],
    ["hn", "-n", "1"],
    ["hn", "-x", "1/3"],
    ["verify", "nonexistent"],
    ["preimage", "-y", "7"],
])
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        code = main(argv)
        raise SystemExit(code)
    assert exc.value.code == 2


def test_warm_and_cold_output_identical(capsys, tmp_path):
    argv = ["--cache-dir", str(tmp_path), "eta", "-n", "2", "-k", "2,3", "--tail", "twos"]
    _, cold, _ = run(capsys, *argv)
    _, warm, _ = run(capsys, *argv)
    _, uncached, _ = run(capsys, "--no-cache", *argv[2:])
    assert cold == warm == uncached
    assert (tmp_path / "results.jsonl").exists()


def test_cache_round_trip(tmp_path):
    cache = ResultCache(tmp_path)
    assert cache.get("a") is None
    cache.put("a", "1/3")
    assert cache.get("a") == "1/3"
    assert ResultCache(tmp_path).get("a") == "1/3"


def test_cache_version_bump_invalidates(tmp_path):
    ResultCache(tmp_path, version="1").put("k", "v1")
    assert ResultCache(tmp_path, version="2").get("k") is None


def test_cache_corruption_recomputes(tmp_path):
    cache = ResultCache(tmp_path)
    cache.put("k", "good")
    text = cache.path.read_text().replace("good", "evil")
    cache.path.write_text(text + "not json\n")
    assert cache.get("k") is None
    assert cache.corrupt_lines == 2
    assert cache.get_or_compute("k", lambda: "fresh") == "fresh"
    lines = cache.path.read_text().splitlines()
    assert len(lines) == 1 and CacheEntry.from_line(lines[0]).value == "fresh"


def test_cache_env_var(tmp_path, monkeypatch):
    monkeypatch.setenv("ZETADEFORM_CACHE_DIR", str(tmp_path / "env"))
    assert ResultCache().directory == tmp_path / "env"


def test_null_cache():
    cache = NullCache()
    cache.put("k", "v")
    assert cache.get("k") is None
    assert cache.get_or_compute("k", lambda: "x") == "x"


def test_cache_concurrent_writers(tmp_path):
    script = (
        "import sys; from zetadeform.cache import ResultCache\n"
        "c = ResultCache(sys.argv[1])\n"
        "[c.put(f'{sys.argv[2]}-{i}', str(i)) for i in range(50)]\n"
    )
    procs = [subprocess.Popen([sys.executable, "-c", script, str(tmp_path), str(w)]) for w in range(4)]
    assert all(p.wait() == 0 for p in procs)
    cache = ResultCache(tmp_path)
    assert all(cache.get(f"{w}-{i}") == str(i) for w in range(4) for i in range(50))
    assert cache.corrupt_lines == 0


def test_module_entry_point(tmp_path):
    result = subprocess.run([sys.executable, "-m", "zetadeform", "--no-cache", "tn", "-n", "1", "-k", "2"],
                            capture_output=True, text=True, check=True)
    assert result.stdout.splitlines()[0] == "5/4"
