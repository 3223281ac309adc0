import io
import json
import shutil
import subprocess

import pytest

from qsteiner.cli import main
from qsteiner.qsd_io import read_qsd, write_qsd
from qsteiner.structure import z1


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def run_json(*argv):
    code, out, err = run("--format", "json", *argv)
    doc = json.loads(out) if out else json.loads(err)
    assert doc["schema"] == "qsd-report-1"
    return code, doc


def test_gauss():
    assert run("gauss", "--n", "7", "--k", "2", "--q", "2") == (0, "2667\n", "")
    code, doc = run_json("gauss", "--n", "4", "--k", "2", "--q", "3")
    assert code == 0 and doc["value"] == 130


def test_audit_json():
    code, doc = run_json("audit", "--q", "2")
    assert code == 0
    assert {k: doc[k] for k in ("sizeA", "sizeAB", "sizeAonly", "residual", "total")} == {
        "sizeA": 140, "sizeAB": 49, "sizeAonly": 91, "residual": 148, "total": 381}


def test_format_flag_after_subcommand():
    code, out, _ = run("audit", "--q", "3", "--format", "json")
    assert code == 0 and json.loads(out)["total"] == 7651


def test_enum_streams():
    code, out, _ = run("enum", "--n", "4", "--k", "2", "--q", "2")
    assert code == 0 and len(out.splitlines()) == 35
    code, doc = run_json("enum", "--n", "3", "--k", "1", "--q", "3")
    assert doc["count"] == 13 == len(doc["subspaces"])


def test_admissible_exit_codes():
    code, doc = run_json("admissible", "--t", "2", "--k", "3", "--n", "7", "--q", "2")
    assert code == 0 and doc["admissible"] and doc["ratios"] == ["381", "21"]
    code, doc = run_json("admissible", "--t", "2", "--k", "3", "--n", "8", "--q", "2")
    assert code == 1 and doc["ratios"][0] == "10795/7"


def test_usage_errors():
    code, out, err = run("gauss", "--n", "7")
    assert code == 2 and "required" in err
    code, doc = run_json("spread", "--q", "6", "--k", "2", "--n", "4")
    assert code == 2 and doc["error"] == "usage"
    code, doc = run_json("nonsense")
    assert code == 2
    code, doc = run_json("verify", "--file", "/nonexistent.qsd", "--t", "1", "--k", "2")
    assert code == 2 and "error" in doc
    code, _, _ = run("gauss", "--n", "2", "--k", "3", "--q", "2")
    assert code == 2


def test_capacity_exit_code():
    code, doc = run_json("parallelism", "--q", "4")
    assert code == 3 and doc["error"] == "capacity"
    code, _, err = run("search", "pack", "--q", "3", "--budget-nodes", "5")
    assert code == 3 and "capacity" in err


def test_spread_parallelism_verify(tmp_path):
    s = tmp_path / "s.qsd"
    assert run("spread", "--q", "2", "--k", "2", "--n", "6", "--out", str(s))[0] == 0
    code, doc = run_json("verify", "--file", str(s), "--t", "1", "--k", "2")
    assert code == 0 and doc["verdict"] == "exact-design" and doc["num_blocks"] == 21
    D = read_qsd(s)
    write_qsd(D.without(next(iter(D))), s)
    code, doc = run_json("verify", "--file", str(s), "--t", "1", "--k", "2")
    assert code == 1 and doc["verdict"] == "packing"
    code, doc = run_json("verify", "--file", str(s), "--t", "1", "--k", "2", "--mode", "packing")
    assert code == 0
    p = tmp_path / "p.json"
    code, doc = run_json("parallelism", "--q", "2", "--out", str(p))
    assert code == 0 and doc["spreads"] == 7 and doc["valid"]
    assert json.loads(p.read_text())["schema"] == "qsd-parallelism-1"


def test_derive(tmp_path):
    f = tmp_path / "w.qsd"
    f.write_text("QSD1 q=2 n=3\nB 1 100 010 001\n")
    code, doc = run_json("derive", "--file", str(f), "--point", "011", "--check",
                         "--out", str(tmp_path / "o.qsd"))
    assert code == 0 and doc["verdict"] == "exact-design" and doc["derived_blocks"] == 1
    f.write_text("QSD1 q=2 n=3\nB 2 100 010 001\n")
    code, doc = run_json("derive", "--file", str(f), "--point", "011")
    assert code == 1
    code, doc = run_json("derive", "--file", str(f), "--point", "011", "--check")
    assert code == 2
    code, doc = run_json("derive", "--file", str(f), "--point", "0111")
    assert code == 2


def test_construct_and_check(tmp_path):
    d, e, par = tmp_path / "d.qsd", tmp_path / "e.qse", tmp_path / "p.json"
    run("parallelism", "--q", "2", "--out", str(par))
    code, doc = run_json("construct", "s237-5", "--q", "2", "--parallelism", str(par),
                         "--a-indices", "0,2,4,6", "--out", str(d))
    assert code == 0 and doc["blocks"] == 381 and doc["composition"]["zero_block"] == 1
    assert run("punctured", "build-eq", "--q", "2", "--n", "7", "--p", "2", "--out", str(e))[0] == 0
    code, doc = run_json("punctured", "check", "--system", str(e), "--design", str(d))
    assert code == 0 and doc["verdict"] == "consistent"
    D = read_qsd(d)
    write_qsd(D.without(next(S for S in D if S.dim == 1)), d)
    code, doc = run_json("punctured", "check", "--system", str(e), "--design", str(d))
    assert code == 1 and doc["num_violations"] > 0
    code, _, _ = run("construct", "s237-5", "--q", "2", "--a-indices", "0,1", "--out", str(d))
    assert code == 2


def test_uniform_check_and_exports(tmp_path):
    code, out, _ = run("punctured", "build-eq", "--q", "2", "--n", "7", "--p", "3")
    assert code == 0 and out.startswith("QSE1 q=2 n=7 p=3 t=2")
    e = tmp_path / "e.qse"
    e.write_text(out)
    assert run("punctured", "check", "--system", str(e), "--uniform", "1,0,4,16")[0] == 0
    assert run("punctured", "check", "--system", str(e), "--uniform", "1,0,4,15")[0] == 1
    code, out, _ = run("punctured", "build-eq", "--q", "2", "--n", "7", "--p", "3", "--lp")
    assert code == 0 and "Subject To" in out


def test_classify_normalize(tmp_path):
    f = tmp_path / "x.qsd"
    f.write_text("QSD1 q=2 n=7\nB 1 0000100 0000010 0000001\nB 1 1000100 0100010 0010001\n")
    out = tmp_path / "n.qsd"
    code, doc = run_json("normalize", "--file", str(f), "--target", "z2", "--out", str(out))
    assert code == 0 and doc["verdict_before"] == doc["verdict_after"] == "packing"
    assert read_qsd(out).multiplicity(z1(2)) == 1
    code, doc = run_json("classify", "--file", str(out))
    assert code == 0 and doc["classes"]["z_blocks"] == 2
    assert sorted(c for _, c in doc["zero_column_blocks"]) == [[1, 2, 3, 4], [4, 5, 6, 7]]
    code, doc = run_json("normalize", "--file", str(f), "--target", "z3", "--out", str(out))
    assert code == 2


def test_search_checkpoints(tmp_path):
    a, b = tmp_path / "a.qsd", tmp_path / "b.qsd"
    args = ["search", "pack", "--q", "2", "--seed", "4", "--budget-nodes", "400",
            "--strategy", "dlx-first"]
    code, doc = run_json(*args, "--out", str(a))
    assert code == 0 and doc["stats"]["nodes"] <= 400
    assert run(*args, "--threads", "2", "--out", str(b))[0] == 0
    assert a.read_text() == b.read_text()
    side = json.loads((tmp_path / "a.qsd.json").read_text())
    assert side["seed"] == 4 and side["strategy"] == "dlx-first" and side["budget_nodes"] == 400
    assert read_qsd(a).total_size == doc["size"]
    code, doc = run_json("search", "ab", "--budget-nodes", "1000")
    assert code == 0 and doc["size"] <= doc["target"] == 231
    code, doc = run_json("search", "p6", "--budget-nodes", "50", "--out", str(tmp_path / "p6.qsd"))
    assert code == 0 and doc["equations"] == 714 and not doc["found"]


@pytest.mark.skipif(shutil.which("qsd") is None or shutil.which("bash") is None,
                    reason="console script not installed")
def test_console_script_pipeline(tmp_path):
    script = (
        "qsd construct s237-5 --q 2 --out d.qsd && "
        "qsd punctured check --system <(qsd punctured build-eq --q 2 --n 7 --p 2) --design d.qsd"
    )
    proc = subprocess.run(["bash", "-c", script], cwd=tmp_path, capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.strip().endswith("0 extraneous blocks")
