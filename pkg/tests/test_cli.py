import json
import subprocess
import sys

import pytest

from retrograde.cli import main

from conftest import corpus_path


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze_code1(capsys):
    code, out, _ = run(capsys, "analyze", corpus_path("code1.rg"), "--out", "any")
    assert code == 0 and "histories: 2" in out and "seed=0" in out.splitlines()[0]


def test_analyze_out_spec_json(capsys):
    code, out, _ = run(capsys, "analyze", corpus_path("code1.rg"), "--out", "ret==1",
                       "--format", "json", "--seed", "9")
    doc = json.loads(out)
    assert code == 0 and doc["seed"] == 9 and len(doc["histories"]) == 1
    assert doc["histories"][0]["inputs"]["b"]["text"] == "Z_{5-a}"


def test_analyze_truncated(capsys):
    code, out, _ = run(capsys, "analyze", corpus_path("deeploop.rg"), "--unroll", "2")
    assert code == 3 and "truncated" in out


def test_analyze_budget_env(capsys, monkeypatch):
    monkeypatch.setenv("RG_BUDGET", "5")
    code, out, _ = run(capsys, "analyze", corpus_path("code14_literal.rg"), "--unroll", "6")
    assert code == 3 and "budget" in out
    monkeypatch.setenv("RG_BUDGET", "lots")
    assert run(capsys, "analyze", corpus_path("code1.rg"))[0] == 2


def test_analyze_dot(capsys):
    code, out, _ = run(capsys, "analyze", corpus_path("code1.rg"), "--format", "dot")
    assert code == 0 and out.startswith("digraph")


def test_analyze_parse_error(capsys, tmp_path):
    bad = tmp_path / "bad.rg"
    bad.write_text("int f( { return; }", encoding="utf-8")
    code, _, err = run(capsys, "analyze", str(bad))
    assert code == 2 and "error" in err
    assert run(capsys, "analyze", str(tmp_path / "missing.rg"))[0] == 2


def test_annotate(capsys):
    code, out, _ = run(capsys, "annotate", corpus_path("code1.rg"))
    assert code == 0 and "1↑ return e{0};" in out


def test_record(capsys):
    code, out, _ = run(capsys, "record", corpus_path("code7.rg"), "--input", "x=4,3,2,1",
                       "--input", "n=4", "--rng", "1,0,1", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["restored_equals_input"] and doc["restored"]["x"] == [4, 3, 2, 1]


def test_net_single(capsys):
    code, out, _ = run(capsys, "net", corpus_path("net4.net"), "single", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["identity"]["lhs"] == 8 == doc["identity"]["rhs"]
    assert doc["count"] == 24 and "2^5 - 24 = 8" in doc["identity"]["text"]


def test_net_mutant_fails(capsys):
    code, out, _ = run(capsys, "net", corpus_path("net4_broken.net"), "single", "--format", "json")
    doc = json.loads(out)
    assert code == 1 and doc["unreachable"]


def test_net_stats(capsys):
    code, out, _ = run(capsys, "net", corpus_path("net3.net"), "stats", "--format", "json")
    assert code == 0 and [b["size"] for b in json.loads(out)["base"]] == [1, 3, 3, 1]


@pytest.mark.parametrize("mode,expect", [("zero-one", 0), ("base", 0), ("equiv", 0),
                                         ("clash", 0), ("forward", 0)])
def test_net_modes(capsys, mode, expect):
    assert run(capsys, "net", corpus_path("net4.net"), mode)[0] == expect


def test_net_clash_fails(capsys):
    code, out, _ = run(capsys, "net", corpus_path("net4_clash.net"), "clash", "--format", "json")
    assert code == 1 and json.loads(out)["clashes"][0]["input"] == "1100"


def test_net_csv_and_dot(capsys):
    code, out, _ = run(capsys, "net", corpus_path("net4.net"), "single", "--format", "csv")
    assert code == 0 and out.startswith("k,comparator")
    code, out, _ = run(capsys, "net", corpus_path("net4.net"), "zero-one", "--format", "dot")
    assert code == 0 and out.startswith("digraph")
    assert run(capsys, "net", corpus_path("net4.net"), "base", "--format", "csv")[0] == 2


def test_net_malformed(capsys, tmp_path):
    bad = tmp_path / "bad.net"
    bad.write_text("wires 3\nstage 0: 2 1\n", encoding="utf-8")
    assert run(capsys, "net", str(bad), "single")[0] == 2


def test_case_shuffle(capsys):
    code, out, _ = run(capsys, "case", "shuffle", "--n", "3", "--steps", "1", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["matrix"] == [["2/3", "0", "1/3"], ["0", "2/3", "1/3"],
                                           ["1/3", "1/3", "1/3"]]


def test_case_maxsum(capsys):
    code, out, _ = run(capsys, "case", "maxsum", "--array", "1,-2,3,4,5,-7,-12,3,8",
                       "--format", "json")
    assert code == 0 and json.loads(out)["maxsum"] == 12


def test_case_searchsim(capsys):
    code, out, _ = run(capsys, "case", "searchsim", "--n", "15", "--probe", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["levels"] == 5 and len(doc["decoder"]) == 15


def test_case_invperm_and_binsearch(capsys):
    assert run(capsys, "case", "invperm", "--perm", "2,3,1")[0] == 0
    assert run(capsys, "case", "invperm", "--perm", "2,2,1")[0] == 2
    code, out, _ = run(capsys, "case", "binsearch", "--array", "1,3,5,7", "--t", "5",
                       "--max-size", "100", "--format", "json")
    assert code == 0 and json.loads(out)["probe"]["state"] == 1


@pytest.mark.parametrize("argv", [
    ["case", "shuffle", "--n", "0"],
    ["case", "shuffle", "--n", "3", "--steps", "5"],
    ["case", "maxsum", "--array", "1,x"],
])
def test_case_bad_args(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as e:
        main(["case", "nosuch"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["analyze", corpus_path("code1.rg"), "--unroll", "0"])
    assert e.value.code == 2


@pytest.mark.parametrize("argv", [
    ["analyze", corpus_path("code1.rg"), "--format", "json"],
    ["net", corpus_path("net4.net"), "single", "--format", "json"],
    ["case", "invperm", "--trials", "5", "--seed", "4", "--format", "json"],
    ["case", "maxsum", "--trials", "20", "--seed", "4", "--format", "json"],
    ["case", "searchsim", "--trials", "20", "--seed", "4", "--format", "json"],
])
def test_byte_stable(capsys, argv):
    first = run(capsys, *argv)[1]
    assert first == run(capsys, *argv)[1]


def test_output_file(capsys, tmp_path):
    target = tmp_path / "r.json"
    code, out, _ = run(capsys, "analyze", corpus_path("code1.rg"), "--format", "json",
                       "-o", str(target))
    assert code == 0 and out == "" and json.loads(target.read_text(encoding="utf-8"))


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "retrograde.cli", "net", corpus_path("net3.net"),
                        "stats"], capture_output=True, text=True)
    assert r.returncode == 0 and "seed=0" in r.stdout


@pytest.mark.parametrize("name,extra", [
    ("code1.rg", []), ("code1.rg", ["--out", "ret==1"]), ("sumloop.rg", []),
    ("deeploop.rg", ["--unroll", "2"]), ("code14_literal.rg", ["--unroll", "3"]),
    ("code4.rg", ["--unroll", "2"]), ("code7.rg", ["--unroll", "2"]), ("code13.rg", ["--unroll", "1"]),
    ("code16.rg", []), ("calls.rg", []),
])
def test_report_matches_schema(capsys, name, extra):
    jsonschema = pytest.importorskip("jsonschema")
    from pathlib import Path
    schema = json.loads((Path(__file__).parents[1] / "docs" / "report.schema.json")
                        .read_text(encoding="utf-8"))
    code, out, _ = run(capsys, "analyze", corpus_path(name), "--format", "json", *extra)
    assert code in (0, 3)
    jsonschema.validate(json.loads(out), schema)
