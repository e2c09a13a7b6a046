from __future__ import annotations

import json

import pytest

from pmekr import report
from pmekr.cli import main, parse_range, read_config


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_count_examples(capsys):
    assert run(capsys, "count", "--n", "6", "--p", "1", "--s", "2")[:2] == (0, "family_size 240\nstar_size 80\nidentity ok\n")
    assert run(capsys, "count", "--n", "3", "--p", "1", "--s", "1")[1] == "family_size 12\nstar_size 6\nidentity ok\n"
    code, out, err = run(capsys, "count", "--n", "2", "--p", "1", "--s", "2")
    assert code == 2 and "p+s > n" in err and out == ""


def test_usage_errors(capsys):
    assert run(capsys)[0] == 2
    assert run(capsys, "count")[0] == 2
    assert run(capsys, "count", "--n", "x")[0] == 2
    assert run(capsys, "verify", "--n", "5", "--p", "1", "--s", "1", "--lemmas", "7")[0] == 2


def test_verify_examples(capsys):
    code, out, _ = run(capsys, "verify", "--n", "5", "--p", "1", "--s", "1", "--family", "star:l5",
                       "--lemmas", "1,3,4", "--exhaustive")
    assert code == 0 and out.endswith("all pass over 384 orders\n")
    code, out, _ = run(capsys, "verify", "--family", "avoid:l3", "--n", "3", "--p", "1", "--s", "1", "--lemmas", "1")
    assert code == 0 and "not applicable: n < 2(p+s)" in out


def test_verify_cap_refusal_and_sampling(capsys):
    code, _, err = run(capsys, "verify", "--n", "7", "--p", "1", "--s", "2", "--family", "star:l7", "--cap", "100")
    assert code == 2 and "--sample" in err
    code, out, _ = run(capsys, "verify", "--n", "7", "--p", "1", "--s", "2", "--family", "star:l7",
                       "--cap", "100", "--sample", "300", "--seed", "5", "--format", "json")
    rep = json.loads(out)
    assert code == 0 and rep["sampling"] == {"sample": 300, "seed": 5}
    report.validate_report(rep)


def test_verify_family_file(tmp_path, capsys):
    path = tmp_path / "fam.txt"
    code, out, _ = run(capsys, "construct", "--n", "5", "--p", "1", "--s", "1", "--family", "star:r2")
    path.write_text("# star at r2\n" + out)
    assert out.splitlines()[0] == "l1 r1 r2"
    code, out, _ = run(capsys, "verify", "--n", "5", "--p", "1", "--s", "1", "--family", str(path), "--reflection")
    assert code == 0 and "reflection: pass" in out


def test_doublecount_examples(capsys):
    code, out, _ = run(capsys, "doublecount", "--n", "3", "--p", "1", "--s", "1")
    assert code == 0 and "formula 4\nmeasured_b 4\n" in out and "bookkeeping ok" in out
    code, out, _ = run(capsys, "doublecount", "--n", "4", "--p", "1", "--s", "1")
    assert "formula 16\nmeasured_b 16\n" in out


def test_sweep_json_csv_deterministic(tmp_path, capsys):
    args = ["ekr-sweep", "--n", "3..6", "--p", "1", "--s", "1", "--format", "json",
            "--csv-out", str(tmp_path / "a.csv")]
    code, out1, _ = run(capsys, *args)
    _, out2, _ = run(capsys, *args)
    assert code == 0 and out1 == out2
    rep = json.loads(out1)
    assert rep["schema"] == "ekr-report/1"
    rows = {(r["n"], r["p"], r["s"]): r for r in rep["results"]}
    assert all(r["ekr"] == "true" for r in rows.values())
    assert rows[(3, 1, 1)]["strongly_ekr"] == "false"
    assert all(rows[(n, 1, 1)]["strongly_ekr"] == "true" for n in (4, 5, 6))
    csv_text = (tmp_path / "a.csv").read_text().splitlines()
    assert csv_text[0].startswith("n,p,s,family_size,star_size,max_intersecting,ekr,strongly_ekr")
    assert len(csv_text) == 5


def test_sweep_parallel_matches_serial(capsys):
    base = ["ekr-sweep", "--n", "3..5", "--p", "0..1", "--s", "1..2", "--format", "json"]
    _, serial, _ = run(capsys, *base)
    _, parallel, _ = run(capsys, *base, "--jobs", "2")
    assert serial == parallel


def test_empty_sweep(capsys):
    code, out, _ = run(capsys, "ekr-sweep", "--n", "6..3", "--p", "1", "--s", "1", "--format", "json")
    assert code == 0 and json.loads(out)["results"] == []


def test_sweep_capacity_row(capsys):
    code, out, _ = run(capsys, "ekr-sweep", "--n", "10", "--p", "2", "--s", "3", "--format", "json")
    row = json.loads(out)["results"][0]
    assert code == 0 and row["status"] == "capacity"


def test_config_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\nn = 4\np=1\ns = 1\nformat = json\n")
    _, out, _ = run(capsys, "count", "--config", str(cfg), "--n", "5")
    rep = json.loads(out)
    assert rep["instance"] == {"n": 5, "p": 1, "s": 1}
    _, out, _ = run(capsys, "--config", str(cfg), "count", "--format", "text")
    assert out.startswith("family_size 24")
    assert read_config(cfg)["format"] == "json"


def test_enumerate_and_construct(capsys):
    code, out, _ = run(capsys, "enumerate", "--n", "3", "--p", "1", "--s", "1")
    assert code == 0 and len(out.splitlines()) == 12
    code, out, _ = run(capsys, "construct", "--n", "4", "--p", "1", "--s", "2", "--family", "avoid:l1",
                       "--solve", "--format", "json")
    row = json.loads(out)["results"][0]
    assert row["extremal"] and row["star"] == "absent"


def test_general(capsys):
    code, out, _ = run(capsys, "general", "--m", "3", "--n", "2", "--signature", "1,1", "--check-formula")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "m,n,signature,family_size,star_size_max,max_intersecting,ekr,strongly_ekr,formula,raw_count,enumerated"
    assert lines[1] == '3,2,"1,1",12,6,6,true,false,12,12,12'
    code, out, _ = run(capsys, "general", "--m", "2", "--signature", "0,1", "--scan", "--n-max", "6")
    assert code == 0 and "heuristic threshold estimate n=4" in out
    assert run(capsys, "general", "--m", "1", "--n", "2", "--signature", "1,1")[0] == 2


def test_backend_flag(capsys):
    a = run(capsys, "--backend", "numpy", "ekr-sweep", "--n", "5", "--p", "1", "--s", "2", "--format", "json")[1]
    b = run(capsys, "ekr-sweep", "--n", "5", "--p", "1", "--s", "2", "--format", "json", "--backend", "numba")[1]
    assert a == b


@pytest.mark.parametrize("text,expected", [("3..6", [3, 4, 5, 6]), ("3-5", [3, 4, 5]), ("1,4", [1, 4]), ("6..3", []), ("", [])])
def test_parse_range(text, expected):
    assert parse_range(text) == expected


def test_report_csv_flattening():
    rep = report.make_report("x", {"n": 3}, [{"a": 1, "d": {"b": True}, "w": [["l1"]], "t": None}])
    assert report.report_csv(rep) == "instance.n,a,d.b,t\n3,1,true,\n"
    with pytest.raises(ValueError):
        report.validate_report({"schema": "other"})


def test_sweep_search_jobs_and_timings(capsys):
    base = ["ekr-sweep", "--n", "4", "--p", "1", "--s", "1", "--format", "json"]
    _, serial, _ = run(capsys, *base)
    _, split, _ = run(capsys, *base, "--search-jobs", "2")
    strip = lambda out: [{k: v for k, v in r.items() if k != "nodes"} for r in json.loads(out)["results"]]
    assert strip(serial) == strip(split)
    _, timed, _ = run(capsys, *base, "--timings")
    assert "seconds" in json.loads(timed)["results"][0] and "seconds" not in json.loads(serial)["results"][0]
    code, _, err = run(capsys, *base, "--jobs", "2", "--search-jobs", "2")
    assert code == 2 and "search-jobs" in err
