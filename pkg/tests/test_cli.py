import io
import json
import sys

import pytest

from smgnash.cli import parse_cnf, parse_support, parse_vector, run

from conftest import DATA


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], out, err)
    text = out.getvalue()
    return code, (json.loads(text) if text else None), err.getvalue()


G1, G2C = DATA / "g1.json", DATA / "g2_choice.json"


def test_parse_vector_forms():
    assert parse_vector("101") == (1, 0, 1)
    assert parse_vector("1/2, 1") == (0.5, 1)
    for bad in ("2", "a,b", "3/2"):
        with pytest.raises(Exception):
            parse_vector(bad)


def test_parse_support_and_cnf():
    assert parse_support("c->v0, a->b") == [("c", "v0"), ("a", "b")]
    assert parse_cnf("c hi\np cnf 2 2\n1 -2 0\n2 0\n") == [[1, -2], [2]]
    with pytest.raises(Exception):
        parse_support("c-v0")


def test_validate_exit_codes(tmp_path):
    assert call("validate", G1)[0] == 0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"players": 1, "vertices": [{"id": "a", "owner": "chance"}],
                               "edges": [{"from": "a", "to": "a", "prob": "1/2"}],
                               "objectives": [{"type": "buchi", "set": []}]}))
    code, rep, _ = call("validate", bad)
    assert code == 1 and rep["verdict"] == "invalid"
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    assert call("validate", broken)[0] == 2


def test_usage_errors():
    assert call("qualne", G1)[0] == 2
    assert call("qualne", G1, "--payoff", "11")[0] == 2
    assert call("qualne", G1, "--payoff", "1", "--initial", "nowhere")[0] == 2
    assert call("no-such-command")[0] == 2


def test_qualne_and_mec():
    code, rep, err = call("qualne", G1, "--payoff", "1", "--recheck")
    assert code == 0 and rep["verdict"] is True and rep["recheck"]["verdict"] == "accept"
    assert "qualne: yes" in err
    code, rep, _ = call("qualne", G2C, "--payoff", "1", "--quiet")
    assert code == 1
    code, rep, _ = call("mec", G2C, "--payoff", "0")
    assert rep["mecs"] == [["a"], ["b"]] and rep["ec_union"] == ["b"]


def test_reports_are_deterministic_without_timing():
    a = call("--no-timing", "posne", G2C, "--min", "1/2")
    b = call("posne", G2C, "--min", "1/2", "--no-timing")
    assert a[0] == b[0] == 0
    assert "timing" not in a[1]
    assert {k: v for k, v in a[1].items() if k != "command"} == {k: v for k, v in b[1].items() if k != "command"}
    assert call("--no-timing", "posne", G2C, "--min", "1/2") == a
    assert "timing" in call("posne", G2C)[1]


def test_synthesize_then_verify(tmp_path):
    w = tmp_path / "w.json"
    code, rep, _ = call("synthesize", G1, "--payoff", "1", "--out", w, "--recheck")
    assert code == 0 and w.exists()
    code, rep, _ = call("verify", G1, "--witness", w)
    assert code == 0 and rep["certificate"]["verdict"] == "accept"
    data = json.loads(w.read_text())
    data["payoff"] = [0]
    w.write_text(json.dumps(data))
    assert call("verify", G1, "--witness", w)[0] == 1


def test_certify_profiles(tmp_path):
    p = tmp_path / "p.json"
    p.write_text(json.dumps({"c": "v0"}))
    code, rep, _ = call("certify", G2C, "--profile", p, "--min", "1/2")
    assert code == 0 and rep["kind"] == "positional"
    p.write_text(json.dumps({"c": {"v0": "1/2", "b": "1/2"}}))
    code, rep, _ = call("certify", G2C, "--profile", p)
    assert code == 1 and rep["kind"] == "stationary" and rep["certificate"]["payoff"] == ["1/4"]


def test_posne_cap_is_inconclusive():
    assert call("posne", G2C, "--cap", "1")[0] == 3


def test_statne_emit(tmp_path):
    out = tmp_path / "s.smt2"
    code, rep, _ = call("statne-emit", G2C, "--min", "1/2", "--support", "c->v0", "--out", out)
    assert code == 0 and "(check-sat)" in out.read_text()
    assert rep["manifest"]["a_2_3"] == ["alpha", "c", "v0"]
    assert call("statne-emit", G2C, "--support", "c->a")[0] == 2


def test_statne_without_solver_is_inconclusive(monkeypatch):
    monkeypatch.delenv("SMGNASH_SMT_SOLVER", raising=False)
    code, rep, _ = call("statne", G2C)
    assert code == 3 and "statne-emit" in rep["reasons"][0]


def test_statne_with_fake_solver():
    solver = f"{sys.executable} {DATA / 'fake_solver.py'} unsat"
    code, rep, _ = call("statne", G2C, "--solver", solver)
    assert code == 1 and rep["verdict"] == "none"


def test_gen_hardness_round_trip(tmp_path):
    g = tmp_path / "g.json"
    assert call("gen-hardness", "--cnf", DATA / "unsat.cnf", "--out", g)[0] == 0
    assert call("qualne", g, "--payoff", "01", "--recheck")[0] == 0
    assert call("gen-hardness", "--cnf", DATA / "sat.cnf", "--out", g)[0] == 0
    assert call("qualne", g, "--payoff", "01", "--no-witness")[0] == 1


def test_oracle_suites():
    code, rep, _ = call("oracle", "--count", "5", "--seed", "3")
    assert code == 0
    assert all(r["agree"] == r["total"] == 5 for r in rep["suites"].values())


def test_input_digest_tracks_file(tmp_path):
    g = tmp_path / "g.json"
    g.write_text(G1.read_text())
    d1 = call("validate", g)[1]["input_digest"]
    g.write_text(G1.read_text() + "\n")
    assert call("validate", g)[1]["input_digest"] != d1
