import io
import json

import pytest

from mtforest import cli, enumeration
from mtforest.forest import TypedForest

from conftest import HAND


def run(argv, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr("sys.stdin", io.StringIO(stdin))
    out = io.StringIO()
    code = cli.main(argv, out)
    return code, out.getvalue()


@pytest.fixture
def hand_file(tmp_path):
    p = tmp_path / "hand.json"
    p.write_text(TypedForest.from_nested(2, HAND).to_json() + "\n")
    return p


def test_encode_decode_round_trip_is_byte_identical(hand_file, tmp_path):
    code, coded = run(["encode", "--input", str(hand_file)])
    assert code == 0
    obj = json.loads(coded)
    assert obj["lengths"] == [4, 4]
    assert obj["roots"] == [1, 2]
    cfile = tmp_path / "hand.code"
    cfile.write_text(coded)
    code, back = run(["decode", "--input", str(cfile)])
    assert code == 0
    assert back == hand_file.read_text()


def test_decode_from_stdin(hand_file, monkeypatch):
    _, coded = run(["encode", "--input", str(hand_file)])
    code, back = run(["decode"], stdin=coded, monkeypatch=monkeypatch)
    assert code == 0 and back == hand_file.read_text()


def test_encode_normalize_flag(tmp_path):
    p = tmp_path / "f.json"
    p.write_text('{"schema":"mtforest.forest/1","d":2,"trees":[{"color":1,"children":'
                 '[{"color":2,"children":[]},{"color":1,"children":[]}]}]}')
    assert run(["encode", "--input", str(p)])[0] == 2
    code, text = run(["encode", "--input", str(p), "--normalize"])
    assert code == 0 and json.loads(text)["lengths"] == [2, 1]


def test_progeny_law_worked_event(tmp_path):
    law = tmp_path / "law.json"
    law.write_text('{"schema":"mtforest.law/1","d":2,"nu":[{"0,1":"1"},{"0,0":"1"}]}')
    code, text = run(["progeny-law", "--law", str(law), "--r", "1,0", "--n", "1,1", "--a", "0,1;0,0"])
    assert code == 0
    report = json.loads(text)
    assert report["probability"]["exact"] == "1/1"
    assert report["config"]["r"] == [1, 0]


def test_progeny_law_marginal():
    code, text = run(["progeny-law", "--law", "binary_exchange", "--r", "1,0", "--n", "1,2"])
    assert code == 0
    assert json.loads(text)["probability"]["exact"] == "1/8"


def test_classify_report():
    code, text = run(["classify", "--law", "subcritical"])
    report = json.loads(text)
    assert code == 0
    assert report["regime"] == "subcritical"


def test_usage_errors_exit_2(tmp_path):
    assert run([])[0] == 2
    assert run(["progeny-law", "--law", "subcritical"])[0] == 2
    assert run(["progeny-law", "--law", "no_such_law", "--r", "1,0", "--n", "1,1"])[0] == 2
    assert run(["simulate", "--law", "subcritical", "--roots", "1"])[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["encode", "--input", str(bad)])[0] == 2
    assert run(["count-forests", "--formula", "plane"])[0] == 2


def test_help_exits_0(capsys):
    assert run(["--help"])[0] == 0


def test_count_forests_with_oracle():
    sig = '{"r":[1,1],"n":[4,4],"a":[[0,2],[1,0]]}'
    code, text = run(["count-forests", "--formula", "plane", "--sig", sig, "--oracle"])
    report = json.loads(text)
    assert code == 0 and report["count"] == report["oracle"] == 400
    code, text = run(["count-forests", "--formula", "single-type-degrees", "--degrees", "2,0,0", "--oracle"])
    assert code == 0 and json.loads(text)["count"] == 1


def test_count_forests_mismatch_exits_1(monkeypatch):
    monkeypatch.setattr(enumeration, "count_plane_forests", lambda sig: 0)
    sig = '{"r":[1,0],"n":[1,1],"a":[[0,1],[0,0]]}'
    code, text = run(["count-forests", "--formula", "plane", "--sig", sig, "--oracle"])
    assert code == 1
    assert json.loads(text)["agree"] is False


def test_cyclic_count(hand_file, tmp_path):
    _, coded = run(["encode", "--input", str(hand_file)])
    cfile = tmp_path / "hand.code"
    cfile.write_text(coded)
    code, text = run(["cyclic-count", "--input", str(cfile), "--r", "1,1"])
    report = json.loads(text)
    assert code == 0
    assert report["brute_force"] == report["determinant"] == report["elementary_sum"] == 4


def test_lagrange_coeff():
    code, text = run(["lagrange-coeff", "--law", "mixed_critical", "--r", "1,1", "--n", "2,2"])
    report = json.loads(text)
    assert code == 0 and report["equal"]
    assert report["fixed_point"] == report["progeny_marginal"]


def test_simulate_is_deterministic():
    argv = ["simulate", "--law", "subcritical", "--roots", "1", "--seed", "5", "--replicas", "3000", "--exact"]
    code, first = run(argv)
    assert code == 0
    assert run(argv)[1] == first
    report = json.loads(first)
    assert report["config"]["seed"] == 5
    assert sum(e["count"] for e in report["events"]) <= 3000
    assert all("probability" in e for e in report["events"])


def test_simulate_other_seed_differs():
    base = ["simulate", "--law", "subcritical", "--roots", "1", "--replicas", "2000"]
    assert run(base + ["--seed", "1"])[1] != run(base + ["--seed", "2"])[1]


def test_verify_small():
    argv = ["verify", "--cap", "3", "--replicas", "2000", "--json"]
    code, text = run(argv)
    assert code == 0
    assert json.loads(text)["all_passed"]
    code, table = run(argv[:-1])
    assert code == 0 and "PASS" in table
