import json
import math

import numpy as np
import pytest

from infobounds import InvalidArgument
from infobounds.cli import main, to_unit
from infobounds.io import dumps, load_code, load_joint, load_pmf, load_rule, parse_number, rule_to_json
from infobounds.listdecoding import FixedListRule, VariableListRule
from infobounds.worked_example import example_joint_json, example_rule_json


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj) if not isinstance(obj, str) else obj)
    return str(path)


def run(capsys, *argv):
    status = main(list(argv))
    out = capsys.readouterr()
    return status, out.out, out.err


def test_parse_number():
    assert parse_number([1, 24]) == 1 / 24
    assert parse_number(0.5) == 0.5
    for bad in ([1, 0], [1.0, 2], True, "0.5", [1, 2, 3]):
        with pytest.raises(InvalidArgument):
            parse_number(bad)


def test_load_pmf_rationals():
    P = load_pmf({"labels": ["a", "b", "c"], "p": [[1, 3], [1, 3], [1, 3]]})
    assert P.labels == ("a", "b", "c")
    np.testing.assert_allclose(P.mass, [1 / 3] * 3)
    with pytest.raises(InvalidArgument):
        load_pmf({"labels": ["a"], "q": [1]})
    with pytest.raises(InvalidArgument):
        load_pmf({"p": [0.5, 0.6]})


def test_load_file_errors(tmp_path):
    with pytest.raises(InvalidArgument):
        load_pmf(str(tmp_path / "missing.json"))
    with pytest.raises(InvalidArgument):
        load_pmf(write(tmp_path, "bad.json", "{not json"))
    with pytest.raises(InvalidArgument):
        load_pmf(write(tmp_path, "list.json", "[1, 2]"))


def test_load_joint_and_rule(J_example):
    J = load_joint(example_joint_json())
    np.testing.assert_allclose(J.mass, J_example.mass, atol=0)
    rule = load_rule(example_rule_json(), J)
    assert isinstance(rule, VariableListRule) and not isinstance(rule, FixedListRule)
    assert rule.lists == (frozenset({0, 1, 2}), frozenset({3, 4}))
    assert load_rule(rule_to_json(rule, J), J) == rule
    fixed = load_rule({"lists": {"0": ["0", "1"], "1": ["3", "4"]}}, J)
    assert isinstance(fixed, FixedListRule) and fixed.L == 2


def test_load_rule_errors(J_example):
    with pytest.raises(InvalidArgument):
        load_rule({"lists": {"0": ["0"]}}, J_example)
    with pytest.raises(InvalidArgument):
        load_rule({"lists": {"0": ["0"], "1": ["9"]}}, J_example)
    with pytest.raises(InvalidArgument):
        load_rule({"lists": {"0": ["0"], "1": ["1"], "2": ["2"]}}, J_example)
    with pytest.raises(InvalidArgument):
        load_joint({"pxy": [[0.5, 0.1], [0.4]]})


def test_load_code():
    P = load_pmf({"labels": ["a", "b", "c"], "p": [0.5, 0.25, 0.25]})
    code = load_code({"D": 2, "lengths": {"c": 2, "a": 1, "b": 2}}, P)
    assert code.lengths == (1, 2, 2)
    with pytest.raises(InvalidArgument):
        load_code({"D": 2, "lengths": {"a": 1, "b": 2}}, P)
    with pytest.raises(InvalidArgument):
        load_code({"D": 2.0, "lengths": {"a": 1, "b": 2, "c": 2}}, P)


def test_dumps_infinity():
    text = dumps({"a": math.inf, "b": np.float64(0.5), "c": (1, 2)})
    assert json.loads(text) == {"a": "inf", "b": 0.5, "c": [1, 2]}


def test_to_unit():
    assert to_unit(math.log(2), "bits") == pytest.approx(1.0)
    assert to_unit(math.log(9), "logD", 3) == pytest.approx(2.0)
    with pytest.raises(InvalidArgument):
        to_unit(1.0, "hartley")


@pytest.fixture
def example_files(tmp_path):
    return write(tmp_path, "joint.json", example_joint_json()), write(tmp_path, "rule.json", example_rule_json())


def test_cli_listbound_all(capsys, example_files):
    joint, rule = example_files
    status, out, _ = run(capsys, "listbound", "--joint", joint, "--rule", rule, "--all", "--gamma", "1.25")
    assert status == 0
    rep = json.loads(out)
    assert rep["error_prob"] == pytest.approx(0.25, abs=1e-12)
    b = rep["bounds"]
    assert b["egamma_optimized"]["raw"] == pytest.approx(0.25, abs=1e-12)
    assert b["egamma"]["raw"] == pytest.approx(0.25, abs=1e-12)
    assert b["fano_variable_list"]["raw"] == pytest.approx(0.1206, abs=5e-4)
    assert b["fano_max_list"]["raw"] == pytest.approx(0.0939, abs=5e-4)
    assert all(v["sound"] for v in b.values())
    assert rep["equality_witness"]["satisfied"]
    assert rep["conditional_entropy"] == pytest.approx(2.1038, abs=5e-4)


def test_cli_listbound_fixed_rule_runs_fano_family(capsys, tmp_path):
    joint = write(tmp_path, "joint.json", example_joint_json())
    rule = write(tmp_path, "rule.json", {"lists": {"0": ["0", "1"], "1": ["3", "4"]}})
    status, out, _ = run(capsys, "listbound", "--joint", joint, "--rule", rule, "--all")
    assert status == 0
    b = json.loads(out)["bounds"]
    for key in ("gen_fano[kl]", "gen_fano[tv]", "gen_fano[chi2]", "fano_fixed_list", "refined_a[kl]", "refined_b[chi2]"):
        assert b[key]["sound"], key
    assert b["gen_fano[kl]"]["raw"] == pytest.approx(b["fano_fixed_list"]["raw"], abs=1e-7)
    assert b["refined_b[kl]"]["correction_nonnegative"] is False


def test_cli_units_differ_by_ln2(capsys, example_files):
    joint, rule = example_files
    _, bits, _ = run(capsys, "listbound", "--joint", joint, "--rule", rule)
    _, nats, _ = run(capsys, "listbound", "--joint", joint, "--rule", rule, "--unit", "nats")
    hb = json.loads(bits)["conditional_entropy"]
    hn = json.loads(nats)["conditional_entropy"]
    assert abs(hb * math.log(2) - hn) <= 1e-12


def test_cli_divergence(capsys, tmp_path):
    a = write(tmp_path, "a.json", {"labels": ["x", "y"], "p": [[1, 3], [2, 3]]})
    b = write(tmp_path, "b.json", {"labels": ["x", "y"], "p": [0.5, 0.5]})
    status, out, _ = run(capsys, "divergence", "--p", a, "--q", a, "--f", "kl")
    assert status == 0 and json.loads(out)["divergences"]["kl"] == 0.0
    status, out, _ = run(capsys, "divergence", "--p", a, "--q", b, "--gamma", "1.2")
    vals = json.loads(out)["divergences"]
    assert set(vals) == {"kl", "tv", "chi2", "egamma:1.2"}
    assert vals["tv"] == pytest.approx(1 / 6)
    assert vals["egamma:1.2"] == pytest.approx(2 / 3 - 0.6)


def test_cli_invalid_input_exit_1(capsys, tmp_path):
    a = write(tmp_path, "a.json", {"p": [0.5, 0.6]})
    status, _, err = run(capsys, "divergence", "--p", a, "--q", a)
    assert status == 1 and "invalid input" in err
    status, _, _ = run(capsys, "fuzz", "--trials", "0")
    assert status == 1


def test_cli_rejects_unusable_codes(capsys, tmp_path):
    pmf = write(tmp_path, "p.json", {"p": [1.0, 0.0]})
    status, _, _ = run(capsys, "campbell", "--pmf", pmf)
    assert status == 1
    pmf = write(tmp_path, "u.json", {"p": [0.25, 0.25, 0.25, 0.25]})
    code = write(tmp_path, "c.json", {"D": 2, "lengths": {"0": 1, "1": 1, "2": 1, "3": 1}})
    status, _, _ = run(capsys, "campbell", "--pmf", pmf, "--code", code)
    assert status == 1


def test_cli_enumeration_limit_exit_3(capsys, tmp_path):
    pmf = write(tmp_path, "p.json", {"p": [0.1] * 10})
    cmap = write(tmp_path, "m.json", {"map": {str(i): str(i % 2) for i in range(10)}})
    status, _, err = run(capsys, "cluster", "--pmf", pmf, "--map", cmap, "--m", "2", "--oracle")
    assert status == 3 and "enumeration limit" in err


def test_cli_not_applicable_exit_2(capsys, monkeypatch):
    from infobounds import cli

    def refuse(args):
        raise cli.NotApplicable("no curvature floor")

    monkeypatch.setattr(cli, "cmd_divergence", refuse)
    status, _, err = run(capsys, "divergence", "--p", "x", "--q", "x")
    assert status == 2 and "no curvature floor" in err


def test_cli_campbell(capsys, tmp_path):
    pmf = write(tmp_path, "p.json", {"p": [0.5, 0.25, 0.125, 0.125]})
    status, out, _ = run(capsys, "campbell", "--pmf", pmf, "--rho", "0.25,1,4", "--construct", "huffman")
    assert status == 0
    rows = json.loads(out)["reports"]
    assert [r["rho"] for r in rows] == [0.25, 1.0, 4.0]
    assert all(r["converse_holds"] and r["kraft_sum"] <= 1 for r in rows)


def test_cli_cluster(capsys, tmp_path):
    pmf = write(tmp_path, "p.json", {"p": [0.25, 0.25, 0.25, 0.25]})
    cmap = write(tmp_path, "m.json", {"map": {"0": "a", "1": "a", "2": "b", "3": "b"}})
    status, out, _ = run(capsys, "cluster", "--pmf", pmf, "--map", cmap, "--m", "2", "--oracle")
    assert status == 0
    rep = json.loads(out)
    assert rep["delta"] == pytest.approx(0.0, abs=1e-12)
    assert rep["in_band"] and rep["oracle_max_entropy"] == pytest.approx(1.0)


def test_cli_reproduce(capsys):
    status, out, _ = run(capsys, "reproduce-paper")
    rep = json.loads(out)
    assert status == 0 and rep["all_passed"]
    assert len(rep["checks"]) >= 10


def test_cli_out_file_and_summary(capsys, tmp_path, example_files):
    joint, rule = example_files
    dest = tmp_path / "report.json"
    status, out, _ = run(capsys, "listbound", "--joint", joint, "--rule", rule, "--out", str(dest))
    assert status == 0
    assert json.loads(dest.read_text())["error_prob"] == pytest.approx(0.25)
    assert "error_prob = 0.25" in out


def test_fuzz_is_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["fuzz", "--trials", "40", "--seed", "7", "--out", str(a)]) == 0
    assert main(["fuzz", "--trials", "40", "--seed", "7", "--out", str(b)]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()
    rep = json.loads(a.read_text())
    assert rep["total_violations"] == 0
    c = tmp_path / "c.json"
    main(["fuzz", "--trials", "40", "--seed", "8", "--out", str(c)])
    assert c.read_bytes() != a.read_bytes()
