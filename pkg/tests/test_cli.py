import json

import pytest

from chainlogic import corpus, protocol_to_dict, script_to_dict
from chainlogic.cli import run_cli

from conftest import gateway_countermodel


@pytest.fixture
def protocol_file(tmp_path):
    path = tmp_path / "countermodel.json"
    path.write_text(json.dumps(protocol_to_dict(gateway_countermodel())), encoding="utf-8")
    return str(path)


@pytest.fixture
def prop4_file(tmp_path):
    path = tmp_path / "prop4.json"
    path.write_text(json.dumps(script_to_dict(corpus()["prop4"])), encoding="utf-8")
    return str(path)


@pytest.fixture
def broken_script_file(tmp_path):
    doc = script_to_dict(corpus()["prop1"])
    doc["lines"][0]["rule"]["k"] = 1  # instance no longer matches the formula
    path = tmp_path / "broken.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)


def run(capsys, argv):
    code = run_cli(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, argv):
    code, out, err = run(capsys, argv + ["--json"])
    return code, json.loads(out)


def test_scope_prints_channel_set(capsys):
    code, out, _ = run(capsys, ["scope", "[2]([3]p@3 -> [4]q@4)"])
    assert code == 0
    assert out.strip() == "{2}"


def test_scope_empty_and_multi(capsys):
    code, out, _ = run(capsys, ["scope", "false"])
    assert (code, out.strip()) == (0, "{}")
    code, out, _ = run(capsys, ["scope", "[1]p@1 -> [2]q@2"])
    assert (code, out.strip()) == (0, "{1, 2}")


def test_scope_parse_error_exits_2(capsys):
    code, _, err = run(capsys, ["scope", "[x]p"])
    assert code == 2
    assert "offset 1" in err


def test_eval_true_and_false(capsys, protocol_file):
    base = ["eval", "--protocol", protocol_file, "--run", "u,x,z"]
    code, out, _ = run(capsys, base + ["--formula", "[1]p@0"])
    assert (code, out.strip()) == (0, "true")
    code, out, _ = run(capsys, base + ["--formula", "[2]p@0"])
    assert (code, out.strip()) == (1, "false")


def test_eval_rejects_non_run(capsys, protocol_file):
    code, _, err = run(
        capsys,
        ["eval", "--protocol", protocol_file, "--run", "u,y,z", "--formula", "p@0"],
    )
    assert code == 2
    assert "not a run" in err


def test_eval_rejects_unknown_value(capsys, protocol_file):
    code, _, err = run(
        capsys,
        ["eval", "--protocol", protocol_file, "--run", "u,x,BAD", "--formula", "p@0"],
    )
    assert code == 2


def test_valid_and_counterexample(capsys, protocol_file):
    code, out, _ = run(
        capsys, ["valid", "--protocol", protocol_file, "--formula", "p@0 | !p@0"]
    )
    assert (code, out.strip()) == (0, "valid")
    code, out, _ = run(
        capsys,
        ["valid", "--protocol", protocol_file, "--formula", "[1]p@0 -> [2]p@0"],
    )
    assert code == 1
    assert "counterexample: u,x,z" in out


def test_prove_accepted(capsys, prop4_file):
    code, out, _ = run(capsys, ["prove", "--script", prop4_file])
    assert (code, out.strip()) == (0, "accepted")


def test_prove_rejected(capsys, broken_script_file):
    code, out, _ = run(capsys, ["prove", "--script", broken_script_file])
    assert code == 1
    assert out.startswith("rejected at line 1")


def test_prove_malformed_json_exits_2(capsys, tmp_path):
    path = tmp_path / "garbage.json"
    path.write_text("{not json", encoding="utf-8")
    code, _, err = run(capsys, ["prove", "--script", str(path)])
    assert code == 2
    code, _, err = run(capsys, ["prove", "--script", str(tmp_path / "absent.json")])
    assert code == 2


def test_protocol_format_error_exits_2(capsys, tmp_path):
    doc = protocol_to_dict(gateway_countermodel())
    doc["surprise"] = True
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    code, _, err = run(
        capsys, ["eval", "--protocol", str(path), "--run", "u,x,z", "--formula", "p@0"]
    )
    assert code == 2
    assert "unknown keys" in err


def test_falsify_found(capsys):
    code, out, _ = run(
        capsys,
        ["falsify", "--formula", "[1]p@0 -> [2]p@0", "--channels", "3", "--max-values", "2"],
    )
    assert code == 1
    assert "countermodel found" in out
    assert "run:" in out


def test_falsify_not_found(capsys):
    code, out, _ = run(
        capsys,
        [
            "falsify", "--formula", "[0]p@1 -> [1]p@1",
            "--channels", "2", "--max-values", "2",
            "--seed", "3", "--samples", "60", "--budget", "60",
        ],
    )
    assert code == 0
    assert "no countermodel" in out
    assert "proves nothing" in out


def test_falsify_seed_without_samples_exits_2(capsys):
    code, _, err = run(
        capsys,
        ["falsify", "--formula", "p@0", "--channels", "1", "--max-values", "2", "--seed", "1"],
    )
    assert code == 2


def test_telephone_eval(capsys):
    code, out, _ = run(
        capsys,
        [
            "telephone", "--len", "4", "--alphabet", "latin", "--chain", "3",
            "eval", "--run", "byte,bite,cite", "--formula", "[0]!(eq_book@2)",
        ],
    )
    assert (code, out.strip()) == (0, "true")


def test_telephone_valid_small(capsys):
    code, out, _ = run(
        capsys,
        [
            "telephone", "--len", "1", "--alphabet", "ab", "--chain", "2",
            "valid", "--formula", "eq_a@0 | !eq_a@0",
        ],
    )
    assert (code, out.strip()) == (0, "valid")


def test_telephone_counterexample(capsys):
    code, out, _ = run(
        capsys,
        [
            "telephone", "--len", "1", "--alphabet", "ab", "--chain", "2",
            "counterexample", "--formula", "[0]eq_a@0",
        ],
    )
    assert code == 1
    assert out.strip() == "b,a"


def test_usage_error_exits_2(capsys):
    assert run_cli(["frobnicate"]) == 2
    assert run_cli([]) == 2


def test_json_outputs_match_text_verdicts(capsys, protocol_file, prop4_file, broken_script_file):
    code, doc = run_json(capsys, ["scope", "[2]([3]p@3 -> [4]q@4)"])
    assert (code, doc["scope"]) == (0, [2])

    base = ["eval", "--protocol", protocol_file, "--run", "u,x,z"]
    code, doc = run_json(capsys, base + ["--formula", "[1]p@0"])
    assert (code, doc["value"]) == (0, True)
    code, doc = run_json(capsys, base + ["--formula", "[2]p@0"])
    assert (code, doc["value"]) == (1, False)

    code, doc = run_json(
        capsys, ["valid", "--protocol", protocol_file, "--formula", "[1]p@0 -> [2]p@0"]
    )
    assert (code, doc["valid"], doc["counterexample"]) == (1, False, ["u", "x", "z"])

    code, doc = run_json(capsys, ["prove", "--script", prop4_file])
    assert (code, doc["accepted"]) == (0, True)
    code, doc = run_json(capsys, ["prove", "--script", broken_script_file])
    assert (code, doc["accepted"], doc["line"]) == (1, False, 1)

    code, doc = run_json(
        capsys,
        ["falsify", "--formula", "[1]p@0 -> [2]p@0", "--channels", "3", "--max-values", "2"],
    )
    assert (code, doc["found"]) == (1, True)
    assert doc["run"]
    assert doc["protocol"]["window"] == [0, 2]

    code, doc = run_json(
        capsys,
        [
            "telephone", "--len", "4", "--alphabet", "latin", "--chain", "3",
            "eval", "--run", "toon,torn,tort", "--formula", "[0]!(eq_book@2)",
        ],
    )
    assert (code, doc["value"]) == (1, False)
