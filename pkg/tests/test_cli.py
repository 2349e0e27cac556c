"""End-to-end CLI tests: subcommands, exit codes, determinism."""

import json
import math
import os

import pytest

from chisini.cli import main

MODELS = os.path.join(os.path.dirname(__file__), os.pardir, "models")


def model(name):
    return os.path.join(MODELS, name)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestValidate:
    def test_ok(self, capsys):
        code, out, _ = run(capsys, "validate", "--model", model("partition.json"))
        assert code == 0
        doc = json.loads(out)
        assert doc["utilities"] == ["entropic", "linear", "mixed", "table"]

    def test_unknown_field_rejected(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(
            json.dumps(
                {
                    "version": "chisini-model/1",
                    "space": {"outcomes": ["a"], "weights": [1.0]},
                    "surprise": 1,
                }
            )
        )
        code, _, err = run(capsys, "validate", "--model", str(bad))
        assert code == 2
        assert "surprise" in err

    def test_wrong_version(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(
            json.dumps(
                {"version": "nope/9", "space": {"outcomes": ["a"], "weights": [1.0]}}
            )
        )
        code, _, err = run(capsys, "validate", "--model", str(bad))
        assert code == 2
        assert "version" in err

    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "validate", "--model", "/nonexistent.json")
        assert code == 2


class TestCompute:
    def test_entropic_log_ratio(self, capsys):
        code, out, _ = run(
            capsys,
            "compute",
            "--model", model("entropic.json"),
            "--utility", "entropic",
            "--act", "log-two",
            "--partition", "trivial",
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["ok"] is True
        assert doc["chisini_mean"][0] == pytest.approx(
            math.log(4.0 / 3.0), abs=1e-11
        )

    def test_linear_is_conditional_mean(self, capsys):
        code, out, _ = run(
            capsys,
            "compute",
            "--model", model("partition.json"),
            "--utility", "linear",
            "--act", "payoff",
            "--partition", "weather",
        )
        assert code == 0
        doc = json.loads(out)
        # atom means under weights (.2,.3 | .1,.4)
        want_a = (0.2 * 1.0 + 0.3 * -0.5) / 0.5
        want_b = (0.1 * 2.0 + 0.4 * 0.25) / 0.5
        assert doc["atom_values"] == pytest.approx([want_a, want_b], abs=1e-12)

    def test_unknown_name_exits_2(self, capsys):
        code, _, err = run(
            capsys,
            "compute",
            "--model", model("entropic.json"),
            "--utility", "nope",
            "--act", "log-two",
            "--partition", "trivial",
        )
        assert code == 2
        assert "nope" in err

    def test_irregular_utility_exits_3(self, capsys, tmp_path):
        doc = {
            "version": "chisini-model/1",
            "space": {"outcomes": ["a", "b"], "weights": [0.5, 0.5]},
            "utilities": {
                "flat": {"knots": {"x": [0.0, 1.0, 2.0], "u": [0.0, 1.0, 1.0]}}
            },
            "partitions": {"trivial": [["a", "b"]]},
            "acts": {"f": [0.5, 1.5]},
        }
        path = tmp_path / "m.json"
        path.write_text(json.dumps(doc))
        code, _, err = run(
            capsys,
            "compute",
            "--model", str(path),
            "--utility", "flat",
            "--act", "f",
            "--partition", "trivial",
        )
        assert code == 3
        assert "regular" in err

    def test_impossible_tolerance_exits_4(self, capsys):
        code, out, _ = run(
            capsys,
            "compute",
            "--model", model("entropic.json"),
            "--utility", "entropic",
            "--act", "log-two",
            "--partition", "trivial",
            "--tol", "1e-30",
        )
        assert code == 4
        assert json.loads(out)["ok"] is False

    def test_cap_env_exits_5(self, capsys, monkeypatch):
        monkeypatch.setenv("CHISINI_CAP", "2")
        code, _, err = run(
            capsys,
            "compute",
            "--model", model("partition.json"),
            "--utility", "linear",
            "--act", "payoff",
            "--partition", "fine",
        )
        assert code == 5


class TestAudit:
    def test_expected_utility_profile(self, capsys):
        code, out, _ = run(
            capsys,
            "audit",
            "--model", model("audit_zoo.json"),
            "--functional", "eu-entropic",
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["verdicts"] == {
            "strict_monotonicity": True,
            "sure_thing": True,
            "conditionable": True,
            "agreement": True,
        }

    def test_choquet_profile(self, capsys):
        code, out, _ = run(
            capsys,
            "audit",
            "--model", model("audit_zoo.json"),
            "--functional", "choquet-squared",
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["verdicts"]["sure_thing"] is False
        assert doc["verdicts"]["conditionable"] is False
        assert doc["verdicts"]["agreement"] is True
        assert doc["checks"]["sure-thing"]["witness"]["margin"] > 1e-9

    def test_wrong_declared_profile_fails(self, capsys, tmp_path):
        doc = json.loads(
            open(model("audit_zoo.json"), encoding="utf-8").read()
        )
        doc["functionals"]["choquet-squared"]["expect"] = {
            "sure_thing": True,
            "conditionable": True,
        }
        path = tmp_path / "zoo.json"
        path.write_text(json.dumps(doc))
        code, out, _ = run(
            capsys, "audit", "--model", str(path), "--functional", "choquet-squared"
        )
        assert code == 4
        assert json.loads(out)["profile_matches"] is False


class TestTower:
    def test_nested_chain_ok(self, capsys):
        code, out, _ = run(
            capsys,
            "tower",
            "--model", model("partition.json"),
            "--utility", "mixed",
            "--chain", "fine", "weather", "coarse",
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["ok"] is True
        for act in doc["acts"]:
            assert act["composed_defect"] <= act["tolerance"]

    def test_non_nested_chain_exits_6(self, capsys):
        code, _, err = run(
            capsys,
            "tower",
            "--model", model("partition.json"),
            "--utility", "linear",
            "--chain", "coarse", "fine",
        )
        assert code == 6
        assert "coarsening" in err


class TestRepair:
    def test_null_jump_repaired(self, capsys, tmp_path):
        out_model = tmp_path / "repaired.json"
        code, out, _ = run(
            capsys,
            "repair",
            "--model", model("repair.json"),
            "--utility", "haunted",
            "--out", str(out_model),
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["changed"] == ["ghost"]
        emitted = json.loads(out_model.read_text())
        assert "haunted-repaired" in emitted["utilities"]
        # the emitted model file is itself loadable
        code2, _, _ = run(capsys, "validate", "--model", str(out_model))
        assert code2 == 0

    def test_positive_weight_jump_exits_7(self, capsys, tmp_path):
        doc = json.loads(open(model("repair.json"), encoding="utf-8").read())
        doc["space"]["weights"] = ["0.5", "0.5"]
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc))
        code, _, err = run(
            capsys,
            "repair",
            "--model", str(path),
            "--utility", "haunted",
            "--out", str(tmp_path / "out.json"),
        )
        assert code == 7
        assert "ghost" in err


class TestDeterminism:
    COMMANDS = [
        ("validate", "--model", "partition.json"),
        (
            "compute",
            "--model", "entropic.json",
            "--utility", "entropic",
            "--act", "log-two",
            "--partition", "trivial",
        ),
        ("audit", "--model", "audit_zoo.json", "--functional", "choquet-squared"),
        (
            "tower",
            "--model", "partition.json",
            "--utility", "entropic",
            "--chain", "fine", "weather",
        ),
        ("repair", "--model", "repair.json", "--utility", "haunted"),
    ]

    @pytest.mark.parametrize("argv", COMMANDS, ids=lambda a: a[0])
    def test_byte_identical_reruns(self, capsys, tmp_path, argv, monkeypatch):
        monkeypatch.chdir(tmp_path)
        full = []
        for token in argv:
            if token.endswith(".json"):
                full.append(model(token))
            else:
                full.append(token)
        if argv[0] == "repair":
            full += ["--out", str(tmp_path / "r.json")]
        outputs = []
        for _ in range(2):
            code, out, _ = run(capsys, *full)
            outputs.append((code, out))
        assert outputs[0] == outputs[1]
