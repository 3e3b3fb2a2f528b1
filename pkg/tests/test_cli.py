"""Tests for cli.py"""

import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from stratex.cli import cli

DATA = Path(__file__).parent.parent / "stratex" / "data"
PARTY = str(DATA / "party.nst")
GROCERY = str(DATA / "grocery.nst")
SCENARIO = str(DATA / "party.json")


@pytest.fixture
def runner(tmp_path, monkeypatch):
    """Runner in an empty directory with no home config."""
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("HOME", str(tmp_path / "home"))
    return CliRunner()


class TestCliBasics:
    def test_help(self, runner):
        result = runner.invoke(cli, ["--help"])
        assert result.exit_code == 0
        for command in ("parse", "explain", "simulate", "validate", "config"):
            assert command in result.output

    def test_version(self, runner):
        result = runner.invoke(cli, ["--version"])
        assert result.exit_code == 0
        assert "0.1.0" in result.output

    def test_unknown_command(self, runner):
        assert runner.invoke(cli, ["negotiate"]).exit_code == 2


class TestParseCommand:
    def test_canonical_form(self, runner):
        result = runner.invoke(cli, ["parse", PARTY])
        assert result.exit_code == 0
        assert result.stdout.startswith('acceptance template "party" {\n')
        assert "accept if U(offer) >= max(u_fixed, Q(-0.1*t + 0.64))" in result.stdout

    def test_json(self, runner):
        result = runner.invoke(cli, ["parse", PARTY, "--format", "json"])
        assert result.exit_code == 0
        data = json.loads(result.stdout)
        assert data["kind"] == "acceptance"
        assert [p["t_end"] for p in data["phases"]] == [0.0361, 1.0]

    def test_semantics(self, runner):
        result = runner.invoke(cli, ["parse", GROCERY, "--semantics"])
        assert result.exit_code == 0
        assert json.loads(result.stdout)["phases[0]"]["role"] == "TimePhase"

    def test_syntax_error_location(self, runner, tmp_path):
        bad = tmp_path / "bad.nst"
        bad.write_text('acceptance template "x" {\n  phase [0, 1] {\n    accept if U(offer) >= oops\n  }\n}\n')
        result = runner.invoke(cli, ["parse", str(bad)])
        assert result.exit_code == 2
        assert f"{bad}:3:27: expected" in result.stderr

    def test_not_utf8(self, runner, tmp_path):
        bad = tmp_path / "bad.nst"
        bad.write_bytes(b"acceptance template \xff")
        for args in (["parse", str(bad)], ["explain", str(bad), "--audience", "expert"]):
            result = runner.invoke(cli, args)
            assert result.exit_code == 2, args
            assert "not UTF-8 text" in result.stderr

    def test_structure_error(self, runner, tmp_path):
        bad = tmp_path / "gap.nst"
        bad.write_text(
            'acceptance template "x" {\n'
            "  phase [0, 0.5) { accept if U(offer) >= u_dyn }\n"
            "  phase [0.6, 1] { accept if U(offer) >= u_dyn }\n"
            "}\n"
        )
        result = runner.invoke(cli, ["parse", str(bad)])
        assert result.exit_code == 2
        assert "gap at 0.5" in result.stderr

    def test_u_fixed_from_config(self, runner, tmp_path):
        config = tmp_path / "custom.yml"
        config.write_text("explain:\n  u_fixed: 0.7\n")
        result = runner.invoke(cli, ["-c", str(config), "parse", PARTY, "--format", "json"])
        assert result.exit_code == 0
        fixed = json.loads(result.stdout)["phases"][1]["tactics"][0]
        assert 0.7 in fixed.values()


class TestExplainCommand:
    def test_expert_offline(self, runner):
        result = runner.invoke(cli, ["explain", PARTY, "--audience", "expert"])
        assert result.exit_code == 0, result.output
        assert result.stdout.startswith("Taken as a whole, the acceptance strategy")
        assert "During the initial 3.61% of the event, we evaluate" in result.stdout
        assert "From 3.61% of the event onwards, we evaluate" in result.stdout

    def test_layperson_json(self, runner):
        result = runner.invoke(
            cli, ["explain", PARTY, "--audience", "layperson", "--format", "json"]
        )
        assert result.exit_code == 0, result.output
        data = json.loads(result.stdout)
        assert data["template"] == "party"
        assert data["validation"]["valid"] is True
        assert {s["audience"] for s in data["segments"]} == {"layperson"}

    def test_passthrough_backend(self, runner):
        result = runner.invoke(
            cli, ["explain", PARTY, "--audience", "expert", "--backend", "passthrough"]
        )
        assert result.exit_code == 0, result.output
        assert "Within the time interval of t" in result.stdout

    def test_writes_report_and_out(self, runner, tmp_path):
        report, out = tmp_path / "report.json", tmp_path / "expl.json"
        result = runner.invoke(
            cli,
            ["explain", GROCERY, "--audience", "expert", "--report", str(report), "--out", str(out)],
        )
        assert result.exit_code == 0, result.output
        assert json.loads(report.read_text())["valid"] is True
        assert len(json.loads(out.read_text())["segments"]) == 4

    def test_requires_audience(self, runner):
        assert runner.invoke(cli, ["explain", PARTY]).exit_code == 2

    def test_syntax_error(self, runner, tmp_path):
        bad = tmp_path / "bad.nst"
        bad.write_text("acceptance template")
        result = runner.invoke(cli, ["explain", str(bad), "--audience", "expert"])
        assert result.exit_code == 2
        assert str(bad) in result.stderr

    def test_unreachable_remote_falls_back(self, runner, monkeypatch):
        monkeypatch.delenv("STRATEX_REMOTE_URL", raising=False)
        result = runner.invoke(
            cli, ["explain", PARTY, "--audience", "expert", "--backend", "remote"]
        )
        assert result.exit_code == 0, result.output
        assert "Within the time interval of t" in result.stdout


class TestValidateCommand:
    @pytest.fixture
    def saved(self, runner, tmp_path) -> Path:
        out = tmp_path / "expl.json"
        result = runner.invoke(cli, ["explain", PARTY, "--audience", "expert", "--out", str(out)])
        assert result.exit_code == 0, result.output
        return out

    def test_valid(self, runner, saved):
        result = runner.invoke(cli, ["validate", str(saved), "--against", PARTY])
        assert result.exit_code == 0
        assert "Explanation is valid" in result.stdout

    def test_tampered_number(self, runner, saved):
        data = json.loads(saved.read_text())
        segment = next(s for s in data["segments"] if s["phase"] == 0)
        assert "0.22" in segment["text"]
        segment["text"] = segment["text"].replace("0.22", "0.27")
        saved.write_text(json.dumps(data))
        result = runner.invoke(
            cli, ["validate", str(saved), "--against", PARTY, "--format", "json"]
        )
        assert result.exit_code == 1
        assert json.loads(result.stdout)["valid"] is False

    def test_template_mismatch(self, runner, saved):
        result = runner.invoke(cli, ["validate", str(saved), "--against", GROCERY])
        assert result.exit_code == 2
        assert "'party', not 'grocery'" in result.stderr

    def test_malformed_file(self, runner, tmp_path):
        bad = tmp_path / "expl.json"
        bad.write_text('{"segments": []}')
        result = runner.invoke(cli, ["validate", str(bad), "--against", PARTY])
        assert result.exit_code == 2
        assert "Malformed explanation" in result.stderr


class TestSimulateCommand:
    def test_text_summary(self, runner):
        result = runner.invoke(cli, ["simulate", "--scenario", SCENARIO])
        assert result.exit_code == 0, result.output
        lines = result.stdout.splitlines()
        assert json.loads(lines[0])["actor"] == "A"
        assert lines[-1].startswith("Agreement in round ")

    def test_json_is_deterministic(self, runner):
        args = ["simulate", "--scenario", SCENARIO, "--seed", "3", "--format", "json"]
        first = runner.invoke(cli, args)
        second = runner.invoke(cli, args)
        assert first.exit_code == 0, first.output
        assert first.stdout == second.stdout
        data = json.loads(first.stdout)
        assert data["agreed"] is True
        assert len(data["transcript"]) == data["actions"]

    def test_transcript_file(self, runner, tmp_path):
        out = tmp_path / "run.jsonl"
        result = runner.invoke(cli, ["simulate", "--scenario", SCENARIO, "--out", str(out)])
        assert result.exit_code == 0, result.output
        entries = [json.loads(line) for line in out.read_text().splitlines()]
        assert entries[0]["round"] == 1
        assert "Agreement in round" in result.stdout
        assert '"actor"' not in result.stdout

    def test_template_opponent(self, runner):
        result = runner.invoke(
            cli,
            ["simulate", "--scenario", SCENARIO, "--agent-b", f"template:{PARTY}", "--format", "json"],
        )
        assert result.exit_code == 0, result.output
        assert "agreed" in json.loads(result.stdout)

    def test_bidding_template_opponent_rejected(self, runner):
        bidding = str(DATA / "boulware-pareto.nst")
        result = runner.invoke(
            cli, ["simulate", "--scenario", SCENARIO, "--agent-b", f"template:{bidding}"]
        )
        assert result.exit_code == 2
        assert "acceptance template" in result.stderr

    def test_bad_agent_spec(self, runner):
        result = runner.invoke(cli, ["simulate", "--scenario", SCENARIO, "--agent-b", "greedy"])
        assert result.exit_code == 2

    def test_bad_deadline(self, runner):
        result = runner.invoke(cli, ["simulate", "--scenario", SCENARIO, "--deadline", "0"])
        assert result.exit_code == 2

    def test_invalid_scenario(self, runner, tmp_path):
        data = json.loads(Path(SCENARIO).read_text())
        data["profiles"]["a"]["weights"]["food"] = 0.15
        data["agent_a"] = {"acceptance": PARTY}
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(data))
        result = runner.invoke(cli, ["simulate", "--scenario", str(path)])
        assert result.exit_code == 2
        assert "profiles.a.weights" in result.stderr

    def test_malformed_scenario_shape(self, runner, tmp_path):
        data = json.loads(Path(SCENARIO).read_text())
        data["boulware"] = [1]
        data["agent_a"] = {"acceptance": PARTY}
        path = tmp_path / "shape.json"
        path.write_text(json.dumps(data))
        result = runner.invoke(cli, ["simulate", "--scenario", str(path)])
        assert result.exit_code == 2
        assert "boulware: expected an object" in result.stderr


class TestConfigCommand:
    def test_show_without_config(self, runner):
        result = runner.invoke(cli, ["config", "show"])
        assert result.exit_code == 0
        assert "No configuration loaded" in result.stdout

    def test_show_masks_secrets(self, runner, tmp_path):
        (tmp_path / "stratex.yml").write_text(
            "backend: remote\nremote:\n  url: http://llm.local/v1\n  api_key: sk-abcdef1234\n"
        )
        result = runner.invoke(cli, ["config", "show"])
        assert result.exit_code == 0
        assert "***1234" in result.stdout
        assert "sk-abcdef1234" not in result.stdout

    def test_show_reveal(self, runner, tmp_path):
        (tmp_path / "stratex.yml").write_text("remote:\n  api_key: sk-abcdef1234\n")
        result = runner.invoke(cli, ["config", "show", "--reveal"])
        assert "sk-abcdef1234" in result.stdout

    def test_invalid_config(self, runner, tmp_path):
        (tmp_path / "stratex.yml").write_text("backend: gpt\n")
        result = runner.invoke(cli, ["parse", PARTY])
        assert result.exit_code == 2
        assert "Invalid configuration" in result.stderr
