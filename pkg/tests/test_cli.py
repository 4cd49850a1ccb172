import json
import stat

import pytest

from ltlsmith import read_dataset, read_records
from ltlsmith.cli import main
from conftest import (
    GOLDEN_GRAPH_JSON,
    GOLDEN_PROMPT,
    GOLDEN_SMV_PER_EDGE,
    answer_from_labels,
    chat_server,
    strip_trailing,
)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestGenerate:
    def test_writes_balanced_file(self, capsys, tmp_path):
        out = tmp_path / "d.jsonl"
        code, _, err = run_cli(
            capsys, "generate", "--events", "3", "--operators", "3",
            "--count", "10", "--seed", "1", "--balanced", "--out", str(out),
        )
        assert code == 0
        problems = read_dataset(out)
        assert len(problems) == 10
        assert sum(p.label for p in problems) == 5
        assert "wrote 10 problems" in err

    def test_json_summary(self, capsys, tmp_path):
        out = tmp_path / "d.jsonl"
        code, stdout, _ = run_cli(
            capsys, "generate", "--events", "2", "--operators", "1",
            "--count", "4", "--seed", "2", "--balanced", "--out", str(out),
            "--json", "--quiet",
        )
        assert code == 0
        summary = json.loads(stdout)
        assert summary["written"] == 4
        assert summary["true"] == 2

    def test_domain_error_exits_one(self, capsys, tmp_path):
        code, _, err = run_cli(
            capsys, "generate", "--events", "1", "--operators", "3",
            "--count", "4", "--seed", "1", "--out", str(tmp_path / "x.jsonl"),
        )
        assert code == 1
        assert err.startswith("error: invalid-config:")


class TestCheck:
    def test_false_with_counterexample(self, capsys):
        code, out, _ = run_cli(
            capsys, "check", "--formula", "(F event2)", "--graph", GOLDEN_GRAPH_JSON
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "false"
        assert lines[1] == "counterexample: stem=event3 loop=event1,event3"

    def test_true_verdict(self, capsys):
        code, out, _ = run_cli(
            capsys, "check", "--formula", "(event1 -> (G (F event2)))",
            "--graph", GOLDEN_GRAPH_JSON,
        )
        assert code == 0
        assert out.strip() == "true"

    def test_json_output(self, capsys):
        code, out, _ = run_cli(
            capsys, "check", "--json", "--formula", "(F event2)",
            "--graph", GOLDEN_GRAPH_JSON,
        )
        assert code == 0
        data = json.loads(out)
        assert data == {
            "holds": False, "counterexample": {"stem": [3], "loop": [1, 3]}
        }

    def test_syntax_error_exits_one(self, capsys):
        code, _, err = run_cli(
            capsys, "check", "--formula", "(event1 -> ", "--graph", GOLDEN_GRAPH_JSON
        )
        assert code == 1
        assert err.startswith("error: syntax:")

    def test_unknown_atom_exits_one(self, capsys):
        code, _, err = run_cli(
            capsys, "check", "--formula", "(F event9)", "--graph", GOLDEN_GRAPH_JSON
        )
        assert code == 1
        assert err.startswith("error: unknown-atom:")

    def test_bad_graph_json_exits_one(self, capsys):
        code, _, err = run_cli(
            capsys, "check", "--formula", "event1", "--graph", "{not json"
        )
        assert code == 1
        assert err.startswith("error:")


class TestEmitNusmv:
    def test_golden_document_to_stdout(self, capsys):
        code, out, _ = run_cli(
            capsys, "emit-nusmv", "--formula", "(event1 -> (G (F event2)))",
            "--graph", GOLDEN_GRAPH_JSON, "--nusmv-style", "paper-literal",
        )
        assert code == 0
        assert strip_trailing(out) == strip_trailing(GOLDEN_SMV_PER_EDGE)

    def test_write_to_file(self, capsys, tmp_path):
        out_path = tmp_path / "m.smv"
        code, _, _ = run_cli(
            capsys, "emit-nusmv", "--formula", "event1",
            "--graph", '{"n":2,"initial":1,"edges":[[1,2]]}',
            "--out", str(out_path), "--quiet",
        )
        assert code == 0
        assert out_path.read_text().endswith("LTLSPEC (state=event1)\n")

    def test_json_output(self, capsys):
        code, out, _ = run_cli(
            capsys, "emit-nusmv", "--json", "--formula", "event1",
            "--graph", '{"n":2,"initial":1,"edges":[[1,2]]}',
        )
        assert code == 0
        data = json.loads(out)
        assert data["style"] == "sets"
        assert data["text"].startswith("MODULE main\n")


class TestRender:
    def test_golden_prompt(self, capsys):
        code, out, _ = run_cli(
            capsys, "render", "--formula", "(event1 -> (G (F event2)))",
            "--graph", GOLDEN_GRAPH_JSON,
        )
        assert code == 0
        assert out.rstrip("\n") == GOLDEN_PROMPT

    def test_json_fields(self, capsys):
        code, out, _ = run_cli(
            capsys, "render", "--json", "--formula", "(F event1)",
            "--graph", '{"n":2,"initial":2,"edges":[[2,1]]}',
        )
        assert code == 0
        data = json.loads(out)
        assert set(data) == {"context", "hypothesis", "prompt"}


class TestCrosscheck:
    def test_missing_binary_exits_two(self, capsys, tmp_path):
        out = tmp_path / "d.jsonl"
        run_cli(capsys, "generate", "--events", "2", "--operators", "1",
                "--count", "2", "--seed", "3", "--out", str(out), "--quiet")
        code, _, err = run_cli(
            capsys, "crosscheck", "--dataset", str(out),
            "--nusmv-path", "/no/such/NuSMV",
        )
        assert code == 2
        assert err.startswith("error: nusmv-not-found:")

    def test_fake_binary_paths(self, capsys, tmp_path):
        dataset = tmp_path / "d.jsonl"
        run_cli(capsys, "generate", "--events", "3", "--operators", "2",
                "--count", "6", "--seed", "4", "--balanced",
                "--out", str(dataset), "--quiet")
        script = tmp_path / "fake-nusmv"
        script.write_text('#!/bin/sh\necho "-- specification x is true"\n')
        script.chmod(script.stat().st_mode | stat.S_IXUSR)
        code, out, _ = run_cli(
            capsys, "crosscheck", "--dataset", str(dataset),
            "--nusmv-path", str(script), "--json", "--quiet",
        )
        data = json.loads(out)
        # an always-true stub must disagree exactly on the false-labeled half
        assert data["checked"] == 6
        assert data["agreements"] == 3
        assert len(data["disagreements"]) == 3
        assert code == 1


class TestEvaluateAndReport:
    def test_end_to_end_against_live_endpoint(self, capsys, tmp_path):
        dataset = tmp_path / "d.jsonl"
        results = tmp_path / "r.jsonl"
        run_cli(capsys, "generate", "--events", "2", "--operators", "2",
                "--count", "8", "--seed", "5", "--balanced",
                "--out", str(dataset), "--quiet")
        answers = answer_from_labels(read_dataset(dataset))

        def respond(body):
            return 200, answers[body["messages"][0]["content"]]

        with chat_server(respond) as base_url:
            code, out, _ = run_cli(
                capsys, "evaluate", "--dataset", str(dataset),
                "--base-url", base_url, "--model", "oracle",
                "--out", str(results), "--json", "--quiet",
            )
        assert code == 0
        assert json.loads(out)["accuracy"] == 1.0
        records = read_records(results)
        assert len(records) == 8 and all(r.correct for r in records)

        code, out, _ = run_cli(capsys, "report", "--results", str(results),
                               "--model", "oracle")
        assert code == 0
        lines = out.splitlines()
        assert lines[0].split() == ["model", "accuracy", "f1", "auc", "total", "invalid"]
        assert lines[1].split() == ["oracle", "1.000", "1.000", "1.000", "8", "0"]

        code, out, _ = run_cli(capsys, "report", "--results", str(results),
                               "--model", "oracle", "--json")
        data = json.loads(out)
        assert data["accuracy"] == 1.0
        assert data["confusion"] == {"tp": 4, "fp": 0, "fn": 0, "tn": 4}


class TestSweepCommand:
    def test_sweep_writes_csv(self, capsys, tmp_path):
        from ltlsmith import build_dataset, sweep_dataset_spec

        answers = {}
        for value in (1, 2):
            spec = sweep_dataset_spec("operators", 2, value, 6, master_seed=8)
            answers.update(answer_from_labels(build_dataset(spec)))

        def respond(body):
            return 200, answers[body["messages"][0]["content"]]

        csv_path = tmp_path / "curve.csv"
        with chat_server(respond) as base_url:
            code, out, _ = run_cli(
                capsys, "sweep", "--axis", "operators", "--fixed", "2",
                "--values", "1,2", "--count", "6", "--seed", "8",
                "--base-url", base_url, "--model", "oracle",
                "--out-csv", str(csv_path), "--json", "--quiet",
            )
        assert code == 0
        data = json.loads(out)
        assert [cell["accuracy"] for cell in data["cells"]] == [1.0, 1.0]
        lines = csv_path.read_text().strip().splitlines()
        assert lines[0] == "operators,accuracy,f1,auc,n_total,n_invalid"
        assert len(lines) == 3
