import os
import stat

import pytest

from ltlsmith import (
    EventGraph,
    InvalidConfigError,
    NuSmvNotFoundError,
    NuSmvRunError,
    UnknownAtomError,
    emit_smv,
    parse_formula,
    run_nusmv,
)
from ltlsmith.smv import SmvDocument, ltlspec_expression
from conftest import GOLDEN_GRAPH, GOLDEN_SMV_PER_EDGE, strip_trailing

GOLDEN_FORMULA = parse_formula("(event1 -> (G (F event2)))")


class TestEmit:
    def test_per_edge_style_reproduces_golden_text(self):
        document = emit_smv(GOLDEN_GRAPH, GOLDEN_FORMULA, style="paper-literal")
        assert strip_trailing(document.text) == strip_trailing(GOLDEN_SMV_PER_EDGE)

    def test_sets_style_merges_arms(self):
        document = emit_smv(GOLDEN_GRAPH, GOLDEN_FORMULA, style="sets")
        assert "        state = event1 : {event2, event3};" in document.text
        assert "        state = event2 : event2;" in document.text
        assert "        state = event3 : {event1, event2};" in document.text
        arms = [line for line in document.text.splitlines() if "state = " in line]
        assert len(arms) == 3  # one arm per state, ordered by source
        assert document.text.count("MODULE main") == 1

    def test_smallest_instance_ltlspec(self):
        graph = EventGraph(n=2, edges=frozenset({(1, 2)}), initial=1)
        document = emit_smv(graph, parse_formula("event1"))
        assert document.text.splitlines()[-1] == "LTLSPEC (state=event1)"

    def test_ltlspec_expression_parenthesization(self):
        assert ltlspec_expression(GOLDEN_FORMULA) == (
            "((state=event1) -> (G (F (state=event2))))"
        )

    def test_deterministic_bytes(self):
        first = emit_smv(GOLDEN_GRAPH, GOLDEN_FORMULA, style="sets")
        second = emit_smv(GOLDEN_GRAPH, GOLDEN_FORMULA, style="sets")
        assert first.text == second.text

    def test_unknown_atom(self):
        with pytest.raises(UnknownAtomError):
            emit_smv(GOLDEN_GRAPH, parse_formula("event7"))

    def test_unknown_style(self):
        with pytest.raises(InvalidConfigError):
            emit_smv(GOLDEN_GRAPH, GOLDEN_FORMULA, style="compact")


def fake_nusmv(tmp_path, body: str) -> str:
    script = tmp_path / "fake-nusmv"
    script.write_text("#!/bin/sh\n" + body)
    script.chmod(script.stat().st_mode | stat.S_IXUSR)
    return str(script)


class TestRunNusmv:
    DOC = SmvDocument(text="MODULE main\n", style="sets")

    def test_missing_binary(self):
        with pytest.raises(NuSmvNotFoundError):
            run_nusmv(self.DOC, "/nonexistent/NuSMV")

    def test_parses_true_verdict(self, tmp_path):
        path = fake_nusmv(tmp_path, 'echo "-- specification (G x)  is true"\n')
        assert run_nusmv(self.DOC, path) is True

    def test_parses_false_verdict_and_ignores_trace(self, tmp_path):
        path = fake_nusmv(
            tmp_path,
            'echo "-- specification (F x)  is false"\n'
            'echo "-- as demonstrated by the following execution sequence"\n',
        )
        assert run_nusmv(self.DOC, path) is False

    def test_nonzero_exit(self, tmp_path):
        path = fake_nusmv(tmp_path, 'echo "boom" >&2\nexit 3\n')
        with pytest.raises(NuSmvRunError, match="exited with 3"):
            run_nusmv(self.DOC, path)

    def test_unparseable_output(self, tmp_path):
        path = fake_nusmv(tmp_path, 'echo "hello"\n')
        with pytest.raises(NuSmvRunError, match="no specification verdict"):
            run_nusmv(self.DOC, path)

    def test_receives_document_text(self, tmp_path):
        sink = tmp_path / "seen.smv"
        path = fake_nusmv(
            tmp_path, f'cat "$1" > {sink}\necho "-- specification x is true"\n'
        )
        document = emit_smv(GOLDEN_GRAPH, GOLDEN_FORMULA)
        assert run_nusmv(document, path) is True
        assert sink.read_text() == document.text
