from __future__ import annotations

import json
import random
import threading
from contextlib import contextmanager
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest
from hypothesis import settings

from ltlsmith import (
    EventGraph,
    Formula,
    FormulaGenConfig,
    KripkeStructure,
    generate_formulas,
    generate_graph,
    totalize,
)

settings.register_profile("repo", derandomize=True, deadline=None)
settings.load_profile("repo")


GOLDEN_GRAPH = EventGraph(
    n=3, edges=frozenset({(1, 2), (1, 3), (3, 1), (3, 2)}), initial=3
)
GOLDEN_GRAPH_JSON = '{"n":3,"initial":3,"edges":[[1,2],[1,3],[3,1],[3,2]]}'
GOLDEN_FORMULA_TEXT = "(event1 -> (G (F event2)))"

GOLDEN_SMV_PER_EDGE = """MODULE main
VAR
    state : {event1, event2, event3};
ASSIGN
    init(state) := event3;
    next(state) := case
        state = event1 : event2;
        state = event1 : event3;
        state = event3 : event1;
        state = event3 : event2;
        state = event2 : event2;
    esac;
LTLSPEC ((state=event1) -> (G (F (state=event2))))
"""

GOLDEN_CONTEXT = (
    "Initially, event3 happened. After event1, event2 can happen. "
    "After event1, event3 can happen. After event2, no other events can happen. "
    "After event3, event1 can happen. After event3, event2 can happen."
)

GOLDEN_HYPOTHESIS = """C1: Event2 will happen eventually.
C2: C1 will always be true at any future time.
C3: That event1 happens implies that C2 holds.

C3 is True or False? Answer with "True" or "False" directly:"""

GOLDEN_PROMPT = (
    "=== Context ===\n\n" + GOLDEN_CONTEXT + "\n\n=== Hypothesis ===\n\n" + GOLDEN_HYPOTHESIS
)


def strip_trailing(text: str) -> str:
    return "\n".join(line.rstrip() for line in text.splitlines())


def random_instance(rng: random.Random, max_n: int = 3, max_m: int = 3):
    """Random (kripke, formula) pair at small scales."""
    n = rng.randint(2, max_n)
    m = rng.randint(1, max_m)
    graph = generate_graph(n, 0.5, seed=rng.randrange(2**63))
    formula = generate_formulas(
        FormulaGenConfig(tuple(range(1, n + 1)), m, 1, seed=rng.randrange(2**63))
    )[0]
    return totalize(graph), formula


def random_deterministic_kripke(rng: random.Random, n: int) -> KripkeStructure:
    transition = {i: (rng.randint(1, n),) for i in range(1, n + 1)}
    return KripkeStructure(n=n, initial=rng.randint(1, n), transition=transition)


def unique_path_lasso(kripke: KripkeStructure) -> tuple[list[int], list[int]]:
    """Stem and loop of the single path of a deterministic structure."""
    seen: dict[int, int] = {}
    path = [kripke.initial]
    while path[-1] not in seen:
        seen[path[-1]] = len(path) - 1
        path.append(kripke.successors(path[-1])[0])
    split = seen[path[-1]]
    return path[:split], path[split:-1]


class _ChatHandler(BaseHTTPRequestHandler):
    def do_POST(self):  # noqa: N802 (http.server API)
        if self.path != "/chat/completions":
            self.send_error(404)
            return
        length = int(self.headers.get("Content-Length", "0"))
        body = json.loads(self.rfile.read(length).decode("utf-8"))
        status, text = self.server.respond(body)  # type: ignore[attr-defined]
        if status != 200:
            self.send_error(status)
            return
        raw = json.dumps({"choices": [{"message": {"content": text}}]}).encode("utf-8")
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(raw)))
        self.end_headers()
        self.wfile.write(raw)

    def log_message(self, *args):
        pass


@contextmanager
def chat_server(respond):
    """Serve an OpenAI-style chat endpoint; ``respond(body) -> (status, text)``."""
    server = ThreadingHTTPServer(("127.0.0.1", 0), _ChatHandler)
    server.respond = respond  # type: ignore[attr-defined]
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield f"http://127.0.0.1:{server.server_address[1]}"
    finally:
        server.shutdown()
        thread.join()


@pytest.fixture
def chat_endpoint():
    return chat_server


def answer_from_labels(problems) -> dict[str, str]:
    return {p.prompt: ("True" if p.label else "False") for p in problems}
