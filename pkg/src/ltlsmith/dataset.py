"""Problem assembly, label balancing, and JSONL persistence.

Reproducibility contract (pinned; see README):

* every random draw uses CPython's ``random.Random`` seeded explicitly;
* sub-seeds derive from a master seed via SHA-256 over
  ``"<master>/<tag>/...)"`` truncated to 63 bits (:func:`derive_seed`);
* a problem built from seed ``s`` uses ``derive_seed(s, "graph")`` for the
  graph and ``derive_seed(s, "formula")`` for the formula;
* draw ``d`` of a dataset with master seed ``S`` uses
  ``derive_seed(S, "problem", d)``;
* records serialize with fixed key order and compact separators, so equal
  specs produce byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .checking import check, totalize
from .errors import BalanceUnreachableError, InvalidConfigError, SchemaError
from .formulas import FormulaGenConfig, generate_formulas, operator_count, print_formula
from .graphs import EventGraph, generate_graph
from .render import render_problem
from .smv import emit_smv

#: The published benchmark configuration: 2,000 problems at n=3, m=3.
BENCHMARK_COUNT = 2000
BENCHMARK_EVENTS = 3
BENCHMARK_OPERATORS = 3

_BALANCE_DRAW_FACTOR = 1000


def derive_seed(master_seed: int, *tags: object) -> int:
    """Stable 63-bit sub-seed from a master seed and tag path."""
    material = "/".join([str(int(master_seed)), *(str(t) for t in tags)])
    digest = hashlib.sha256(material.encode("ascii")).digest()
    return int.from_bytes(digest[:8], "big") >> 1


@dataclass(frozen=True)
class Problem:
    """One benchmark item with full provenance; independently re-checkable."""

    id: str
    n: int
    m: int
    seed: int
    graph: EventGraph
    formula: str
    smv: str
    context: str
    hypothesis: str
    prompt: str
    label: bool


@dataclass(frozen=True)
class DatasetSpec:
    count: int
    n: int
    m: int
    master_seed: int
    edge_prob: float = 0.5
    balanced: bool = True

    def __post_init__(self):
        if self.count < 1:
            raise InvalidConfigError(f"count must be >= 1, got {self.count}")
        if self.balanced and self.count % 2 != 0:
            raise InvalidConfigError(
                f"balanced datasets need an even count, got {self.count}"
            )


def build_problem(
    n: int,
    m: int,
    seed: int,
    edge_prob: float = 0.5,
    problem_id: str | None = None,
) -> Problem:
    """Run the four pipeline stages (graph, formula, SMV text, label) plus
    rendering, all derived deterministically from ``seed``."""
    if n < 2:
        raise InvalidConfigError(f"invalid event count n={n}, need n >= 2")
    if m < 1:
        raise InvalidConfigError(f"invalid operator count m={m}, need m >= 1")
    graph = generate_graph(n, edge_prob, seed=derive_seed(seed, "graph"))
    formula = generate_formulas(
        FormulaGenConfig(
            states=tuple(range(1, n + 1)),
            formula_length=m,
            formula_count=1,
            seed=derive_seed(seed, "formula"),
        )
    )[0]
    document = emit_smv(graph, formula, style="sets")
    label = check(totalize(graph), formula).holds
    rendered = render_problem(graph, formula)
    return Problem(
        id=problem_id if problem_id is not None else f"n{n}m{m}s{seed}",
        n=n,
        m=m,
        seed=seed,
        graph=graph,
        formula=print_formula(formula),
        smv=document.text,
        context=rendered.context,
        hypothesis=rendered.hypothesis,
        prompt=rendered.prompt,
        label=label,
    )


def build_dataset(spec: DatasetSpec) -> list[Problem]:
    """Draw problems with consecutive sub-seeds of the master seed.

    Balanced mode rejection-samples: a draw is kept while its label bucket
    is below count/2 and discarded otherwise, until both buckets are full;
    output is ordered by acceptance. Unbalanced mode keeps the first
    ``count`` draws. Ids are ``p<index>`` zero-padded over the accepted
    order.
    """
    width = max(4, len(str(spec.count - 1)))
    accepted: list[Problem] = []
    quota = spec.count // 2
    buckets = {True: 0, False: 0}
    draw = 0
    cap = _BALANCE_DRAW_FACTOR * spec.count
    while len(accepted) < spec.count:
        if spec.balanced and draw >= cap:
            raise BalanceUnreachableError(
                f"gave up after {draw} draws with {buckets[True]} true / "
                f"{buckets[False]} false labels; one label may be vanishingly "
                f"rare for n={spec.n}, m={spec.m}"
            )
        problem = build_problem(
            spec.n,
            spec.m,
            seed=derive_seed(spec.master_seed, "problem", draw),
            edge_prob=spec.edge_prob,
        )
        draw += 1
        if spec.balanced and buckets[problem.label] >= quota:
            continue
        buckets[problem.label] += 1
        accepted.append(_with_id(problem, f"p{len(accepted):0{width}d}"))
    return accepted


def _with_id(problem: Problem, new_id: str) -> Problem:
    return Problem(
        id=new_id,
        n=problem.n,
        m=problem.m,
        seed=problem.seed,
        graph=problem.graph,
        formula=problem.formula,
        smv=problem.smv,
        context=problem.context,
        hypothesis=problem.hypothesis,
        prompt=problem.prompt,
        label=problem.label,
    )


def graph_to_json(graph: EventGraph) -> dict:
    return {
        "n": graph.n,
        "initial": graph.initial,
        "edges": [list(edge) for edge in graph.sorted_edges()],
    }


def graph_from_json(data: dict) -> EventGraph:
    try:
        return EventGraph(
            n=int(data["n"]),
            edges=frozenset((int(a), int(b)) for a, b in data["edges"]),
            initial=int(data["initial"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InvalidConfigError):
            raise
        raise SchemaError(f"malformed graph object: {exc}") from exc


def problem_to_json(problem: Problem) -> dict:
    return {
        "id": problem.id,
        "n": problem.n,
        "m": problem.m,
        "seed": problem.seed,
        "graph": graph_to_json(problem.graph),
        "formula": problem.formula,
        "smv": problem.smv,
        "context": problem.context,
        "hypothesis": problem.hypothesis,
        "prompt": problem.prompt,
        "label": problem.label,
    }


_PROBLEM_FIELDS = {
    "id": str,
    "n": int,
    "m": int,
    "seed": int,
    "graph": dict,
    "formula": str,
    "smv": str,
    "context": str,
    "hypothesis": str,
    "prompt": str,
    "label": bool,
}


def problem_from_json(data: dict) -> Problem:
    for name, kind in _PROBLEM_FIELDS.items():
        if name not in data:
            raise SchemaError(f"missing field {name!r}")
        if not isinstance(data[name], kind):
            raise SchemaError(
                f"field {name!r} has type {type(data[name]).__name__}, "
                f"expected {kind.__name__}"
            )
    return Problem(
        id=data["id"],
        n=data["n"],
        m=data["m"],
        seed=data["seed"],
        graph=graph_from_json(data["graph"]),
        formula=data["formula"],
        smv=data["smv"],
        context=data["context"],
        hypothesis=data["hypothesis"],
        prompt=data["prompt"],
        label=data["label"],
    )


def write_dataset(problems: Iterable[Problem], path: str | Path) -> None:
    """One JSON object per line, fixed key order, compact separators."""
    with open(path, "w", encoding="utf-8") as handle:
        for problem in problems:
            handle.write(
                json.dumps(
                    problem_to_json(problem), ensure_ascii=False, separators=(",", ":")
                )
            )
            handle.write("\n")


def read_dataset(path: str | Path) -> list[Problem]:
    problems = []
    with open(path, "r", encoding="utf-8") as handle:
        for number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
                if not isinstance(data, dict):
                    raise SchemaError("record is not an object")
                problems.append(problem_from_json(data))
            except (json.JSONDecodeError, SchemaError, InvalidConfigError) as exc:
                raise SchemaError(f"line {number}: {exc}", line=number) from exc
    return problems
