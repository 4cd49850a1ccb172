"""Natural-language rendering: context paragraph, clause-decomposed
hypothesis, and the full prompt.

The hypothesis assigns clause labels C1..Ck to operator subformulas in
post-order (left, right, then parent), one occurrence each, so the root is
always Ck and every reference points to an earlier clause. The sentence
templates are frozen — changing any of them changes every dataset:

====  ===============================================  =========================================
op    atomic operand                                   clause operand
====  ===============================================  =========================================
F     Event<j> will happen eventually.                 C<i> will eventually be true at some future time.
G     Event<j> will always happen at any future time.  C<i> will always be true at any future time.
X     Event<j> will happen at the next moment.         C<i> will be true at the next moment.
!     Event<j> does not happen.                        C<i> does not hold.
->    That <a> implies that <b>.
&     Both of the following hold: <a>, and <b>.
|     At least one of the following holds: <a>, or <b>.
====  ===============================================  =========================================

where ``<a>``/``<b>`` are ``event<j> happens`` for atoms and ``C<i> holds``
for clauses. A bare atom hypothesis renders as the single clause
``Event<j> happens.``
"""

from __future__ import annotations

from dataclasses import dataclass

from .formulas import Atom, Binary, Formula, Unary, event_name
from .graphs import EventGraph, successors

CONTEXT_HEADER = "=== Context ==="
HYPOTHESIS_HEADER = "=== Hypothesis ==="

_UNARY_ATOMIC = {
    "F": "Event{e} will happen eventually.",
    "G": "Event{e} will always happen at any future time.",
    "X": "Event{e} will happen at the next moment.",
    "!": "Event{e} does not happen.",
}
_UNARY_CLAUSE = {
    "F": "C{i} will eventually be true at some future time.",
    "G": "C{i} will always be true at any future time.",
    "X": "C{i} will be true at the next moment.",
    "!": "C{i} does not hold.",
}


@dataclass(frozen=True)
class RenderedProblem:
    context: str
    hypothesis: str
    prompt: str


def render_context(graph: EventGraph) -> str:
    """One sentence for the initial event, then one per transition in
    ascending (source, target) order; sinks get the no-other-events
    sentence. Sentences joined by single spaces."""
    sentences = [f"Initially, {event_name(graph.initial)} happened."]
    for source in range(1, graph.n + 1):
        succ = successors(graph, source)
        if succ:
            sentences.extend(
                f"After {event_name(source)}, {event_name(target)} can happen."
                for target in succ
            )
        else:
            sentences.append(
                f"After {event_name(source)}, no other events can happen."
            )
    return " ".join(sentences)


def _operand_phrase(ref: tuple[str, int]) -> str:
    kind, value = ref
    if kind == "atom":
        return f"{event_name(value)} happens"
    return f"C{value} holds"


def render_hypothesis(formula: Formula) -> str:
    """Clause lines C1..Ck followed by a blank line and the final
    True/False instruction targeting the root clause."""
    clauses: list[str] = []

    def walk(node: Formula) -> tuple[str, int]:
        if isinstance(node, Atom):
            return ("atom", node.event)
        if isinstance(node, Unary):
            ref = walk(node.operand)
            kind, value = ref
            if kind == "atom":
                sentence = _UNARY_ATOMIC[node.op].format(e=value)
            else:
                sentence = _UNARY_CLAUSE[node.op].format(i=value)
        else:
            assert isinstance(node, Binary)
            first = _operand_phrase(walk(node.left))
            second = _operand_phrase(walk(node.right))
            if node.op == "->":
                sentence = f"That {first} implies that {second}."
            elif node.op == "&":
                sentence = f"Both of the following hold: {first}, and {second}."
            else:
                sentence = f"At least one of the following holds: {first}, or {second}."
        clauses.append(sentence)
        return ("clause", len(clauses))

    if isinstance(formula, Atom):
        clauses.append(f"Event{formula.event} happens.")
    else:
        walk(formula)
    lines = [f"C{i}: {sentence}" for i, sentence in enumerate(clauses, start=1)]
    instruction = (
        f'C{len(clauses)} is True or False? Answer with "True" or "False" directly:'
    )
    return "\n".join(lines) + "\n\n" + instruction


def render_problem(graph: EventGraph, formula: Formula) -> RenderedProblem:
    """Context, hypothesis, and the prompt that concatenates them under
    section headers."""
    context = render_context(graph)
    hypothesis = render_hypothesis(formula)
    prompt = (
        f"{CONTEXT_HEADER}\n\n{context}\n\n{HYPOTHESIS_HEADER}\n\n{hypothesis}"
    )
    return RenderedProblem(context=context, hypothesis=hypothesis, prompt=prompt)
