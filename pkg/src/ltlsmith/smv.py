"""NuSMV model emission and optional execution of an installed NuSMV binary.

Two emission styles exist for the transition relation:

* ``sets`` (default): one case arm per source state; non-sinks get a brace
  set of targets, which NuSMV treats as a nondeterministic choice. This
  encodes every outgoing edge faithfully.
* ``paper-literal``: one case arm per edge, with sink self-loops appended
  last. NuSMV's ``case`` takes the first matching arm, so repeated
  conditions collapse to the first listed target — a state with several
  outgoing edges becomes deterministic under this style. It is kept for
  byte-exact reproduction of the literal per-edge layout; dataset labels
  always come from the built-in checker under the set semantics.
"""

from __future__ import annotations

import subprocess
import shutil
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .errors import InvalidConfigError, NuSmvNotFoundError, NuSmvRunError, UnknownAtomError
from .formulas import Formula, atoms, event_name, print_formula
from .graphs import EventGraph, successors

STYLES = ("sets", "paper-literal")


@dataclass(frozen=True)
class SmvDocument:
    text: str
    style: str


def ltlspec_expression(formula: Formula) -> str:
    """Formula text with every atom rewritten to ``(state=event<i>)``."""
    return print_formula(formula, atom_format=lambda e: f"(state={event_name(e)})")


def emit_smv(graph: EventGraph, formula: Formula, style: str = "sets") -> SmvDocument:
    """Emit a complete SMV module for the graph plus LTLSPEC for the formula."""
    if style not in STYLES:
        raise InvalidConfigError(f"unknown emission style {style!r}, want one of {STYLES}")
    unknown = atoms(formula) - set(range(1, graph.n + 1))
    if unknown:
        raise UnknownAtomError(
            f"formula atoms {sorted(unknown)} outside events 1..{graph.n}"
        )
    names = ", ".join(event_name(i) for i in range(1, graph.n + 1))
    lines = [
        "MODULE main",
        "VAR",
        f"    state : {{{names}}};",
        "ASSIGN",
        f"    init(state) := {event_name(graph.initial)};",
        "    next(state) := case",
    ]
    if style == "sets":
        for source in range(1, graph.n + 1):
            succ = successors(graph, source)
            if succ:
                targets = ", ".join(event_name(j) for j in succ)
                lines.append(f"        state = {event_name(source)} : {{{targets}}};")
            else:
                lines.append(
                    f"        state = {event_name(source)} : {event_name(source)};"
                )
    else:
        for source, target in graph.sorted_edges():
            lines.append(
                f"        state = {event_name(source)} : {event_name(target)};"
            )
        for source in range(1, graph.n + 1):
            if not successors(graph, source):
                lines.append(
                    f"        state = {event_name(source)} : {event_name(source)};"
                )
    lines.append("    esac;")
    lines.append(f"LTLSPEC {ltlspec_expression(formula)}")
    return SmvDocument(text="\n".join(lines) + "\n", style=style)


def run_nusmv(document: SmvDocument, nusmv_path: str) -> bool:
    """Run NuSMV on the document and parse the specification verdict.

    The document is written to a temp file and passed as the single
    argument; stdout is scanned for the ``-- specification ... is true``
    or ``... is false`` result line. Counterexample traces are ignored.
    """
    resolved = shutil.which(str(nusmv_path))
    if resolved is None:
        raise NuSmvNotFoundError(f"no executable at {nusmv_path!r}")
    with tempfile.TemporaryDirectory(prefix="ltlsmith-") as tmp:
        model = Path(tmp) / "model.smv"
        model.write_text(document.text, encoding="ascii")
        proc = subprocess.run(
            [resolved, str(model)], capture_output=True, text=True, check=False
        )
    if proc.returncode != 0:
        raise NuSmvRunError(
            f"NuSMV exited with {proc.returncode}: {proc.stderr.strip()}"
        )
    for line in proc.stdout.splitlines():
        if line.startswith("-- specification"):
            stripped = line.rstrip()
            if stripped.endswith("is true"):
                return True
            if stripped.endswith("is false"):
                return False
    raise NuSmvRunError("no specification verdict in NuSMV output")
