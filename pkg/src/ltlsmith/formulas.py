"""LTL formula core: AST, canonical text form, random generation, and exact
evaluation on ultimately periodic paths.

Formulas are trees over integer event atoms with unary operators X (next),
G (always), F (eventually), ! (not) and binary operators & (and), | (or),
-> (implies). The canonical text form is fully parenthesized and
precedence-free: atoms print bare as ``event<i>``, every operator
application gets exactly one surrounding pair of parentheses, e.g.
``(event1 -> (G (F event2)))``.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .errors import FormulaSyntaxError, InvalidConfigError, UnknownAtomError

UNARY_OPERATORS = ("X", "G", "F", "!")
BINARY_OPERATORS = ("&", "|", "->")
#: Combined pool sampled by the generator, unary first.
OPERATORS = UNARY_OPERATORS + BINARY_OPERATORS


def event_name(event: int) -> str:
    """Surface name of an event id: 3 -> 'event3'."""
    return f"event{event}"


class Formula:
    """Base class for formula tree nodes."""


@dataclass(frozen=True)
class Atom(Formula):
    event: int

    def __post_init__(self):
        if self.event < 1:
            raise InvalidConfigError(f"event ids are positive, got {self.event}")


@dataclass(frozen=True)
class Unary(Formula):
    op: str
    operand: Formula

    def __post_init__(self):
        if self.op not in UNARY_OPERATORS:
            raise InvalidConfigError(f"unknown unary operator {self.op!r}")


@dataclass(frozen=True)
class Binary(Formula):
    op: str
    left: Formula
    right: Formula

    def __post_init__(self):
        if self.op not in BINARY_OPERATORS:
            raise InvalidConfigError(f"unknown binary operator {self.op!r}")


def operator_count(formula: Formula) -> int:
    """Number of operator nodes, counting repeated subtrees per occurrence."""
    if isinstance(formula, Atom):
        return 0
    if isinstance(formula, Unary):
        return 1 + operator_count(formula.operand)
    if isinstance(formula, Binary):
        return 1 + operator_count(formula.left) + operator_count(formula.right)
    raise TypeError(f"not a formula node: {formula!r}")


def atoms(formula: Formula) -> frozenset[int]:
    """Set of event ids appearing in the formula."""
    if isinstance(formula, Atom):
        return frozenset((formula.event,))
    if isinstance(formula, Unary):
        return atoms(formula.operand)
    if isinstance(formula, Binary):
        return atoms(formula.left) | atoms(formula.right)
    raise TypeError(f"not a formula node: {formula!r}")


def print_formula(formula: Formula, atom_format: Callable[[int], str] | None = None) -> str:
    """Canonical fully parenthesized text form.

    ``atom_format`` overrides how atoms render (used by the SMV emitter);
    the default is the bare ``event<i>`` name.
    """
    fmt = atom_format or event_name
    if isinstance(formula, Atom):
        return fmt(formula.event)
    if isinstance(formula, Unary):
        return f"({formula.op} {print_formula(formula.operand, atom_format)})"
    if isinstance(formula, Binary):
        left = print_formula(formula.left, atom_format)
        right = print_formula(formula.right, atom_format)
        return f"({left} {formula.op} {right})"
    raise TypeError(f"not a formula node: {formula!r}")


_TOKEN_RE = re.compile(r"->|[()&|!]|[A-Za-z_][A-Za-z_0-9]*")
_ATOM_NAME_RE = re.compile(r"event([1-9][0-9]*)")


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise FormulaSyntaxError(
                f"unexpected character {text[pos]!r} at position {pos}", position=pos
            )
        tokens.append((match.group(), pos))
        pos = match.end()
    return tokens


def parse_formula(text: str, universe: Iterable[int] | None = None) -> Formula:
    """Parse the canonical grammar: atom | (! f) | (X f) | (G f) | (F f) |
    (f & f) | (f | f) | (f -> f).

    ``universe`` restricts which event ids are legal atoms; atoms outside
    it raise :class:`UnknownAtomError`. Syntax errors carry the offending
    character position.
    """
    tokens = _tokenize(text)
    allowed = None if universe is None else frozenset(universe)
    index = 0

    def take() -> tuple[str, int]:
        nonlocal index
        if index >= len(tokens):
            raise FormulaSyntaxError(
                "syntax error at end of input: unexpected end of formula",
                position=len(text),
            )
        token = tokens[index]
        index += 1
        return token

    def expect(value: str) -> None:
        token, pos = take()
        if token != value:
            raise FormulaSyntaxError(
                f"expected {value!r} at position {pos}, got {token!r}", position=pos
            )

    def parse_atom(name: str, pos: int) -> Atom:
        match = _ATOM_NAME_RE.fullmatch(name)
        if match is None:
            raise UnknownAtomError(f"not an event atom: {name!r} at position {pos}")
        event = int(match.group(1))
        if allowed is not None and event not in allowed:
            raise UnknownAtomError(f"atom {name!r} outside the declared event universe")
        return Atom(event)

    def parse_node() -> Formula:
        token, pos = take()
        if token == "(":
            if index < len(tokens) and tokens[index][0] in UNARY_OPERATORS:
                op, _ = take()
                operand = parse_node()
                expect(")")
                return Unary(op, operand)
            left = parse_node()
            op, op_pos = take()
            if op not in BINARY_OPERATORS:
                raise FormulaSyntaxError(
                    f"expected a binary operator at position {op_pos}, got {op!r}",
                    position=op_pos,
                )
            right = parse_node()
            expect(")")
            return Binary(op, left, right)
        if token == ")" or token in OPERATORS:
            raise FormulaSyntaxError(
                f"unexpected {token!r} at position {pos}", position=pos
            )
        return parse_atom(token, pos)

    formula = parse_node()
    if index != len(tokens):
        token, pos = tokens[index]
        raise FormulaSyntaxError(
            f"trailing input {token!r} at position {pos}", position=pos
        )
    return formula


@dataclass(frozen=True)
class FormulaGenConfig:
    """Inputs of the bucket-based random formula generator.

    ``states`` is the pool of atomic event ids, ``formula_length`` the exact
    operator count of each output formula, ``formula_count`` how many
    formulas to draw (the pipeline always uses 1).
    """

    states: tuple[int, ...]
    formula_length: int
    formula_count: int = 1
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(int(s) for s in self.states))
        if not self.states:
            raise InvalidConfigError("states must be nonempty")
        if any(s < 1 for s in self.states):
            raise InvalidConfigError("event ids are positive")
        if self.formula_length < 1:
            raise InvalidConfigError(
                f"formula_length must be >= 1, got {self.formula_length}"
            )
        if self.formula_count < 1:
            raise InvalidConfigError(
                f"formula_count must be >= 1, got {self.formula_count}"
            )


def generate_formulas(cfg: FormulaGenConfig) -> list[Formula]:
    """Draw ``cfg.formula_count`` formulas with exactly ``cfg.formula_length``
    operators each.

    Bucket construction: bucket 0 holds the atoms; at step j an operator is
    sampled uniformly from the 7-element pool, a unary operator wraps a
    uniform sample from bucket j-1, a binary operator picks a split s in
    [0, j) and combines samples from buckets s and j-1-s; the result is
    appended to bucket j. The formula is the last element of the final
    bucket. Buckets persist across the outer loop, so with
    ``formula_count > 1`` later draws may sample earlier draws' subterms.
    No filtering of duplicates or vacuous patterns is done.
    """
    rng = random.Random(cfg.seed)
    buckets: list[list[Formula]] = [[] for _ in range(cfg.formula_length + 1)]
    buckets[0] = [Atom(s) for s in cfg.states]
    formulas: list[Formula] = []
    for _ in range(cfg.formula_count):
        for j in range(1, cfg.formula_length + 1):
            op = rng.choice(OPERATORS)
            if op in UNARY_OPERATORS:
                built: Formula = Unary(op, rng.choice(buckets[j - 1]))
            else:
                split = rng.randrange(j)
                built = Binary(
                    op, rng.choice(buckets[split]), rng.choice(buckets[j - 1 - split])
                )
            buckets[j].append(built)
        formulas.append(buckets[cfg.formula_length][-1])
    return formulas


def eval_on_lasso(formula: Formula, stem: Sequence[int], loop: Sequence[int]) -> bool:
    """Truth of ``formula`` at position 0 of the infinite word stem·loop^ω.

    Backward induction over the len(stem)+len(loop) distinct positions;
    F and G take their loop fixpoint first (every loop position recurs
    infinitely often, so on the loop F is the disjunction and G the
    conjunction of the operand over all loop positions).
    """
    if not loop:
        raise InvalidConfigError("loop must be nonempty")
    word = [*stem, *loop]
    size = len(word)
    start = len(stem)
    cache: dict[Formula, list[bool]] = {}

    def series(node: Formula) -> list[bool]:
        known = cache.get(node)
        if known is not None:
            return known
        if isinstance(node, Atom):
            values = [current == node.event for current in word]
        elif isinstance(node, Unary):
            sub = series(node.operand)
            if node.op == "!":
                values = [not v for v in sub]
            elif node.op == "X":
                values = [sub[i + 1] if i + 1 < size else sub[start] for i in range(size)]
            elif node.op == "F":
                tail = any(sub[start:])
                values = [False] * start + [tail] * len(loop)
                for i in range(start - 1, -1, -1):
                    values[i] = sub[i] or values[i + 1]
            else:  # G
                tail = all(sub[start:])
                values = [False] * start + [tail] * len(loop)
                for i in range(start - 1, -1, -1):
                    values[i] = sub[i] and values[i + 1]
        elif isinstance(node, Binary):
            left = series(node.left)
            right = series(node.right)
            if node.op == "&":
                values = [a and b for a, b in zip(left, right)]
            elif node.op == "|":
                values = [a or b for a, b in zip(left, right)]
            else:  # ->
                values = [(not a) or b for a, b in zip(left, right)]
        else:
            raise TypeError(f"not a formula node: {node!r}")
        cache[node] = values
        return values

    return series(formula)[0]
