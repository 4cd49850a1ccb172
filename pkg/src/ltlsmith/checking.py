"""Ground-truth labeling: universal LTL checking over totalized event graphs.

``check`` decides whether a formula holds at the initial event on every
infinite path. It negates the formula, translates the negation into a
Buchi automaton with the classic on-the-fly tableau construction (Gerth,
Peled, Vardi, Wolper 1995; F and G enter via their Until/Release
encodings), degeneralizes acceptance with a track counter inside the
product with the transition structure, and searches the product for a
reachable accepting cycle via SCC analysis. A found cycle is returned as
a lasso counterexample, greedily minimized (shortest stem first).

``check_bruteforce`` is the deliberately naive cross-check: it enumerates
every bounded lasso and evaluates the negated formula on each one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InvalidConfigError, StateLimitError, UnknownAtomError, UnknownEventError
from .formulas import Atom, Binary, Formula, Unary, atoms, eval_on_lasso, operator_count
from .graphs import EventGraph, successors


@dataclass
class KripkeStructure:
    """Total transition system over events 1..n (every state has a successor)."""

    n: int
    initial: int
    transition: dict[int, tuple[int, ...]]

    def __post_init__(self):
        if self.n < 2:
            raise InvalidConfigError(f"need at least 2 events, got n={self.n}")
        if not (1 <= self.initial <= self.n):
            raise InvalidConfigError(f"initial event {self.initial} outside 1..{self.n}")
        if sorted(self.transition) != list(range(1, self.n + 1)):
            raise InvalidConfigError("transition map must cover exactly 1..n")
        for source, targets in self.transition.items():
            if not targets:
                raise InvalidConfigError(f"state {source} has no successors")
            if any(not (1 <= t <= self.n) for t in targets):
                raise InvalidConfigError(f"successors of {source} outside 1..{self.n}")

    def successors(self, state: int) -> tuple[int, ...]:
        try:
            return self.transition[state]
        except KeyError:
            raise UnknownEventError(f"event {state} outside 1..{self.n}") from None


@dataclass(frozen=True)
class Lasso:
    """Ultimately periodic path stem·loop^ω."""

    stem: tuple[int, ...]
    loop: tuple[int, ...]


@dataclass(frozen=True)
class CheckResult:
    holds: bool
    counterexample: Lasso | None = None
    warning: str | None = None


def totalize(graph: EventGraph) -> KripkeStructure:
    """Add a self-loop to every sink so all paths are infinite; other
    successor sets are copied unchanged."""
    transition = {}
    for state in range(1, graph.n + 1):
        succ = successors(graph, state)
        transition[state] = tuple(succ) if succ else (state,)
    return KripkeStructure(n=graph.n, initial=graph.initial, transition=transition)


# --- negation normal form over literals, X, and Until/Release ---------------


@dataclass(frozen=True)
class _Node:
    pass


@dataclass(frozen=True)
class _TrueConst(_Node):
    pass


@dataclass(frozen=True)
class _FalseConst(_Node):
    pass


@dataclass(frozen=True)
class _PosLit(_Node):
    event: int


@dataclass(frozen=True)
class _NegLit(_Node):
    event: int


@dataclass(frozen=True)
class _NextOp(_Node):
    sub: _Node


@dataclass(frozen=True)
class _AndOp(_Node):
    left: _Node
    right: _Node


@dataclass(frozen=True)
class _OrOp(_Node):
    left: _Node
    right: _Node


@dataclass(frozen=True)
class _UntilOp(_Node):
    left: _Node
    right: _Node


@dataclass(frozen=True)
class _ReleaseOp(_Node):
    left: _Node
    right: _Node


_TRUE = _TrueConst()
_FALSE = _FalseConst()


def _nnf(formula: Formula, negate: bool) -> _Node:
    if isinstance(formula, Atom):
        return _NegLit(formula.event) if negate else _PosLit(formula.event)
    if isinstance(formula, Unary):
        if formula.op == "!":
            return _nnf(formula.operand, not negate)
        if formula.op == "X":
            return _NextOp(_nnf(formula.operand, negate))
        if formula.op == "F":
            if negate:  # !F p == G !p == false R !p
                return _ReleaseOp(_FALSE, _nnf(formula.operand, True))
            return _UntilOp(_TRUE, _nnf(formula.operand, False))
        # G
        if negate:  # !G p == F !p
            return _UntilOp(_TRUE, _nnf(formula.operand, True))
        return _ReleaseOp(_FALSE, _nnf(formula.operand, False))
    if isinstance(formula, Binary):
        if formula.op == "&":
            ctor = _OrOp if negate else _AndOp
            return ctor(_nnf(formula.left, negate), _nnf(formula.right, negate))
        if formula.op == "|":
            ctor = _AndOp if negate else _OrOp
            return ctor(_nnf(formula.left, negate), _nnf(formula.right, negate))
        # p -> q == !p | q
        if negate:
            return _AndOp(_nnf(formula.left, False), _nnf(formula.right, True))
        return _OrOp(_nnf(formula.left, True), _nnf(formula.right, False))
    raise TypeError(f"not a formula node: {formula!r}")


def _until_subterms(node: _Node) -> set[_UntilOp]:
    if isinstance(node, (_UntilOp, _ReleaseOp, _AndOp, _OrOp)):
        subs = _until_subterms(node.left) | _until_subterms(node.right)
        if isinstance(node, _UntilOp):
            subs.add(node)
        return subs
    if isinstance(node, _NextOp):
        return _until_subterms(node.sub)
    return set()


# --- tableau construction ----------------------------------------------------

_INIT = -1


@dataclass
class _TableauState:
    state_id: int
    incoming: set[int]
    old: frozenset[_Node]
    nxt: frozenset[_Node]


def _expand_branch(branch: dict, add_new: set[_Node], add_next: set[_Node], processed: _Node) -> dict:
    return {
        "incoming": set(branch["incoming"]),
        "new": branch["new"] | (add_new - branch["old"]),
        "old": branch["old"] | {processed},
        "nxt": branch["nxt"] | add_next,
    }


def _build_tableau(root: _Node) -> list[_TableauState]:
    states: dict[tuple[frozenset, frozenset], _TableauState] = {}
    next_id = 0
    pending: list[dict] = [
        {"incoming": {_INIT}, "new": {root}, "old": frozenset(), "nxt": set()}
    ]
    while pending:
        branch = pending.pop()
        if not branch["new"]:
            key = (frozenset(branch["old"]), frozenset(branch["nxt"]))
            known = states.get(key)
            if known is not None:
                known.incoming |= branch["incoming"]
                continue
            state = _TableauState(next_id, set(branch["incoming"]), key[0], key[1])
            next_id += 1
            states[key] = state
            pending.append(
                {
                    "incoming": {state.state_id},
                    "new": set(state.nxt),
                    "old": frozenset(),
                    "nxt": set(),
                }
            )
            continue
        branch["old"] = frozenset(branch["old"])
        term = min(branch["new"], key=repr)  # deterministic processing order
        branch["new"] = branch["new"] - {term}
        if isinstance(term, _TrueConst):
            pending.append(branch)  # trivially satisfied, not recorded
        elif isinstance(term, _FalseConst):
            continue
        elif isinstance(term, _PosLit):
            if _NegLit(term.event) not in branch["old"]:
                pending.append(_expand_branch(branch, set(), set(), term))
        elif isinstance(term, _NegLit):
            if _PosLit(term.event) not in branch["old"]:
                pending.append(_expand_branch(branch, set(), set(), term))
        elif isinstance(term, _AndOp):
            pending.append(_expand_branch(branch, {term.left, term.right}, set(), term))
        elif isinstance(term, _NextOp):
            pending.append(_expand_branch(branch, set(), {term.sub}, term))
        elif isinstance(term, _OrOp):
            pending.append(_expand_branch(branch, {term.left}, set(), term))
            pending.append(_expand_branch(branch, {term.right}, set(), term))
        elif isinstance(term, _UntilOp):
            pending.append(_expand_branch(branch, {term.left}, {term}, term))
            pending.append(_expand_branch(branch, {term.right}, set(), term))
        elif isinstance(term, _ReleaseOp):
            pending.append(_expand_branch(branch, {term.right}, {term}, term))
            pending.append(_expand_branch(branch, {term.left, term.right}, set(), term))
        else:
            raise TypeError(f"unexpected tableau term: {term!r}")
    return sorted(states.values(), key=lambda s: s.state_id)


@dataclass
class _Automaton:
    initial_ids: list[int]
    succ: dict[int, list[int]]
    positive: dict[int, frozenset[int]]
    negative: dict[int, frozenset[int]]
    acceptance: list[frozenset[int]] = field(default_factory=list)

    def compatible(self, state_id: int, event: int) -> bool:
        pos = self.positive[state_id]
        return (not pos or pos == frozenset((event,))) and event not in self.negative[state_id]


def _build_automaton(root: _Node) -> _Automaton:
    tableau = _build_tableau(root)
    succ: dict[int, list[int]] = {state.state_id: [] for state in tableau}
    initial_ids = []
    for state in tableau:
        for origin in sorted(state.incoming):
            if origin == _INIT:
                initial_ids.append(state.state_id)
            else:
                succ[origin].append(state.state_id)
    for targets in succ.values():
        targets.sort()
    positive = {
        s.state_id: frozenset(t.event for t in s.old if isinstance(t, _PosLit))
        for s in tableau
    }
    negative = {
        s.state_id: frozenset(t.event for t in s.old if isinstance(t, _NegLit))
        for s in tableau
    }
    acceptance = []
    for until in sorted(_until_subterms(root), key=repr):
        acceptance.append(
            frozenset(
                s.state_id
                for s in tableau
                if until not in s.old or until.right in s.old
            )
        )
    return _Automaton(sorted(initial_ids), succ, positive, negative, acceptance)


# --- product emptiness with lasso extraction ---------------------------------


def _strongly_connected(order: list, adjacency: dict) -> dict:
    """Iterative Tarjan; returns state -> component id."""
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    component: dict = {}
    components = 0
    for root in order:
        if root in index:
            continue
        work = [(root, iter(adjacency[root]))]
        index[root] = low[root] = len(index)
        stack.append(root)
        on_stack.add(root)
        while work:
            node, edges = work[-1]
            descended = False
            for target in edges:
                if target not in index:
                    index[target] = low[target] = len(index)
                    stack.append(target)
                    on_stack.add(target)
                    work.append((target, iter(adjacency[target])))
                    descended = True
                    break
                if target in on_stack:
                    low[node] = min(low[node], index[target])
            if descended:
                continue
            work.pop()
            if low[node] == index[node]:
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    component[member] = components
                    if member == node:
                        break
                components += 1
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
    return component


def _find_accepting_lasso(
    kripke: KripkeStructure, automaton: _Automaton, max_product_states: int
) -> tuple[list[int], list[int]] | None:
    acceptance = automaton.acceptance or [frozenset(automaton.succ)]
    tracks = len(acceptance)

    def advance(track: int, state_id: int) -> int:
        return (track + 1) % tracks if state_id in acceptance[track] else track

    initial = [
        (kripke.initial, q, 0)
        for q in automaton.initial_ids
        if automaton.compatible(q, kripke.initial)
    ]
    # BFS over the product, recording parents for stem extraction.
    adjacency: dict[tuple, list[tuple]] = {}
    parent: dict[tuple, tuple | None] = {p: None for p in initial}
    order: list[tuple] = list(initial)
    cursor = 0
    while cursor < len(order):
        current = order[cursor]
        cursor += 1
        state, q, track = current
        next_track = advance(track, q)
        targets = []
        for next_state in kripke.successors(state):
            for next_q in automaton.succ[q]:
                if automaton.compatible(next_q, next_state):
                    targets.append((next_state, next_q, next_track))
        adjacency[current] = targets
        for target in targets:
            if target not in parent:
                parent[target] = current
                order.append(target)
                if len(order) > max_product_states:
                    raise StateLimitError(
                        f"product exceeded {max_product_states} states"
                    )

    component = _strongly_connected(order, adjacency)
    members: dict[int, int] = {}
    for product_state in order:
        members[component[product_state]] = members.get(component[product_state], 0) + 1

    def on_cycle(product_state: tuple) -> bool:
        if members[component[product_state]] > 1:
            return True
        return product_state in adjacency[product_state]

    target = None
    for product_state in order:  # BFS order: shortest stem first
        _, q, track = product_state
        if track == 0 and q in acceptance[0] and on_cycle(product_state):
            target = product_state
            break
    if target is None:
        return None

    stem_states: list[tuple] = []
    walk: tuple | None = target
    while walk is not None:
        stem_states.append(walk)
        walk = parent[walk]
    stem_states.reverse()

    # Shortest cycle back to the target.
    loop_parent: dict[tuple, tuple] = {}
    frontier = [target]
    closing = None
    while closing is None:
        if not frontier:
            raise RuntimeError("accepting state lost its cycle")  # unreachable
        next_frontier = []
        for node in frontier:
            for succ_state in adjacency[node]:
                if succ_state == target:
                    closing = node
                    break
                if succ_state not in loop_parent:
                    loop_parent[succ_state] = node
                    next_frontier.append(succ_state)
            if closing is not None:
                break
        frontier = next_frontier
    cycle_states = []
    walk = closing
    while walk != target:
        cycle_states.append(walk)
        walk = loop_parent[walk]
    cycle_states.append(target)
    cycle_states.reverse()  # [target, ..., closing]

    stem = [s for (s, _, _) in stem_states[:-1]]
    loop = [s for (s, _, _) in cycle_states]
    if not stem:  # rotate so the stem starts at the initial event
        stem = [loop[0]]
        loop = loop[1:] + loop[:1]
    return stem, loop


def check(
    kripke: KripkeStructure, formula: Formula, max_product_states: int = 10**6
) -> CheckResult:
    """Does ``formula`` hold at position 0 on every infinite path from the
    initial event?

    When not, the result carries a lasso counterexample whose stem starts
    at the initial event, whose transitions all exist, and whose replay
    through :func:`eval_on_lasso` falsifies the formula.
    """
    universe = set(range(1, kripke.n + 1))
    unknown = atoms(formula) - universe
    if unknown:
        raise UnknownAtomError(
            f"formula atoms {sorted(unknown)} outside events 1..{kripke.n}"
        )
    automaton = _build_automaton(_nnf(formula, negate=True))
    found = _find_accepting_lasso(kripke, automaton, max_product_states)
    if found is None:
        return CheckResult(holds=True)
    stem, loop = found
    return CheckResult(holds=False, counterexample=Lasso(tuple(stem), tuple(loop)))


# --- brute-force oracle -------------------------------------------------------


def completeness_bound(kripke: KripkeStructure, formula: Formula) -> int:
    """Lasso bound beyond which enumeration is exhaustive: n * 2^(m+1)."""
    return kripke.n * 2 ** (operator_count(formula) + 1)


def check_bruteforce(
    kripke: KripkeStructure,
    formula: Formula,
    stem_bound: int | None = None,
    loop_bound: int | None = None,
) -> CheckResult:
    """Enumerate every lasso (stem from the initial event of length <=
    stem_bound, loop of length <= loop_bound, all transitions respected)
    and evaluate the negated formula on each via :func:`eval_on_lasso`.

    Holds iff no enumerated lasso falsifies the formula. Bounds default to
    :func:`completeness_bound`; explicitly passing smaller bounds attaches
    a warning to the result, since a falsifying lasso beyond them would be
    missed. Exhaustive enumeration is exponential in the bounds — callers
    use this on small instances only.
    """
    universe = set(range(1, kripke.n + 1))
    unknown = atoms(formula) - universe
    if unknown:
        raise UnknownAtomError(
            f"formula atoms {sorted(unknown)} outside events 1..{kripke.n}"
        )
    bound = completeness_bound(kripke, formula)
    warning = None
    if stem_bound is None:
        stem_bound = bound
    if loop_bound is None:
        loop_bound = bound
    if stem_bound < 1 or loop_bound < 1:
        raise InvalidConfigError("lasso bounds must be >= 1")
    if stem_bound < bound or loop_bound < bound:
        warning = (
            f"bounds ({stem_bound}, {loop_bound}) below completeness bound "
            f"{bound}; a falsifying lasso may be missed"
        )

    negated = Unary("!", formula)
    loops_from: dict[int, list[tuple[int, ...]]] = {}

    def loops_starting(first: int) -> list[tuple[int, ...]]:
        """All closed walks first -> ... -> last with an edge back to first."""
        known = loops_from.get(first)
        if known is not None:
            return known
        found: list[tuple[int, ...]] = []
        walk = [first]
        if first in kripke.successors(first):
            found.append((first,))
        iterators = [iter(kripke.successors(first))]
        while iterators:
            if len(walk) >= loop_bound:
                iterators.pop()
                walk.pop()
                continue
            try:
                target = next(iterators[-1])
            except StopIteration:
                iterators.pop()
                walk.pop()
                continue
            walk.append(target)
            if first in kripke.successors(target):
                found.append(tuple(walk))
            iterators.append(iter(kripke.successors(target)))
        loops_from[first] = found
        return found

    def falsifier_for(stem: list[int]) -> Lasso | None:
        for loop_start in kripke.successors(stem[-1]):
            for loop in loops_starting(loop_start):
                if eval_on_lasso(negated, stem, loop):
                    return Lasso(tuple(stem), loop)
        return None

    stem = [kripke.initial]
    counterexample = falsifier_for(stem)
    iterators = [iter(kripke.successors(kripke.initial))]
    while counterexample is None and iterators:
        if len(stem) >= stem_bound:
            iterators.pop()
            stem.pop()
            continue
        try:
            target = next(iterators[-1])
        except StopIteration:
            iterators.pop()
            stem.pop()
            continue
        stem.append(target)
        iterators.append(iter(kripke.successors(target)))
        counterexample = falsifier_for(stem)

    if counterexample is None:
        return CheckResult(holds=True, warning=warning)
    return CheckResult(holds=False, counterexample=counterexample, warning=warning)
