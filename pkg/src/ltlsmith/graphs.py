"""Random directed event graphs: the transition structure behind a problem.

Events are numbered 1..n. Each ordered pair (i, j), i != j, becomes an edge
independently with a given probability; self-loops never occur at generation
time (sinks gain them later during totalization). An initial event is drawn
uniformly after the edge set.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import InvalidConfigError, UnknownEventError


@dataclass(frozen=True)
class EventGraph:
    n: int
    edges: frozenset[tuple[int, int]]
    initial: int

    def __post_init__(self):
        object.__setattr__(
            self, "edges", frozenset((int(a), int(b)) for a, b in self.edges)
        )
        if self.n < 2:
            raise InvalidConfigError(f"need at least 2 events, got n={self.n}")
        if not self.edges:
            raise InvalidConfigError("edge set must be nonempty")
        for a, b in self.edges:
            if not (1 <= a <= self.n and 1 <= b <= self.n):
                raise InvalidConfigError(f"edge ({a}, {b}) outside 1..{self.n}")
            if a == b:
                raise InvalidConfigError(f"self-loop ({a}, {a}) not allowed")
        if not (1 <= self.initial <= self.n):
            raise InvalidConfigError(
                f"initial event {self.initial} outside 1..{self.n}"
            )

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)


def generate_graph(n: int, edge_prob: float = 0.5, seed: int = 0) -> EventGraph:
    """Sample an event graph.

    Each ordered pair is included independently with ``edge_prob``, pairs
    visited in ascending (i, j) order; an empty result is resampled in full
    from the same stream. The initial event is drawn last, uniformly.
    """
    if n < 2:
        raise InvalidConfigError(f"invalid event count n={n}, need n >= 2")
    if not (0.0 < edge_prob <= 1.0):
        raise InvalidConfigError(
            f"edge probability must be in (0, 1], got {edge_prob}"
        )
    rng = random.Random(seed)
    while True:
        edges = [
            (i, j)
            for i in range(1, n + 1)
            for j in range(1, n + 1)
            if i != j and rng.random() < edge_prob
        ]
        if edges:
            break
    initial = rng.randrange(1, n + 1)
    return EventGraph(n=n, edges=frozenset(edges), initial=initial)


def successors(graph: EventGraph, source: int) -> list[int]:
    """Targets of ``source``'s outgoing edges, ascending. Empty for sinks."""
    if not (1 <= source <= graph.n):
        raise UnknownEventError(f"event {source} outside 1..{graph.n}")
    return sorted(target for (origin, target) in graph.edges if origin == source)
