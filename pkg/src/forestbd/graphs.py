"""Graphs attached to a CNF formula and the cycle machinery on them.

Two graphs matter: the signed incidence graph (variables vs. clauses,
edges carry occurrence polarity) and the clause-literal graph (both
polarities of every universe variable plus the clauses, with an edge
joining complementary literals). The latter supports an O(1)-rebuild
acyclicity test for restricted formulas: `F` restricted by `tau` is
acyclic exactly when the clause-literal graph minus the closed
neighborhood of tau's true literals is acyclic.

Cycle queries are canonical so that every downstream verdict is
reproducible: `shortest_cycle` returns, among all minimum-length cycles,
the one whose node sequence (started at its smallest node, oriented so
the successor chain is smallest) is lexicographically least.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Iterable, Iterator, Mapping, Sequence, Union

from .errors import ContractError
from .formula import Formula

Node = Hashable

VAR = "var"
CLAUSE = "clause"
LIT = "lit"


def var_node(variable: int) -> tuple:
    return (VAR, variable)


def clause_node(index: int) -> tuple:
    return (CLAUSE, index)


def lit_node(variable: int, positive: bool) -> tuple:
    return (LIT, variable, positive)


class Graph:
    """Simple undirected graph over totally ordered, hashable node ids.

    Built once, then treated as read-only; all iteration orders are
    sorted so queries are deterministic.
    """

    def __init__(self) -> None:
        self._adj: dict[Node, set[Node]] = {}

    def add_node(self, v: Node) -> None:
        self._adj.setdefault(v, set())

    def add_edge(self, u: Node, v: Node) -> None:
        if u == v:
            raise ContractError(f"self-loop at {u!r}")
        self.add_node(u)
        self.add_node(v)
        self._adj[u].add(v)
        self._adj[v].add(u)

    def has_node(self, v: Node) -> bool:
        return v in self._adj

    def has_edge(self, u: Node, v: Node) -> bool:
        return u in self._adj and v in self._adj[u]

    def neighbors(self, v: Node) -> set[Node]:
        return self._adj[v]

    def degree(self, v: Node) -> int:
        return len(self._adj[v])

    @property
    def node_count(self) -> int:
        return len(self._adj)

    @property
    def edge_count(self) -> int:
        return sum(len(s) for s in self._adj.values()) // 2

    def sorted_nodes(self) -> list[Node]:
        return sorted(self._adj)

    def without(self, removed: Iterable[Node]) -> Graph:
        gone = set(removed)
        out = Graph()
        for v, adj in self._adj.items():
            if v in gone:
                continue
            out.add_node(v)
            for u in adj:
                if u not in gone and u > v:
                    out.add_edge(v, u)
        return out


@dataclass(frozen=True)
class Cycle:
    """A simple cycle, stored as its canonical node sequence without the
    closing repetition."""

    nodes: tuple

    def __len__(self) -> int:
        return len(self.nodes)

    @cached_property
    def node_set(self) -> frozenset:
        return frozenset(self.nodes)

    @cached_property
    def variables(self) -> tuple[int, ...]:
        return tuple(n[1] for n in self.nodes if n[0] == VAR)

    @cached_property
    def clause_indices(self) -> tuple[int, ...]:
        return tuple(n[1] for n in self.nodes if n[0] == CLAUSE)

    def to_json(self) -> list[dict]:
        return [{"kind": n[0], "id": n[1]} for n in self.nodes]


def canonical_cycle(nodes: Sequence[Node]) -> Cycle:
    """Normalize a cyclic node sequence: rotate its smallest node to the
    front, then keep the lexicographically smaller of the two directions."""
    seq = tuple(nodes)
    if len(seq) < 3 or len(set(seq)) != len(seq):
        raise ContractError(f"not a simple cycle: {seq!r}")
    pivot = seq.index(min(seq))
    forward = seq[pivot:] + seq[:pivot]
    backward = (forward[0],) + tuple(reversed(forward[1:]))
    return Cycle(min(forward, backward))


def is_acyclic(graph: Graph, forbidden: frozenset | set = frozenset()) -> bool:
    """A graph is acyclic iff every component is a tree: edges = nodes - components."""
    allowed = [v for v in graph.sorted_nodes() if v not in forbidden]
    allowed_set = set(allowed)
    seen: set[Node] = set()
    components = 0
    edges = 0
    for start in allowed:
        if start in seen:
            continue
        components += 1
        queue = deque([start])
        seen.add(start)
        while queue:
            v = queue.popleft()
            for u in graph.neighbors(v):
                if u not in allowed_set:
                    continue
                edges += 1
                if u not in seen:
                    seen.add(u)
                    queue.append(u)
    return edges // 2 == len(allowed) - components


def _bfs_distances(graph: Graph, source: Node, allowed: set[Node]) -> dict[Node, int]:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for u in graph.neighbors(v):
            if u in allowed and u not in dist:
                dist[u] = dist[v] + 1
                queue.append(u)
    return dist


def _girth(graph: Graph, allowed: list[Node], allowed_set: set[Node]) -> int | None:
    best: int | None = None
    for root in allowed:
        dist: dict[Node, int] = {root: 0}
        parent: dict[Node, Node | None] = {root: None}
        queue = deque([root])
        while queue:
            a = queue.popleft()
            if best is not None and 2 * dist[a] >= best:
                break
            for b in sorted(graph.neighbors(a)):
                if b not in allowed_set:
                    continue
                if b not in dist:
                    dist[b] = dist[a] + 1
                    parent[b] = a
                    queue.append(b)
                elif parent[a] != b and parent[b] != a:
                    # Non-tree edge: the union of the two root paths and this
                    # edge contains a cycle no longer than this bound.
                    candidate = dist[a] + dist[b] + 1
                    if best is None or candidate < best:
                        best = candidate
    return best


def _lexmin_shortest_path(
    graph: Graph, start: Node, goal: Node, dist_to_goal: Mapping[Node, int], allowed: set[Node]
) -> tuple:
    path = [start]
    current = start
    while current != goal:
        current = min(
            u
            for u in graph.neighbors(current)
            if u in allowed and dist_to_goal.get(u) == dist_to_goal[current] - 1
        )
        path.append(current)
    return tuple(path)


def shortest_cycle(
    graph: Graph, forbidden: frozenset | set = frozenset()
) -> Cycle | None:
    """Canonically smallest among the shortest cycles avoiding `forbidden`.

    Shortest means fewest nodes; ties break toward the lexicographically
    smallest canonical node sequence.
    """
    allowed = [v for v in graph.sorted_nodes() if v not in forbidden]
    allowed_set = set(allowed)
    girth = _girth(graph, allowed, allowed_set)
    if girth is None:
        return None
    for anchor in allowed:
        # The canonical sequence starts at the cycle's minimum node, so only
        # nodes >= anchor may participate.
        sub = {v for v in allowed_set if v >= anchor}
        sub_minus = sub - {anchor}
        ring = sorted(u for u in graph.neighbors(anchor) if u in sub)
        if len(ring) < 2:
            continue
        dist_from: dict[Node, dict[Node, int]] = {
            b: _bfs_distances(graph, b, sub_minus) for b in ring
        }
        for second in ring:
            candidates = []
            for last in ring:
                if last == second:
                    continue
                goal_dist = dist_from[last]
                if goal_dist.get(second) == girth - 2:
                    interior = _lexmin_shortest_path(
                        graph, second, last, goal_dist, sub_minus
                    )
                    candidates.append((anchor,) + interior)
            if candidates:
                return Cycle(min(candidates))
    return None


@dataclass(frozen=True)
class CyclePacking:
    """At least the requested number of pairwise vertex-disjoint cycles."""

    cycles: tuple[Cycle, ...]


@dataclass(frozen=True)
class FeedbackSet:
    """A node set whose removal leaves the graph acyclic."""

    nodes: frozenset


PackingOrFeedback = Union[CyclePacking, FeedbackSet]


def disjoint_cycles_or_feedback(graph: Graph, count: int) -> PackingOrFeedback:
    """Greedily pack shortest cycles until `count` are found or the packing
    is maximal.

    A maximal packing's vertex union is a feedback vertex set: any cycle
    avoiding it would extend the packing. No size bound is promised for
    the feedback set, only validity.
    """
    if count < 1:
        raise ContractError(f"requested cycle count must be >= 1, got {count}")
    used: set[Node] = set()
    packed: list[Cycle] = []
    while True:
        cycle = shortest_cycle(graph, forbidden=used)
        if cycle is None:
            return FeedbackSet(frozenset(used))
        packed.append(cycle)
        used |= cycle.node_set
        if len(packed) == count:
            return CyclePacking(tuple(packed))


class IncidenceGraph:
    """Bipartite variable/clause graph with signed edges.

    Contains a node for every universe variable (occurring or not) and for
    every clause, including empty ones.
    """

    def __init__(self, graph: Graph, signs: dict[tuple[int, int], bool]) -> None:
        self.graph = graph
        self._signs = signs

    def sign(self, variable: int, clause_index: int) -> bool | None:
        """True for a positive occurrence, False for negative, None if the
        variable is not in the clause."""
        return self._signs.get((variable, clause_index))

    def clause_neighbor_count(self, variable: int, clause_nodes: frozenset) -> int:
        return sum(1 for n in self.graph.neighbors(var_node(variable)) if n in clause_nodes)

    def variables_adjacent_to(self, clause_index: int) -> Iterator[int]:
        for n in self.graph.neighbors(clause_node(clause_index)):
            yield n[1]


def incidence_graph(formula: Formula) -> IncidenceGraph:
    g = Graph()
    signs: dict[tuple[int, int], bool] = {}
    for v in formula.universe:
        g.add_node(var_node(v))
    for idx, clause in enumerate(formula.clauses):
        g.add_node(clause_node(idx))
        for lit in clause.literals:
            g.add_edge(var_node(lit.variable), clause_node(idx))
            signs[(lit.variable, idx)] = lit.positive
    return IncidenceGraph(g, signs)


class ClauseLiteralGraph:
    """Graph on literal and clause nodes used to test restrictions.

    Both polarities of every universe variable are present even when one
    never occurs: removing the closed neighborhood of a true literal must
    take out its complement as well.
    """

    def __init__(self, graph: Graph, universe: frozenset[int]) -> None:
        self.graph = graph
        self.universe = universe

    def residual_acyclic(self, assignment: Mapping[int, bool]) -> bool:
        """Whether the graph minus the closed neighborhood of the literals
        set true by `assignment` is acyclic."""
        extra = set(assignment) - self.universe
        if extra:
            raise ContractError(
                f"assignment mentions variables outside universe: {sorted(extra)}"
            )
        removed: set[Node] = set()
        for variable, value in assignment.items():
            true_lit = lit_node(variable, value)
            removed.add(true_lit)
            removed.update(self.graph.neighbors(true_lit))
        return is_acyclic(self.graph, forbidden=removed)


def clause_literal_graph(formula: Formula) -> ClauseLiteralGraph:
    g = Graph()
    for v in formula.universe:
        g.add_edge(lit_node(v, True), lit_node(v, False))
    for idx, clause in enumerate(formula.clauses):
        g.add_node(clause_node(idx))
        for lit in clause.literals:
            g.add_edge(lit_node(lit.variable, lit.positive), clause_node(idx))
    return ClauseLiteralGraph(g, formula.universe)


def restriction_is_acyclic(formula: Formula, assignment: Mapping[int, bool]) -> bool:
    """Whether the formula restricted by `assignment` is acyclic, decided on
    the clause-literal graph without rebuilding the restriction."""
    return clause_literal_graph(formula).residual_acyclic(assignment)
