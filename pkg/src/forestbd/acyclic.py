"""Polynomial SAT and exact model counting for acyclic formulas.

The incidence forest is rooted at variable nodes and folded bottom-up.
Each variable node carries one count per truth value; each clause node
carries two counts, one for a parent occurrence that already satisfies
the clause and one for a parent that does not (the latter subtracts the
single child combination that leaves the clause falsified). Counts are
Python ints, so they never overflow.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import ContractError, CyclicInputError
from .formula import Assignment, Formula
from .graphs import VAR, Graph, incidence_graph, is_acyclic


@dataclass(frozen=True)
class ModelCount:
    """An exact model count over an explicit universe."""

    count: int
    universe_size: int

    def __post_init__(self) -> None:
        if self.count < 0 or self.count > 2**self.universe_size:
            raise ContractError(
                f"count {self.count} out of range for universe size {self.universe_size}"
            )


class _TreeTables:
    """DP tables for one incidence forest."""

    def __init__(self, formula: Formula) -> None:
        inc = incidence_graph(formula)
        if not is_acyclic(inc.graph):
            raise CyclicInputError("incidence graph is not a forest")
        self.formula = formula
        self.inc = inc
        self.graph: Graph = inc.graph
        # Per variable node: (ways with value False, ways with value True).
        self.var_ways: dict[tuple, tuple[int, int]] = {}
        # Per clause node: (ways when the parent satisfies it, ways when not).
        self.clause_ways: dict[tuple, tuple[int, int]] = {}
        self.parent: dict[tuple, tuple | None] = {}
        self.children: dict[tuple, list[tuple]] = {}
        self.roots: list[tuple] = []
        self.dead = formula.has_empty_clause()
        if not self.dead:
            self._fold()

    def _fold(self) -> None:
        seen: set[tuple] = set()
        for node in self.graph.sorted_nodes():
            if node in seen or node[0] != VAR:
                continue
            order = self._orient(node, seen)
            self.roots.append(node)
            for n in reversed(order):
                if n[0] == VAR:
                    self.var_ways[n] = (
                        self._var_value_ways(n, False),
                        self._var_value_ways(n, True),
                    )
                else:
                    self.clause_ways[n] = self._clause_parent_ways(n)

    def _orient(self, root: tuple, seen: set) -> list[tuple]:
        order = [root]
        self.parent[root] = None
        self.children[root] = []
        seen.add(root)
        stack = [root]
        while stack:
            node = stack.pop()
            for nb in sorted(self.graph.neighbors(node)):
                if nb in seen:
                    continue
                seen.add(nb)
                self.parent[nb] = node
                self.children[nb] = []
                self.children[node].append(nb)
                order.append(nb)
                stack.append(nb)
        return order

    def _var_value_ways(self, node: tuple, value: bool) -> int:
        ways = 1
        variable = node[1]
        for child in self.children[node]:
            sat, unsat = self.clause_ways[child]
            ways *= sat if self.inc.sign(variable, child[1]) == value else unsat
        return ways

    def _clause_parent_ways(self, node: tuple) -> tuple[int, int]:
        index = node[1]
        total = 1
        falsifying = 1
        for child in self.children[node]:
            w0, w1 = self.var_ways[child]
            total *= w0 + w1
            sign = self.inc.sign(child[1], index)
            falsifying *= w0 if sign else w1
        return total, total - falsifying

    def root_total(self, root: tuple) -> int:
        w0, w1 = self.var_ways[root]
        return w0 + w1


def count_models(formula: Formula, universe: Iterable[int]) -> ModelCount:
    """Exact number of assignments of `universe` satisfying the formula.

    Universe variables without occurrences contribute a factor of two
    each; an empty clause forces zero; the empty formula counts every
    assignment. The universe must cover every occurring variable.
    """
    target = frozenset(universe)
    if not formula.variables <= target:
        missing = sorted(formula.variables - target)
        raise ContractError(f"universe is missing occurring variables: {missing}")
    tables = _TreeTables(formula)
    size = len(target)
    if tables.dead:
        return ModelCount(0, size)
    count = 1
    for root in tables.roots:
        # Trees with edges hold all occurring variables and all clauses;
        # isolated variable nodes are priced by the free factor instead.
        if tables.graph.degree(root) > 0:
            count *= tables.root_total(root)
    count *= 2 ** (size - len(formula.variables))
    return ModelCount(count, size)


def satisfying_assignment(formula: Formula) -> Assignment | None:
    """A total satisfying assignment over the formula's universe, or None.

    Free variables default to False. Raises CyclicInputError when the
    incidence graph has a cycle.
    """
    tables = _TreeTables(formula)
    if tables.dead:
        return None
    for root in tables.roots:
        if tables.root_total(root) == 0:
            return None
    assignment: Assignment = {}
    for root in tables.roots:
        w0, _ = tables.var_ways[root]
        _descend_var(tables, assignment, root, w0 == 0)
    for v in formula.universe:
        assignment.setdefault(v, False)
    return assignment


def _descend_var(
    tables: _TreeTables, assignment: Assignment, node: tuple, value: bool
) -> None:
    stack: list[tuple[tuple, bool]] = [(node, value)]
    while stack:
        var_n, val = stack.pop()
        assignment[var_n[1]] = val
        for clause_child in tables.children[var_n]:
            parent_sat = tables.inc.sign(var_n[1], clause_child[1]) == val
            stack.extend(_pick_clause_children(tables, clause_child, parent_sat))


def _pick_clause_children(
    tables: _TreeTables, clause_n: tuple, parent_sat: bool
) -> list[tuple[tuple, bool]]:
    children = tables.children[clause_n]
    index = clause_n[1]
    picks: list[tuple[tuple, bool]] = []
    if parent_sat:
        for child in children:
            w0, w1 = tables.var_ways[child]
            picks.append((child, w0 == 0))
        return picks
    # The clause still needs a satisfying child: track whether the suffix can
    # still provide one and force the satisfying value when it cannot.
    sat_value = [tables.inc.sign(c[1], index) for c in children]
    viable_sat = [
        tables.var_ways[c][1 if sv else 0] > 0 for c, sv in zip(children, sat_value)
    ]
    suffix_can = [False] * (len(children) + 1)
    for i in range(len(children) - 1, -1, -1):
        suffix_can[i] = viable_sat[i] or suffix_can[i + 1]
    satisfied = False
    for i, child in enumerate(children):
        w0, w1 = tables.var_ways[child]
        chosen: bool | None = None
        for candidate in (False, True):
            ways = w1 if candidate else w0
            if ways == 0:
                continue
            if satisfied or candidate == sat_value[i] or suffix_can[i + 1]:
                chosen = candidate
                break
        if chosen is None:
            raise ContractError("inconsistent DP tables")  # unreachable on valid input
        satisfied = satisfied or chosen == sat_value[i]
        picks.append((child, chosen))
    return picks
