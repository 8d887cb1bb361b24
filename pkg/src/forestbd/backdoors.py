"""Verification predicates for the three backdoor notions.

A variable set is a deletion backdoor when removing its occurrences
leaves the incidence graph acyclic, a strong backdoor when every
assignment of it yields an acyclic restriction, and a weak backdoor when
some assignment yields an acyclic and satisfiable restriction.

The exponential verification loops walk assignments in lexicographic
order (variables ascending, False before True) and evaluate acyclicity on
a single clause-literal graph instead of rebuilding each restriction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Optional

from .acyclic import satisfying_assignment
from .errors import ContractError, ResourceLimitError
from .formula import Assignment, Formula
from .graphs import (
    CLAUSE,
    Cycle,
    IncidenceGraph,
    clause_literal_graph,
    incidence_graph,
    is_acyclic,
)
from .workers import all_true, first_hit

MAX_VERIFY_VARIABLES = 30


class KillMode(Enum):
    INTERNAL = "internal"
    WEAK_EXTERNAL = "weak-external"
    STRONG_EXTERNAL = "strong-external"


@dataclass(frozen=True)
class BackdoorVerdict:
    """Outcome of a detection run.

    `found` with a variable set (and, for weak detection, the witness
    assignment over it), or a certificate that no backdoor of size at most
    `budget` exists under the detector's stated guarantee.
    """

    found: bool
    variables: frozenset[int]
    budget: int
    witness: Optional[Assignment] = field(default=None, compare=False)

    @classmethod
    def yes(
        cls,
        variables: Iterable[int],
        budget: int,
        witness: Optional[Assignment] = None,
    ) -> BackdoorVerdict:
        return cls(True, frozenset(variables), budget, witness)

    @classmethod
    def no(cls, budget: int) -> BackdoorVerdict:
        return cls(False, frozenset(), budget, None)

    def sorted_variables(self) -> tuple[int, ...]:
        return tuple(sorted(self.variables))


def assignments_over(variables: Iterable[int]) -> Iterator[Assignment]:
    """All assignments of the variables, lexicographic with False first."""
    ordered = sorted(variables)
    for bits in itertools.product((False, True), repeat=len(ordered)):
        yield dict(zip(ordered, bits))


def _check_candidate(formula: Formula, variables: frozenset[int]) -> None:
    extra = variables - formula.universe
    if extra:
        raise ContractError(f"candidate set outside universe: {sorted(extra)}")


def _guard_size(variables: frozenset[int]) -> None:
    if len(variables) > MAX_VERIFY_VARIABLES:
        raise ResourceLimitError(
            f"refusing to enumerate 2^{len(variables)} assignments "
            f"(limit {MAX_VERIFY_VARIABLES} variables)"
        )


def is_deletion_backdoor(formula: Formula, variables: Iterable[int]) -> bool:
    candidate = frozenset(variables)
    _check_candidate(formula, candidate)
    residual = formula.without_variables(candidate)
    return is_acyclic(incidence_graph(residual).graph)


def is_strong_backdoor(
    formula: Formula, variables: Iterable[int], threads: int = 1
) -> bool:
    candidate = frozenset(variables)
    _check_candidate(formula, candidate)
    _guard_size(candidate)
    literal_graph = clause_literal_graph(formula)
    return all_true(
        literal_graph.residual_acyclic, assignments_over(candidate), threads
    )


def weak_backdoor_witness(
    formula: Formula, variables: Iterable[int], threads: int = 1
) -> Optional[Assignment]:
    """The lexicographically first assignment of the set whose restriction
    is acyclic and satisfiable, or None."""
    candidate = frozenset(variables)
    _check_candidate(formula, candidate)
    _guard_size(candidate)
    literal_graph = clause_literal_graph(formula)

    def probe(tau: Assignment) -> Optional[Assignment]:
        if not literal_graph.residual_acyclic(tau):
            return None
        if satisfying_assignment(formula.restrict(tau)) is None:
            return None
        return tau

    return first_hit(probe, assignments_over(candidate), threads)


def external_killers(
    inc: IncidenceGraph, cycle: Cycle, pool: Iterable[int]
) -> frozenset[int]:
    """Pool variables outside the cycle adjacent to at least one of its
    clauses; satisfying such a clause can remove the cycle."""
    allowed = frozenset(pool) - frozenset(cycle.variables)
    found: set[int] = set()
    for index in cycle.clause_indices:
        for variable in inc.variables_adjacent_to(index):
            if variable in allowed:
                found.add(variable)
    return frozenset(found)


def opposite_sign_clauses(
    inc: IncidenceGraph, variable: int, cycle: Cycle
) -> Optional[tuple[int, int]]:
    """The least clause pair of the cycle holding the variable positively in
    the first and negatively in the second, or None.

    Either value of the variable satisfies (and removes) one of the two
    clauses, so no restriction of the variable keeps the whole cycle.
    """
    if variable in cycle.variables:
        raise ContractError(f"variable {variable} lies on the cycle")
    positive = [i for i in cycle.clause_indices if inc.sign(variable, i) is True]
    negative = [i for i in cycle.clause_indices if inc.sign(variable, i) is False]
    if positive and negative:
        return (min(positive), min(negative))
    return None


def kill_modes(inc: IncidenceGraph, variable: int, cycle: Cycle) -> frozenset[KillMode]:
    if variable in cycle.variables:
        return frozenset({KillMode.INTERNAL})
    modes: set[KillMode] = set()
    clause_nodes = frozenset(
        n for n in cycle.node_set if isinstance(n, tuple) and n[0] == CLAUSE
    )
    if inc.clause_neighbor_count(variable, clause_nodes) > 0:
        modes.add(KillMode.WEAK_EXTERNAL)
        if opposite_sign_clauses(inc, variable, cycle) is not None:
            modes.add(KillMode.STRONG_EXTERNAL)
    return frozenset(modes)
