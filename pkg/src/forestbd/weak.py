"""Exact detection of weak backdoor sets for bounded-width CNF.

The detector routes on a cycle packing dichotomy. When the incidence
graph holds few disjoint cycles, an exact memoized branch over cycle
variables and adjacent outside variables decides the question outright.
When it holds many, every way of designating which packed cycles a
backdoor may touch directly is examined; the remaining cycles must be
removed from outside, and selection rules either produce a small variable
set that every conforming backdoor intersects or certify that none
exists. Branching on that set with a reduced budget keeps the search
fixed-parameter sized.

Rule identifiers (in application order):
  unkillable-cycle       some designated-external cycle has no outside
                         variable adjacent to its clauses; empty selection
  concentrated-killers   a heavy killer exists and few killers approach its
                         adjacency weight; select all of those
  dominant-killer        a heavy killer exists amid many near-peers; select
                         the champion alone
  killer-overlap-excess  two designated-external cycles share too many
                         killers; empty selection
  shared-killers         select every variable able to kill two or more
                         designated-external cycles
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .acyclic import satisfying_assignment
from .backdoors import BackdoorVerdict, external_killers
from .errors import ContractError
from .formula import Assignment, Formula
from .graphs import (
    CLAUSE,
    Cycle,
    FeedbackSet,
    IncidenceGraph,
    disjoint_cycles_or_feedback,
    incidence_graph,
    is_acyclic,
    shortest_cycle,
)
from .workers import first_hit


@dataclass(frozen=True)
class WeakParameters:
    """Derived branching thresholds for a budget and clause width."""

    budget: int
    width: int
    cycles: int
    external_cycles: int
    multi: int
    support: int
    overlap: int

    @classmethod
    def derive(cls, budget: int, width: int) -> WeakParameters:
        if budget < 1:
            raise ContractError(f"budget must be >= 1, got {budget}")
        r = max(3, width)
        k = budget
        cycles = 2 * k + 1
        multi = 4 * k
        support = (r - 3) * (k**3 + 9) + 4 * k**2 + k
        overlap = (r - 2) * (k * multi) ** 2 + k
        return cls(k, r, cycles, cycles - k, multi, support, overlap)


@dataclass(frozen=True)
class KillChoice:
    """One way of designating which packed cycles a backdoor may touch
    directly; all others must be removed from outside, so their variables
    are barred from the pool."""

    internal: tuple[Cycle, ...]
    external: tuple[Cycle, ...]
    pool: frozenset[int]

    @classmethod
    def split(
        cls, formula: Formula, packing: Sequence[Cycle], internal_indices: Sequence[int]
    ) -> KillChoice:
        chosen = frozenset(internal_indices)
        internal = tuple(c for i, c in enumerate(packing) if i in chosen)
        external = tuple(c for i, c in enumerate(packing) if i not in chosen)
        barred = frozenset(v for c in external for v in c.variables)
        return cls(internal, external, formula.universe - barred)


@dataclass(frozen=True)
class RuleOutcome:
    rule: str
    selected: frozenset[int]


def _killer_weights(
    inc: IncidenceGraph, cycle: Cycle, killers: frozenset[int]
) -> dict[int, int]:
    clause_nodes = frozenset(n for n in cycle.node_set if n[0] == CLAUSE)
    return {v: inc.clause_neighbor_count(v, clause_nodes) for v in killers}


def weak_rule_outcome(
    formula: Formula,
    inc: IncidenceGraph,
    choice: KillChoice,
    params: WeakParameters,
) -> RuleOutcome:
    """Apply the first matching selection rule to one designation.

    The outcome's set intersects every weak backdoor within the pool of
    size at most the budget; an empty set certifies that none exists.
    """
    killer_sets = [external_killers(inc, c, choice.pool) for c in choice.external]
    if any(not ks for ks in killer_sets):
        return RuleOutcome("unkillable-cycle", frozenset())

    weights = [
        _killer_weights(inc, cycle, ks)
        for cycle, ks in zip(choice.external, killer_sets)
    ]
    champions: list[tuple[int, int]] = []
    for w in weights:
        champion = max(w, key=lambda v: (w[v], -v))
        champions.append((champion, w[champion]))

    k = params.budget
    for (champion, weight), w in zip(champions, weights):
        if weight < params.multi:
            continue
        heavy = frozenset(v for v, c in w.items() if 2 * k * c >= weight)
        if len(heavy) <= params.support:
            return RuleOutcome("concentrated-killers", heavy)
    for (champion, weight), w in zip(champions, weights):
        if weight < params.multi:
            continue
        heavy_count = sum(1 for c in w.values() if 2 * k * c >= weight)
        if heavy_count > params.support:
            return RuleOutcome("dominant-killer", frozenset({champion}))

    for i, j in itertools.combinations(range(len(killer_sets)), 2):
        if len(killer_sets[i] & killer_sets[j]) >= params.overlap:
            return RuleOutcome("killer-overlap-excess", frozenset())

    shared: set[int] = set()
    for i, j in itertools.combinations(range(len(killer_sets)), 2):
        shared |= killer_sets[i] & killer_sets[j]
    return RuleOutcome("shared-killers", frozenset(shared))


def iter_weak_outcomes(
    formula: Formula,
    inc: IncidenceGraph,
    packing: Sequence[Cycle],
    params: WeakParameters,
) -> Iterator[tuple[KillChoice, RuleOutcome]]:
    if len(packing) < params.cycles:
        raise ContractError(
            f"need {params.cycles} disjoint cycles, got {len(packing)}"
        )
    base = tuple(packing[: params.cycles])
    for indices in itertools.combinations(range(params.cycles), params.budget):
        choice = KillChoice.split(formula, base, indices)
        yield choice, weak_rule_outcome(formula, inc, choice, params)


def weak_candidate_pool(
    formula: Formula,
    inc: IncidenceGraph,
    packing: Sequence[Cycle],
    params: WeakParameters,
) -> frozenset[int]:
    """Union of rule selections over every designation; every weak backdoor
    within budget intersects it, and an empty union certifies none exists."""
    pool: set[int] = set()
    for _, outcome in iter_weak_outcomes(formula, inc, packing, params):
        pool |= outcome.selected
    return frozenset(pool)


def detect_weak(
    formula: Formula,
    budget: int,
    width: int | None = None,
    threads: int = 1,
) -> BackdoorVerdict:
    """Exact weak backdoor detection for formulas of bounded clause width.

    Found verdicts carry the backdoor set and a witness assignment over it
    whose restriction is acyclic and satisfiable; a negative verdict means
    no weak backdoor of size at most `budget` exists.
    """
    if budget < 0:
        raise ContractError(f"budget must be >= 0, got {budget}")
    actual = formula.max_clause_width()
    if width is None:
        width = max(3, actual)
    if actual > width:
        raise ContractError(
            f"clause width {actual} exceeds declared bound {width}"
        )
    return _detect_weak(formula, budget, max(3, width), threads)


def _detect_weak(
    formula: Formula, budget: int, width: int, threads: int
) -> BackdoorVerdict:
    inc = incidence_graph(formula)
    if is_acyclic(inc.graph):
        if satisfying_assignment(formula) is not None:
            return BackdoorVerdict.yes((), budget, {})
        return BackdoorVerdict.no(budget)
    if budget == 0:
        return BackdoorVerdict.no(0)
    params = WeakParameters.derive(budget, width)
    split = disjoint_cycles_or_feedback(inc.graph, params.cycles)
    if isinstance(split, FeedbackSet):
        return weak_exact_search(formula, budget)
    pool = weak_candidate_pool(formula, inc, split.cycles, params)
    branches = [(s, value) for s in sorted(pool) for value in (False, True)]

    def explore(branch: tuple[int, bool]) -> Optional[BackdoorVerdict]:
        candidate, value = branch
        # Nested levels run sequentially; only this level fans out.
        sub = _detect_weak(formula.restrict({candidate: value}), budget - 1, width, 1)
        if not sub.found:
            return None
        witness = dict(sub.witness or {})
        witness[candidate] = value
        return BackdoorVerdict.yes(sub.variables | {candidate}, budget, witness)

    hit = first_hit(explore, branches, threads)
    return hit if hit is not None else BackdoorVerdict.no(budget)


def weak_exact_search(formula: Formula, budget: int) -> BackdoorVerdict:
    """Exact weak backdoor search by cycle branching, memoized on the
    restricted formula.

    Any weak backdoor must remove the chosen cycle: either it assigns one
    of the cycle's variables, or it satisfies one of the cycle's clauses
    through an adjacent outside variable. Sound and complete for every
    budget and width.
    """
    if budget < 0:
        raise ContractError(f"budget must be >= 0, got {budget}")
    memo: dict[tuple[Formula, int], Optional[tuple[frozenset[int], Assignment]]] = {}

    def search(
        current: Formula, remaining: int
    ) -> Optional[tuple[frozenset[int], Assignment]]:
        key = (current, remaining)
        if key in memo:
            return memo[key]
        result = _expand(current, remaining)
        memo[key] = result
        return result

    def _expand(
        current: Formula, remaining: int
    ) -> Optional[tuple[frozenset[int], Assignment]]:
        if current.has_empty_clause():
            # Restriction never removes an empty clause, so no witness can
            # make any deeper restriction satisfiable.
            return None
        inc = incidence_graph(current)
        if is_acyclic(inc.graph):
            if satisfying_assignment(current) is None:
                return None
            return (frozenset(), {})
        if remaining == 0:
            return None
        cycle = shortest_cycle(inc.graph)
        assert cycle is not None
        cycle_vars = frozenset(cycle.variables)
        candidates = sorted(
            cycle_vars | external_killers(inc, cycle, current.universe - cycle_vars)
        )
        for candidate in candidates:
            for value in (False, True):
                sub = search(current.restrict({candidate: value}), remaining - 1)
                if sub is not None:
                    variables, witness = sub
                    return (
                        variables | {candidate},
                        {**witness, candidate: value},
                    )
        return None

    result = search(formula, budget)
    if result is None:
        return BackdoorVerdict.no(budget)
    variables, witness = result
    return BackdoorVerdict.yes(variables, budget, witness)
