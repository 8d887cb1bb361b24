"""Instance generators.

All generators are pure functions of their parameters; the random one is
a pure function of its seed.
"""

from __future__ import annotations

import random
from typing import Sequence

from .errors import ContractError
from .formula import Clause, Formula, Literal


def grid_formula(size: int) -> Formula:
    """A size x size grid of variables, each grid edge subdivided by a
    clause on its positive endpoints, plus one extra variable occurring
    positively in every horizontal-edge clause and negatively in every
    vertical-edge clause.

    The extra variable alone is a weak and strong backdoor: either value
    clears all horizontal or all vertical clauses, leaving disjoint paths.
    Deleting it instead leaves the full subdivided grid, so deletion
    backdoors must grow with the grid.
    """
    if size < 2:
        raise ContractError(f"grid size must be >= 2, got {size}")

    def cell(row: int, col: int) -> int:
        return row * size + col + 1

    extra = size * size + 1
    clauses: list[Clause] = []
    for row in range(size):
        for col in range(size - 1):
            clauses.append(
                Clause(
                    frozenset(
                        {
                            Literal(cell(row, col)),
                            Literal(cell(row, col + 1)),
                            Literal(extra, True),
                        }
                    )
                )
            )
    for row in range(size - 1):
        for col in range(size):
            clauses.append(
                Clause(
                    frozenset(
                        {
                            Literal(cell(row, col)),
                            Literal(cell(row + 1, col)),
                            Literal(extra, False),
                        }
                    )
                )
            )
    return Formula(tuple(clauses), frozenset(range(1, extra + 1)))


def hitting_set_formula(sets: Sequence[Sequence[int]]) -> Formula:
    """Encode a hitting set instance so that its minimum hitting set size
    equals the minimum weak backdoor size of the output.

    Each input set gets two fresh selector variables z, z' and two
    clauses: (z or z') and (set elements or not-z or not-z'). Hitting all
    element clauses removes every four-cycle through the selector pairs.
    """
    if not sets:
        raise ContractError("family must be nonempty")
    elements: set[int] = set()
    for i, group in enumerate(sets):
        if not group:
            raise ContractError(f"set {i} in the family is empty")
        for e in group:
            if not isinstance(e, int) or e < 1:
                raise ContractError(f"universe elements must be positive ints, got {e!r}")
            elements.add(e)
    base = max(elements)
    clauses: list[Clause] = []
    for i, group in enumerate(sets):
        z = base + 2 * i + 1
        z_prime = base + 2 * i + 2
        clauses.append(Clause(frozenset({Literal(z), Literal(z_prime)})))
        clauses.append(
            Clause(
                frozenset(
                    {Literal(e) for e in group}
                    | {Literal(z, False), Literal(z_prime, False)}
                )
            )
        )
    return Formula(tuple(clauses), frozenset(range(1, base + 2 * len(sets) + 1)))


def random_rcnf(n: int, m: int, width: int, seed: int) -> Formula:
    """m clauses over n variables, each on `width` distinct variables with
    uniform polarities; deterministic in the seed."""
    if n < 0 or m < 0:
        raise ContractError("variable and clause counts must be nonnegative")
    if width < 1 or width > n:
        raise ContractError(
            f"clause width {width} is infeasible for {n} variables"
        )
    rng = random.Random(seed)
    clauses: list[Clause] = []
    for _ in range(m):
        chosen = rng.sample(range(1, n + 1), width)
        clauses.append(
            Clause(frozenset(Literal(v, rng.random() < 0.5) for v in chosen))
        )
    return Formula(tuple(clauses), frozenset(range(1, n + 1)))
