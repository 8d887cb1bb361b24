"""CNF data model and DIMACS round-tripping.

All values are immutable; every transformation returns a new formula.
Clause positions act as stable identifiers: restriction and variable
deletion keep surviving clauses in their original relative order, and
variable deletion keeps even emptied clauses, so downstream graph code
can name clauses by index.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, Mapping

from .errors import ContractError, DimacsError

# Partial truth assignment: variable id -> value.
Assignment = Dict[int, bool]


@dataclass(frozen=True, order=True)
class Literal:
    """A variable occurrence with a polarity."""

    variable: int
    positive: bool = True

    def __post_init__(self) -> None:
        if not isinstance(self.variable, int) or self.variable < 1:
            raise ContractError(f"variable ids start at 1, got {self.variable!r}")

    def negated(self) -> Literal:
        return Literal(self.variable, not self.positive)

    def to_int(self) -> int:
        return self.variable if self.positive else -self.variable

    @classmethod
    def from_int(cls, value: int) -> Literal:
        if value == 0:
            raise ContractError("0 is not a literal")
        return cls(abs(value), value > 0)

    def __repr__(self) -> str:
        return str(self.to_int())


@dataclass(frozen=True)
class Clause:
    """A disjunction of literals over pairwise distinct variables.

    A clause never contains a complementary pair; duplicate literals
    collapse because the underlying container is a set.
    """

    literals: frozenset[Literal]

    def __post_init__(self) -> None:
        seen: set[int] = set()
        for lit in self.literals:
            if lit.variable in seen:
                raise ContractError(
                    f"clause contains variable {lit.variable} with both polarities"
                )
            seen.add(lit.variable)

    @classmethod
    def from_ints(cls, values: Iterable[int]) -> Clause:
        return cls(frozenset(Literal.from_int(v) for v in values))

    @cached_property
    def variables(self) -> frozenset[int]:
        return frozenset(lit.variable for lit in self.literals)

    def polarity(self, variable: int) -> bool | None:
        """Polarity of `variable` in this clause, or None if absent."""
        for lit in self.literals:
            if lit.variable == variable:
                return lit.positive
        return None

    def satisfied_by(self, assignment: Mapping[int, bool]) -> bool:
        return any(
            lit.variable in assignment and assignment[lit.variable] == lit.positive
            for lit in self.literals
        )

    def sorted_ints(self) -> tuple[int, ...]:
        return tuple(lit.to_int() for lit in sorted(self.literals))

    def __len__(self) -> int:
        return len(self.literals)

    def __repr__(self) -> str:
        return "Clause(" + " ".join(str(v) for v in self.sorted_ints()) + ")"


@dataclass(frozen=True)
class Formula:
    """A CNF formula: an ordered clause list over an explicit universe.

    The universe may be a strict superset of the occurring variables;
    counting operations take it as the set of variables an assignment
    ranges over.
    """

    clauses: tuple[Clause, ...]
    universe: frozenset[int]

    def __post_init__(self) -> None:
        for v in self.universe:
            if not isinstance(v, int) or v < 1:
                raise ContractError(f"universe contains invalid variable id {v!r}")
        occurring = frozenset(v for c in self.clauses for v in c.variables)
        if not occurring <= self.universe:
            missing = sorted(occurring - self.universe)
            raise ContractError(f"clauses mention variables outside universe: {missing}")

    @classmethod
    def from_ints(
        cls, clauses: Iterable[Iterable[int]], num_vars: int | None = None
    ) -> Formula:
        built = tuple(Clause.from_ints(c) for c in clauses)
        if num_vars is None:
            universe = frozenset(v for c in built for v in c.variables)
        else:
            universe = frozenset(range(1, num_vars + 1))
        return cls(built, universe)

    @cached_property
    def variables(self) -> frozenset[int]:
        """Variables with at least one occurrence."""
        return frozenset(v for c in self.clauses for v in c.variables)

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def length(self) -> int:
        """Total number of literal occurrences."""
        return sum(len(c) for c in self.clauses)

    def max_clause_width(self) -> int:
        return max((len(c) for c in self.clauses), default=0)

    def has_empty_clause(self) -> bool:
        return any(len(c) == 0 for c in self.clauses)

    def restrict(self, assignment: Mapping[int, bool]) -> Formula:
        """Apply a partial assignment: drop satisfied clauses, strip false
        literals, shrink the universe by the assigned variables."""
        extra = set(assignment) - self.universe
        if extra:
            raise ContractError(
                f"assignment mentions variables outside universe: {sorted(extra)}"
            )
        kept: list[Clause] = []
        for clause in self.clauses:
            satisfied = False
            remaining: list[Literal] = []
            for lit in clause.literals:
                if lit.variable in assignment:
                    if assignment[lit.variable] == lit.positive:
                        satisfied = True
                        break
                else:
                    remaining.append(lit)
            if not satisfied:
                kept.append(Clause(frozenset(remaining)))
        return Formula(tuple(kept), self.universe - set(assignment))

    def without_variables(self, variables: Iterable[int]) -> Formula:
        """Delete every occurrence of the given variables; clauses are kept
        (possibly emptied) and the universe shrinks."""
        removed = frozenset(variables)
        extra = removed - self.universe
        if extra:
            raise ContractError(
                f"deletion set outside universe: {sorted(extra)}"
            )
        stripped = tuple(
            Clause(frozenset(l for l in c.literals if l.variable not in removed))
            for c in self.clauses
        )
        return Formula(stripped, self.universe - removed)

    def satisfied_by(self, assignment: Mapping[int, bool]) -> bool:
        return all(c.satisfied_by(assignment) for c in self.clauses)

    def __repr__(self) -> str:
        return f"Formula({self.num_clauses} clauses over {len(self.universe)} vars)"


def parse_dimacs(text: str) -> Formula:
    """Parse DIMACS CNF text into a Formula.

    The universe is {1..n} from the header. Duplicate literals inside a
    clause collapse; a clause holding a variable with both polarities is
    rejected.
    """
    header: tuple[int, int] | None = None
    body_tokens: list[str] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("c"):
            continue
        if stripped.startswith("p"):
            if header is not None:
                raise DimacsError(f"line {line_no}: duplicate header")
            parts = stripped.split()
            if len(parts) != 4 or parts[0] != "p" or parts[1] != "cnf":
                raise DimacsError(f"line {line_no}: malformed header {stripped!r}")
            try:
                n, m = int(parts[2]), int(parts[3])
            except ValueError as exc:
                raise DimacsError(f"line {line_no}: malformed header {stripped!r}") from exc
            if n < 0 or m < 0:
                raise DimacsError(f"line {line_no}: negative counts in header")
            header = (n, m)
            continue
        if header is None:
            raise DimacsError(f"line {line_no}: clause data before header")
        body_tokens.extend(stripped.split())
    if header is None:
        raise DimacsError("missing 'p cnf' header")
    n, m = header

    clauses: list[Clause] = []
    current: list[int] = []
    for token in body_tokens:
        try:
            value = int(token)
        except ValueError as exc:
            raise DimacsError(f"non-integer token {token!r} in clause data") from exc
        if value == 0:
            try:
                clauses.append(Clause.from_ints(current))
            except ContractError as exc:
                raise DimacsError(f"clause {len(clauses) + 1}: {exc}") from exc
            current = []
            continue
        if abs(value) > n:
            raise DimacsError(
                f"literal {value} exceeds declared variable count {n}"
            )
        current.append(value)
    if current:
        raise DimacsError("unterminated clause at end of input")
    if len(clauses) != m:
        raise DimacsError(f"header declares {m} clauses, found {len(clauses)}")
    return Formula(tuple(clauses), frozenset(range(1, n + 1)))


def emit_dimacs(formula: Formula) -> str:
    """Serialize to DIMACS CNF.

    The declared variable count is the largest universe id, so parsing the
    output reproduces the universe exactly whenever it is contiguous from 1
    (true for every generator in this package).
    """
    n = max(formula.universe, default=0)
    lines = [f"p cnf {n} {formula.num_clauses}"]
    for clause in formula.clauses:
        ints = clause.sorted_ints()
        lines.append(" ".join(str(v) for v in ints) + (" 0" if ints else "0"))
    return "\n".join(lines) + "\n"
