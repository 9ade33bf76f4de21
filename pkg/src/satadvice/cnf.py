"""CNF formulas over DIMACS-numbered literals, partial assignments and reduction.

A literal is a nonzero int: ``v`` stands for x_v and ``-v`` for its negation.
Assignments are 0/1 sequences indexed from variable 1 (position 0 is x_1).
"""

from __future__ import annotations

import io
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

log = logging.getLogger(__name__)

Clause = tuple[int, ...]


class DimacsError(ValueError):
    pass


def lit_var(lit: int) -> int:
    return lit if lit > 0 else -lit


def lit_value(lit: int, bit: int) -> int:
    """Truth value of `lit` when its variable is set to `bit`."""
    return bit if lit > 0 else 1 - bit


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple[Clause, ...]
    k_bound: int | None = None

    def __post_init__(self):
        if self.num_vars < 0:
            raise ValueError("num_vars must be nonnegative")
        clean = []
        for idx, clause in enumerate(self.clauses, start=1):
            clean.append(_normalize_clause(clause, self.num_vars, idx))
        object.__setattr__(self, "clauses", tuple(clean))
        if self.k_bound is not None and clean and self.width > self.k_bound:
            raise ValueError(f"clause width {self.width} exceeds k_bound {self.k_bound}")

    @classmethod
    def from_clauses(cls, clauses: Iterable[Iterable[int]], num_vars: int | None = None,
                     k_bound: int | None = None) -> "CnfFormula":
        clauses = [tuple(c) for c in clauses]
        if num_vars is None:
            num_vars = max((abs(l) for c in clauses for l in c), default=0)
        return cls(num_vars, tuple(clauses), k_bound)

    @property
    def m(self) -> int:
        return len(self.clauses)

    @property
    def width(self) -> int:
        """Maximum clause width (0 for the empty formula)."""
        return max((len(c) for c in self.clauses), default=0)

    def occurrences(self) -> list[list[int]]:
        """Clause indices per variable (index 0 unused)."""
        occ: list[list[int]] = [[] for _ in range(self.num_vars + 1)]
        for ci, clause in enumerate(self.clauses):
            for lit in clause:
                occ[lit_var(lit)].append(ci)
        return occ

    def is_satisfied_by(self, x: Sequence[int]) -> bool:
        return count_satisfied(self, x) == self.m

    def to_dimacs(self, comments: Sequence[str] = ()) -> str:
        out = io.StringIO()
        for line in comments:
            out.write(f"c {line}\n")
        out.write(f"p cnf {self.num_vars} {self.m}\n")
        for clause in self.clauses:
            out.write(" ".join(map(str, clause)) + " 0\n")
        return out.getvalue()


def _normalize_clause(clause, num_vars: int, idx: int) -> Clause:
    seen: list[int] = []
    for lit in clause:
        lit = int(lit)
        if lit == 0 or abs(lit) > num_vars:
            raise ValueError(f"clause {idx}: literal {lit} out of range 1..{num_vars}")
        if -lit in seen:
            raise ValueError(f"clause {idx}: tautological clause")
        if lit not in seen:
            seen.append(lit)
    if not seen:
        raise ValueError(f"clause {idx}: empty clause")
    return tuple(seen)


def parse_dimacs(text: str | bytes) -> CnfFormula:
    """Parse DIMACS CNF text.

    A clause count that disagrees with the header is logged, not rejected.
    """
    if isinstance(text, bytes):
        text = text.decode()
    num_vars = None
    declared_m = None
    clauses: list[list[int]] = []
    current: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if num_vars is not None:
                raise DimacsError(f"line {lineno}: duplicate header")
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"line {lineno}: malformed header {line!r}")
            try:
                num_vars, declared_m = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError(f"line {lineno}: malformed header {line!r}") from None
            if num_vars < 0 or declared_m < 0:
                raise DimacsError(f"line {lineno}: negative counts in header")
            continue
        if num_vars is None:
            raise DimacsError(f"line {lineno}: clause before 'p cnf' header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"line {lineno}: bad token {tok!r}") from None
            if lit == 0:
                clauses.append(current)
                current = []
            else:
                current.append(lit)
    if num_vars is None:
        raise DimacsError("missing 'p cnf' header")
    if current:
        clauses.append(current)
    if len(clauses) != declared_m:
        log.warning("header declares %d clauses, found %d", declared_m, len(clauses))
    try:
        return CnfFormula.from_clauses(clauses, num_vars)
    except ValueError as exc:
        raise DimacsError(str(exc)) from None


def read_dimacs(path) -> CnfFormula:
    with open(path, "rb") as fh:
        return parse_dimacs(fh.read())


def write_dimacs(phi: CnfFormula, path, comments: Sequence[str] = ()) -> None:
    with open(path, "w") as fh:
        fh.write(phi.to_dimacs(comments))


def read_assignment(path) -> list[int]:
    with open(path) as fh:
        bits = [int(t) for t in fh.read().split()]
    if any(b not in (0, 1) for b in bits):
        raise ValueError("assignment file must contain only 0/1 values")
    return bits


def write_assignment(x: Sequence[int], path) -> None:
    with open(path, "w") as fh:
        fh.write(" ".join(str(int(b)) for b in x) + "\n")


class PartialAssignment:
    """Tri-state values for variables 1..n; ``None`` means unset."""

    def __init__(self, num_vars: int, values: dict[int, int] | None = None):
        self.num_vars = num_vars
        self._vals: list[int | None] = [None] * (num_vars + 1)
        for var, bit in (values or {}).items():
            self.set(var, bit)

    def _check(self, var: int):
        if not 1 <= var <= self.num_vars:
            raise IndexError(f"variable {var} out of range 1..{self.num_vars}")

    def get(self, var: int) -> int | None:
        self._check(var)
        return self._vals[var]

    def set(self, var: int, bit: int) -> None:
        self._check(var)
        if bit not in (0, 1):
            raise ValueError("bit must be 0 or 1")
        prev = self._vals[var]
        if prev is not None and prev != bit:
            raise ValueError(f"variable {var} already set to {prev}")
        self._vals[var] = bit

    def is_set(self, var: int) -> bool:
        return self.get(var) is not None

    def assigned(self) -> dict[int, int]:
        return {v: b for v, b in enumerate(self._vals) if v and b is not None}

    def unset(self) -> list[int]:
        return [v for v in range(1, self.num_vars + 1) if self._vals[v] is None]

    def lit_status(self, lit: int) -> int | None:
        bit = self._vals[lit_var(lit)]
        return None if bit is None else lit_value(lit, bit)

    def __len__(self):
        return sum(b is not None for b in self._vals[1:])

    def __repr__(self):
        return f"PartialAssignment({self.num_vars}, {self.assigned()})"

    @classmethod
    def from_complete(cls, x: Sequence[int]) -> "PartialAssignment":
        return cls(len(x), {i + 1: int(b) for i, b in enumerate(x)})


class Status(str, Enum):
    OPEN = "open"
    SATISFIED = "satisfied"
    FALSIFIED = "falsified"


@dataclass(frozen=True)
class ReductionOutcome:
    reduced: CnfFormula
    status: Status
    removed: int  # clauses removed as satisfied


def reduce(phi: CnfFormula, sigma: PartialAssignment) -> ReductionOutcome:
    """phi restricted by sigma: drop satisfied clauses and falsified literals.

    An emptied clause makes the outcome FALSIFIED; it is dropped from
    ``reduced`` (a CnfFormula cannot hold an empty clause).
    """
    kept: list[Clause] = []
    removed = 0
    falsified = False
    for clause in phi.clauses:
        rest = []
        sat = False
        for lit in clause:
            val = sigma.lit_status(lit)
            if val is None:
                rest.append(lit)
            elif val == 1:
                sat = True
                break
        if sat:
            removed += 1
        elif rest:
            kept.append(tuple(rest))
        else:
            falsified = True
    reduced = CnfFormula(phi.num_vars, tuple(kept))
    if falsified:
        status = Status.FALSIFIED
    elif not kept:
        status = Status.SATISFIED
    else:
        status = Status.OPEN
    return ReductionOutcome(reduced, status, removed)


def count_satisfied(phi: CnfFormula, x: Sequence[int]) -> int:
    if len(x) != phi.num_vars:
        raise ValueError(f"assignment has {len(x)} values, formula has {phi.num_vars} variables")
    total = 0
    for clause in phi.clauses:
        for lit in clause:
            if (x[lit - 1] == 1) if lit > 0 else (x[-lit - 1] == 0):
                total += 1
                break
    return total
