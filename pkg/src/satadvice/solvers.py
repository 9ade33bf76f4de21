"""PPZ/PPSZ with subset advice, D-implication, and an exact DPLL oracle.

PPZ is the D = 1 case of :func:`ppsz_with_advice`; there is no separate path.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .advice import SubsetAdvice
from .cnf import CnfFormula, PartialAssignment, Status, reduce


class Contradiction(Exception):
    """The current partial assignment cannot be extended (branch is dead)."""


class AdviceContradiction(Exception):
    """Fixing the advice variables already falsifies a clause."""


class SizeGuardError(ValueError):
    pass


def _satisfiable(clauses: Sequence[tuple[int, ...]]) -> bool:
    """Brute-force satisfiability of a handful of short clauses."""
    if any(not c for c in clauses):
        return False
    if not clauses:
        return True
    variables = sorted({abs(l) for c in clauses for l in c})
    pos = {v: i for i, v in enumerate(variables)}
    masks = []
    for c in clauses:
        pm = nm = 0
        for lit in c:
            if lit > 0:
                pm |= 1 << pos[lit]
            else:
                nm |= 1 << pos[-lit]
        masks.append((pm, nm))
    full = (1 << len(variables)) - 1
    for a in range(1 << len(variables)):
        na = full ^ a
        for pm, nm in masks:
            if not (a & pm or na & nm):
                break
        else:
            return True
    return False


class Implicator:
    """D-implication queries against a fixed formula.

    ``vals`` is a list indexed by variable with -1 for unset. A forcing set
    for x = b is a connected set of at most D live clauses, one of them
    containing the literal that x = b makes true, which becomes
    unsatisfiable once x takes the other value. A set whose residual widths
    w satisfy sum 2^-w < 1 is always satisfiable, which prunes the search.
    """

    def __init__(self, phi: CnfFormula):
        self.phi = phi
        self.clauses = phi.clauses
        self.occ = phi.occurrences()

    def _residual(self, ci: int, vals, x: int, xlit_false: int):
        # residual of clause ci with x set so that literal xlit_false is false
        out = []
        for lit in self.clauses[ci]:
            v = lit if lit > 0 else -lit
            if v == x:
                if lit == xlit_false:
                    continue
                return None
            val = vals[v]
            if val < 0:
                out.append(lit)
            elif (val == 1) == (lit > 0):
                return None
        return tuple(out)

    def _forcing_set(self, vals, x: int, b: int, D: int):
        lit_b = x if b else -x
        cache: dict[int, tuple | None] = {}

        def res(ci):
            if ci not in cache:
                cache[ci] = self._residual(ci, vals, x, lit_b)
            return cache[ci]

        starts = []
        for ci in self.occ[x]:
            if lit_b in self.clauses[ci]:
                r = res(ci)
                if r is None:
                    continue
                if not r:
                    return (ci,)
                starts.append((ci, r))
        if D == 1 or not starts:
            return None
        seen: set[frozenset] = set()

        def grow(ids, ress, weight):
            if weight >= 1.0 and not _satisfiable(ress):
                return ids
            left = D - len(ids)
            if left == 0 or weight + 0.5 * left < 1.0:
                return None
            touch = {x}
            for r in ress:
                touch.update(abs(l) for l in r)
            for v in touch:
                for ci in self.occ[v]:
                    if ci in ids:
                        continue
                    r = res(ci)
                    if r is None:
                        continue
                    key = frozenset(ids + (ci,))
                    if key in seen:
                        continue
                    seen.add(key)
                    found = grow(ids + (ci,), ress + (r,), weight + 2.0 ** -len(r))
                    if found:
                        return found
            return None

        for ci, r in starts:
            seen.add(frozenset((ci,)))
            found = grow((ci,), (r,), 2.0 ** -len(r))
            if found:
                return found
        return None

    def _consistent(self, vals, x: int, b: int, ids) -> bool:
        lit_false = -x if b else x
        ress = []
        for ci in ids:
            r = self._residual(ci, vals, x, lit_false)
            if r is not None:
                ress.append(r)
        return _satisfiable(ress)

    def implied(self, vals, x: int, D: int) -> int | None:
        """Forced bit of unset variable x, or None. Raises Contradiction."""
        f1 = self._forcing_set(vals, x, 1, D)
        f0 = self._forcing_set(vals, x, 0, D)
        if f1 and f0:
            raise Contradiction(f"x{x} forced both ways")
        if f1 is None and f0 is None:
            return None
        b, ids = (1, f1) if f1 else (0, f0)
        if not self._consistent(vals, x, b, ids):
            raise Contradiction(f"clauses {ids} unsatisfiable")
        return b

    def falsified_by(self, vals, x: int) -> bool:
        """Did the latest assignment to x empty some clause?"""
        for ci in self.occ[x]:
            for lit in self.clauses[ci]:
                val = vals[abs(lit)]
                if val < 0 or (val == 1) == (lit > 0):
                    break
            else:
                return True
        return False


def _vals_from(sigma: PartialAssignment) -> list[int]:
    vals = [-1] * (sigma.num_vars + 1)
    for v, b in sigma.assigned().items():
        vals[v] = b
    return vals


def d_implies(phi: CnfFormula, sigma: PartialAssignment, var: int, D: int) -> int | None:
    """Bit forced on `var` by some set of <= D clauses of phi|sigma, else None.

    Raises Contradiction when the clause sets examined show phi|sigma is dead.
    """
    if sigma.is_set(var):
        raise ValueError(f"variable {var} already set")
    if D < 1:
        raise ValueError("D must be >= 1")
    return Implicator(phi).implied(_vals_from(sigma), var, D)


@dataclass
class SolverConfig:
    implication_D: int = 1
    iterations_T: int | str = "auto"
    failure_prob_delta: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if self.implication_D < 1:
            raise ValueError("D must be >= 1")
        if not 0.0 < self.failure_prob_delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        if self.iterations_T != "auto" and int(self.iterations_T) < 1:
            raise ValueError("T must be a positive integer or 'auto'")


@dataclass
class RunStats:
    num_vars: int
    advice_assigned: int = 0
    iterations_used: int = 0
    iterations_planned: int = 0
    forced: list[int] = field(default_factory=list)
    guessed: list[int] = field(default_factory=list)
    completed: list[bool] = field(default_factory=list)

    def mean_guessed(self) -> float:
        done = [g for g, c in zip(self.guessed, self.completed) if c]
        return float(np.mean(done)) if done else math.nan

    def to_dict(self) -> dict:
        return {
            "num_vars": self.num_vars,
            "advice_assigned": self.advice_assigned,
            "iterations_used": self.iterations_used,
            "iterations_planned": self.iterations_planned,
            "aborted": sum(not c for c in self.completed),
            "mean_forced": float(np.mean(self.forced)) if self.forced else None,
            "mean_guessed": float(np.mean(self.guessed)) if self.guessed else None,
            "forced": self.forced,
            "guessed": self.guessed,
        }


@dataclass
class SolveResult:
    verdict: str  # "sat" or "unsat-presumed"
    assignment: list[int] | None
    stats: RunStats


def predicted_guesses(num_free: int, k: int, epsilon: float) -> float:
    """PPZ expected guessed count for `num_free` non-advice variables."""
    if num_free == 0:
        return 0.0
    k = max(k, 1)
    # (1 - eps^k)/(1 - eps) written as a sum so eps = 1 is harmless
    rate = 1.0 - sum(epsilon ** j for j in range(k)) / k
    return num_free * rate


def auto_iterations(num_free: int, k: int, epsilon: float, delta: float) -> int:
    g = predicted_guesses(num_free, k, epsilon)
    return max(1, math.ceil(math.log(1.0 / delta) * 2.0 ** g))


def _apply_advice(phi: CnfFormula, advice: SubsetAdvice | None) -> tuple[list[int], Status]:
    sigma = PartialAssignment(phi.num_vars)
    if advice is not None:
        if advice.num_vars != phi.num_vars:
            raise ValueError("advice and formula disagree on the number of variables")
        for v, b in advice.revealed.items():
            sigma.set(v, b)
    out = reduce(phi, sigma)
    if out.status is Status.FALSIFIED:
        raise AdviceContradiction("advice falsifies a clause")
    return _vals_from(sigma), out.status


def run_iteration(imp: Implicator, base_vals: list[int], order: Sequence[int], D: int,
                  guesses: Sequence[int]) -> tuple[list[int] | None, int, int]:
    """One pass of the forcing/guessing loop over `order`.

    `guesses[v]` is the bit used when v is not forced. Returns
    (vals or None if the pass died, forced count, guessed count).
    """
    vals = list(base_vals)
    forced = guessed = 0
    for x in order:
        try:
            b = imp.implied(vals, x, D)
        except Contradiction:
            return None, forced, guessed
        if b is None:
            b = guesses[x]
            guessed += 1
        else:
            forced += 1
        vals[x] = b
        if imp.falsified_by(vals, x):
            return None, forced, guessed
    return vals, forced, guessed


def ppsz_with_advice(phi: CnfFormula, advice: SubsetAdvice | None = None,
                     cfg: SolverConfig | None = None) -> SolveResult:
    """Randomized PPZ (D = 1) / PPSZ search with subset advice.

    Raises AdviceContradiction if the advice alone falsifies phi.
    """
    cfg = cfg or SolverConfig()
    base_vals, status = _apply_advice(phi, advice)
    n = phi.num_vars
    stats = RunStats(num_vars=n, advice_assigned=n - base_vals[1:].count(-1))
    free = [v for v in range(1, n + 1) if base_vals[v] < 0]
    if status is Status.SATISFIED or not free:
        x = [max(b, 0) for b in base_vals[1:]]
        if phi.is_satisfied_by(x):
            return SolveResult("sat", x, stats)
    eps = advice.epsilon if advice is not None else 0.0
    if cfg.iterations_T == "auto":
        T = auto_iterations(len(free), phi.width, eps, cfg.failure_prob_delta)
    else:
        T = int(cfg.iterations_T)
    stats.iterations_planned = T
    imp = Implicator(phi)
    rng = np.random.default_rng(cfg.seed)
    is_free = np.array([False] + [b < 0 for b in base_vals[1:]])
    for _ in range(T):
        # fixed draw count per iteration keeps iteration i identical across advice levels
        perm = rng.permutation(np.arange(1, n + 1))
        coins = rng.integers(0, 2, size=n + 1)
        order = perm[is_free[perm]].tolist()
        vals, forced, guessed = run_iteration(imp, base_vals, order, cfg.implication_D, coins.tolist())
        stats.iterations_used += 1
        stats.forced.append(forced)
        stats.guessed.append(guessed)
        stats.completed.append(vals is not None)
        if vals is not None:
            x = vals[1:]
            if phi.is_satisfied_by(x):
                return SolveResult("sat", x, stats)
    return SolveResult("unsat-presumed", None, stats)


def guessed_on_correct_path(phi: CnfFormula, planted: Sequence[int], advice: SubsetAdvice | None,
                            D: int, samples: int, seed: int) -> RunStats:
    """Forced/guessed counts along the run in which every guess is right.

    This is the G(pi) of the success analysis: guesses take the planted
    value, so forcing is measured on the branch that can succeed.
    Permutations are drawn over all variables and advice variables are
    skipped, so paired seeds share orders across advice levels and D.
    """
    base_vals, _ = _apply_advice(phi, advice)
    n = phi.num_vars
    guide = [0] + [int(b) for b in planted]
    stats = RunStats(num_vars=n, advice_assigned=n - base_vals[1:].count(-1))
    imp = Implicator(phi)
    rng = np.random.default_rng(seed)
    is_free = np.array([False] + [b < 0 for b in base_vals[1:]])
    for _ in range(samples):
        perm = rng.permutation(np.arange(1, n + 1))
        order = perm[is_free[perm]].tolist()
        vals, forced, guessed = run_iteration(imp, base_vals, order, D, guide)
        stats.iterations_used += 1
        stats.forced.append(forced)
        stats.guessed.append(guessed)
        stats.completed.append(vals is not None)
    return stats


def ppz_forced_matrix(phi: CnfFormula, planted: Sequence[int], positions: np.ndarray,
                      in_advice: np.ndarray) -> np.ndarray:
    """Vectorised D = 1 forcing on the correct path.

    positions[s, v-1] is the rank of variable v in sample s; in_advice[s, v-1]
    marks advice variables. On the correct path x is forced exactly when some
    clause has x's literal as its only literal true under the plant and every
    other variable of that clause is in the advice or earlier in the order.
    Returns a boolean (samples, n) matrix, False on advice variables.
    """
    x = np.asarray(planted)
    samples, n = positions.shape
    eff = np.where(in_advice, -1, positions)
    forced = np.zeros((samples, n), dtype=bool)
    for clause in phi.clauses:
        true_lits = [l for l in clause if (x[abs(l) - 1] == 1) == (l > 0)]
        if len(true_lits) != 1:
            continue
        v = abs(true_lits[0]) - 1
        others = [abs(l) - 1 for l in clause if abs(l) - 1 != v]
        if others:
            latest = eff[:, others].max(axis=1)
            forced[:, v] |= latest < positions[:, v]
        else:
            forced[:, v] = True
    forced &= ~in_advice
    return forced


class _Search:
    """Lexicographic DPLL: decisions on the smallest unset variable, 0 first.

    Unit propagation only commits values implied by the current prefix, so
    solutions are produced in lexicographic order.
    """

    def __init__(self, phi: CnfFormula):
        self.n = phi.num_vars
        self.clauses = phi.clauses
        self.pos = [[] for _ in range(self.n + 1)]
        self.neg = [[] for _ in range(self.n + 1)]
        for ci, c in enumerate(self.clauses):
            for lit in c:
                (self.pos if lit > 0 else self.neg)[abs(lit)].append(ci)
        self.vals = [-1] * (self.n + 1)
        self.ntrue = [0] * len(self.clauses)
        self.nunset = [len(c) for c in self.clauses]
        self.trail: list[int] = []
        self.units: list[int] = []

    def assign(self, v: int, b: int) -> bool:
        self.vals[v] = b
        self.trail.append(v)
        ok = True
        for ci in (self.pos[v] if b else self.neg[v]):
            self.ntrue[ci] += 1
            self.nunset[ci] -= 1
        for ci in (self.neg[v] if b else self.pos[v]):
            self.nunset[ci] -= 1
            if self.ntrue[ci] == 0:
                if self.nunset[ci] == 0:
                    ok = False
                elif self.nunset[ci] == 1:
                    self.units.append(ci)
        return ok

    def undo(self, mark: int):
        while len(self.trail) > mark:
            v = self.trail.pop()
            b = self.vals[v]
            for ci in (self.pos[v] if b else self.neg[v]):
                self.ntrue[ci] -= 1
                self.nunset[ci] += 1
            for ci in (self.neg[v] if b else self.pos[v]):
                self.nunset[ci] += 1
            self.vals[v] = -1

    def propagate(self) -> bool:
        while self.units:
            ci = self.units.pop()
            if self.ntrue[ci]:
                continue
            if self.nunset[ci] == 0:
                self.units.clear()
                return False
            lit = next(l for l in self.clauses[ci] if self.vals[abs(l)] < 0)
            if not self.assign(abs(lit), 1 if lit > 0 else 0):
                self.units.clear()
                return False
        return True

    def solutions(self) -> Iterator[list[int]]:
        for ci, c in enumerate(self.clauses):
            if len(c) == 1:
                self.units.append(ci)
        if not self.propagate():
            return
        yield from self._rec(1)

    def _rec(self, v: int) -> Iterator[list[int]]:
        while v <= self.n and self.vals[v] >= 0:
            v += 1
        if v > self.n:
            yield self.vals[1:]
            return
        for b in (0, 1):
            mark = len(self.trail)
            if self.assign(v, b) and self.propagate():
                yield from self._rec(v + 1)
            self.units.clear()
            self.undo(mark)


def _guard(phi: CnfFormula, limit: int):
    if phi.num_vars > limit:
        raise SizeGuardError(f"{phi.num_vars} variables exceeds the oracle limit of {limit}")


def brute_force_sat(phi: CnfFormula, max_vars: int = 30) -> list[int] | None:
    """Lexicographically smallest satisfying assignment, or None if unsat."""
    _guard(phi, max_vars)
    return next(_Search(phi).solutions(), None)


def count_solutions(phi: CnfFormula, limit: int | None = None, max_vars: int = 30) -> int:
    """Number of satisfying assignments, counting at most `limit`."""
    _guard(phi, max_vars)
    return sum(1 for _ in itertools.islice(_Search(phi).solutions(), limit))
