"""MAX-SAT baselines, the subset-advice pipeline, and an exhaustive oracle."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from .advice import LabelAdvice, SubsetAdvice
from .cnf import CnfFormula, PartialAssignment, Status, count_satisfied, reduce
from .solvers import SizeGuardError


@dataclass
class ApproxResult:
    assignment: list[int]
    satisfied: int
    baseline_name: str
    ratio_vs_opt: float | None = None

    def with_opt(self, opt: int) -> "ApproxResult":
        self.ratio_vs_opt = self.satisfied / opt if opt else 1.0
        return self

    def to_dict(self) -> dict:
        d = asdict(self)
        d["assignment"] = "".join(map(str, self.assignment))
        return d


Baseline = Callable[[CnfFormula], ApproxResult]


def _result(phi, x, name):
    x = [int(b) for b in x]
    return ApproxResult(x, count_satisfied(phi, x), name)


def baseline_random(phi: CnfFormula, seed: int) -> ApproxResult:
    x = np.random.default_rng(seed).integers(0, 2, size=phi.num_vars)
    return _result(phi, x, "random")


def baseline_condexp(phi: CnfFormula) -> ApproxResult:
    """Johnson's derandomised random assignment (method of conditional expectations).

    Variables are fixed in index order to whichever value keeps the expected
    number of satisfied clauses (remaining variables uniform) larger; ties go
    to 0.
    """
    n = phi.num_vars
    occ_pos = [[] for _ in range(n + 1)]
    occ_neg = [[] for _ in range(n + 1)]
    for ci, c in enumerate(phi.clauses):
        for lit in c:
            (occ_pos if lit > 0 else occ_neg)[abs(lit)].append(ci)
    unset = [len(c) for c in phi.clauses]
    done = [False] * phi.m  # satisfied already

    def gain(make_true, make_false):
        # change in sum over live clauses of (1 - 2^-u)
        g = 0.0
        for ci in make_true:
            if not done[ci]:
                g += 2.0 ** -unset[ci]
        for ci in make_false:
            if not done[ci]:
                # 1 - 2^-u drops to 1 - 2^-(u-1); also right for u = 1
                g -= 2.0 ** -unset[ci]
        return g

    x = []
    for v in range(1, n + 1):
        g1 = gain(occ_pos[v], occ_neg[v])
        g0 = gain(occ_neg[v], occ_pos[v])
        b = 1 if g1 > g0 else 0
        x.append(b)
        for ci in (occ_pos[v] if b else occ_neg[v]):
            done[ci] = True
        for ci in (occ_pos[v] + occ_neg[v]):
            unset[ci] -= 1
    return _result(phi, x, "condexp")


def baseline_follow_label(phi: CnfFormula, advice: LabelAdvice) -> ApproxResult:
    if advice.num_vars != phi.num_vars:
        raise ValueError("advice and formula disagree on the number of variables")
    return _result(phi, advice.labels, "follow-label")


def expected_random_satisfied(phi: CnfFormula) -> float:
    return float(sum(1.0 - 2.0 ** -len(c) for c in phi.clauses))


def advice_pipeline(phi: CnfFormula, advice: SubsetAdvice, baseline: Baseline) -> ApproxResult:
    """Fix advice variables, reduce, and let `baseline` handle the rest.

    The count is over the original formula. An empty residual skips the
    baseline; remaining variables are then set to 0.
    """
    sigma = PartialAssignment(phi.num_vars, advice.revealed)
    out = reduce(phi, sigma)
    if out.status is Status.SATISFIED or not out.reduced.clauses:
        rest = [0] * phi.num_vars
        name = "pipeline"
    else:
        sub = baseline(out.reduced)
        rest = sub.assignment
        name = f"pipeline+{sub.baseline_name}"
    x = [advice.revealed.get(i + 1, rest[i]) for i in range(phi.num_vars)]
    return _result(phi, x, name)


def _assignment_block(n: int, start: int, stop: int) -> np.ndarray:
    """Rows are assignments start..stop-1 with x_1 as the most significant bit."""
    codes = np.arange(start, stop, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((codes[:, None] >> shifts) & 1).astype(np.uint8)


def satisfied_counts(phi: CnfFormula, start: int, stop: int) -> np.ndarray:
    """count_satisfied for every assignment code in [start, stop)."""
    n = phi.num_vars
    codes = np.arange(start, stop, dtype=np.int64)
    counts = np.zeros(stop - start, dtype=np.int32)
    for clause in phi.clauses:
        sat = np.zeros(stop - start, dtype=bool)
        for lit in clause:
            bit = (codes >> (n - abs(lit))) & 1
            sat |= (bit == 1) if lit > 0 else (bit == 0)
        counts += sat
    return counts


def brute_force_maxsat(phi: CnfFormula, max_vars: int = 26, block: int = 1 << 20) -> tuple[int, list[int]]:
    """Exact optimum and the lexicographically smallest optimal assignment."""
    n = phi.num_vars
    if n > max_vars:
        raise SizeGuardError(f"{n} variables exceeds the oracle limit of {max_vars}")
    best, best_code = -1, 0
    total = 1 << n
    for start in range(0, total, block):
        stop = min(start + block, total)
        counts = satisfied_counts(phi, start, stop)
        i = int(np.argmax(counts))
        if counts[i] > best:
            best, best_code = int(counts[i]), start + i
    x = _assignment_block(n, best_code, best_code + 1)[0].tolist()
    return best, x
