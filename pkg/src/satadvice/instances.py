"""Instance generators with a known planted assignment."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cnf import CnfFormula
from .solvers import _Search

CONSTRUCTIONS = (
    "uniform-random-kcnf",
    "planted-satisfiable",
    "planted-one-true-literal",
    "planted-unique-attempt",
    "lin2-derived",
)


@dataclass(frozen=True)
class PlantedInstance:
    formula: CnfFormula
    planted: tuple[int, ...]
    construction: str
    params: dict = field(default_factory=dict)
    lin: tuple[tuple[int, int, int], ...] | None = None

    @property
    def n(self) -> int:
        return self.formula.num_vars


def _random_vars(rng, n, k):
    return rng.choice(n, size=k, replace=False) + 1


def uniform_kcnf(n: int, m: int, k: int, rng) -> list[tuple[int, ...]]:
    clauses = []
    for _ in range(m):
        vs = _random_vars(rng, n, k)
        signs = rng.choice((-1, 1), size=k)
        clauses.append(tuple(int(v * s) for v, s in zip(vs, signs)))
    return clauses


def planted_clause(x, k, rng, true_count=None):
    """Random k-clause satisfied by x; exactly `true_count` true literals if given."""
    n = len(x)
    vs = _random_vars(rng, n, k)
    if true_count is None:
        # uniform over the 2^k - 1 sign patterns that x satisfies
        pattern = rng.integers(1, 2 ** k)
        truth = [(pattern >> j) & 1 for j in range(k)]
    else:
        truth = [0] * k
        for j in rng.choice(k, size=true_count, replace=False):
            truth[j] = 1
    lits = []
    for v, t in zip(vs, truth):
        # literal is true under x iff sign matches x_v
        positive = (x[v - 1] == 1) == bool(t)
        lits.append(int(v) if positive else -int(v))
    return tuple(lits)


def _blocking_clause(x, y, k, rng):
    """Clause true under x and false under y (x != y)."""
    n = len(x)
    diff = [i for i in range(n) if x[i] != y[i]]
    first = int(rng.choice(diff))
    rest = [i for i in range(n) if i != first]
    others = rng.choice(rest, size=k - 1, replace=False) if k > 1 else []
    lits = []
    for i in [first, *others]:
        # false under y
        lits.append(-(i + 1) if y[i] == 1 else i + 1)
    return tuple(lits)


def random_lin2(n: int, m: int, rng, planted=None, noise: float = 0.0):
    """MAX-2-LIN constraints (i, j, c); consistent with `planted` up to `noise`."""
    cons = []
    for _ in range(m):
        i, j = (int(v) for v in _random_vars(rng, n, 2))
        if planted is None:
            c = int(rng.choice((-1, 1)))
        else:
            zi, zj = 2 * planted[i - 1] - 1, 2 * planted[j - 1] - 1
            c = zi * zj
            if noise and rng.random() < noise:
                c = -c
        cons.append((i, j, c))
    return cons


def gen_planted(construction: str, n: int, m: int, k: int, seed: int,
                unique_max_rounds: int = 10_000) -> PlantedInstance:
    """Build an instance; deterministic for a fixed seed.

    planted-unique-attempt draws m planted clauses and then adds clauses
    that cut off other solutions until the oracle finds the plant unique.
    lin2-derived draws m consistent 2-LIN constraints and reduces them to
    2m clauses.
    """
    if construction not in CONSTRUCTIONS:
        raise ValueError(f"unknown construction {construction!r}")
    if n < 1 or m < 0 or k < 1 or k > n:
        raise ValueError(f"infeasible parameters n={n}, m={m}, k={k}")
    rng = np.random.default_rng(seed)
    x = tuple(int(b) for b in rng.integers(0, 2, size=n))
    params = {"n": n, "m": m, "k": k, "seed": seed}
    lin = None
    if construction == "uniform-random-kcnf":
        clauses = uniform_kcnf(n, m, k, rng)
    elif construction == "planted-satisfiable":
        clauses = [planted_clause(x, k, rng) for _ in range(m)]
    elif construction == "planted-one-true-literal":
        clauses = [planted_clause(x, k, rng, true_count=1) for _ in range(m)]
    elif construction == "planted-unique-attempt":
        clauses = [planted_clause(x, k, rng) for _ in range(m)]
        for _ in range(unique_max_rounds):
            phi = CnfFormula.from_clauses(clauses, n)
            other = next((s for s in _Search(phi).solutions() if tuple(s) != x), None)
            if other is None:
                break
            clauses.append(_blocking_clause(x, other, k, rng))
        else:
            raise RuntimeError("could not make the planted solution unique")
        params["m"] = len(clauses)
    else:
        if k != 2:
            raise ValueError("lin2-derived instances have k = 2")
        from .labelqp import lin2_to_sat2
        lin = tuple(random_lin2(n, m, rng, planted=x))
        phi = lin2_to_sat2(lin, n)
        return PlantedInstance(phi, x, construction, {**params, "M": phi.m}, lin)
    return PlantedInstance(CnfFormula.from_clauses(clauses, n), x, construction, params, lin)
