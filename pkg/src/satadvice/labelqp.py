"""MAX-2-SAT with label advice via an advice-regularised convex program.

Literals are padded: index i in 1..n is x_i and n+i is its negation; index 0
is the constant y_0 = 1 meaning "false". A sign vector y has y_i = 1 when
literal i is false and -1 when it is true, and y_{n+i} = -y_i.

With A the literal adjacency matrix and d the literal degrees,
f(y) = 2 sum_i d_i y_i + <y, A y> and #SAT(y) = 3m/4 - f(y)/8 for integer y.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linprog

from .advice import LabelAdvice
from .cnf import CnfFormula
from .maxsat import ApproxResult, _result


class QPSolveError(RuntimeError):
    def __init__(self, msg, incumbent=None):
        super().__init__(msg)
        self.incumbent = incumbent


@dataclass(frozen=True)
class QuadraticModel:
    n: int
    m: int
    A: np.ndarray  # (2n+1, 2n+1) int64, symmetric, zero row/column 0
    d: np.ndarray  # literal degrees, length 2n (d[0] is literal 1)

    @property
    def dpad(self) -> np.ndarray:
        return np.concatenate(([0], self.d))


def literal_index(lit: int, n: int) -> int:
    return lit if lit > 0 else n - lit


def build_model(phi: CnfFormula) -> QuadraticModel:
    n = phi.num_vars
    A = np.zeros((2 * n + 1, 2 * n + 1), dtype=np.int64)
    for idx, clause in enumerate(phi.clauses, start=1):
        if len(clause) != 2:
            raise ValueError(f"clause {idx} has width {len(clause)}; the quadratic model needs exactly 2")
        a, b = (literal_index(l, n) for l in clause)
        A[a, b] += 1
        A[b, a] += 1
    return QuadraticModel(n, phi.m, A, A.sum(axis=1)[1:])


def sign_vector(x: Sequence[int]) -> np.ndarray:
    """Integer sign vector of a 0/1 assignment."""
    x = np.asarray(x, dtype=np.int64)
    y = 1 - 2 * x
    return np.concatenate(([1], y, -y))


def assignment_of(y: np.ndarray, n: int) -> list[int]:
    """x_i = -(y_i - 1)/2 for i = 1..n."""
    return [int(round(-(v - 1) / 2)) for v in y[1:n + 1]]


def check_feasible(y: np.ndarray, n: int, tol: float = 1e-9) -> None:
    y = np.asarray(y)
    if y.shape != (2 * n + 1,):
        raise ValueError(f"sign vector must have length {2 * n + 1}")
    if abs(y[0] - 1) > tol:
        raise ValueError("y_0 must be 1")
    if np.any(np.abs(y) > 1 + tol):
        raise ValueError("entries must lie in [-1, 1]")
    if np.any(np.abs(y[1:n + 1] + y[n + 1:]) > tol):
        raise ValueError("pairing y_{n+i} = -y_i violated")


def f_value(model: QuadraticModel, y: np.ndarray, check: bool = True):
    if check:
        check_feasible(y, model.n)
    y = np.asarray(y)
    return 2 * y[0] * (model.dpad @ y) + y @ (model.A @ y)


def satisfied_from_f(model: QuadraticModel, f) -> float:
    return 0.75 * model.m - f / 8.0


def F_value(model: QuadraticModel, y: np.ndarray, y_tilde: np.ndarray, epsilon: float) -> float:
    """2 sum d_i y_i + <y, A y~/eps> + ||A (y - y~/eps)||_1."""
    y = np.asarray(y, dtype=float)
    yt = np.asarray(y_tilde, dtype=float) / epsilon
    A = model.A
    return float(2 * y[0] * (model.dpad @ y) + y @ (A @ yt) + np.abs(A @ (y - yt)).sum())


def advice_sign_vector(advice: LabelAdvice) -> np.ndarray:
    return sign_vector(advice.labels)


def _pair_matrix(n: int) -> np.ndarray:
    # y = e_0 + P u with u the free half
    P = np.zeros((2 * n + 1, n))
    P[1:n + 1] = np.eye(n)
    P[n + 1:] = -np.eye(n)
    return P


def solve_advice_program(model: QuadraticModel, y_tilde: np.ndarray, epsilon: float,
                         gap: float = 1e-6) -> tuple[np.ndarray, float, float]:
    """Minimise F(., y~) over the box/pairing set via its linear reformulation.

    Variables are the free half u (y_{n+i} = -u_i) and one bound t_r per
    nonzero row of A with t_r >= |(A(y - y~/eps))_r|. Returns
    (y, F(y, y~), relative duality gap).
    """
    if not 0.0 < epsilon <= 1.0:
        raise ValueError("epsilon must lie in (0, 1]")
    n = model.n
    check_feasible(y_tilde, n)
    if model.m == 0:
        return np.asarray(y_tilde, dtype=float).copy(), 0.0, 0.0
    A = model.A.astype(float)
    P = _pair_matrix(n)
    c_vec = A @ (np.asarray(y_tilde, dtype=float) / epsilon)
    d = model.dpad.astype(float)
    lin_u = P.T @ (2.0 * d + c_vec)
    rows = np.flatnonzero(np.abs(A).sum(axis=1) > 0)
    B = (A @ P)[rows]
    c = c_vec[rows]
    nr = len(rows)
    cost = np.concatenate((lin_u, np.ones(nr)))
    eye = np.eye(nr)
    A_ub = np.block([[B, -eye], [-B, -eye]])
    b_ub = np.concatenate((c, -c))
    bounds = [(-1.0, 1.0)] * n + [(0.0, None)] * nr
    res = linprog(cost, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs",
                  options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10})
    if res.x is None:
        raise QPSolveError(f"LP solver failed: {res.message}")
    u = np.clip(res.x[:n], -1.0, 1.0)
    y = P @ u
    y[0] = 1.0
    F = F_value(model, y, y_tilde, epsilon)
    dual = float(b_ub @ res.ineqlin.marginals - res.lower.marginals[:n].sum() + res.upper.marginals[:n].sum())
    rel_gap = abs(F - dual) / max(1.0, abs(F))
    if res.status != 0 or rel_gap > gap:
        raise QPSolveError(f"relative gap {rel_gap:.3g} above {gap:.3g} ({res.message})", incumbent=y)
    return y, F, rel_gap


def round_solution(model: QuadraticModel, y: np.ndarray) -> np.ndarray:
    """Round pairs (i, n+i) in ascending order without increasing f.

    With every other coordinate fixed f is affine in y_i (zero diagonal and
    no literal adjacent to its negation), so the better endpoint is taken.
    Ties keep the sign of the fractional value, then +1.
    """
    n = model.n
    check_feasible(y, n)
    y = np.asarray(y, dtype=float).copy()
    A = model.A.astype(float)
    d = model.dpad.astype(float)
    Ay = A @ y
    scale = 1e-12 * max(1.0, float(np.abs(A).sum()))
    for i in range(1, n + 1):
        slope = 2.0 * (d[i] - d[n + i]) + 2.0 * (Ay[i] - Ay[n + i])
        if slope > scale:
            new = -1.0
        elif slope < -scale:
            new = 1.0
        else:
            new = -1.0 if y[i] < 0 else 1.0
        delta = new - y[i]
        if delta:
            Ay += delta * (A[:, i] - A[:, n + i])
            y[i], y[n + i] = new, -new
    return np.rint(y).astype(np.int64)


@dataclass
class QpSolution:
    y_relaxed: np.ndarray
    objective_F: float
    f_relaxed: float
    y_rounded: np.ndarray
    f_rounded: int
    satisfied: int
    solver_gap: float

    def chain(self, model: QuadraticModel, y_tilde, epsilon: float, y_star=None) -> dict:
        out = {"f_rounded": float(self.f_rounded), "f_relaxed": float(self.f_relaxed),
               "F_relaxed": float(self.objective_F)}
        if y_star is not None:
            out["F_star"] = F_value(model, y_star, y_tilde, epsilon)
            out["f_star"] = float(f_value(model, y_star))
        return out


def max2sat_with_label_advice(phi: CnfFormula, advice: LabelAdvice,
                              gap: float = 1e-6) -> tuple[ApproxResult, QpSolution]:
    if advice.num_vars != phi.num_vars:
        raise ValueError("advice and formula disagree on the number of variables")
    model = build_model(phi)
    y_tilde = advice_sign_vector(advice)
    y, F, rel_gap = solve_advice_program(model, y_tilde, advice.epsilon, gap)
    y_hat = round_solution(model, y)
    f_hat = int(f_value(model, y_hat))
    x_hat = assignment_of(y_hat, phi.num_vars)
    res = _result(phi, x_hat, "label-qp")
    sol = QpSolution(y, F, float(f_value(model, y, check=False)), y_hat, f_hat, res.satisfied, rel_gap)
    return res, sol


def lin2_to_sat2(constraints: Iterable[tuple[int, int, int]], n: int | None = None) -> CnfFormula:
    """x_i x_j = +1 -> (x_i | ~x_j)(~x_i | x_j); x_i x_j = -1 -> (x_i | x_j)(~x_i | ~x_j)."""
    constraints = list(constraints)
    clauses = []
    for idx, (i, j, c) in enumerate(constraints, start=1):
        if i == j:
            raise ValueError(f"constraint {idx}: self-loop on x{i}")
        if c == 1:
            clauses += [(i, -j), (-i, j)]
        elif c == -1:
            clauses += [(i, j), (-i, -j)]
        else:
            raise ValueError(f"constraint {idx}: right-hand side must be +1 or -1")
    if n is None:
        n = max((max(i, j) for i, j, _ in constraints), default=0)
    return CnfFormula.from_clauses(clauses, n)


def count_lin(constraints: Sequence[tuple[int, int, int]], x: Sequence[int]) -> int:
    """Satisfied constraints under z_i = +1 if x_i = 1 else -1."""
    z = 2 * np.asarray(x, dtype=np.int64) - 1
    return sum(1 for i, j, c in constraints if z[i - 1] * z[j - 1] == c)


def brute_force_max2lin(constraints: Sequence[tuple[int, int, int]], n: int, max_vars: int = 24) -> int:
    if n > max_vars:
        raise ValueError(f"{n} variables exceeds the oracle limit of {max_vars}")
    codes = np.arange(1 << n, dtype=np.int64)
    best = np.zeros(1 << n, dtype=np.int32)
    for i, j, c in constraints:
        zi = ((codes >> (n - i)) & 1) * 2 - 1
        zj = ((codes >> (n - j)) & 1) * 2 - 1
        best += (zi * zj == c)
    return int(best.max())


def parse_lin(text: str) -> tuple[list[tuple[int, int, int]], int]:
    """Lines `i j c` with c = +1/-1; `c`/`#` lines are comments."""
    cons = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "c#":
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected 'i j c'")
        i, j, c = (int(p) for p in parts)
        if i < 1 or j < 1:
            raise ValueError(f"line {lineno}: variable indices start at 1")
        cons.append((i, j, c))
    n = max((max(i, j) for i, j, _ in cons), default=0)
    return cons, n
