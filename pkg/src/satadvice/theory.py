"""Runtime constants for PPZ/PPSZ with and without subset advice.

All exponents are base-2 and per variable; the o(1) terms of the PPSZ
analysis are dropped (``o1_suppressed`` in the report says so).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

ROOT_TOL = 1e-12
QUAD_TOL = 1e-10


def kink(k: int) -> float:
    """Arrival time (k-2)/(k-1) from which R_k(r) is identically 1."""
    return (k - 2) / (k - 1)


def _check_k(k: int):
    if k < 3:
        raise ValueError(f"k must be >= 3, got {k}")


def rk_fixedpoint(k: int, r: float) -> float:
    """Smallest nonnegative R with (r + (1-r) R)^(k-1) = R, by bisection.

    h(R) = (r + (1-r)R)^(k-1) - R is convex with h(0) >= 0 and h(1) = 0, so
    the smallest root lies left of the minimiser of h whenever that
    minimiser is below 1; otherwise the root is 1.
    """
    _check_k(k)
    if not 0.0 <= r <= 1.0:
        raise ValueError("r must lie in [0, 1]")
    if r == 0.0:
        return 0.0
    if r >= kink(k):
        return 1.0
    e = k - 1
    lo = 0.0
    # h'(R) = 0 at r + (1-r)R = ((k-1)(1-r))^(-1/(k-2))
    hi = (((e * (1.0 - r)) ** (-1.0 / (k - 2))) - r) / (1.0 - r)
    hi = min(hi, 1.0)
    while hi - lo > ROOT_TOL:
        mid = 0.5 * (lo + hi)
        if (r + (1.0 - r) * mid) ** e - mid > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _simpson(f, a, fa, b, fb, m, fm, whole, tol, depth):
    lm, rm = 0.5 * (a + m), 0.5 * (m + b)
    flm, frm = f(lm), f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    if depth <= 0 or abs(left + right - whole) <= 15.0 * tol:
        return left + right + (left + right - whole) / 15.0
    return (_simpson(f, a, fa, m, fm, lm, flm, left, tol / 2, depth - 1)
            + _simpson(f, m, fm, b, fb, rm, frm, right, tol / 2, depth - 1))


def adaptive_simpson(f: Callable[[float], float], a: float, b: float,
                     tol: float = QUAD_TOL, max_depth: int = 50) -> float:
    if b <= a:
        return 0.0
    m = 0.5 * (a + b)
    fa, fb, fm = f(a), f(b), f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return _simpson(f, a, fa, b, fb, m, fm, whole, tol, max_depth)


def rk_partial_integral(k: int, upper: float, tol: float = QUAD_TOL) -> float:
    """Integral of R_k over [0, upper]; the kink is split out explicitly."""
    _check_k(k)
    upper = min(max(upper, 0.0), 1.0)
    r0 = kink(k)
    smooth = adaptive_simpson(lambda r: rk_fixedpoint(k, r), 0.0, min(upper, r0), tol)
    return smooth + max(upper - r0, 0.0)


def rk_integral(k: int) -> float:
    return rk_partial_integral(k, 1.0)


def rk_series(k: int, terms: int = 200_000) -> float:
    """(1/(k-1)) sum_j 1/(j (j + 1/(k-1))), truncated with a midpoint tail."""
    _check_k(k)
    a = 1.0 / (k - 1)
    j = np.arange(1, terms + 1, dtype=np.float64)
    head = np.sum(1.0 / (j * (j + a)))
    # integral of 1/(x(x+a)) from terms + 1/2 to infinity; error O(terms^-3)
    x0 = terms + 0.5
    tail = math.log((x0 + a) / x0) / a
    return a * (head + tail)


def eps_k(k: int, epsilon: float) -> float:
    """Advice gain epsilon - integral_0^epsilon R_k."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError("epsilon must lie in [0, 1]")
    return epsilon - rk_partial_integral(k, epsilon)


def eps3_closed_form(epsilon: float) -> float:
    """Closed form of eps_k for k = 3, valid for epsilon <= 1/2."""
    return -1.0 / (1.0 - epsilon) - 2.0 * math.log(1.0 - epsilon) + 1.0


def ppz_exponent(k: int, epsilon: float = 0.0) -> float:
    """Expected guessed fraction E[G]/n for PPZ with subset advice."""
    if epsilon >= 1.0:
        return 0.0
    return (1.0 - (1.0 / k) * (1.0 - epsilon ** k) / (1.0 - epsilon)) * (1.0 - epsilon)


def ppsz_exponent(k: int, epsilon: float = 0.0) -> float:
    """1 - R_k - eps_k with o(1) dropped; 0 from the sub-exponential threshold on."""
    if epsilon >= kink(k):
        return 0.0
    return 1.0 - rk_integral(k) - eps_k(k, epsilon)


def delta_bound(k: int, d: int) -> float:
    """Upper bound 3/((d-1)(k-2)+2) on the PPSZ convergence error."""
    _check_k(k)
    if d < 1:
        raise ValueError("d must be >= 1")
    return 3.0 / ((d - 1) * (k - 2) + 2)


def rk_tilde_fixedpoint(k: int, epsilon: float, r: float) -> float:
    """Smallest nonnegative R with [eps + (1-eps)(r + (1-r)R)]^(k-1) = R.

    Solved directly with Brent's method on its own bracket, so it is an
    independent route to R_k(eps + (1-eps) r).
    """
    e = k - 1
    a = epsilon + (1.0 - epsilon) * r   # constant part of the inner affine map
    s = (1.0 - epsilon) * (1.0 - r)     # its slope in R

    def h(R):
        return (a + s * R) ** e - R

    if a == 0.0:
        return 0.0
    # minimiser of h: e * s * (a + sR)^(e-1) = 1
    if s > 0.0:
        inner = (1.0 / (e * s)) ** (1.0 / (e - 1))
        rmin = (inner - a) / s
    else:
        rmin = math.inf
    if rmin >= 1.0:
        return 1.0
    if h(rmin) >= 0.0:
        return rmin
    return brentq(h, 0.0, rmin, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)


def substitution_identity_check(k: int, epsilon: float, points: int = 1001) -> float:
    """Max |R~_k(r) - R_k(eps + (1-eps) r)| over a uniform grid on [0, 1]."""
    if not 0.0 <= epsilon < kink(k):
        raise ValueError("epsilon must lie in [0, (k-2)/(k-1))")
    grid = np.linspace(0.0, 1.0, points)
    dev = 0.0
    for r in grid:
        lhs = rk_tilde_fixedpoint(k, epsilon, float(r))
        rhs = rk_fixedpoint(k, epsilon + (1.0 - epsilon) * float(r))
        dev = max(dev, abs(lhs - rhs))
    return dev


@dataclass
class TheoryReport:
    k: int
    epsilon: float
    Rk_integral: float
    eps_k: float
    ppz_base: float
    ppz_base_advice: float
    ppsz_base: float
    ppsz_base_advice: float
    ppsz_subexponential: bool
    o1_suppressed: bool = True
    d: int | None = None
    delta_bound: float | None = None
    Rk_of_r: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def base_constants(k: int, epsilon: float, d: int | None = None, table_points: int = 11) -> TheoryReport:
    _check_k(k)
    if not 0.0 <= epsilon < 1.0:
        raise ValueError("epsilon must lie in [0, 1)")
    rk = rk_integral(k)
    sub = epsilon >= kink(k)
    ek = eps_k(k, epsilon)
    grid = np.linspace(0.0, 1.0, table_points)
    return TheoryReport(
        k=k,
        epsilon=epsilon,
        Rk_integral=rk,
        eps_k=ek,
        ppz_base=2.0 ** (1.0 - 1.0 / k),
        ppz_base_advice=2.0 ** ppz_exponent(k, epsilon),
        ppsz_base=2.0 ** (1.0 - rk),
        ppsz_base_advice=1.0 if sub else 2.0 ** (1.0 - rk - ek),
        ppsz_subexponential=sub,
        d=d,
        delta_bound=None if d is None else delta_bound(k, d),
        Rk_of_r={f"{r:.3g}": rk_fixedpoint(k, float(r)) for r in grid},
    )


def ppsz3_advice_closed_form(epsilon: float) -> float:
    """Closed-form PPSZ base constant for 3-SAT with advice, epsilon < 1/2."""
    return 2.0 ** (epsilon / (1.0 - epsilon) + 2.0 * math.log(2.0 - 2.0 * epsilon) - 1.0)


def table1(ks=(3, 4, 5)) -> list[dict]:
    """Rows of the runtime table: algorithm, k, base constant without advice, formula."""
    rows = []
    for k in ks:
        rk = rk_integral(k)
        rows.append({"algorithm": "PPZ", "k": k, "c_k": 2.0 ** (1.0 - 1.0 / k),
                     "formula": "2^(1-1/k)", "advice": "c_k^(1-eps) bound; exact 2^((1-(1/k)(1-eps^k)/(1-eps))(1-eps))"})
        rows.append({"algorithm": "PPSZ", "k": k, "c_k": 2.0 ** (1.0 - rk),
                     "formula": "2^(1-R_k+o(1))", "R_k": rk,
                     "advice": f"c_k * 2^(-eps_k) for eps < {kink(k):.4g}; 2^(o(1)) beyond"})
    return rows
