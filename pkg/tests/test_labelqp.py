import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from satadvice.advice import LabelAdvice, gen_label_advice
from satadvice.cnf import CnfFormula, count_satisfied
from satadvice.instances import gen_planted, random_lin2
from satadvice.labelqp import (F_value, QpSolution, advice_sign_vector, assignment_of,
                               brute_force_max2lin, build_model, check_feasible, count_lin, f_value,
                               lin2_to_sat2, max2sat_with_label_advice, parse_lin, round_solution,
                               satisfied_from_f, sign_vector, solve_advice_program)

from conftest import all_assignments


@st.composite
def e2_formulas(draw, max_vars=7, max_clauses=14):
    n = draw(st.integers(2, max_vars))
    m = draw(st.integers(0, max_clauses))
    clauses = []
    for _ in range(m):
        a, b = draw(st.lists(st.integers(1, n), min_size=2, max_size=2, unique=True))
        sa, sb = draw(st.sampled_from((-1, 1))), draw(st.sampled_from((-1, 1)))
        clauses.append((a * sa, b * sb))
    return CnfFormula.from_clauses(clauses, n)


def test_build_model_example():
    phi = CnfFormula.from_clauses([(1, -2)], 2)
    mod = build_model(phi)
    assert mod.A[1, 4] == mod.A[4, 1] == 1
    assert mod.A.sum() == 2
    assert mod.d.tolist() == [1, 0, 0, 1]
    with pytest.raises(ValueError):
        build_model(CnfFormula.from_clauses([(1, 2, 3)], 3))


def test_f_examples():
    phi = CnfFormula.from_clauses([(1, 2)], 2)
    mod = build_model(phi)
    # both true: y1 = y2 = -1; f = 2(-1 - 1) + 2 = -2 -> 3/4 + 1/4 = 1
    assert f_value(mod, sign_vector([1, 1])) == -2
    assert f_value(mod, sign_vector([0, 0])) == 6
    assert satisfied_from_f(mod, 6) == 0


def test_sign_vector_roundtrip():
    x = [1, 0, 0, 1, 1]
    y = sign_vector(x)
    check_feasible(y, 5)
    assert y[0] == 1 and assignment_of(y, 5) == x
    with pytest.raises(ValueError):
        check_feasible(np.zeros(11), 5)
    bad = y.copy()
    bad[6] = bad[1]
    with pytest.raises(ValueError):
        check_feasible(bad, 5)


@settings(max_examples=60, deadline=None)
@given(e2_formulas())
def test_identity_exact(phi):
    mod = build_model(phi)
    for x in all_assignments(phi.num_vars):
        f = int(f_value(mod, sign_vector(x)))
        assert 6 * phi.m - f == 8 * count_satisfied(phi, x)


@settings(max_examples=40, deadline=None)
@given(e2_formulas(max_vars=6), st.floats(0.1, 1.0), st.integers(0, 2**31))
def test_solver_beats_integer_points(phi, eps, seed):
    mod = build_model(phi)
    adv = gen_label_advice([0] * phi.num_vars, eps, seed)
    yt = advice_sign_vector(adv)
    y, F, gap = solve_advice_program(mod, yt, eps)
    check_feasible(y, phi.num_vars, tol=1e-8)
    assert F == pytest.approx(F_value(mod, y, yt, eps))
    best = min(F_value(mod, sign_vector(x), yt, eps) for x in all_assignments(phi.num_vars))
    assert F <= best + 1e-6 * max(1.0, abs(best))


@settings(max_examples=60, deadline=None)
@given(e2_formulas(), st.data())
def test_rounding_never_increases_f(phi, data):
    n = phi.num_vars
    mod = build_model(phi)
    u = np.array(data.draw(st.lists(st.floats(-1, 1), min_size=n, max_size=n)))
    y = np.concatenate(([1.0], u, -u))
    yh = round_solution(mod, y)
    check_feasible(yh, n)
    assert set(np.abs(yh).tolist()) == {1}
    assert f_value(mod, yh) <= f_value(mod, y) + 1e-9


@settings(max_examples=60, deadline=None)
@given(e2_formulas(), st.data())
def test_f_below_F_holder(phi, data):
    """<y, A(y - y~/eps)> <= ||A(y - y~/eps)||_1 since |y| <= 1."""
    n = phi.num_vars
    mod = build_model(phi)
    eps = data.draw(st.floats(0.05, 1.0))
    u = np.array(data.draw(st.lists(st.floats(-1, 1), min_size=n, max_size=n)))
    y = np.concatenate(([1.0], u, -u))
    yt = sign_vector(data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n)))
    assert f_value(mod, y) <= F_value(mod, y, yt, eps) + 1e-9


def test_scaled_advice_unbiased():
    """E[y~/eps] = y* and E[(y~_i/eps)^2] = 1/eps^2 coordinatewise."""
    n, eps = 4000, 0.3
    x = np.random.default_rng(0).integers(0, 2, n)
    ys = sign_vector(x)[1:n + 1]
    means, sq = [], []
    for s in range(20):
        z = advice_sign_vector(gen_label_advice(x, eps, s))[1:n + 1] / eps
        means.append(np.mean(z * ys))
        sq.append(np.mean(z ** 2))
    assert np.mean(means) == pytest.approx(1.0, abs=0.05)
    assert np.mean(sq) == pytest.approx(1 / eps ** 2)


def test_full_pipeline_on_planted():
    inst = gen_planted("planted-one-true-literal", 60, 600, 2, seed=1)
    adv = gen_label_advice(inst.planted, 0.5, 3)
    res, sol = max2sat_with_label_advice(inst.formula, adv)
    assert isinstance(sol, QpSolution)
    mod = build_model(inst.formula)
    ch = sol.chain(mod, advice_sign_vector(adv), 0.5, sign_vector(inst.planted))
    assert ch["f_rounded"] <= ch["f_relaxed"] + 1e-9 <= ch["F_relaxed"] + 2e-9
    assert ch["F_relaxed"] <= ch["F_star"] + 1e-6 * abs(ch["F_star"])
    assert res.satisfied == satisfied_from_f(mod, sol.f_rounded)
    assert res.satisfied >= 0.95 * inst.formula.m
    with pytest.raises(ValueError):
        max2sat_with_label_advice(inst.formula, LabelAdvice(0.5, 0, (0, 1)))


def test_empty_formula():
    phi = CnfFormula.from_clauses([], 3)
    res, sol = max2sat_with_label_advice(phi, LabelAdvice(0.5, 0, (1, 0, 1)))
    assert res.satisfied == 0 and res.assignment == [1, 0, 1]


def test_lin2_examples():
    phi = lin2_to_sat2([(1, 2, 1)], 2)
    assert phi.clauses == ((1, -2), (-1, 2))
    phi = lin2_to_sat2([(1, 2, -1)], 2)
    assert phi.clauses == ((1, 2), (-1, -2))
    with pytest.raises(ValueError):
        lin2_to_sat2([(1, 1, 1)])
    with pytest.raises(ValueError):
        lin2_to_sat2([(1, 2, 0)])
    assert count_lin([(1, 2, 1), (1, 3, -1)], [1, 1, 0]) == 2
    assert brute_force_max2lin([(1, 2, 1), (1, 2, -1)], 2) == 1


@settings(max_examples=80, deadline=None)
@given(st.integers(2, 9), st.integers(0, 20), st.integers(0, 2**31))
def test_lin_identity(n, m, seed):
    rng = np.random.default_rng(seed)
    cons = random_lin2(n, m, rng)
    phi = lin2_to_sat2(cons, n)
    for x in itertools.islice(all_assignments(n), 64):
        assert count_lin(cons, x) == count_satisfied(phi, x) - m


def test_parse_lin():
    cons, n = parse_lin("c comment\n1 3 -1\n\n# x\n2 3 1\n")
    assert cons == [(1, 3, -1), (2, 3, 1)] and n == 3
    with pytest.raises(ValueError):
        parse_lin("1 2\n")
    with pytest.raises(ValueError):
        parse_lin("0 2 1\n")
