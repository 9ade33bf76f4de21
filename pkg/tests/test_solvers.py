import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from satadvice.advice import gen_subset_advice
from satadvice.cnf import CnfFormula, PartialAssignment
from satadvice.instances import gen_planted
from satadvice.solvers import (AdviceContradiction, Contradiction, SizeGuardError, SolverConfig,
                               auto_iterations, brute_force_sat, count_solutions, d_implies,
                               guessed_on_correct_path, ppsz_with_advice, ppz_forced_matrix,
                               predicted_guesses)

from conftest import all_assignments, formulas


def _sat(clauses, vs, fixed):
    for bits in itertools.product((0, 1), repeat=len(vs)):
        a = dict(zip(vs, bits))
        if any(a[v] != b for v, b in fixed.items()):
            continue
        if all(any((a[abs(l)] == 1) == (l > 0) for l in c) for c in clauses):
            return True
    return False


def _oracle_implied(phi, sigma, var, D):
    """Bits b such that some satisfiable set of <= D clauses of phi|sigma rules out 1-b."""
    out = set()
    residual = []
    for c in phi.clauses:
        if any(sigma.lit_status(l) == 1 for l in c):
            continue
        residual.append(tuple(l for l in c if sigma.lit_status(l) is None))
    for size in range(1, D + 1):
        for subset in itertools.combinations(residual, size):
            vs = sorted({abs(l) for c in subset for l in c} | {var})
            if not _sat(subset, vs, {}):
                continue
            for b in (0, 1):
                if not _sat(subset, vs, {var: b}):
                    out.add(1 - b)
    return out


def test_d_implies_examples():
    phi = CnfFormula.from_clauses([(1, 2), (-2, 3)], 3)
    sigma = PartialAssignment(3, {1: 0})
    assert d_implies(phi, sigma, 2, 1) == 1
    assert d_implies(phi, sigma, 3, 1) is None
    assert d_implies(phi, sigma, 3, 2) == 1
    # (x1 | x2)(x1 | ~x2) forces x1 with two clauses only
    phi = CnfFormula.from_clauses([(1, 2), (1, -2)], 2)
    empty = PartialAssignment(2)
    assert d_implies(phi, empty, 1, 1) is None
    assert d_implies(phi, empty, 1, 2) == 1


def test_d_implies_rejects_bad_input():
    phi = CnfFormula.from_clauses([(1, 2)], 2)
    with pytest.raises(ValueError):
        d_implies(phi, PartialAssignment(2, {1: 1}), 1, 1)
    with pytest.raises(ValueError):
        d_implies(phi, PartialAssignment(2), 1, 0)


def test_d_implies_contradiction():
    phi = CnfFormula.from_clauses([(1, 2), (1, -2)], 2)
    # x1 = 0 leaves (x2)(~x2): dead
    sigma = PartialAssignment(2)
    phi2 = CnfFormula.from_clauses([(1, 2), (1, -2), (-1, 2), (-1, -2)], 2)
    with pytest.raises(Contradiction):
        d_implies(phi2, sigma, 1, 2)
    assert d_implies(phi, sigma, 2, 2) is None


@settings(max_examples=150, deadline=None)
@given(formulas(max_vars=7, max_clauses=9), st.integers(1, 3), st.data())
def test_forcing_matches_subset_oracle(phi, D, data):
    n = phi.num_vars
    fixed = data.draw(st.dictionaries(st.integers(1, n), st.integers(0, 1), max_size=n - 1))
    sigma = PartialAssignment(n, fixed)
    var = data.draw(st.sampled_from(sigma.unset()))
    want = _oracle_implied(phi, sigma, var, D)
    try:
        got = d_implies(phi, sigma, var, D)
    except Contradiction:
        assert not _residual_satisfiable(phi, sigma)
        return
    if got is None:
        assert not want
    else:
        assert want == {got}


def _residual_satisfiable(phi, sigma):
    n = phi.num_vars
    for x in all_assignments(n):
        if all(x[v - 1] == b for v, b in sigma.assigned().items()) and phi.is_satisfied_by(x):
            return True
    return False


@settings(max_examples=120, deadline=None)
@given(formulas(max_vars=8, max_clauses=12), st.data())
def test_forcing_is_sound(phi, data):
    """A forced bit agrees with every satisfying extension."""
    n = phi.num_vars
    fixed = data.draw(st.dictionaries(st.integers(1, n), st.integers(0, 1), max_size=n - 1))
    sigma = PartialAssignment(n, fixed)
    var = data.draw(st.sampled_from(sigma.unset()))
    try:
        b = d_implies(phi, sigma, var, 3)
    except Contradiction:
        assert not _residual_satisfiable(phi, sigma)
        return
    if b is None:
        return
    for x in all_assignments(n):
        if all(x[v - 1] == c for v, c in fixed.items()) and phi.is_satisfied_by(x):
            assert x[var - 1] == b


@settings(max_examples=80, deadline=None)
@given(formulas(max_vars=7, max_clauses=10), st.data())
def test_forcing_monotone_in_D(phi, data):
    n = phi.num_vars
    sigma = PartialAssignment(n, data.draw(st.dictionaries(st.integers(1, n), st.integers(0, 1),
                                                           max_size=n - 1)))
    var = data.draw(st.sampled_from(sigma.unset()))
    prev = None
    for D in (1, 2, 3):
        try:
            b = d_implies(phi, sigma, var, D)
        except Contradiction:
            return
        if prev is not None:
            assert b == prev
        prev = b if b is not None else prev


def test_brute_force_sat_examples():
    assert brute_force_sat(CnfFormula.from_clauses([(1,), (-1,)], 1)) is None
    assert brute_force_sat(CnfFormula.from_clauses([(1, 2), (-1,)], 2)) == [0, 1]
    assert brute_force_sat(CnfFormula.from_clauses([], 3)) == [0, 0, 0]
    assert count_solutions(CnfFormula.from_clauses([(1, 2)], 2)) == 3
    with pytest.raises(SizeGuardError):
        brute_force_sat(CnfFormula.from_clauses([(1,)], 31))


@settings(max_examples=100, deadline=None)
@given(formulas(max_vars=8, max_clauses=14))
def test_brute_force_against_enumeration(phi):
    sols = [list(x) for x in all_assignments(phi.num_vars) if phi.is_satisfied_by(x)]
    assert count_solutions(phi) == len(sols)
    got = brute_force_sat(phi)
    assert got == (sols[0] if sols else None)


def test_predicted_guesses_and_auto_T():
    assert predicted_guesses(30, 3, 0.0) == pytest.approx(20.0)
    assert predicted_guesses(30, 3, 1.0) == 0.0
    assert predicted_guesses(0, 3, 0.3) == 0.0
    assert auto_iterations(0, 3, 0.0, 0.01) == math.ceil(math.log(100))
    assert auto_iterations(12, 3, 0.0, 0.01) == math.ceil(math.log(100) * 2 ** 8)


def test_solver_with_full_advice_is_immediate():
    inst = gen_planted("planted-satisfiable", 20, 80, 3, seed=3)
    adv = gen_subset_advice(inst.planted, 1.0, seed=0)
    res = ppsz_with_advice(inst.formula, adv, SolverConfig(seed=1))
    assert res.verdict == "sat"
    assert tuple(res.assignment) == inst.planted
    assert res.stats.iterations_used == 0


def test_solver_advice_contradiction():
    phi = CnfFormula.from_clauses([(1, 2), (-1, 3)], 3)
    from satadvice.advice import SubsetAdvice
    bad = SubsetAdvice(3, 1.0, 0, {1: 1, 3: 0, 2: 0})
    with pytest.raises(AdviceContradiction):
        ppsz_with_advice(phi, bad)


def test_solver_unsat_and_sat_small():
    unsat = CnfFormula.from_clauses([c for c in itertools.product((1, -1), (2, -2), (3, -3))], 3)
    res = ppsz_with_advice(unsat, None, SolverConfig(iterations_T=50, seed=0))
    assert res.verdict == "unsat-presumed"
    assert res.stats.iterations_used == 50
    inst = gen_planted("planted-unique-attempt", 12, 40, 3, seed=5)
    res = ppsz_with_advice(inst.formula, None, SolverConfig(implication_D=2, seed=4))
    assert res.verdict == "sat" and inst.formula.is_satisfied_by(res.assignment)


@pytest.mark.parametrize("seed", range(4))
def test_iteration_counts_sum_to_free_vars(seed):
    inst = gen_planted("planted-unique-attempt", 14, 45, 3, seed=seed)
    adv = gen_subset_advice(inst.planted, 0.3, seed)
    st_ = guessed_on_correct_path(inst.formula, inst.planted, adv, 2, 40, seed)
    free = inst.n - len(adv)
    assert all(c for c in st_.completed)
    assert all(f + g == free for f, g in zip(st_.forced, st_.guessed))


def test_eps_one_makes_guesses_vanish():
    inst = gen_planted("planted-unique-attempt", 12, 40, 3, seed=9)
    adv = gen_subset_advice(inst.planted, 1.0, 0)
    st_ = guessed_on_correct_path(inst.formula, inst.planted, adv, 1, 5, 0)
    assert st_.mean_guessed() == 0.0


@pytest.mark.parametrize("seed", range(3))
def test_forced_matrix_matches_generic_path(seed):
    inst = gen_planted("planted-unique-attempt", 14, 45, 3, seed=seed)
    n = inst.n
    rng = np.random.default_rng(seed)
    for eps in (0.0, 0.4):
        adv = gen_subset_advice(inst.planted, eps, seed)
        in_adv = np.zeros(n, dtype=bool)
        in_adv[[v - 1 for v in adv.revealed]] = True
        perms = [rng.permutation(n) for _ in range(30)]
        positions = np.empty((30, n), dtype=np.int64)
        for s, p in enumerate(perms):
            positions[s, p] = np.arange(n)
        M = ppz_forced_matrix(inst.formula, inst.planted, positions, np.tile(in_adv, (30, 1)))
        from satadvice.solvers import Implicator, run_iteration, _apply_advice
        base, _ = _apply_advice(inst.formula, adv)
        imp = Implicator(inst.formula)
        guide = [0] + list(inst.planted)
        for s, p in enumerate(perms):
            order = [int(v) + 1 for v in p if not in_adv[v]]
            vals, forced, guessed = run_iteration(imp, base, order, 1, guide)
            assert vals is not None
            assert forced == int(M[s].sum())


def test_ppz_guess_rate_example():
    """Single critical clause per variable: forced with probability 1/3 each."""
    # unique solution 111 with critical clauses (x1|~x2|~x3) etc.
    clauses = [(1, -2, -3), (-1, 2, -3), (-1, -2, 3), (1, 2, 3), (1, 2, -3), (1, -2, 3), (-1, 2, 3)]
    phi = CnfFormula.from_clauses(clauses, 3)
    assert count_solutions(phi) == 1
    st_ = guessed_on_correct_path(phi, (1, 1, 1), None, 1, 3000, 0)
    assert np.mean(st_.forced) == pytest.approx(1.0, abs=0.06)
