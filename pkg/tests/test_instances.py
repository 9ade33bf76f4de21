import numpy as np
import pytest

from satadvice.cnf import count_satisfied
from satadvice.instances import CONSTRUCTIONS, gen_planted
from satadvice.solvers import count_solutions


@pytest.mark.parametrize("construction", [c for c in CONSTRUCTIONS if c != "lin2-derived"])
def test_deterministic(construction):
    a = gen_planted(construction, 12, 40, 3, seed=7)
    b = gen_planted(construction, 12, 40, 3, seed=7)
    assert a == b
    assert a.formula.width <= 3


@pytest.mark.parametrize("seed", range(5))
def test_planted_constructions_satisfy_plant(seed):
    for c in ("planted-satisfiable", "planted-one-true-literal", "planted-unique-attempt"):
        inst = gen_planted(c, 14, 50, 3, seed)
        assert inst.formula.is_satisfied_by(inst.planted)


@pytest.mark.parametrize("seed", range(5))
def test_one_true_literal(seed):
    inst = gen_planted("planted-one-true-literal", 20, 80, 3, seed)
    x = inst.planted
    for c in inst.formula.clauses:
        assert len(c) == 3
        assert sum((x[abs(l) - 1] == 1) == (l > 0) for l in c) == 1


@pytest.mark.parametrize("seed", range(5))
def test_unique_attempt_is_unique(seed):
    inst = gen_planted("planted-unique-attempt", 14, 42, 3, seed)
    assert count_solutions(inst.formula, limit=2) == 1
    assert inst.params["m"] == inst.formula.m >= 42


def test_lin2_derived():
    inst = gen_planted("lin2-derived", 10, 25, 2, seed=1)
    assert inst.formula.m == 50 and len(inst.lin) == 25
    assert count_satisfied(inst.formula, inst.planted) == 50
    with pytest.raises(ValueError):
        gen_planted("lin2-derived", 10, 25, 3, seed=1)


def test_bad_parameters():
    with pytest.raises(ValueError):
        gen_planted("nope", 10, 10, 3, 0)
    with pytest.raises(ValueError):
        gen_planted("planted-satisfiable", 2, 10, 3, 0)


def test_uniform_sign_balance():
    inst = gen_planted("uniform-random-kcnf", 50, 4000, 3, seed=0)
    lits = np.array([l for c in inst.formula.clauses for l in c])
    assert abs((lits > 0).mean() - 0.5) < 0.02
