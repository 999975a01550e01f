import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ellsheaf.errors import LevelError, TowerBudgetExceeded
from ellsheaf.ffield import (FieldTower, additive_kernel, artin_schreier_solve, dual_basis, fq_trace,
                             frobenius, is_irreducible, least_irreducible, solve_additive, trace)
from ellsheaf.ore import OrePoly, ore_eval


@pytest.fixture(scope="module")
def f4():
    return FieldTower(2, 2)


@pytest.fixture(scope="module")
def tower3():
    return FieldTower(3, 1, [2, 3])


def test_f4_omega_over_f2():
    T = FieldTower(2, 1, [2])
    w = T.top([0, 1])
    assert w * w == w + 1
    assert frobenius(w) == w + 1
    assert frobenius(frobenius(w)) == w
    assert trace(w, 0) == T.fq(1)
    assert trace(T.top.one(), 0).is_zero()


def test_frobenius_is_identity_on_fq(f4):
    w = f4.fq([0, 1])
    assert frobenius(w) == w


def test_f4_self_dual_basis():
    T = FieldTower(2, 1, [2])
    basis, dual, self_dual = dual_basis(T.top)
    w = T.top([0, 1])
    assert self_dual
    assert set(b.key() for b in basis) == {w.key(), (w + 1).key()}


def test_f9_dual_basis_not_self_dual():
    T = FieldTower(3, 1, [2])
    basis, dual, self_dual = dual_basis(T.top)
    assert not self_dual
    for i, a in enumerate(basis):
        for j, b in enumerate(dual):
            assert fq_trace(a * b) == T.fq(int(i == j))


def _brute_irreducible(p, coeffs):
    """No root and no factorization into lower-degree monic polynomials (degree <= 3)."""
    deg = len(coeffs) - 1
    for a in range(p):
        if sum(c * a ** i for i, c in enumerate(coeffs)) % p == 0:
            return False
    return True


@pytest.mark.parametrize("p", [2, 3, 5])
def test_irreducibility_matches_root_test_in_low_degree(p):
    T = FieldTower(p)
    lv = T.levels[0]
    for deg in (2, 3):
        for tail in itertools.product(range(p), repeat=deg):
            coeffs = list(tail) + [1]
            f = np.array([[c] for c in coeffs], dtype=np.int64)
            assert is_irreducible(lv, f) == _brute_irreducible(p, coeffs)


def test_least_irreducible_is_lexicographically_least():
    T = FieldTower(2)
    f = least_irreducible(T.levels[0], 3)
    # coefficient vectors compare with c_0 most significant: 1 + z^2 + z^3 precedes 1 + z + z^3
    assert [int(c[0]) for c in f] == [1, 0, 1, 1]


def test_tower_budget():
    T = FieldTower(2, max_degree=8)
    T.extend(2)
    T.extend(4)
    with pytest.raises(TowerBudgetExceeded):
        T.extend(2)


def test_tower_json_round_trip():
    T = FieldTower(2, 2, [3, 2])
    again = FieldTower.from_json(T.to_json())
    assert again.to_json() == T.to_json()


def test_trace_to_non_subfield_raises():
    T = FieldTower(2, 1, [2])
    other = FieldTower(2, 1, [2])
    with pytest.raises(LevelError):
        trace(T.top([0, 1]), other.levels[0])


def test_artin_schreier_q3_needs_degree_3():
    T = FieldTower(3)
    x = artin_schreier_solve(T.fq(1))
    assert x ** 3 - x == T.fq(1)
    assert x.level.D == 3


def test_additive_kernel_dimension():
    T = FieldTower(2, 2, [2])
    P = OrePoly([1, 0, 1], T)
    ker = additive_kernel(P, T.top)
    assert len(ker) == 2
    for z in ker:
        assert ore_eval(P, z).is_zero()


def test_trace_transitivity(tower3):
    lv = tower3.top
    rng = np.random.default_rng(0)
    for _ in range(5):
        a = lv(tuple(int(v) for v in rng.integers(0, 3, lv.D)))
        assert trace(a, 0) == trace(trace(a, 1), 0)


def _elem_strategy(level):
    return st.lists(st.integers(0, level.p - 1), min_size=level.D, max_size=level.D).map(lambda d: level(tuple(d)))


LEVEL = FieldTower(3, 1, [2, 2]).top


@given(_elem_strategy(LEVEL), _elem_strategy(LEVEL), _elem_strategy(LEVEL))
def test_field_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert frobenius(a + b) == frobenius(a) + frobenius(b)
    assert frobenius(a * b) == frobenius(a) * frobenius(b)
    if not a.is_zero():
        assert a * a.inverse() == LEVEL.one()


@given(_elem_strategy(LEVEL))
def test_solve_additive_returns_a_root(c):
    P = OrePoly([1, 1], LEVEL.tower)      # z + z^3
    z = solve_additive(P, c)
    assert ore_eval(P, z) == c


def test_policy_greatest_differs_only_by_kernel():
    T = FieldTower(2)
    c = T.fq(1)
    lo = solve_additive([T.fq(1), T.fq(1)], c, policy="least")
    hi = solve_additive([T.fq(1), T.fq(1)], c, policy="greatest")
    assert (lo - hi) ** 2 + (lo - hi) == T.fq(0)
