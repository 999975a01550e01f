import pytest
from hypothesis import given, strategies as st

from ellsheaf.errors import DimensionMismatch, DivisionByZero
from ellsheaf.ffield import FieldTower
from ellsheaf.ore import OreMat, OrePoly, ore_eval, ore_right_divmod, oremat_apply

T = FieldTower(2, 2, [3])          # F_q = F_4, K = F_64
K = T.top


def elems():
    return st.lists(st.integers(0, 1), min_size=K.D, max_size=K.D).map(lambda d: K(tuple(d)))


def orepolys(max_deg=3):
    return st.lists(elems(), min_size=1, max_size=max_deg + 1).map(lambda cs: OrePoly(cs, T))


def test_sigma_commutation():
    s = OrePoly.sigma(T)
    b = K([0, 1])
    assert s * b == OrePoly([0, b.frobenius()], T)


@given(orepolys(), orepolys(), elems())
def test_product_is_composition(P, Q, z):
    assert ore_eval(P * Q, z) == ore_eval(P, ore_eval(Q, z))


@given(orepolys(), orepolys(), orepolys())
def test_associative(P, Q, R):
    assert (P * Q) * R == P * (Q * R)


@given(orepolys(4), orepolys(2))
def test_right_division(P, Q):
    if Q.is_zero():
        with pytest.raises(DivisionByZero):
            ore_right_divmod(P, Q)
        return
    quo, rem = ore_right_divmod(P, Q)
    assert quo * Q + rem == P
    assert rem.is_zero() or rem.degree < Q.degree


def test_evaluation_is_fq_linear():
    P = OrePoly([K([1, 1]), 1, K([0, 0, 1])], T)
    a, b = K([1, 0, 1]), K([0, 1, 1, 0, 1])
    c = T.fq([0, 1])
    assert ore_eval(P, c * a + b) == c * ore_eval(P, a) + ore_eval(P, b)


def test_oremat_apply_and_product():
    P = lambda cs: OrePoly(cs, T)
    A = OreMat([[P([1]), P([0, 1])], [P([0]), P([1, 1])]])
    B = OreMat([[P([0, 1]), P([1])], [P([1]), P([0])]])
    v = [K([1, 1]), K([0, 1, 0, 1])]
    assert oremat_apply(A * B, v) == oremat_apply(A, oremat_apply(B, v))
    with pytest.raises(DimensionMismatch):
        oremat_apply(A, v[:1])


def test_json_round_trip():
    P = OrePoly([K([1, 1]), 0, T.fq([0, 1])], T)
    assert OrePoly.from_json(T, P.to_json()) == P
