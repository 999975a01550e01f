import numpy as np
import pytest
from hypothesis import given, strategies as st

from ellsheaf.errors import EmptyWindow, NotAUnit, PrecisionExhausted
from ellsheaf.ffield import FieldTower
from ellsheaf.tseries import Series, SeriesMat, SeriesVec, smith_decompose

T = FieldTower(3, 1, [2])
K = T.top


def elems(level):
    return st.lists(st.integers(0, level.p - 1), min_size=level.D, max_size=level.D).map(lambda d: level(tuple(d)))


def series(level, prec=8, min_low=-2, max_low=2):
    return st.tuples(st.integers(min_low, max_low), st.lists(elems(level), min_size=1, max_size=6)).map(
        lambda lc: Series.from_coeffs(level, lc[1], low=lc[0], prec=max(prec, lc[0] + len(lc[1]))))


def units(level, prec=8):
    return st.tuples(elems(level).filter(lambda e: not e.is_zero()), st.lists(elems(level), max_size=5)).map(
        lambda ab: Series.from_coeffs(level, [ab[0]] + ab[1], prec=prec))


@given(series(K), series(K), series(K))
def test_ring_laws_in_window(a, b, c):
    P = 4
    assert ((a * b) * c).equals(a * (b * c), upto=P)
    assert (a * (b + c)).equals(a * b + a * c, upto=P)
    assert (a * b).equals(b * a)


@given(units(K))
def test_inverse(u):
    inv = u.inverse()
    one = Series.from_coeffs(K, [1], prec=u.prec)
    assert (u * inv).equals(one)


@given(series(K))
def test_frobenius_twist_is_ring_map(a):
    b = a.shift(1) + a
    assert (a * b).frobenius_twist().equals(a.frobenius_twist() * b.frobenius_twist())


def test_precision_bookkeeping():
    a = Series.from_coeffs(K, [1, 1], prec=5)
    b = Series.monomial(K, 2)            # exact t^2
    assert (a * b).prec == 7
    c = Series.from_coeffs(K, [0, 1], prec=4)   # valuation 1, known to t^4
    assert (a * c).prec == min(5 + 1, 4 + 0)
    zero = Series.zero(K)
    assert (a * zero).prec is None and (a * zero).is_zero()


def test_errors():
    with pytest.raises(NotAUnit):
        Series.from_coeffs(K, [0, 1], prec=4).inverse()
    with pytest.raises(EmptyWindow):
        Series.from_coeffs(K, [1]).inverse(prec=0)
    with pytest.raises(PrecisionExhausted):
        Series.from_coeffs(K, [1, 1], prec=2).coeff(3)


def test_series_json_round_trip():
    a = Series.from_coeffs(K, [K([0, 1]), 2], low=-1, prec=3)
    assert Series.from_json(T, a.to_json()).equals(a)


def _random_matrix(rng, n, deg, level):
    return SeriesMat.from_polys(level, [[[level(tuple(int(v) for v in rng.integers(0, level.p, level.D)))
                                          for _ in range(deg + 1)] for _ in range(n)] for _ in range(n)])


@pytest.mark.parametrize("seed", range(10))
def test_smith_reconstructs(seed):
    rng = np.random.default_rng(seed)
    F = T.fq
    g = _random_matrix(rng, 3, 2, F)
    det = g.det()
    if det.is_zero():
        pytest.skip("singular sample")
    sm = smith_decompose(g, prec=20)
    assert sum(sm.exponents) == det.valuation()
    assert list(sm.exponents) == sorted(sm.exponents)
    assert sm.reconstruct().equals(g, upto=10)
    for U in (sm.U1, sm.U2):
        assert not U.det().coeff(0).is_zero()


def test_det_adjugate_identity():
    rng = np.random.default_rng(3)
    g = _random_matrix(rng, 3, 1, K)
    adj = g.adjugate()
    prod = g * adj
    d = g.det()
    for i in range(3):
        for j in range(3):
            want = d if i == j else Series.zero(K)
            assert prod[i, j].equals(want)


def test_seriesvec_window_round_trip():
    v = SeriesVec([Series.from_coeffs(K, [1, 2, 0], prec=3), Series.from_coeffs(K, [0, K([0, 1])], low=-1, prec=3)])
    arr = v.window_array(-1, 3)
    w = SeriesVec.from_window_array(K, arr, -1, 3)
    assert w.equals(v)
