import numpy as np
import pytest

from ellsheaf.drinfeld import carlitz, drinfeld_module, tate_basis
from ellsheaf.errors import DepthTooShallow, ZeroTheta
from ellsheaf.ffield import FieldTower
from ellsheaf.tseries import Series, SeriesMat, SeriesVec
from ellsheaf.uniformizer import (baker, basis_family, beta_elementary, build_uniformizer, carlitz_uniformizer,
                                  gl_action, gl_action_detail, in_fq, master_invariant, moore_formula,
                                  scalar_ratio, series_unit_ratio, uniformizer_from_tate, window_rank)


@pytest.fixture(scope="module")
def rank2():
    T = FieldTower(2)
    return build_uniformizer(drinfeld_module(T, [1, 0, 1]), 0, 12)


def test_carlitz_q2_coefficients():
    T = FieldTower(2)
    U = carlitz_uniformizer(T, 1, 3)
    a = [U.s1[0].coeff(h) for h in range(3)]
    assert a[0] == T.fq(1)
    assert a[1] * a[1] == a[1] + 1                     # a_1 = omega
    assert a[2] ** 2 - a[2] == -a[1]


def test_carlitz_prec_one_and_zero_theta():
    T = FieldTower(2)
    U = carlitz_uniformizer(T, 1, 1)
    assert U.prec == 1 and U.s1[0].coeff(0) == T.fq(1)
    with pytest.raises(ZeroTheta):
        carlitz_uniformizer(T, 0, 3)


@pytest.mark.parametrize("q,e,theta", [(2, 1, [1]), (3, 1, [2]), (4, 2, [1, 0])])
def test_carlitz_matches_tate_up_to_fq(q, e, theta):
    p = 2 if q % 2 == 0 else 3
    T = FieldTower(p, e)
    th = T.fq(theta)
    Uc = carlitz_uniformizer(T, th, 5)
    Ut = build_uniformizer(carlitz(T, th), 0, 5)
    c = scalar_ratio(Ut.s1, Uc.s1)
    assert c is not None and in_fq(c)


def test_carlitz_q3_theta1_only_unit_ratio():
    T = FieldTower(3)
    Uc = carlitz_uniformizer(T, 1, 5)
    Ut = build_uniformizer(carlitz(T, 1), 0, 5)
    assert scalar_ratio(Ut.s1, Uc.s1) is None
    assert series_unit_ratio(Ut.s1, Uc.s1) is not None


def test_depth_too_shallow():
    T = FieldTower(2)
    Ts = tate_basis(carlitz(T, 1), 0, 2)
    with pytest.raises(DepthTooShallow):
        uniformizer_from_tate(Ts, 5)


def test_master_invariant_rank2(rank2):
    assert master_invariant(rank2)
    assert rank2.pivot == 0


def test_gl_action_identity_and_scalar(rank2):
    T = rank2.module.tower
    I = SeriesMat.identity(T.fq, 2)
    assert gl_action(rank2, I).s1.equals(rank2.s1.truncate(gl_action(rank2, I).prec))


def test_gl_action_shift_bookkeeping(rank2):
    T = rank2.module.tower
    det = gl_action_detail(rank2, beta_elementary(T, 2, 1, -2))
    assert det.l == -2


@pytest.mark.parametrize("xi,r", [(0, -1), (1, -1), (0, -2), (1, -2)])
def test_moore_equals_gl_action(rank2, xi, r):
    T = rank2.module.tower
    mf = moore_formula(rank2, xi, r)
    ga = gl_action(rank2, beta_elementary(T, 2, xi, r)).s1
    assert scalar_ratio(mf, ga) is not None


def test_basis_family_ranks(rank2):
    fam = basis_family(rank2, 2)
    for h in range(3):
        assert window_rank(fam[:1 + 2 * h], -h, rank2.prec - 2 * h) == 2 * h + 1


def test_baker_unit_matrix_stays_on_s1_line(rank2):
    T = rank2.module.tower
    g = SeriesMat.from_polys(T.fq, [[[1, 1], [1]], [[0, 1], [1]]])
    res = baker(rank2, g)
    assert res.exponents == [0, 0]
    assert res.a0_units
    assert res.scalar_to_s1 is not None
