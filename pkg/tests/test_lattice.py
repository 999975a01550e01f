import pytest

from ellsheaf.drinfeld import carlitz, drinfeld_module, tate_basis
from ellsheaf.errors import GuardBandTooNarrow, PrecisionExhausted
from ellsheaf.ffield import FieldTower
from ellsheaf.lattice import (dense_from_module, dense_from_uniformizer, dense_slice, elliptic_check,
                              lattice_from_family, lattice_from_uniformizer, nonnegative_line, scattering_det,
                              shifted_lattice, stabilizer_ring, trivial_lattice, u_stable)
from ellsheaf.uniformizer import build_uniformizer, scalar_ratio


@pytest.fixture(scope="module")
def carlitz_u():
    return build_uniformizer(carlitz(FieldTower(2), 1), 0, 16)


@pytest.fixture(scope="module")
def rank2_u():
    return build_uniformizer(drinfeld_module(FieldTower(3), [2, 0, 1]), 0, 16)


def test_carlitz_window_dimension(carlitz_u):
    L = lattice_from_uniformizer(carlitz_u, 3, 4)
    # t^-r s1 for r <= 3 on the non-positive side, plus one vector per tail exponent
    assert L.pivot_exponents()[:4] == [-3, -2, -1, 0]
    assert L.chi() == 1


def test_precision_guard(carlitz_u):
    with pytest.raises(PrecisionExhausted):
        lattice_from_uniformizer(carlitz_u, 10, 10)


def test_round_trip_recovers_s1(rank2_u):
    L = lattice_from_uniformizer(rank2_u, 4, 6)
    line = nonnegative_line(L)
    assert scalar_ratio(line, rank2_u.s1.truncate(6)) is not None


def test_family_span_equals_window(rank2_u):
    assert lattice_from_uniformizer(rank2_u, 3, 5).equals(lattice_from_family(rank2_u, 3, 5))


def test_elliptic_conditions_rank2(rank2_u):
    rep = elliptic_check(lattice_from_uniformizer(rank2_u, 4, 6))
    assert rep.passed
    assert rep.coranks == [2, 1, 0]
    triv = elliptic_check(trivial_lattice(rank2_u.level, 2, 4, 6))
    assert not triv.frobenius_flag and triv.module
    shifted = elliptic_check(shifted_lattice(rank2_u, -1, 4, 6))
    assert not shifted.vanishing and shifted.h1 > 0


def test_guard_band(carlitz_u):
    L = lattice_from_uniformizer(carlitz_u, 1, 4)
    with pytest.raises(GuardBandTooNarrow):
        elliptic_check(L)


def test_u_stability(carlitz_u):
    assert u_stable(lattice_from_uniformizer(carlitz_u, 3, 4))


def test_stabilizer_is_fq_u(carlitz_u):
    res = stabilizer_ring(lattice_from_uniformizer(carlitz_u, 4, 6), depth=2)
    assert res.as_u_degrees() == [0, 1, 2]
    assert res.has_u and res.closed


def test_dense_growth(rank2_u):
    D = dense_from_uniformizer(rank2_u, 8)
    for m in range(4):
        assert dense_slice(D, m, 0) == 0
        assert dense_slice(D, m, 1) == 2
        assert dense_slice(D, m, 3) == 6


def test_dense_from_module_matches(carlitz_u):
    M = carlitz_u.module
    D = dense_from_module(M, tate_basis(M, 0, 7), 8)
    assert [dense_slice(D, m, 1) for m in range(5)] == [1] * 5


def test_scattering_rank1_is_s1(carlitz_u):
    rep = scattering_det(carlitz_u)
    assert rep.d.equals(carlitz_u.s1[0])
    assert rep.g_constant and rep.generation


def test_scattering_rank2(rank2_u):
    rep = scattering_det(rank2_u)
    assert rep.g_constant and rep.g_value == rep.expected_g
    assert rep.generation
    assert rep.unit_in_fq_series


def test_lattice_json(carlitz_u):
    L = lattice_from_uniformizer(carlitz_u, 2, 3)
    js = L.to_json()
    assert js["window"] == [-2, 3] and js["n"] == 1 and len(js["rows"]) == L.dim
