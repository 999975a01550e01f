"""Finite-window models of discrete subspaces of K((t))^n.

A window [lo, hi) stores the image of L cap t^lo K[[t]]^n modulo t^hi as a
matrix in reduced echelon form; columns are the monomials t^j e_xi ordered
by (j, xi).  For a uniformizer s_1 of a rank-n Drinfeld module the lattices
L_j of the associated elliptic sheaf are modelled through

    L_j cap t^-N O^n = t^-N * span{ (sigma*)^i s_1 : i <= j + N n },

so L_{j+n} = t L_j, sigma* L_j is in L_{j+1}, and u = t^-1 preserves L_j.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable

import numpy as np

from .drinfeld import drinfeld_module, phi_tx
from .errors import DegenerateDeterminant, RankNotOne, GuardBandTooNarrow, PrecisionExhausted
from .ffield import FieldElem
from .linalg import k_rank, k_reduce, k_rref, nullspace_p, rank_p
from .tseries import Series, SeriesVec
from .uniformizer import (Uniformizer, build_uniformizer, uniformizer_from_tate, in_fq, scalar_ratio, series_in_fq,
                          series_unit_ratio)


class Lattice:
    def __init__(self, level, n, lo, hi, rows, provenance="", builder: Callable = None):
        self.level, self.n, self.lo, self.hi = level, n, lo, hi
        rows = np.asarray(rows, dtype=np.int64)
        cols = (hi - lo) * n
        rows = rows.reshape(-1, cols, level.D) if rows.size else np.zeros((0, cols, level.D), dtype=np.int64)
        if len(rows) and cols:
            self.rows, self.pivots = k_rref(level, rows)
        else:
            self.rows, self.pivots = np.zeros((0, cols, level.D), dtype=np.int64), []
        self.provenance = provenance
        self.builder = builder

    # -- construction
    @classmethod
    def _reduced(cls, level, n, lo, hi, rows, pivots, provenance=""):
        """Wrap rows already in reduced echelon form."""
        out = cls.__new__(cls)
        out.level, out.n, out.lo, out.hi = level, n, lo, hi
        out.rows, out.pivots = rows, list(pivots)
        out.provenance, out.builder = provenance, None
        return out

    @classmethod
    def from_vectors(cls, level, n, lo, hi, vectors, provenance="", builder=None):
        rows = []
        for v in vectors:
            if v.prec is not None and v.prec < hi:
                raise PrecisionExhausted(f"vector known to t^{v.prec}, window needs t^{hi}")
            rows.append(v.embed(level).window_array(lo, hi, level).reshape(-1, level.D))
        arr = np.array(rows, dtype=np.int64).reshape(len(rows), (hi - lo) * n, level.D)
        return cls(level, n, lo, hi, arr, provenance, builder)

    # -- basic data
    @property
    def N(self):
        return -self.lo

    @property
    def dim(self):
        return len(self.pivots)

    def chi(self):
        """dim(L cap t^lo O^n) + n*lo: the window-independent index."""
        return self.dim + self.n * self.lo

    def pivot_exponents(self):
        return [self.lo + j // self.n for j in self.pivots]

    def col(self, exp, xi):
        return (exp - self.lo) * self.n + xi

    def sub(self, lo, hi):
        """Window [lo, hi) of the same lattice (lo >= self.lo, hi <= self.hi)."""
        if lo < self.lo or hi > self.hi:
            raise GuardBandTooNarrow(f"sub-window [{lo},{hi}) outside [{self.lo},{self.hi})")
        start = (lo - self.lo) * self.n
        stop = (hi - self.lo) * self.n
        # rows pivoting inside [start, stop) stay reduced after slicing
        keep = [i for i, j in enumerate(self.pivots) if start <= j < stop]
        rows = self.rows[keep, start:stop] if keep else np.zeros((0, stop - start, self.level.D), dtype=np.int64)
        return Lattice._reduced(self.level, self.n, lo, hi, rows, [self.pivots[i] - start for i in keep],
                                self.provenance)

    def shift(self, k):
        """t^k L on the shifted window."""
        return Lattice._reduced(self.level, self.n, self.lo + k, self.hi + k, self.rows, self.pivots, self.provenance)

    def twist(self):
        """sigma* L (coefficientwise Frobenius)."""
        return Lattice(self.level, self.n, self.lo, self.hi, self.level.frob(self.rows), "twist")

    def embed(self, level):
        if level.index == self.level.index:
            return self
        return Lattice(level, self.n, self.lo, self.hi, level.lift(self.level, self.rows), self.provenance)

    def __add__(self, other):
        self._same_window(other)
        lv = max(self.level, other.level, key=lambda l: l.index)
        rows = np.concatenate([self.embed(lv).rows, other.embed(lv).rows])
        return Lattice(lv, self.n, self.lo, self.hi, rows, "sum")

    def _same_window(self, other):
        if (self.n, self.lo, self.hi) != (other.n, other.lo, other.hi):
            raise ValueError("lattices live on different windows")

    def contains_array(self, x):
        x = self.level.lift(self.level, x)
        if not len(self.pivots):
            return not np.asarray(x).any()
        return not k_reduce(self.level, self.rows, self.pivots, x).any()

    def contains(self, vec: SeriesVec):
        return self.contains_array(vec.embed(self.level).window_array(self.lo, self.hi, self.level)
                                   .reshape(-1, self.level.D))

    def includes(self, other) -> bool:
        self._same_window(other)
        lv = max(self.level, other.level, key=lambda l: l.index)
        a, b = self.embed(lv), other.embed(lv)
        return all(a.contains_array(r) for r in b.rows)

    def equals(self, other) -> bool:
        return self.includes(other) and other.includes(self)

    def enlarge(self, by=2):
        if self.builder is None:
            raise ValueError("lattice has no builder to regenerate a larger window")
        return self.builder(self.N + by, self.hi + by)

    def to_json(self):
        lv = self.level
        return {
            "n": self.n,
            "window": [self.lo, self.hi],
            "level": lv.index,
            "rows": [[[int(d) for d in lv.nested(e)] for e in r] for r in self.rows],
            "provenance": self.provenance,
        }


# ---------------------------------------------------------------- builders

def lattice_index_window(U: Uniformizer, j: int, N: int, M: int) -> Lattice:
    """Window [-N, M) of L_j."""
    if U.k != 1 or U.trace_dim != 1:
        raise NotImplementedError("lattice windows need k = 1 and a rational x")
    need = M + N
    if U.prec < need:
        raise PrecisionExhausted(f"uniformizer precision {U.prec} < {need} for window [-{N},{M})")
    n = U.n
    top = j + N * n
    vecs = []
    v = U.s1
    for i in range(top + 1):
        if i:
            v = v.frobenius_twist()
        vecs.append(v.shift(-N))
    lv = U.level
    if not vecs:
        return Lattice(lv, n, -N, M, np.zeros((0, (M + N) * n, lv.D)), f"L_{j}",
                       lambda N2, M2: lattice_index_window(U, j, N2, M2))
    return Lattice.from_vectors(lv, n, -N, M, vecs, f"L_{j}",
                                lambda N2, M2: lattice_index_window(U, j, N2, M2))


def lattice_from_uniformizer(U: Uniformizer, N: int, M: int) -> Lattice:
    """Window [-N, M) of L_0."""
    return lattice_index_window(U, 0, N, M)


def lattice_from_family(U: Uniformizer, N: int, M: int) -> Lattice:
    """Window of L_0 spanned by u^a times the rank-one family (cross-check route)."""
    from .uniformizer import basis_family
    fam = basis_family(U, N)
    vecs = []
    for r, v in enumerate(fam):
        depth = 0 if r == 0 else (r - 1) // U.n + 1
        for a in range(N - depth + 1):
            vecs.append(v.shift(-a))
    hi = min([M] + [v.prec for v in vecs])
    if hi < M:
        raise PrecisionExhausted(f"family known only to t^{hi}")
    return Lattice.from_vectors(U.level, U.n, -N, M, vecs, "family")


def trivial_lattice(level, n, N, M) -> Lattice:
    """F_q[u]^n: span of t^j e_xi for j <= 0."""
    rows = []
    for j in range(-N, 1):
        for xi in range(n):
            r = np.zeros(((M + N) * n, level.D), dtype=np.int64)
            r[(j + N) * n + xi, 0] = 1
            rows.append(r)
    return Lattice(level, n, -N, M, np.array(rows), "trivial",
                   lambda N2, M2: trivial_lattice(level, n, N2, M2))


def shifted_lattice(U: Uniformizer, shift: int, N: int, M: int) -> Lattice:
    """t^shift L_0 on the window [-N, M)."""
    base = lattice_index_window(U, 0, N + shift, M - shift)
    out = base.shift(shift)
    out.provenance = f"t^{shift} L_0"
    out.builder = lambda N2, M2: shifted_lattice(U, shift, N2, M2)
    return out


def dense_from_uniformizer(U: Uniformizer, prec: int) -> Lattice:
    """Window [0, prec) of D_N = K-span of (sigma*)^i s_1, using i < n*prec."""
    if U.prec < prec:
        raise PrecisionExhausted(f"uniformizer precision {U.prec} < {prec}")
    vecs = []
    v = U.s1.truncate(prec)
    for i in range(U.n * prec):
        if i:
            v = v.frobenius_twist()
        vecs.append(v)
    return Lattice.from_vectors(U.level, U.n, 0, prec, vecs, "D_N",
                                lambda N2, M2: dense_from_uniformizer(U, M2))


def dense_from_module(M, T, prec: int) -> Lattice:
    return dense_from_uniformizer(uniformizer_from_tate(T, prec), prec)


def dense_slice(D: Lattice, m: int, h: int) -> int:
    """dim (D cap t^m O^n) / (D cap t^(m+h) O^n), read in the window."""
    if m + h > D.hi:
        raise GuardBandTooNarrow("slice leaves the window")
    return D.sub(m, m + h).dim


def nonnegative_line(L: Lattice) -> SeriesVec:
    """The line L cap O^n (mod t^hi), normalized to a unit pivot constant term."""
    sub = L.sub(0, L.hi)
    if sub.dim != 1:
        raise RankNotOne(f"nonnegative part has dimension {sub.dim}")
    lv = L.level
    row = sub.rows[0].reshape(L.hi, L.n, lv.D)
    v = SeriesVec.from_window_array(lv, row, 0, L.hi)
    c0 = v.constant_vector()
    piv = next(i for i, c in enumerate(c0) if not c.is_zero())
    return v.scale(c0[piv].inverse())


# ---------------------------------------------------------------- ellipticity conditions

@dataclass
class EllipticReport:
    module: bool
    frobenius_flag: bool
    vanishing: bool
    coranks: list
    expected_coranks: list
    h0: int
    h1: int
    window: tuple

    @property
    def passed(self):
        return self.module and self.frobenius_flag and self.vanishing

    def verdicts(self):
        return {"module": self.module, "frobenius_flag": self.frobenius_flag, "vanishing": self.vanishing}


def u_stable(L: Lattice) -> bool:
    """u (L cap t^(lo+1) O) lands in L, compared modulo t^(hi-1)."""
    inner = L.sub(L.lo + 1, L.hi)
    moved = inner.shift(-1)                    # window [lo, hi-1)
    return L.sub(L.lo, L.hi - 1).includes(moved)


def elliptic_check(L: Lattice, k: int = 1) -> EllipticReport:
    n = L.n
    if L.N < n + k + 1 or L.hi <= n + k:
        raise GuardBandTooNarrow(f"window [{L.lo},{L.hi}) too small for k={k}")
    mod_ok = u_stable(L)
    target = L.shift(k).sub(L.lo + k, L.hi)
    S = L
    twist = L
    coranks, flag_ok = [], True
    for i in range(n + 1):
        if i:
            twist = twist.twist()
            S = S + twist
        Ssub = S.sub(L.lo + k, L.hi)
        lv = max(Ssub.level, target.level, key=lambda l: l.index)
        if not target.embed(lv).includes(Ssub.embed(lv)):
            flag_ok = False
        coranks.append(target.dim - Ssub.dim)
        if i == n - 1:
            S_top = S
    expected = [k * (n - i) for i in range(n + 1)]
    flag_ok = flag_ok and coranks == expected
    # L_{-k} = u^k S_{n-1}
    if L.hi <= k:
        raise GuardBandTooNarrow("need hi > k for the vanishing test")
    h0 = S_top.sub(k, L.hi).dim
    chi = S_top.chi() - n * k
    h1 = h0 - chi
    return EllipticReport(mod_ok, flag_ok, h0 == 0 and h1 == 0, coranks, expected, h0, h1, (L.lo, L.hi))


def window_stable_check(L: Lattice, k: int = 1, by: int = 2):
    """(report, enlarged report, verdicts agree)."""
    a = elliptic_check(L, k)
    b = elliptic_check(L.enlarge(by), k)
    return a, b, a.verdicts() == b.verdicts()


# ---------------------------------------------------------------- stabilizer ring

@dataclass
class StabilizerResult:
    basis: list                    # exact Series over F_q
    exponents: tuple               # searched exponent range [lo, hi]
    has_u: bool
    closed: bool

    def as_u_degrees(self):
        """Sorted u-degrees if every basis element is a monomial, else None."""
        degs = []
        for s in self.basis:
            t = s.trimmed()
            if len(t.arr) != 1:
                return None
            degs.append(-t.low)
        return sorted(degs)


def stabilizer_ring(L: Lattice, depth: int = None, pos: int = 2) -> StabilizerResult:
    """F_q-basis of {c = sum_{-depth<=j<=pos} c_j t^j, c_j in F_q : c L in L} in-window."""
    depth = depth if depth is not None else max(1, L.N // 2)
    if depth >= L.N or L.hi - depth <= L.lo + depth:
        raise GuardBandTooNarrow(f"window [{L.lo},{L.hi}) too small for depth {depth}")
    lv = L.level
    tower = lv.tower
    fq = tower.fq
    fq_basis = fq.basis()
    ref = L.sub(L.lo, L.hi - depth)
    tests = L.sub(L.lo + depth, L.hi)
    exps = list(range(-depth, pos + 1))
    unknowns = [(j, b) for j in exps for b in fq_basis]
    blocks = []
    for row in tests.rows:
        v = row.reshape(tests.hi - tests.lo, L.n, lv.D)
        cols = []
        for j, b in unknowns:
            w = np.zeros((ref.hi - ref.lo, L.n, lv.D), dtype=np.int64)
            for e_idx in range(v.shape[0]):
                exp = tests.lo + e_idx + j
                if ref.lo <= exp < ref.hi:
                    w[exp - ref.lo] = v[e_idx]
            w = lv.mul(w, b.embed(lv).vec)
            res = k_reduce(lv, ref.rows, ref.pivots, w.reshape(-1, lv.D)) if ref.dim else w.reshape(-1, lv.D)
            cols.append(res.reshape(-1))
        blocks.append(np.array(cols, dtype=np.int64).T)
    A = np.concatenate(blocks, axis=0) if blocks else np.zeros((0, len(unknowns)), dtype=np.int64)
    # order unknowns by exponent descending so echelon pivots sit at the highest u-power
    order = list(range(len(unknowns)))[::-1]
    ker = nullspace_p(A[:, order], tower.p)
    basis = []
    for sol in ker:
        coeffs = {}
        for pos_idx, val in enumerate(sol):
            if val:
                j, b = unknowns[order[pos_idx]]
                coeffs[j] = coeffs.get(j, fq.zero()) + int(val) * b
        lo_e = min(exps)
        arr = [coeffs.get(j, fq.zero()) for j in exps]
        basis.append(Series.from_coeffs(fq, arr, low=lo_e).trimmed())
    has_u = any(_is_monomial(s, -1) for s in _fq_span_closure_check(basis, fq, [-1]))
    closed = _closed_under_mult(basis, fq, -depth, pos)
    return StabilizerResult(basis, (-depth, pos), has_u, closed)


def _is_monomial(s, exp):
    t = s.trimmed()
    return len(t.arr) == 1 and t.low == exp and FieldElem(t.level, t.arr[0]) == 1


def _coeff_vector(s, fq, lo, hi):
    return s.embed(fq).coeff_array(lo, hi).reshape(-1)


def _fq_span_closure_check(basis, fq, exps):
    """Return [u] if u lies in the F_q-span of the basis, else []."""
    if not basis:
        return []
    lo = min(min(s.low for s in basis), min(exps))
    hi = max(max(s.high for s in basis), max(exps) + 1)
    rows = np.array([_full_vec(s, fq, lo, hi) for s in basis], dtype=np.int64)
    u = Series.monomial(fq, -1)
    r0 = rank_p(rows, fq.p)
    r1 = rank_p(np.vstack([rows, _full_vec(u, fq, lo, hi)]), fq.p)
    return [u] if r0 == r1 else []


def _full_vec(s, fq, lo, hi):
    """F_p digits of s over the exponent range, including F_q-multiples for span tests."""
    return s.embed(fq).coeff_array(lo, hi).reshape(-1)


def _fq_span_rows(basis, fq, lo, hi):
    rows = []
    for s in basis:
        for b in fq.basis():
            rows.append(_full_vec(s.scale(b), fq, lo, hi))
    return np.array(rows, dtype=np.int64).reshape(len(rows), -1)


def _closed_under_mult(basis, fq, lo, hi):
    if not basis:
        return True
    span = _fq_span_rows(basis, fq, lo, hi + 1)
    r0 = rank_p(span, fq.p)
    for a in basis:
        for b in basis:
            prod = (a * b).trimmed()
            if prod.is_zero():
                continue
            if prod.low < lo or prod.high > hi + 1:
                continue                        # leaves the searched range
            vec = _full_vec(prod, fq, lo, hi + 1)
            if rank_p(np.vstack([span, vec]), fq.p) != r0:
                return False
    return True


# ---------------------------------------------------------------- scattering determinant

@dataclass
class ScatteringReport:
    d: Series
    derived_g: Series
    g_constant: bool
    g_value: FieldElem
    expected_g: FieldElem
    rebuilt: Uniformizer
    fq_scalar: FieldElem           # d = c * rebuilt with c in F_q^*, else None
    unit_ratio: Series             # d = u * rebuilt with u in F_q[[t]]^*, else None
    unit_in_fq_series: bool
    generation: bool
    generation_detail: dict = field(default_factory=dict)


def moore_det(vectors):
    """det of the n x n series matrix whose columns are the given SeriesVecs."""
    from .tseries import SeriesMat
    n = len(vectors)
    mat = SeriesMat([[vectors[j].comps[i] for j in range(n)] for i in range(n)])
    return mat.det()


def scattering_det(U: Uniformizer, delta: int = 2) -> ScatteringReport:
    """d = det(s_1, sigma* s_1, ..., (sigma*)^(n-1) s_1) and its rank-1 identification."""
    if U.k != 1 or U.trace_dim != 1:
        raise NotImplementedError("scattering_det needs k = 1 and a rational x")
    M = U.module
    n = U.n
    tower = M.tower
    twists = [U.s1]
    for _ in range(1, n):
        twists.append(twists[-1].frobenius_twist())
    d = moore_det(twists) if n > 1 else U.s1.comps[0]
    if d.is_zero():
        raise DegenerateDeterminant("scattering determinant vanishes in-window")
    theta_x = M.theta - U.x.xi
    sd = d.frobenius_twist()
    tx = Series.from_coeffs(tower.fq, [-theta_x, 1])
    g = (tx * d) * sd.inverse()
    g_const = g.valuation() is not None and g.valuation() >= 0 and \
        all(g.coeff(i).is_zero() for i in range(1, g.prec))
    g0 = g.coeff(0)
    gn = M.phi_t[n]
    expected = gn if n % 2 == 1 else -gn
    # independent rank-1 rebuild psi_t = theta + g0 sigma
    rebuilt = None
    fq_scalar = unit = None
    unit_fq = False
    if g_const and in_fq(g0) and not g0.is_zero():
        psi = drinfeld_module(tower, [M.theta, g0.embed(tower.fq)])
        rebuilt = build_uniformizer(psi, U.x.xi, d.prec)
        dv = SeriesVec([d])
        c = scalar_ratio(dv, rebuilt.s1)
        fq_scalar = c if (c is not None and in_fq(c)) else None
        unit = series_unit_ratio(dv, rebuilt.s1)
        unit_fq = unit is not None and series_in_fq(unit)
    gen, detail = _generation_check(twists[0], d, n, delta)
    return ScatteringReport(d, g, g_const, g0, expected, rebuilt, fq_scalar, unit, unit_fq, gen, detail)


def _generation_check(s1: SeriesVec, d: Series, n: int, delta: int):
    """n-fold wedges of (sigma*)^i s_1, i <= n-1+delta, against translates t^a (sigma*)^b d, a+b <= delta.

    Each wedge divided by d must be a polynomial of degree <= max(i) - (n-1),
    and both families must span the same (delta+1)-dimensional space.
    """
    P = d.prec
    if P <= delta + 1:
        raise GuardBandTooNarrow("precision too small for the generation check")
    top = n - 1 + delta
    tw = [s1]
    for _ in range(top):
        tw.append(tw[-1].frobenius_twist())
    lv = max((v.level for v in tw), key=lambda l: l.index)
    dinv = d.inverse()
    wedges, poly_ok = [], True
    for idx in combinations(range(top + 1), n):
        bound = idx[-1] - (n - 1)
        det = moore_det([tw[i] for i in idx]) if n > 1 else tw[idx[0]].comps[0]
        quo = det * dinv
        if any(not quo.coeff(i).is_zero() for i in range(bound + 1, quo.prec)):
            poly_ok = False
        wedges.append(det.embed(lv).coeff_array(0, P))
    trans = []
    dd = d
    for b in range(delta + 1):
        if b:
            dd = dd.frobenius_twist()
        for a in range(delta + 1 - b):
            trans.append(dd.shift(a).embed(lv).coeff_array(0, P))
    W1 = np.array(wedges, dtype=np.int64)
    W2 = np.array(trans, dtype=np.int64)
    r1, r2 = k_rank(lv, W1), k_rank(lv, W2)
    r12 = k_rank(lv, np.concatenate([W1, W2]))
    ok = poly_ok and r1 == r2 == r12 == delta + 1
    return ok, {"wedge_rank": r1, "translate_rank": r2, "joint_rank": r12, "quotients_polynomial": poly_ok}
