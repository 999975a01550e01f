"""Uniformizer series, the GL_n action on lattices, Moore determinants, Baker functions."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .drinfeld import (DModule, TateSystem, XPoint, _apply, as_xpoint, carlitz, drinfeld_module, phi_of, phi_tx,
                       tate_basis, teichmuller_lift)
from .errors import DepthTooShallow, RankNotOne, WindowTooSmall, ZeroTheta
from .ffield import FieldElem, fq_trace, solve_additive
from .linalg import k_left_kernel, k_rank
from .ore import OrePoly, ore_eval
from .tseries import Series, SeriesMat, SeriesVec, smith_decompose


@dataclass
class Uniformizer:
    module: DModule
    x: XPoint
    series: list                       # k SeriesVec, each of length n * deg(x)
    pivot: int
    tate: TateSystem = None
    provenance: str = "tate"
    trace_dim: int = 1

    @property
    def n(self):
        return self.module.n

    @property
    def k(self):
        return len(self.series)

    @property
    def prec(self):
        return min(v.prec for v in self.series)

    @property
    def s1(self) -> SeriesVec:
        return self.series[0]

    @property
    def level(self):
        return max((v.level for v in self.series), key=lambda lv: lv.index)

    def to_json(self):
        return {
            "n": self.n,
            "k": self.k,
            "prec": self.prec,
            "pivot": self.pivot,
            "series": [v.to_json() for v in self.series],
        }


def _pivot_of(vec: SeriesVec):
    for i, c in enumerate(vec.comps):
        if not c.coeff(0).is_zero():
            return i
    return None


def _make(M, x, series, tate, provenance, trace_dim=1):
    lv = max((v.level for v in series), key=lambda l: l.index)
    series = [v.embed(lv) for v in series]
    piv = _pivot_of(series[0])
    return Uniformizer(M, x, series, piv, tate, provenance, trace_dim)


# ---------------------------------------------------------------- constructions

def uniformizer_from_tate(T: TateSystem, prec: int = None) -> Uniformizer:
    """(s_i)_xi = sum_h phi(e_i)(alpha^xi_h) t_x^h, in dual-basis form when deg(x) > 1."""
    prec = T.depth + 1 if prec is None else prec
    if T.depth < prec - 1:
        raise DepthTooShallow(f"Tate depth {T.depth} < {prec - 1}")
    M = T.module
    tower = M.tower
    lv = tower.top

    def ser(points):
        return Series.from_coeffs(lv, [p.embed(lv) for p in points[:prec]], prec=prec)

    series = []
    for i in range(M.k):
        comps = []
        if T.x.degree == 1:
            for chain in T.chains:
                comps.append(ser([a if M.k == 1 else a[i] for a in chain]))
        else:
            for per_c in T.twisted:
                for chain in per_c:
                    comps.append(ser([a if M.k == 1 else a[i] for a in chain]))
        series.append(SeriesVec(comps))
    return _make(M, T.x, series, T, "tate", T.x.degree)


def carlitz_uniformizer(tower, theta, prec: int) -> Uniformizer:
    """Normalized solution a_0 = 1 of sigma* s = (1 - theta^-1 t) s.

    Recursion: a_h^q - a_h = -theta^-1 a_{h-1}, each step an Artin-Schreier
    solve with the canonical (least) root.  The coefficients form Tate chains
    of psi_t = theta - theta*sigma, the twist of the Carlitz module by a
    (q-1)-th root of -1/theta, so that module is recorded on the result.
    """
    theta = tower.fq(theta) if not isinstance(theta, FieldElem) else theta
    if theta.is_zero():
        raise ZeroTheta("theta = 0: the characteristic meets x = (t)")
    M = drinfeld_module(tower, [theta, -theta])
    AS = OrePoly([-1, 1], tower)
    c = -theta.inverse()
    coeffs = [tower.fq(1)]
    for _ in range(1, prec):
        coeffs.append(solve_additive(AS, c * coeffs[-1]))
    lv = tower.top
    s = Series.from_coeffs(lv, [a.embed(lv) for a in coeffs], prec=prec)
    return _make(M, XPoint.rational(tower, 0), [SeriesVec([s])], None, "carlitz")


def build_uniformizer(M: DModule, x, prec: int, policy="least") -> Uniformizer:
    T = tate_basis(M, x, prec - 1, policy=policy)
    return uniformizer_from_tate(T, prec if T.complete else T.depth + 1)


# ---------------------------------------------------------------- invariants

def master_invariant(U: Uniformizer) -> bool:
    """phi_{t_x} applied to every coefficient equals multiplication by t_x.

    For deg(x) > 1 the k(x)-structure is checked as well: phi of the
    Teichmuller lift of w acts on coefficients as multiplication by w.
    """
    M = U.module
    Px = phi_tx(M, U.x)
    P = U.prec
    n_comp = len(U.s1)
    for c in range(n_comp):
        for h in range(P):
            pt = _point(U, c, h)
            img = _apply(M, Px, pt)
            want = _point(U, c, h - 1) if h else None
            if not _pt_equal(M, img, want):
                return False
    if U.trace_dim > 1:
        return _kx_action_ok(U)
    return True


def _point(U, comp, h):
    vals = [v.comps[comp].coeff(h) for v in U.series]
    return vals[0] if U.module.k == 1 else tuple(vals)


def _pt_equal(M, a, b):
    av = [a] if M.k == 1 else list(a)
    if b is None:
        return all(y.is_zero() for y in av)
    bv = [b] if M.k == 1 else list(b)
    return all(u == v for u, v in zip(av, bv))


def _kx_action_ok(U):
    T = U.tate
    M = U.module
    d = U.trace_dim
    basis, dual = T.kx_basis, T.kx_dual
    for w in basis:
        # matrix m[c'][c] = Tr(w * dual_c * basis_c')
        m = [[M.tower.fq(list(fq_trace(w * dual[c] * basis[c2]).digits())) for c in range(d)]
             for c2 in range(d)]
        for h in range(U.prec):
            lift = phi_of(M, teichmuller_lift(M.tower, U.x, w, h + 1))
            for xi in range(U.n):
                pts = [_point(U, xi * d + c, h) for c in range(d)]
                for c2 in range(d):
                    lhs = _apply(M, lift, pts[c2])
                    rhs = None
                    for c in range(d):
                        coef = m[c2][c]
                        if coef.is_zero():
                            continue
                        term = (coef * pts[c]) if M.k == 1 else tuple(coef * y for y in pts[c])
                        rhs = term if rhs is None else (rhs + term if M.k == 1 else tuple(a + b for a, b in zip(rhs, term)))
                    if rhs is None:
                        rhs = M.tower.fq.zero() if M.k == 1 else tuple(M.tower.fq.zero() for _ in range(M.k))
                    if not _pt_equal(M, lhs, rhs):
                        return False
    return True


def h_rank(U: Uniformizer) -> int:
    """Rank over K of the span of s_1..s_k (windowed coefficient matrix)."""
    lv = U.level
    rows = np.stack([v.embed(lv).window_array(0, U.prec).reshape(-1, lv.D) for v in U.series])
    return k_rank(lv, rows)


# ---------------------------------------------------------------- projective comparison

def scalar_ratio(v: SeriesVec, w: SeriesVec, upto=None):
    """c in K with v = c * w on the common window, or None."""
    lv = max(v.level, w.level, key=lambda l: l.index)
    hi = min(x for x in (v.prec, w.prec, upto) if x is not None)
    lo = min(min(c.low for c in v.comps), min(c.low for c in w.comps), hi)
    a = v.embed(lv).window_array(lo, hi).reshape(-1, lv.D)
    b = w.embed(lv).window_array(lo, hi).reshape(-1, lv.D)
    nz = np.nonzero(b.any(axis=1))[0]
    if not nz.size:
        return None if a.any() else FieldElem(lv, np.eye(1, lv.D, 0, dtype=np.int64)[0])
    i = nz[0]
    c = lv.mul(a[i], lv.inv(b[i]))
    if not np.array_equal(lv.mul(b, c[None, :]) % lv.p, a % lv.p):
        return None
    return FieldElem(lv, c)


def in_fq(c: FieldElem) -> bool:
    return c is not None and c.min_level().index <= c.tower.fq.index


def series_unit_ratio(v: SeriesVec, w: SeriesVec):
    """u in K[[t]]^* with v = u * w componentwise (same u for all components), or None.

    Also reports whether u has F_q coefficients.
    """
    piv = _pivot_of(w)
    if piv is None:
        return None
    prec = min(v.prec, w.prec)
    u = v.comps[piv].truncate(prec) * w.comps[piv].truncate(prec).inverse()
    for a, b in zip(v.comps, w.comps):
        if not (u * b).equals(a, prec):
            return None
    return u


def series_in_fq(u: Series) -> bool:
    return all(FieldElem(u.level, r).min_level().index <= u.level.tower.fq.index for r in u.arr)


# ---------------------------------------------------------------- GL_n action

@dataclass
class ActionResult:
    vector: SeriesVec
    l: int
    e: int
    b: int
    candidates: int


def _as_fq_matrix(tower, beta):
    if isinstance(beta, SeriesMat):
        return beta
    return SeriesMat.from_polys(tower.fq, beta)


def gl_action(U: Uniformizer, beta, L=None, prec: int = None) -> Uniformizer:
    """s1^beta: the generator of beta L_{-l} cap O^n, l = v(det beta) (k = 1)."""
    return _make(U.module, U.x, [gl_action_detail(U, beta, L, prec).vector], None, "gl_action")


def gl_action_detail(U: Uniformizer, beta, L=None, prec: int = None) -> ActionResult:
    if U.k != 1 or U.trace_dim != 1:
        raise NotImplementedError("gl_action needs k = 1 and a rational x")
    tower = U.module.tower
    beta = _as_fq_matrix(tower, beta)
    n = U.n
    if beta.shape != (n, n):
        raise ValueError("beta must be n x n")
    s = U.s1
    det = beta.det()
    l = det.valuation()
    if l is None or (det.prec is not None and l >= det.prec):
        raise RankNotOne("beta is singular within precision")
    adj = beta.adjugate()
    adj_vals = [e.valuation() for r in adj.rows for e in r if not e.is_zero()]
    e = max(0, l - min(adj_vals))
    b = max(0, -beta.valuation())
    if L is not None and -L.lo < e:
        raise WindowTooSmall(f"lattice window reaches t^{L.lo}, need t^{-e}")
    top = e * n - l
    if top < 0:
        raise RankNotOne(f"L_{{-l}} cap t^-{e}O is zero (l={l})")
    out_prec = s.prec - e - b
    if prec is not None:
        if prec > out_prec:
            raise WindowTooSmall(f"uniformizer precision {s.prec} gives only {out_prec} output terms")
        out_prec = prec
    if out_prec <= 0:
        raise WindowTooSmall("no output coefficients survive the action")
    cands = []
    v = s
    for i in range(top + 1):
        if i:
            v = v.frobenius_twist()
        cands.append(beta * v.shift(-e))
    lv = max((c.level for c in cands), key=lambda x: x.index)
    lo = -e - b
    rows = np.stack([c.embed(lv).window_array(lo, out_prec) for c in cands])  # (m, len, n, D)
    neg = rows[:, :-lo if lo < 0 else 0].reshape(len(cands), -1, lv.D)
    ker = k_left_kernel(lv, neg)
    if len(ker) != 1:
        raise RankNotOne(f"intersection has dimension {len(ker)}")
    coef = ker[0]
    pos = rows[:, -lo if lo < 0 else 0:]
    comb = (lv.mul(coef[:, None, None, :], pos).sum(axis=0)) % lv.p   # (P, n, D)
    vec = SeriesVec.from_window_array(lv, comb, 0, out_prec)
    vec = _normalize_to(vec, s)
    return ActionResult(vec, l, e, b, len(cands))


def _normalize_to(vec: SeriesVec, ref: SeriesVec) -> SeriesVec:
    """Scale so the pivot constant term matches ref's (or is 1 if ref's vanishes)."""
    piv = _pivot_of(vec)
    if piv is None:
        return vec
    c = vec.comps[piv].coeff(0)
    want = ref.comps[piv].coeff(0) if piv < len(ref) else None
    if want is None or want.is_zero():
        want = c.level.one()
    return vec.scale(want / c)


def beta_elementary(tower, n, i, r):
    """diag(1, .., t^r at i, .., 1) as an exact matrix."""
    fq = tower.fq
    ent = [[Series.monomial(fq, r) if (a == b == i) else Series.from_coeffs(fq, [int(a == b)])
            for b in range(n)] for a in range(n)]
    return SeriesMat(ent)


# ---------------------------------------------------------------- Moore formula

def moore_matrix_minors(points, m):
    """Signed cofactors of the last column of the (m+1)x(m+1) Moore matrix.

    Row i is (a_0^(q^i), ..., a_{m-1}^(q^i), (sigma*)^i s).  Returns c_i with
    det = sum_i c_i (sigma*)^i s.
    """
    out = []
    for i in range(m + 1):
        rows = [r for r in range(m + 1) if r != i]
        mat = [[points[j].frobenius(r) for j in range(m)] for r in rows]
        d = _scalar_det(mat) if m else points[0].level.one() if points else None
        if d is None:
            d = None
        sign = 1 if (i + m) % 2 == 0 else -1
        out.append(d if sign == 1 else -d)
    return out


def _scalar_det(mat):
    n = len(mat)
    if n == 0:
        raise ValueError("empty")
    if n == 1:
        return mat[0][0]
    acc = None
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in mat[1:]]
        term = mat[0][j] * _scalar_det(minor)
        if j % 2:
            term = -term
        acc = term if acc is None else acc + term
    return acc


def moore_formula(U: Uniformizer, xi: int, r: int, T: TateSystem = None) -> SeriesVec:
    """beta_(xi,r) * det(Moore matrix of alpha^xi_0..alpha^xi_{-r-1} and s_1), r < 0."""
    if r >= 0:
        raise ValueError("moore_formula needs r < 0")
    T = T or U.tate
    m = -r
    if T is None or T.depth < m - 1:
        raise DepthTooShallow(f"need Tate depth {m - 1}")
    pts = T.chains[xi][:m]
    if m == 0:
        cof = [U.level.one()]
    else:
        cof = moore_matrix_minors(pts, m)
    s = U.s1
    acc = None
    v = s
    for i in range(m + 1):
        if i:
            v = v.frobenius_twist()
        term = v.scale(cof[i])
        acc = term if acc is None else acc + term
    comps = list(acc.comps)
    comps[xi] = comps[xi].shift(r)
    return SeriesVec(comps)


# ---------------------------------------------------------------- rank-one family

def basis_family(U: Uniformizer, h: int):
    """beta_(i,r)^-1 s1^beta_(i,r) for 0 <= r <= h, 1 <= i <= n (r = 0 listed once)."""
    tower = U.module.tower
    fam = [U.s1]
    for r in range(1, h + 1):
        for i in range(U.n):
            beta = beta_elementary(tower, U.n, i, r)
            v = gl_action_detail(U, beta).vector
            comps = list(v.comps)
            comps[i] = comps[i].shift(-r)
            fam.append(SeriesVec(comps))
    return fam


def window_rank(vectors, lo, hi) -> int:
    lv = max((v.level for v in vectors), key=lambda l: l.index)
    hi = min([hi] + [v.prec for v in vectors])
    rows = np.stack([v.embed(lv).window_array(lo, hi).reshape(-1, lv.D) for v in vectors])
    return k_rank(lv, rows)


# ---------------------------------------------------------------- Baker function

@dataclass
class BakerResult:
    psi: SeriesVec
    s_g: SeriesVec
    exponents: list
    a0_units: bool
    scalar_to_s1: FieldElem = None      # psi = c * s1 when psi lies on the s1 line


def baker(U: Uniformizer, g, L=None, work_prec: int = None) -> BakerResult:
    """Psi(g) = g^-1 s1^g, with s1^g = U1 s1^(D U2) from a Smith decomposition g = U1 D U2."""
    tower = U.module.tower
    g = _as_fq_matrix(tower, g)
    P0 = U.prec
    W = work_prec or (P0 + 8)
    sm = smith_decompose(g, prec=W)
    DU2 = sm.D * sm.U2
    mid = gl_action_detail(U, DU2, L).vector
    s_g = sm.U1 * mid
    P = min(c.prec for c in s_g.comps)
    ginv = g.inverse(P + 4)
    psi = ginv * s_g
    a0 = [c.coeff(0) for c in s_g.comps]
    units = all(not x.is_zero() for x in a0)
    ratio = scalar_ratio(psi, U.s1)
    return BakerResult(psi, s_g, sm.exponents, units, ratio)
