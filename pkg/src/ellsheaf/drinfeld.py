"""Drinfeld modules and abelian t-modules over F_q[t], torsion, and Tate chains."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (CharacteristicCollision, DimensionMismatch, NotEllipticCharacteristic,
                     TowerBudgetExceeded, ZeroTheta)
from .ffield import (FieldElem, FieldTower, additive_kernel, additive_splitting_degree,
                     canonical_solution, dual_basis, fq_coordinates, fq_independent_subset,
                     pmul, ptrim, scratch_extension, solve_additive, _linear_map_matrix, POLICIES)
from .linalg import nullspace_p, rank_p
from .ore import OreMat, OrePoly, ore_eval, oremat_apply


@dataclass
class DModule:
    """phi: F_q[t] -> End(G_a^k); phi_t an OrePoly (k = 1) or an OreMat (k > 1)."""

    tower: FieldTower
    k: int
    n: int
    theta: FieldElem
    phi_t: object

    def __post_init__(self):
        if self.k == 1:
            if not isinstance(self.phi_t, OrePoly):
                raise TypeError("k = 1 needs an OrePoly")
            if self.phi_t.degree != self.n or self.n < 1:
                raise ValueError("phi_t must have sigma-degree n >= 1 with g_n != 0")
            if self.phi_t[0] != self.theta:
                raise ValueError("constant term of phi_t must equal theta")
        elif not isinstance(self.phi_t, OreMat) or self.phi_t.k != self.k:
            raise TypeError("k > 1 needs a k x k OreMat")

    def to_json(self):
        return {
            "tower": self.tower.to_json(),
            "k": self.k,
            "n": self.n,
            "theta": self.theta.to_json(),
            "phi_t": self.phi_t.to_json(),
        }

    @classmethod
    def from_json(cls, tower, data):
        phi = (OrePoly.from_json(tower, data["phi_t"]) if data["k"] == 1
               else OreMat.from_json(tower, data["phi_t"]))
        return cls(tower, data["k"], data["n"], tower.element_from_json(data["theta"]), phi)


def drinfeld_module(tower, coeffs) -> DModule:
    """Rank-n Drinfeld module phi_t = c_0 + c_1 s + ... + c_n s^n."""
    P = OrePoly(coeffs, tower)
    return DModule(tower, 1, P.degree, P[0], P)


def carlitz(tower, theta=1) -> DModule:
    return drinfeld_module(tower, [theta, 1])


def t_module(tower, phi_t: OreMat, n: int) -> DModule:
    """A k x k abelian t-module of rank n; theta is read off by characteristic_of."""
    b, _ = characteristic_of_matrix(tower, phi_t)
    return DModule(tower, phi_t.k, n, b, phi_t)


# ---------------------------------------------------------------- x-data

@dataclass(frozen=True)
class XPoint:
    """The closed point x = (P) of Spec F_q[t], P monic irreducible; t_x = P(t).

    ``poly`` lists the F_q coefficients of P from the constant term up.
    """

    poly: tuple

    @property
    def degree(self):
        return len(self.poly) - 1

    @classmethod
    def rational(cls, tower, xi):
        xi = tower.fq(xi)
        return cls((-xi, tower.fq(1)))

    @property
    def xi(self):
        if self.degree != 1:
            raise ValueError("xi is defined only for rational points")
        return -self.poly[0]

    def to_json(self):
        return [list(c.digits()) for c in self.poly]


def as_xpoint(tower, x) -> XPoint:
    if isinstance(x, XPoint):
        return x
    return XPoint.rational(tower, x)


def phi_of(M: DModule, a):
    """Image of the polynomial a = sum a_i t^i (F_q coefficients, low first)."""
    coeffs = [M.tower.fq(c) if not isinstance(c, FieldElem) else c for c in a]
    if M.k == 1:
        out = OrePoly([], M.tower)
        for c in reversed(coeffs):
            out = out * M.phi_t + OrePoly([c], M.tower)
        return out
    out = OreMat.scalar(M.tower, M.k, 0)
    for c in reversed(coeffs):
        out = out * M.phi_t + OreMat.scalar(M.tower, M.k, c)
    return out


def phi_tx(M: DModule, x) -> object:
    """phi applied to t_x = P(t)."""
    x = as_xpoint(M.tower, x)
    return phi_of(M, list(x.poly))


# ---------------------------------------------------------------- characteristic

def _charpoly(level, mat):
    """det(x I - C) as an array of coefficients over ``level`` (Laplace expansion)."""
    k = len(mat)
    D = level.D

    def entry(i, j):
        c = -mat[i][j].embed(level).vec
        if i == j:
            return np.array([c % level.p, np.eye(1, D, 0, dtype=np.int64)[0]])
        return np.array([c % level.p])

    def det(rows, cols):
        if len(rows) == 1:
            return entry(rows[0], cols[0])
        acc = np.zeros((1, D), dtype=np.int64)
        for idx, c in enumerate(cols):
            sub = det(rows[1:], cols[:idx] + cols[idx + 1:])
            term = pmul(level, entry(rows[0], c), sub)
            if idx % 2:
                term = -term
            n = max(len(acc), len(term))
            a2 = np.zeros((n, D), dtype=np.int64)
            a2[:len(acc)] += acc
            a2[:len(term)] += term
            acc = a2 % level.p
        return ptrim(acc)

    return det(list(range(k)), list(range(k)))


def characteristic_of_matrix(tower, phi_t: OreMat):
    C = phi_t.constant_matrix()
    level = max((e.level for r in C for e in r), key=lambda lv: lv.index)
    cp = _charpoly(level, C)
    k = len(C)
    p = tower.p
    j = 0
    while k % (p ** (j + 1)) == 0:
        j += 1
    P = p ** j
    m = k // P
    # (x^P - b)^m: coefficient of x^{P(m-1)} is -m b
    if any(cp[i].any() for i in range(len(cp)) if i % P):
        raise NotEllipticCharacteristic("characteristic polynomial is not a polynomial in x^(p^j)")
    c = cp[P * (m - 1)]
    b = FieldElem(level, -level.mul(c, level.inv(np.eye(1, level.D, 0, dtype=np.int64)[0] * (m % p))))
    # verify the full shape
    y = np.zeros((P + 1, level.D), dtype=np.int64)
    y[0] = -b.vec % p
    y[P, 0] = 1
    acc = np.eye(1, level.D, 0, dtype=np.int64)
    for _ in range(m):
        acc = pmul(level, acc, y)
    if not np.array_equal(ptrim(acc), ptrim(cp)):
        raise NotEllipticCharacteristic("characteristic polynomial is not of the form (x^(p^j) - b)^m")
    return b, {"j": j, "m": m, "charpoly": [list(FieldElem(level, r).digits()) for r in cp]}


def characteristic_of(M: DModule):
    """(b, certificate) with the char. poly. of t on Lie E equal to (x^(p^j) - b)^m."""
    if M.k == 1:
        return M.theta, {"j": 0, "m": 1, "charpoly": None}
    return characteristic_of_matrix(M.tower, M.phi_t)


def _check_away(M, x):
    x = as_xpoint(M.tower, x)
    if M.theta.is_zero() and x.degree == 1 and x.xi.is_zero():
        raise ZeroTheta("theta = 0 meets x = (t)")
    # P(theta) == 0  <=>  the characteristic point lies on x
    val = M.theta.level.zero()
    for c in reversed(x.poly):
        val = val * M.theta + c
    if val.is_zero():
        raise CharacteristicCollision("x meets the characteristic of the module")
    return x


# ---------------------------------------------------------------- linear solvers

def _kernel_k1(P: OrePoly, tower, dim):
    """F_q-basis of ker P, extending the tower until the kernel has dimension ``dim``."""
    basis = additive_kernel(P, tower.top)
    if len(basis) < dim:
        d = additive_splitting_degree(tower.top, list(P.coeffs))
        if d > 1:
            tower.extend(d)
        basis = additive_kernel(P, tower.top)
    if len(basis) != dim:
        raise RuntimeError(f"kernel dimension {len(basis)} != {dim}")
    return basis


def _mat_linear_map(M: OreMat, level):
    """F_p matrix of v -> M(v) on level^k (nested coordinates, blockwise)."""
    k, D = M.k, level.D
    A = np.zeros((k * D, k * D), dtype=np.int64)
    for i in range(k):
        for j in range(k):
            P = M.entries[i][j]
            if not P.is_zero():
                A[i * D:(i + 1) * D, j * D:(j + 1) * D] = _linear_map_matrix(level, list(P.coeffs))
    return A % level.p


def _vec_digits(v, level):
    return np.concatenate([np.array(x.embed(level).digits(), dtype=np.int64) for x in v])


def _vec_from_digits(x, level, k):
    D = level.D
    return tuple(level(tuple(int(d) for d in x[i * D:(i + 1) * D])) for i in range(k))


def _mat_kernel(M: OreMat, level):
    A = _mat_linear_map(M, level)
    ker = nullspace_p(A, level.p)
    vecs = [_vec_from_digits(r, level, M.k) for r in ker]
    return _fq_independent_vecs(level, vecs)


def _fq_independent_vecs(level, vecs):
    fq_b = level.tower.fq.basis()
    chosen, rows = [], []
    for v in vecs:
        cand = rows + [list(_vec_digits([b * x for x in v], level)) for b in fq_b]
        if rank_p(np.array(cand, dtype=np.int64), level.p) == len(cand):
            chosen.append(v)
            rows = cand
    return chosen


def _mat_solve_in(M, level, w, policy):
    A = _mat_linear_map(M, level)
    x = canonical_solution(A, _vec_digits(w, level), level.p, policy)
    return None if x is None else _vec_from_digits(x, level, M.k)


def _with_extension(tower, trial):
    """Run trial(level) on the top, then on trial extensions of degree 2, 3, ...

    The first degree that succeeds is appended to the tower and the trial is
    rerun there, so the result is expressed in the stored tower.
    """
    res = trial(tower.top)
    if res is not None:
        return res
    d = 2
    while True:
        lv = scratch_extension(tower, d)     # raises TowerBudgetExceeded eventually
        if trial(lv) is not None:
            tower.extend(d)
            return trial(tower.top)
        d += 1


def _solve_mat(M: OreMat, w, policy="least"):
    tower = M.tower
    for lv in tower.levels:
        if all(lv.index >= x.min_level().index for x in w):
            z = _mat_solve_in(M, lv, w, policy)
            if z is not None:
                return z
    return _with_extension(tower, lambda lv: _mat_solve_in(M, lv, w, policy))


def _kernel_mat(M: OreMat, dim):
    tower = M.tower

    def trial(lv):
        b = _mat_kernel(M, lv)
        return b if len(b) == dim else None
    return _with_extension(tower, trial)


# ---------------------------------------------------------------- torsion

def _module_basis_deg(M: DModule, Px, kernel, d):
    """A basis of ker phi_P over k(x) = F_q[t]/P, greedily from the F_q-basis."""
    if d == 1:
        return list(kernel)
    level = M.tower.top
    chosen, rows = [], []
    phi_ti = [phi_of(M, [0] * i + [1]) for i in range(d)]
    fq_b = M.tower.fq.basis()
    for v in kernel:
        new = []
        for P in phi_ti:
            w = _apply(M, P, v)
            for b in fq_b:
                new.append(_digits_of(M, [b * x for x in _as_vec(M, w)], level))
        cand = rows + new
        if rank_p(np.array(cand, dtype=np.int64), level.p) == len(cand):
            chosen.append(v)
            rows = cand
    return chosen


def _as_vec(M, v):
    return [v] if M.k == 1 else list(v)


def _digits_of(M, vec, level):
    return list(_vec_digits(vec, level))


def _apply(M, P, v):
    if M.k == 1:
        return ore_eval(P, v)
    return tuple(oremat_apply(P, v))


def torsion_basis(M: DModule, x, r: int):
    """F_q-basis of the m_x^r-division points (extends the tower as needed).

    Built from Tate chains: the points alpha^xi_{c,h} with h < r form an
    F_q-basis of ker phi_{t_x^r}; the result is then re-reduced to the
    canonical kernel basis of phi_{t_x^r} on the final level.
    """
    x = _check_away(M, x)
    if r == 0:
        return []
    T = tate_basis(M, x, r - 1)
    if T.depth < r - 1:
        raise TowerBudgetExceeded(f"torsion of order {r} exceeds the tower budget (depth {T.depth})")
    P = phi_of(M, _poly_pow(M.tower, list(x.poly), r))
    top = M.tower.top
    if M.k == 1:
        basis = additive_kernel(P, top)
    else:
        basis = _mat_kernel(P, top)
    return basis


def _poly_pow(tower, poly, r):
    level = tower.fq
    out = np.eye(1, level.D, 0, dtype=np.int64)
    base = np.array([c.vec for c in poly], dtype=np.int64)
    for _ in range(r):
        out = pmul(level, out, base)
    return [FieldElem(level, c) for c in out]


@dataclass
class TateSystem:
    """Compatible division-point chains alpha^xi_h, phi_{t_x}(alpha_h) = alpha_{h-1}."""

    module: DModule
    x: XPoint
    depth: int
    requested_depth: int
    chains: list                  # chains[xi][h]; FieldElem (k=1) or tuple (k>1)
    policy: str = "least"
    twisted: list = field(default=None)   # deg(x) > 1: twisted[xi][c][h]
    kx_basis: list = field(default=None)
    kx_dual: list = field(default=None)
    kx_self_dual: bool = False
    kx_tower: FieldTower = field(default=None)

    @property
    def n(self):
        return len(self.chains)

    @property
    def complete(self):
        return self.depth >= self.requested_depth

    def check(self):
        """Chain consistency: phi_{t_x}(alpha_0) = 0 and phi_{t_x}(alpha_h) = alpha_{h-1}."""
        Px = phi_tx(self.module, self.x)
        for chain in self.chains:
            prev = None
            for a in chain:
                img = _apply(self.module, Px, a)
                want = prev
                if want is None:
                    if any(not y.is_zero() for y in _as_vec(self.module, img)):
                        return False
                elif any(u != v for u, v in zip(_as_vec(self.module, img), _as_vec(self.module, want))):
                    return False
                prev = a
        return True

    def to_json(self):
        def enc(a):
            if isinstance(a, FieldElem):
                return a.to_json()
            return [y.to_json() for y in a]
        return {
            "x": self.x.to_json(),
            "depth": self.depth,
            "requested_depth": self.requested_depth,
            "policy": self.policy,
            "chains": [[enc(a) for a in ch] for ch in self.chains],
        }


def tate_basis(M: DModule, x, depth: int, policy: str = "least") -> TateSystem:
    """Chains alpha^xi_0..alpha^xi_depth built with the canonical root policy.

    Stops early (recording the achieved depth) when the tower budget would be
    exceeded.
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}")
    x = _check_away(M, x)
    tower = M.tower
    Px = phi_tx(M, x)
    dim0 = M.n * x.degree
    if M.k == 1:
        kernel = _kernel_k1(Px, tower, dim0)
    else:
        kernel = _kernel_mat(Px, dim0)
    starts = _module_basis_deg(M, Px, kernel, x.degree)
    chains = [[a] for a in starts]
    achieved = 0
    try:
        for h in range(1, depth + 1):
            for ch in chains:
                if M.k == 1:
                    ch.append(solve_additive(Px, ch[-1], policy=policy))
                else:
                    ch.append(_solve_mat(Px, ch[-1], policy))
            achieved = h
    except TowerBudgetExceeded:
        for ch in chains:
            del ch[achieved + 1:]
    T = TateSystem(M, x, achieved, depth, chains, policy)
    if x.degree > 1:
        _attach_trace_data(T)
    return T


def _attach_trace_data(T: TateSystem):
    """Teichmuller-twisted chains alpha_{c,h} = phi_{w_c~}(alpha_h) for deg(x) > 1."""
    M, x = T.module, T.x
    tower = M.tower
    kx = FieldTower(tower.p, tower.e, [x.degree])
    level = kx.top
    stored = [c.digits() for c in _kx_poly(kx)]
    mine = [tuple(c.digits()) for c in x.poly]
    if [tuple(s) for s in stored] != [_pad(m, len(s)) for m, s in zip(mine, stored)]:
        raise ValueError("deg(x) > 1 requires P to be the least monic irreducible of its degree")
    basis, dual, self_dual = dual_basis(level)
    T.kx_tower, T.kx_basis, T.kx_dual, T.kx_self_dual = kx, basis, dual, self_dual
    twisted = []
    for chain in T.chains:
        per_c = []
        for w in basis:
            per_h = []
            for h, a in enumerate(chain):
                lift = teichmuller_lift(tower, x, w, h + 1)
                per_h.append(_apply(M, phi_of(M, lift), a))
            per_c.append(per_h)
        twisted.append(per_c)
    T.twisted = twisted


def _pad(t, n):
    t = tuple(t)
    return t + (0,) * (n - len(t))


def _kx_poly(kx):
    lv = kx.top
    prev = kx.levels[lv.index - 1]
    return [FieldElem(prev, c) for c in lv.poly]


def teichmuller_lift(tower, x: XPoint, w: FieldElem, r: int):
    """Coefficients (over F_q) of the Teichmuller lift of w in F_q[t]/(P^r).

    w is an element of k(x) = F_q[t]/(P), given in the standalone tower whose
    top level is defined by P.  The lift is a^(q^(d m)) mod P^r for any
    polynomial representative a and q^(d m) >= r.
    """
    fq = tower.fq
    e = tower.e
    digits = w.digits()
    d = x.degree
    a = [fq(digits[i * e:(i + 1) * e]) for i in range(d)]
    Pr = _poly_pow(tower, list(x.poly), r)
    level = fq
    mod = np.array([c.vec for c in Pr], dtype=np.int64)
    cur = np.array([c.vec for c in a], dtype=np.int64)
    from .ffield import pmod, p_frobenius_mod
    cur = pmod(level, cur, mod)
    qdm = 1
    while qdm < r:
        qdm *= tower.q ** d
    steps = 0
    while tower.p ** steps < qdm:
        steps += 1
    for _ in range(steps):
        cur = p_frobenius_mod(level, cur, mod)
    return [FieldElem(level, c) for c in cur]


# ---------------------------------------------------------------- change of level

def change_of_level(T1: TateSystem, T2: TateSystem):
    """Matrices C_0, C_1, ... over F_q with s2 = (sum C_a t^a) s1 coefficientwise.

    Solved depth by depth: C_h alpha_0 = alpha2_h - sum_{a<h} C_a alpha_{h-a}.
    Returns None if some depth has no F_q solution.
    """
    if T1.module is not T2.module or T1.x != T2.x:
        raise ValueError("Tate systems must share the module and x")
    if T1.module.k != 1 or T1.x.degree != 1:
        raise NotImplementedError("change_of_level is implemented for k = 1, deg(x) = 1")
    n = T1.n
    depth = min(T1.depth, T2.depth)
    base = [T1.chains[j][0] for j in range(n)]
    C = []
    for h in range(depth + 1):
        Ch = []
        for i in range(n):
            target = T2.chains[i][h]
            for a in range(h):
                for j in range(n):
                    c = C[a][i][j]
                    if not c.is_zero():
                        target = target - c * T1.chains[j][h - a]
            coords = fq_coordinates(target, base)
            if coords is None:
                return None
            Ch.append(coords)
        C.append(Ch)
    return C
