"""Twisted polynomials K{sigma} with sigma*b = b^q*sigma, and square matrices of them."""
from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, DivisionByZero
from .ffield import FieldElem


def _top(elems):
    return max((e.level for e in elems), key=lambda lv: lv.index)


class OrePoly:
    """Sum of b_i sigma^i with the coefficients on the left."""

    __slots__ = ("tower", "coeffs")

    def __init__(self, coeffs, tower=None):
        cs = list(coeffs)
        if tower is None:
            if not cs:
                raise ValueError("need a tower for the zero polynomial")
            tower = cs[0].tower
        cs = [c if isinstance(c, FieldElem) else tower.fq(c) for c in cs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.tower = tower
        self.coeffs = tuple(cs)

    @classmethod
    def sigma(cls, tower, power=1):
        return cls([0] * power + [1], tower)

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else float("-inf")

    def is_zero(self):
        return not self.coeffs

    def __getitem__(self, i):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else self.tower.fq.zero()

    def __add__(self, other):
        other = _as_ore(other, self.tower)
        n = max(len(self.coeffs), len(other.coeffs))
        return OrePoly([self[i] + other[i] for i in range(n)], self.tower)

    __radd__ = __add__

    def __neg__(self):
        return OrePoly([-c for c in self.coeffs], self.tower)

    def __sub__(self, other):
        return self + (-_as_ore(other, self.tower))

    def __rsub__(self, other):
        return _as_ore(other, self.tower) - self

    def __mul__(self, other):
        return ore_mul(self, _as_ore(other, self.tower))

    def __rmul__(self, other):
        return ore_mul(_as_ore(other, self.tower), self)

    def __pow__(self, n):
        out = OrePoly([1], self.tower)
        for _ in range(n):
            out = out * self
        return out

    def __call__(self, z):
        return ore_eval(self, z)

    def __eq__(self, other):
        if not isinstance(other, OrePoly):
            try:
                other = _as_ore(other, self.tower)
            except TypeError:
                return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        return all(self[i] == other[i] for i in range(n))

    def __hash__(self):
        return hash(tuple(c.key() for c in self.coeffs))

    def to_json(self):
        lv = _top(self.coeffs).index if self.coeffs else 0
        level = self.tower.levels[lv]
        return {"level": lv, "coeffs": [list(c.embed(level).digits()) for c in self.coeffs]}

    @classmethod
    def from_json(cls, tower, data):
        lv = tower.levels[data["level"]]
        return cls([lv(c) for c in data["coeffs"]], tower)

    def __repr__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"{c}*s^{i}" for i, c in enumerate(self.coeffs) if not c.is_zero())


def _as_ore(x, tower):
    if isinstance(x, OrePoly):
        return x
    if isinstance(x, (FieldElem, int, np.integer)):
        return OrePoly([x], tower)
    raise TypeError(f"cannot coerce {type(x).__name__} to OrePoly")


def ore_mul(P: OrePoly, Q: OrePoly) -> OrePoly:
    """(sum a_i s^i)(sum b_j s^j) = sum a_i b_j^(q^i) s^(i+j)."""
    if P.is_zero() or Q.is_zero():
        return OrePoly([], P.tower)
    out = [P.tower.fq.zero()] * (len(P.coeffs) + len(Q.coeffs) - 1)
    for i, a in enumerate(P.coeffs):
        if a.is_zero():
            continue
        for j, b in enumerate(Q.coeffs):
            if not b.is_zero():
                out[i + j] = out[i + j] + a * b.frobenius(i)
    return OrePoly(out, P.tower)


def ore_eval(P: OrePoly, z: FieldElem) -> FieldElem:
    """sum b_i z^(q^i)."""
    acc = z.level.zero() if isinstance(z, FieldElem) else P.tower.fq.zero()
    zi = z
    for i, b in enumerate(P.coeffs):
        if i:
            zi = zi.frobenius()
        if not b.is_zero():
            acc = acc + b * zi
    return acc


def ore_eval_array(P: OrePoly, level, arr):
    """Vectorized evaluation on an array (..., D) of elements of ``level``."""
    arr = np.asarray(arr, dtype=np.int64)
    acc = np.zeros_like(arr)
    for i, b in enumerate(P.coeffs):
        if b.is_zero():
            continue
        bl = b.embed(level) if b.level.index <= level.index else None
        if bl is None:
            raise ValueError("coefficient above evaluation level")
        acc = acc + level.mul(level.frob(arr, i), bl.vec)
    return acc % level.p


def ore_right_divmod(P: OrePoly, Q: OrePoly):
    """(quotient, remainder) with P = quotient*Q + remainder, deg remainder < deg Q."""
    if Q.is_zero():
        raise DivisionByZero("right division by the zero twisted polynomial")
    tower = P.tower
    dq = Q.degree
    lead = Q.coeffs[-1]
    quo = [tower.fq.zero()] * max(len(P.coeffs) - dq, 1)
    rem = P
    while not rem.is_zero() and rem.degree >= dq:
        k = rem.degree - dq
        c = rem.coeffs[-1] / lead.frobenius(k)
        quo[k] = quo[k] + c
        term = OrePoly([0] * k + [c], tower)
        rem = rem - ore_mul(term, Q)
    return OrePoly(quo, tower), rem


class OreMat:
    """k x k matrix of OrePoly acting on G_a^k."""

    def __init__(self, entries):
        self.entries = [[e for e in row] for row in entries]
        k = len(self.entries)
        if k == 0 or any(len(r) != k for r in self.entries):
            raise DimensionMismatch("OreMat must be square and nonempty")
        self.tower = self.entries[0][0].tower

    @property
    def k(self):
        return len(self.entries)

    @classmethod
    def identity(cls, tower, k):
        return cls([[OrePoly([int(i == j)], tower) for j in range(k)] for i in range(k)])

    @classmethod
    def scalar(cls, tower, k, c):
        return cls([[OrePoly([c if i == j else 0], tower) for j in range(k)] for i in range(k)])

    def __getitem__(self, ij):
        return self.entries[ij[0]][ij[1]]

    def __add__(self, other):
        other = _as_mat(other, self)
        return OreMat([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)])

    __radd__ = __add__

    def __neg__(self):
        return OreMat([[-a for a in r] for r in self.entries])

    def __sub__(self, other):
        return self + (-_as_mat(other, self))

    def __mul__(self, other):
        other = _as_mat(other, self)
        k = self.k
        return OreMat([[sum((self.entries[i][m] * other.entries[m][j] for m in range(1, k)),
                            self.entries[i][0] * other.entries[0][j]) for j in range(k)] for i in range(k)])

    def __rmul__(self, other):
        return _as_mat(other, self) * self

    def __pow__(self, n):
        out = OreMat.identity(self.tower, self.k)
        for _ in range(n):
            out = out * self
        return out

    def constant_matrix(self):
        """Matrix of sigma^0 coefficients (the action on Lie E)."""
        return [[e[0] for e in row] for row in self.entries]

    def __eq__(self, other):
        if not isinstance(other, OreMat) or other.k != self.k:
            return NotImplemented
        return all(a == b for r1, r2 in zip(self.entries, other.entries) for a, b in zip(r1, r2))

    __hash__ = None

    def to_json(self):
        return [[e.to_json() for e in row] for row in self.entries]

    @classmethod
    def from_json(cls, tower, data):
        return cls([[OrePoly.from_json(tower, e) for e in row] for row in data])

    def __repr__(self):
        return "[" + "; ".join(", ".join(repr(e) for e in r) for r in self.entries) + "]"


def _as_mat(x, like):
    if isinstance(x, OreMat):
        if x.k != like.k:
            raise DimensionMismatch("OreMat sizes differ")
        return x
    return OreMat.scalar(like.tower, like.k, x)


def oremat_apply(M: OreMat, v):
    """Apply M to a point v of G_a^k (componentwise additive evaluation)."""
    v = list(v)
    if len(v) != M.k:
        raise DimensionMismatch(f"point of length {len(v)} for a {M.k}x{M.k} matrix")
    out = []
    for row in M.entries:
        acc = None
        for P, z in zip(row, v):
            term = ore_eval(P, z)
            acc = term if acc is None else acc + term
        out.append(acc)
    return out
