"""Deterministic towers of finite fields over F_q.

A tower is a chain F_p = L_0 < L_1 < ... where each L_i is L_{i-1}[y]/(f_i)
with f_i the lexicographically least monic irreducible of its degree.  When
q = p^e with e > 1, L_1 is F_q; otherwise F_q is L_0.

Every level also carries an absolute model F_p[z]/(F_i(z)), obtained from a
primitive element, and all arithmetic runs there on int arrays of shape
(..., D).  The nested coordinates (coefficients over the previous level,
flattened down to F_p digits) are what users see: canonical choices, JSON,
and lexicographic orders are all taken in nested digits.  An element
embedded from a lower level keeps its digits and gains trailing zeros.
"""
from __future__ import annotations

import itertools
import threading
from typing import Iterable, Sequence

import numpy as np

from .errors import LevelError, TowerBudgetExceeded
from .linalg import inv_p, nullspace_p, rank_p, reduce_by_rref, rref_p, solve_p

DEFAULT_MAX_DEGREE = 96


# ---------------------------------------------------------------- polynomials
# Dense polynomials over a level: int arrays (n_coeffs, D), low degree first.

def ptrim(a):
    a = np.asarray(a, dtype=np.int64)
    n = a.shape[0]
    while n and not a[n - 1].any():
        n -= 1
    return a[:n]


def pmul(lvl, a, b):
    a, b = ptrim(a), ptrim(b)
    if not len(a) or not len(b):
        return np.zeros((0, lvl.D), dtype=np.int64)
    return ptrim(lvl.polymul(a, b))


def pdivmod(lvl, a, b):
    a, b = ptrim(a).copy(), ptrim(b)
    if not len(b):
        raise ZeroDivisionError("polynomial division by zero")
    db = len(b) - 1
    inv_lead = lvl.inv(b[-1])
    if len(a) - 1 < db:
        return np.zeros((0, lvl.D), dtype=np.int64), a
    quo = np.zeros((len(a) - db, lvl.D), dtype=np.int64)
    for k in range(len(a) - 1, db - 1, -1):
        if not a[k].any():
            continue
        c = lvl.mul(a[k], inv_lead)
        quo[k - db] = c
        a[k - db:k + 1] = (a[k - db:k + 1] - lvl.mul(c[None, :], b)) % lvl.p
    return ptrim(quo), ptrim(a[:db])


def pmod(lvl, a, b):
    return pdivmod(lvl, a, b)[1]


def pgcd(lvl, a, b):
    a, b = ptrim(a), ptrim(b)
    while len(b):
        a, b = b, pmod(lvl, a, b)
    if len(a):
        a = lvl.mul(a, lvl.inv(a[-1])[None, :]) % lvl.p
    return a


def p_frobenius_mod(lvl, a, m):
    """a^p mod m for a polynomial a over lvl (coefficients raised, exponents spread)."""
    a = ptrim(a)
    if not len(a):
        return a
    spread = np.zeros(((len(a) - 1) * lvl.p + 1, lvl.D), dtype=np.int64)
    spread[::lvl.p] = lvl.pth(a)
    return pmod(lvl, spread, m)


def x_poly(lvl):
    x = np.zeros((2, lvl.D), dtype=np.int64)
    x[1, 0] = 1
    return x


# ---------------------------------------------------------------- levels

class Level:
    """One field in the tower.  Arithmetic helpers act on (..., D) int arrays."""

    def __init__(self, tower, index, degree, poly, modulus, to_nested):
        self.tower = tower
        self.index = index
        self.degree = degree            # over the previous level
        self.poly = poly                # (degree+1, D_prev) monic, or None at level 0
        self.p = tower.p
        self.D = len(modulus) - 1
        self.modulus = np.asarray(modulus, dtype=np.int64)
        self.to_nested = np.asarray(to_nested, dtype=np.int64) % self.p
        self.from_nested = inv_p(self.to_nested, self.p)
        self._build_reduction()
        self._pfrob = self._power_matrix_p()
        self._frob_cache = {}

    # -- construction helpers
    def _build_reduction(self):
        D, p = self.D, self.p
        red = np.zeros((D, max(D - 1, 0)), dtype=np.int64)
        v = (-self.modulus[:D]) % p     # z^D
        for k in range(D - 1):
            red[:, k] = v
            top = v[-1]
            v = np.concatenate([[0], v[:-1]])
            if top:
                v = (v + top * (-self.modulus[:D])) % p
        self.red = red

    def _power_matrix_p(self):
        D = self.D
        cols = []
        for j in range(D):
            e = np.zeros(D, dtype=np.int64)
            e[j] = 1
            cols.append(self.pow(e, self.p))
        return np.array(cols, dtype=np.int64).T % self.p

    # -- arithmetic on arrays
    def reduce(self, c):
        D = self.D
        if c.shape[-1] <= D:
            out = np.zeros(c.shape[:-1] + (D,), dtype=np.int64)
            out[..., :c.shape[-1]] = c
            return out % self.p
        return (c[..., :D] + c[..., D:] @ self.red.T) % self.p

    def mul(self, x, y):
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        D = self.D
        if D == 1:
            return (x * y) % self.p
        shape = np.broadcast_shapes(x.shape[:-1], y.shape[:-1])
        out = np.zeros(shape + (2 * D - 1,), dtype=np.int64)
        for i in range(D):
            xi = x[..., i:i + 1]
            if xi.any():
                out[..., i:i + D] += xi * y
        return self.reduce(out)

    def polymul(self, a, b):
        """Product of polynomials with coefficients in this level: (La,D) x (Lb,D)."""
        from scipy.signal import convolve2d
        c = convolve2d(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
        return self.reduce(c.astype(np.int64))

    def pow(self, x, n):
        result = np.zeros(self.D, dtype=np.int64)
        result[0] = 1
        base = np.asarray(x, dtype=np.int64) % self.p
        while n:
            if n & 1:
                result = self.mul(result, base)
            n >>= 1
            if n:
                base = self.mul(base, base)
        return result

    def inv(self, x):
        x = np.asarray(x, dtype=np.int64)
        if not (x % self.p).any():
            raise ZeroDivisionError("inverse of zero")
        if self.D == 1:
            return np.array([pow(int(x[0]), -1, self.p)], dtype=np.int64)
        # solve x*y = 1 through the multiplication-by-x matrix
        from .linalg import solve_p
        m = self.mul(x[None, :], np.eye(self.D, dtype=np.int64))
        e0 = np.zeros(self.D, dtype=np.int64)
        e0[0] = 1
        return solve_p(m.T, e0, self.p)

    def pth(self, x):
        return (np.asarray(x, dtype=np.int64) @ self._pfrob.T) % self.p

    def frob_matrix(self, times=1):
        """Matrix of x -> x^(q^times) on absolute coordinates."""
        key = times
        if key not in self._frob_cache:
            e = self.tower.e * times
            m = np.eye(self.D, dtype=np.int64)
            base = self._pfrob.copy()
            while e:
                if e & 1:
                    m = (base @ m) % self.p
                e >>= 1
                if e:
                    base = (base @ base) % self.p
            self._frob_cache[key] = m
        return self._frob_cache[key]

    def frob(self, x, times=1):
        return (np.asarray(x, dtype=np.int64) @ self.frob_matrix(times).T) % self.p

    def nested(self, x):
        return (np.asarray(x, dtype=np.int64) @ self.to_nested.T) % self.p

    def absolute(self, digits):
        return (np.asarray(digits, dtype=np.int64) @ self.from_nested.T) % self.p

    def embed_matrix(self, src):
        """Matrix taking absolute coordinates on a lower level ``src`` to this level."""
        key = ("emb", src.index)
        if key not in self._frob_cache:
            if src.index > self.index:
                raise LevelError("cannot embed a higher level downwards")
            m = self.from_nested[:, :src.D] @ src.to_nested
            self._frob_cache[key] = m % self.p
        return self._frob_cache[key]

    def lift(self, src, arr):
        """Embed an array (..., src.D) of elements of ``src`` into this level."""
        if src.index == self.index:
            return np.asarray(arr, dtype=np.int64)
        return (np.asarray(arr, dtype=np.int64) @ self.embed_matrix(src).T) % self.p

    # -- convenience
    def zero(self):
        return FieldElem(self, np.zeros(self.D, dtype=np.int64))

    def one(self):
        v = np.zeros(self.D, dtype=np.int64)
        v[0] = 1
        return FieldElem(self, v)

    def __call__(self, x):
        """Coerce an int, FieldElem, or digit sequence into this level."""
        if isinstance(x, FieldElem):
            return x.embed(self)
        if isinstance(x, (int, np.integer)):
            v = np.zeros(self.D, dtype=np.int64)
            v[0] = int(x) % self.p
            return FieldElem(self, v)
        digits = list(x)
        if len(digits) > self.D:
            raise LevelError("too many digits for this level")
        digits = digits + [0] * (self.D - len(digits))
        return FieldElem(self, self.absolute(digits))

    @property
    def size(self):
        return self.p ** self.D

    @property
    def fq_degree(self):
        return self.D // self.tower.e

    def elements(self):
        """All elements in lexicographic order of nested digits (small levels only)."""
        for digits in itertools.product(range(self.p), repeat=self.D):
            yield self(digits)

    def basis(self):
        """Nested F_p-basis (as FieldElems)."""
        return [self(tuple(int(i == j) for i in range(self.D))) for j in range(self.D)]

    def fq_basis(self):
        """F_q-basis: nested monomials not involving the generator of F_q."""
        e = self.tower.e
        return [self(tuple(int(i == j * e) for i in range(self.D))) for j in range(self.fq_degree)]

    def __repr__(self):
        return f"Level({self.index}, D={self.D})"

    def __eq__(self, other):
        return isinstance(other, Level) and other.tower is self.tower and other.index == self.index

    def __hash__(self):
        return hash((id(self.tower), self.index))


class FieldElem:
    """An element of a tower level, stored in absolute coordinates."""

    __slots__ = ("level", "vec")

    def __init__(self, level, vec):
        self.level = level
        self.vec = np.asarray(vec, dtype=np.int64) % level.p

    # -- structure
    @property
    def tower(self):
        return self.level.tower

    def digits(self):
        return tuple(int(d) for d in self.level.nested(self.vec))

    def coeffs(self):
        """Coefficients over the previous level (length = level degree)."""
        lv = self.level
        if lv.index == 0:
            return [self]
        prev = lv.tower.levels[lv.index - 1]
        d = self.digits()
        return [prev(d[k * prev.D:(k + 1) * prev.D]) for k in range(lv.degree)]

    def min_level(self):
        d = self.digits()
        n = len(d)
        while n and d[n - 1] == 0:
            n -= 1
        for lv in self.tower.levels:
            if lv.D >= n:
                return lv
        return self.level

    def embed(self, level):
        if level.tower is not self.tower:
            raise LevelError("elements from different towers")
        if level.index == self.level.index:
            return self
        if level.index < self.level.index:
            lv = self.min_level()
            if lv.index > level.index:
                raise LevelError(f"{self!r} does not lie in level {level.index}")
            return FieldElem(level, level.absolute(self.digits()[:level.D]))
        d = list(self.digits()) + [0] * (level.D - self.level.D)
        return FieldElem(level, level.absolute(d))

    def _coerce(self, other):
        if isinstance(other, FieldElem):
            if other.level.index > self.level.index:
                return self.embed(other.level), other
            return self, other.embed(self.level)
        return self, self.level(other)

    # -- arithmetic
    def __add__(self, other):
        a, b = self._coerce(other)
        return FieldElem(a.level, a.vec + b.vec)

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._coerce(other)
        return FieldElem(a.level, a.vec - b.vec)

    def __rsub__(self, other):
        a, b = self._coerce(other)
        return FieldElem(a.level, b.vec - a.vec)

    def __neg__(self):
        return FieldElem(self.level, -self.vec)

    def __mul__(self, other):
        a, b = self._coerce(other)
        return FieldElem(a.level, a.level.mul(a.vec, b.vec))

    __rmul__ = __mul__

    def inverse(self):
        return FieldElem(self.level, self.level.inv(self.vec))

    def __truediv__(self, other):
        a, b = self._coerce(other)
        return a * b.inverse()

    def __rtruediv__(self, other):
        a, b = self._coerce(other)
        return b * a.inverse()

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        return FieldElem(self.level, self.level.pow(self.vec, n))

    def frobenius(self, times=1):
        return FieldElem(self.level, self.level.frob(self.vec, times))

    def is_zero(self):
        return not self.vec.any()

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, (int, np.integer)):
            other = self.level(other)
        if not isinstance(other, FieldElem) or other.tower is not self.tower:
            return NotImplemented
        return _trim(self.digits()) == _trim(other.digits())

    def __hash__(self):
        return hash(_trim(self.digits()))

    def key(self):
        """Lexicographic sort key (nested digits, level independent)."""
        return _trim(self.digits())

    def to_json(self):
        return {"level": self.level.index, "coeffs": list(self.digits())}

    def __repr__(self):
        return f"F{self.level.index}{list(self.digits())}"


def _trim(d):
    d = list(d)
    while d and d[-1] == 0:
        d.pop()
    return tuple(d)


# ---------------------------------------------------------------- tower

class FieldTower:
    """Append-only chain of finite fields; same (p, e, degrees) => identical tower."""

    def __init__(self, p: int, e: int = 1, degrees: Sequence[int] = (), max_degree: int = DEFAULT_MAX_DEGREE):
        if p < 2 or any(p % k == 0 for k in range(2, int(p ** 0.5) + 1)):
            raise ValueError(f"p={p} is not prime")
        self.p, self.e, self.q = p, e, p ** e
        self.max_degree = max_degree
        self.levels: list[Level] = []
        self._lock = threading.RLock()
        self.levels.append(Level(self, 0, 1, None, [0, 1], [[1]]))
        if e > 1:
            self.extend(e)
        for m in degrees:
            self.extend(m)

    @property
    def fq(self) -> Level:
        return self.levels[1] if self.e > 1 else self.levels[0]

    @property
    def top(self) -> Level:
        return self.levels[-1]

    def level(self, i) -> Level:
        return self.levels[i]

    def degrees(self):
        return [lv.degree for lv in self.levels[1:]]

    def elem(self, x, level=None):
        lv = self.fq if level is None else (level if isinstance(level, Level) else self.levels[level])
        return lv(x)

    def extend(self, m: int) -> Level:
        """Append the extension of the top level by its least monic irreducible of degree m."""
        if m < 2:
            raise ValueError("extension degree must be at least 2")
        with self._lock:
            prev = self.top
            if prev.D * m > self.max_degree:
                raise TowerBudgetExceeded(
                    f"extension to absolute degree {prev.D * m} exceeds budget {self.max_degree}")
            f = least_irreducible(prev, m)
            lv = _build_level(self, prev, f)
            self.levels.append(lv)
            return lv

    def to_json(self):
        return {
            "p": self.p,
            "e": self.e,
            "levels": [
                {"degree": lv.degree, "poly": [list(prev_digits) for prev_digits in _poly_digits(lv)]}
                for lv in self.levels[1:]
            ],
        }

    @classmethod
    def from_json(cls, data, max_degree=DEFAULT_MAX_DEGREE):
        """Rebuild deterministically and check the stored polynomials agree."""
        degrees = [entry["degree"] for entry in data["levels"]]
        e = data["e"]
        if e > 1:
            if not degrees or degrees[0] != e:
                raise LevelError("tower JSON lacks its F_q level")
            degrees = degrees[1:]
        t = cls(data["p"], e, degrees, max_degree=max_degree)
        if t.to_json()["levels"] != data["levels"]:
            raise LevelError("tower JSON does not match deterministic construction")
        return t

    def element_from_json(self, data):
        return self.levels[data["level"]](data["coeffs"])

    def __repr__(self):
        return f"FieldTower(p={self.p}, e={self.e}, degrees={self.degrees()})"


def _poly_digits(lv):
    prev = lv.tower.levels[lv.index - 1]
    return [tuple(int(d) for d in prev.nested(c)) for c in lv.poly]


def is_irreducible(lvl, f):
    """Ben-Or test: gcd(f, y^(Q^k) - y) = 1 for k <= deg/2, Q = |lvl|."""
    f = ptrim(f)
    m = len(f) - 1
    if m <= 0:
        return False
    if m == 1:
        return True
    y = x_poly(lvl)
    h = y.copy()
    for _ in range(m // 2):
        for _ in range(lvl.D):
            h = p_frobenius_mod(lvl, h, f)
        g = pgcd(lvl, _psub(lvl, h, y), f)
        if len(g) > 1:
            return False
    return True


def _psub(lvl, a, b):
    n = max(len(a), len(b))
    out = np.zeros((n, lvl.D), dtype=np.int64)
    out[:len(a)] += a
    out[:len(b)] -= b
    return ptrim(out % lvl.p)


def least_irreducible(lvl, m):
    """Lexicographically least monic irreducible of degree m over lvl.

    Candidates are ordered by the coefficient vector (c_0, ..., c_{m-1}), each
    coefficient compared by its nested digits.
    """
    D = lvl.D
    nonzero = itertools.islice(itertools.product(range(lvl.p), repeat=D), 1, None)
    for c0 in nonzero:
        for rest in itertools.product(range(lvl.p), repeat=D * (m - 1)):
            digits = [c0] + [rest[k * D:(k + 1) * D] for k in range(m - 1)]
            f = np.zeros((m + 1, D), dtype=np.int64)
            for k, d in enumerate(digits):
                f[k] = lvl.absolute(d)
            f[m, 0] = 1
            if is_irreducible(lvl, f):
                return f
    raise RuntimeError("no irreducible polynomial found")


def _build_level(tower, prev, f):
    m = len(f) - 1
    Dp = prev.D
    D = Dp * m
    p = tower.p

    def bimul(a, b):
        return pmod(prev, pmul(prev, a, b), f)

    def nested_of(a):
        a = ptrim(a)
        out = np.zeros(D, dtype=np.int64)
        for k in range(len(a)):
            out[k * Dp:(k + 1) * Dp] = prev.nested(a[k])
        return out

    for g_digits in itertools.product(range(p), repeat=Dp):
        w = np.zeros((m, Dp), dtype=np.int64)
        w[0] = prev.absolute(g_digits)
        w[1, 0] = 1
        powers = [np.zeros((1, Dp), dtype=np.int64)]
        powers[0][0, 0] = 1
        for _ in range(D):
            powers.append(bimul(powers[-1], w))
        cols = np.array([nested_of(x) for x in powers[:D]], dtype=np.int64).T
        if rank_p(cols, p) < D:
            continue
        c = solve_p(cols, nested_of(powers[D]), p)
        modulus = np.concatenate([(-c) % p, [1]])
        return Level(tower, prev.index + 1, m, f, modulus, cols)
    raise RuntimeError("no primitive element found")


# ---------------------------------------------------------------- operations

def frobenius(a: FieldElem) -> FieldElem:
    """a^q."""
    return a.frobenius()


def trace(a: FieldElem, down_to) -> FieldElem:
    """Relative trace from a's level down to the subfield ``down_to``."""
    tower = a.tower
    target = down_to if isinstance(down_to, Level) else tower.levels[down_to]
    if target.tower is not tower or target.index > a.level.index:
        raise LevelError("trace target is not a subfield on the stored chain")
    lv = a.level
    step = target.D
    n = lv.D // step
    acc = np.zeros(lv.D, dtype=np.int64)
    x = a.vec
    for _ in range(n):
        acc = acc + x
        for _ in range(step):
            x = lv.pth(x)
    return FieldElem(lv, acc).embed(target)


def fq_trace(a: FieldElem) -> FieldElem:
    return trace(a, a.tower.fq)


def _fq_matrix_coords(level, elems):
    """F_q coordinates of level elements w.r.t. level.fq_basis(), as FieldElems of F_q."""
    fq = level.tower.fq
    e = level.tower.e
    out = []
    for x in elems:
        d = x.embed(level).digits()
        out.append([fq(d[j * e:(j + 1) * e]) for j in range(level.fq_degree)])
    return out


def dual_basis(level):
    """(basis, dual, self_dual) for ``level`` over F_q w.r.t. the trace form.

    A self-dual basis is searched for greedily (vectors in lexicographic
    order, with backtracking) whenever one exists, i.e. when q is even or the
    degree over F_q is odd.  Otherwise the nested F_q-basis and its trace dual
    are returned with self_dual False.
    """
    tower = level.tower
    m = level.fq_degree
    if m == 1:
        one = level.one()
        inv = fq_trace(one).inverse()
        return [one], [one * inv], fq_trace(one * one * inv) == 1 and inv == 1
    if tower.q % 2 == 0 or m % 2 == 1:
        found = _self_dual_search(level)
        if found is not None:
            return found, list(found), True
    basis = level.fq_basis()
    gram = [[fq_trace(a * b) for b in basis] for a in basis]
    ginv = _fq_mat_inverse(tower, gram)
    dual = []
    for i in range(m):
        acc = level.zero()
        for j in range(m):
            acc = acc + ginv[j][i] * basis[j]
        dual.append(acc)
    return basis, dual, False


def _fq_mat_inverse(tower, mat):
    fq = tower.fq
    n = len(mat)
    a = [[fq(x) for x in row] + [fq(int(i == j)) for j in range(n)] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next(r for r in range(col, n) if not a[r][col].is_zero())
        a[col], a[piv] = a[piv], a[col]
        inv = a[col][col].inverse()
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and not a[r][col].is_zero():
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def _span_elements(level, gens):
    """All F_q-combinations of gens, in lexicographic order of combination digits."""
    fq = list(level.tower.fq.elements())
    for combo in itertools.product(range(len(fq)), repeat=len(gens)):
        acc = level.zero()
        for c, g in zip(combo, gens):
            if c:
                acc = acc + fq[c] * g
        yield acc


def _orth_complement(level, gens, v):
    """F_q-basis of {w in span(gens) : Tr(w v) = 0}."""
    p = level.p
    fq = level.tower.fq
    e = level.tower.e
    # F_p-linear functional on F_p-coordinates of the span
    fp_gens = []
    for g in gens:
        for b in fq.basis():
            fp_gens.append(b * g)
    rows = [[int(d) for d in fq_trace(w * v).embed(fq).digits()] for w in fp_gens]
    mat = np.array(rows, dtype=np.int64).T.reshape(e, len(fp_gens))
    ker = nullspace_p(mat, p)
    elems = []
    for row in ker:
        acc = level.zero()
        for c, w in zip(row, fp_gens):
            if c:
                acc = acc + int(c) * w
        elems.append(acc)
    return fq_independent_subset(level, elems)


def fq_independent_subset(level, elems):
    """Greedy F_q-independent subset, in the given order."""
    fq_b = level.tower.fq.basis()
    chosen, rows = [], []
    for x in elems:
        cand = rows + [list((b * x).embed(level).digits()) for b in fq_b]
        if rank_p(np.array(cand, dtype=np.int64), level.p) == len(cand):
            chosen.append(x)
            rows = cand
    return chosen


def _self_dual_search(level):
    def rec(gens):
        if not gens:
            return []
        for v in _span_elements(level, gens):
            if v.is_zero() or fq_trace(v * v) != 1:
                continue
            rest = _orth_complement(level, gens, v)
            if len(rest) != len(gens) - 1:
                continue
            tail = rec(rest)
            if tail is not None:
                return [v] + tail
        return None

    return rec(level.fq_basis())


# -- F_q-linear solvers

def _linear_map_matrix(level, coeffs):
    """F_p matrix (nested coords) of z -> sum_i b_i z^(q^i) on level."""
    X = level.from_nested.T                      # rows: absolute coords of nested basis
    Y = np.zeros_like(X)
    for i, b in enumerate(coeffs):
        if b.is_zero():
            continue
        Y = Y + level.mul(level.frob(X, i), b.embed(level).vec)
    return level.nested(Y % level.p).T


def additive_kernel(P, level) -> list:
    """F_q-basis of {z in level : P(z) = 0}; canonical (from the RREF kernel)."""
    coeffs = _ore_coeffs(P)
    if not any(not c.is_zero() for c in coeffs):
        raise ValueError("additive_kernel requires P != 0")
    A = _linear_map_matrix(level, coeffs)
    ker = nullspace_p(A, level.p)
    elems = [level(tuple(int(x) for x in row)) for row in ker]
    return fq_independent_subset(level, elems)


def _ore_coeffs(P):
    if hasattr(P, "coeffs") and not isinstance(P, FieldElem):
        return list(P.coeffs)
    return list(P)


def _levels_from(tower, start):
    return [lv for lv in tower.levels if lv.index >= start]


POLICIES = ("least", "greatest")


def solve_additive(P, c: FieldElem, start_level=None, policy: str = "least") -> FieldElem:
    """Canonical root z of P(z) = c in the smallest level containing one.

    Existing levels from ``start_level`` upward are searched first; if none
    contains a root, the tower is extended by the least degree d for which
    gcd(P(z) - c, z^(Q^d) - z) is nontrivial.  The returned root is the
    lexicographically least in its level (or the greatest, for the
    alternative ``policy="greatest"``).
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown root policy {policy!r}")
    coeffs = _ore_coeffs(P)
    tower = c.tower
    lo = max([tower.fq.index, c.min_level().index] + [b.min_level().index for b in coeffs if not b.is_zero()])
    if start_level is not None:
        lo = max(lo, start_level.index if isinstance(start_level, Level) else start_level)
    with tower._lock:
        for lv in _levels_from(tower, lo):
            z = _solve_in_level(lv, coeffs, c, policy)
            if z is not None:
                return z
        top = tower.top
        d = _root_degree(top, coeffs, c)
        tower.extend(d)
        z = _solve_in_level(tower.top, coeffs, c, policy)
        if z is None:
            raise RuntimeError("root expected after extension")
        return z


def _solve_in_level(lv, coeffs, c, policy="least"):
    A = _linear_map_matrix(lv, coeffs)
    rhs = np.array(c.embed(lv).digits(), dtype=np.int64)
    x = canonical_solution(A, rhs, lv.p, policy)
    if x is None:
        return None
    return lv(tuple(int(v) for v in x))


def canonical_solution(A, rhs, p, policy="least"):
    """Lexicographically least (or greatest) solution of A x = rhs over F_p."""
    x = solve_p(A, rhs, p)
    if x is None:
        return None
    ker = nullspace_p(A, p)
    if len(ker):
        r, piv = rref_p(ker, p)
        x = reduce_by_rref(x, r, piv, p)
        if policy == "greatest":
            for i in range(len(piv)):
                x = (x + (p - 1) * r[i]) % p
    return x


def _root_degree(lvl, coeffs, c):
    q = lvl.tower.q
    deg = q ** (len(coeffs) - 1)
    f = np.zeros((deg + 1, lvl.D), dtype=np.int64)
    for i, b in enumerate(coeffs):
        f[q ** i] = (f[q ** i] + b.embed(lvl).vec) % lvl.p
    f[0] = (f[0] - c.embed(lvl).vec) % lvl.p
    f = ptrim(f)
    z = x_poly(lvl)
    h = pmod(lvl, z, f)
    for d in range(1, deg + 1):
        for _ in range(lvl.D):
            h = p_frobenius_mod(lvl, h, f)
        g = pgcd(lvl, _psub(lvl, h, z), f)
        if len(g) > 1:
            return d
    raise RuntimeError("no root degree found")


def additive_splitting_degree(lvl, coeffs):
    """Least d with every root of sum b_i z^(q^i) in the degree-d extension of lvl.

    Assumes b_0 != 0 (separable polynomial).
    """
    q = lvl.tower.q
    deg = q ** (len(coeffs) - 1)
    f = np.zeros((deg + 1, lvl.D), dtype=np.int64)
    for i, b in enumerate(coeffs):
        f[q ** i] = (f[q ** i] + b.embed(lvl).vec) % lvl.p
    f = ptrim(f)
    z = x_poly(lvl)
    h = pmod(lvl, z, f)
    for d in range(1, deg + 1):
        for _ in range(lvl.D):
            h = p_frobenius_mod(lvl, h, f)
        if not len(_psub(lvl, h, pmod(lvl, z, f))):
            return d
    raise RuntimeError("polynomial is not separable")


def scratch_extension(tower, m):
    """The level tower.extend(m) would append, built without appending it."""
    prev = tower.top
    if prev.D * m > tower.max_degree:
        raise TowerBudgetExceeded(
            f"extension to absolute degree {prev.D * m} exceeds budget {tower.max_degree}")
    return _build_level(tower, prev, least_irreducible(prev, m))


def artin_schreier_solve(c: FieldElem) -> FieldElem:
    """Canonical x with x^q - x = c (extending the tower if needed)."""
    tower = c.tower
    fq = tower.fq
    return solve_additive([fq(-1), fq(1)], c)


def fq_coordinates(x: FieldElem, basis: Iterable[FieldElem]):
    """Coordinates of x in an F_q-basis (list of F_q elements), or None."""
    basis = list(basis)
    tower = x.tower
    lv = max([x.level] + [b.level for b in basis], key=lambda l: l.index)
    fq_b = tower.fq.basis()
    cols = []
    for b in basis:
        for f in fq_b:
            cols.append(list((f * b).embed(lv).digits()))
    A = np.array(cols, dtype=np.int64).T
    sol = solve_p(A, np.array(x.embed(lv).digits(), dtype=np.int64), tower.p)
    if sol is None:
        return None
    e = tower.e
    out = []
    for k in range(len(basis)):
        acc = tower.fq.zero()
        for j, f in enumerate(fq_b):
            if sol[k * e + j]:
                acc = acc + int(sol[k * e + j]) * f
        out.append(acc)
    return out
