"""Truncated Laurent series over a tower level, plus vectors and matrices of them.

A Series stores coefficients for exponents low .. prec-1 as an int array of
shape (prec - low, D) in the level's absolute coordinates.  ``prec=None``
marks an exact (finitely supported) series; such series are used for the
F_q((t)) matrices acting on lattices.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyWindow, NotAUnit, PrecisionExhausted, DimensionMismatch
from .ffield import FieldElem, Level


def _common_level(*levels):
    return max(levels, key=lambda lv: lv.index)


class Series:
    __slots__ = ("level", "low", "arr", "prec")

    def __init__(self, level: Level, low: int, arr, prec):
        arr = np.asarray(arr, dtype=np.int64) % level.p
        if arr.ndim != 2 or arr.shape[1] != level.D:
            raise ValueError("coefficient array must have shape (len, D)")
        if prec is not None and low + len(arr) != prec:
            raise ValueError("window length must equal prec - low")
        self.level, self.low, self.arr, self.prec = level, low, arr, prec

    # -- constructors
    @classmethod
    def zero(cls, level, prec=None, low=0):
        n = 0 if prec is None else max(prec - low, 0)
        return cls(level, low if prec is None or low <= prec else prec, np.zeros((n, level.D), dtype=np.int64), prec)

    @classmethod
    def from_coeffs(cls, level, coeffs, low=0, prec=None):
        """Build from a list of FieldElem/int; exact unless ``prec`` is given."""
        arr = np.zeros((len(coeffs), level.D), dtype=np.int64)
        for i, c in enumerate(coeffs):
            arr[i] = level(c).vec
        if prec is not None:
            if prec < low + len(coeffs):
                arr = arr[:max(prec - low, 0)]
            else:
                arr = np.vstack([arr, np.zeros((prec - low - len(coeffs), level.D), dtype=np.int64)])
        return cls(level, low, arr, prec)

    @classmethod
    def monomial(cls, level, exp, coeff=1, prec=None):
        return cls.from_coeffs(level, [coeff], low=exp, prec=prec)

    # -- inspection
    @property
    def exact(self):
        return self.prec is None

    @property
    def high(self):
        """One past the last stored exponent."""
        return self.low + len(self.arr)

    def coeff(self, i) -> FieldElem:
        if self.prec is not None and i >= self.prec:
            raise PrecisionExhausted(f"coefficient {i} beyond precision {self.prec}")
        if i < self.low or i >= self.high:
            return self.level.zero()
        return FieldElem(self.level, self.arr[i - self.low])

    def coeff_array(self, lo, hi):
        """Coefficients for exponents lo..hi-1 as an (hi-lo, D) array."""
        if self.prec is not None and hi > self.prec:
            raise PrecisionExhausted(f"need exponent {hi - 1}, have precision {self.prec}")
        out = np.zeros((max(hi - lo, 0), self.level.D), dtype=np.int64)
        a, b = max(lo, self.low), min(hi, self.high)
        if a < b:
            out[a - lo:b - lo] = self.arr[a - self.low:b - self.low]
        return out

    def valuation(self):
        nz = np.nonzero(self.arr.any(axis=1))[0]
        if nz.size:
            return self.low + int(nz[0])
        return self.prec if self.prec is not None else None

    def is_zero(self):
        return not self.arr.any()

    def embed(self, level):
        if level.index == self.level.index:
            return self
        return Series(level, self.low, level.lift(self.level, self.arr), self.prec)

    def truncate(self, prec):
        if self.prec is not None and prec > self.prec:
            raise PrecisionExhausted(f"cannot raise precision {self.prec} to {prec}")
        low = min(self.low, prec)
        return Series(self.level, low, self.coeff_array(low, prec), prec)

    def trimmed(self):
        """Exact series with leading/trailing zero coefficients removed."""
        if self.prec is not None:
            return self
        nz = np.nonzero(self.arr.any(axis=1))[0]
        if not nz.size:
            return Series(self.level, 0, np.zeros((0, self.level.D), dtype=np.int64), None)
        return Series(self.level, self.low + int(nz[0]), self.arr[nz[0]:nz[-1] + 1], None)

    # -- arithmetic
    def _align(self, other):
        if not isinstance(other, Series):
            other = Series.from_coeffs(self.level, [other])
        lv = _common_level(self.level, other.level)
        return self.embed(lv), other.embed(lv), lv

    def __add__(self, other):
        a, b, lv = self._align(other)
        precs = [x.prec for x in (a, b) if x.prec is not None]
        prec = min(precs) if precs else None
        low = min(a.low, b.low)
        if prec is not None and low > prec:
            low = prec
        hi = prec if prec is not None else max(a.high, b.high)
        arr = a.coeff_array(low, hi) + b.coeff_array(low, hi)
        return Series(lv, low, arr, prec)

    __radd__ = __add__

    def __neg__(self):
        return Series(self.level, self.low, -self.arr, self.prec)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Series) else -self.level(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (FieldElem, int, np.integer)):
            return self.scale(other)
        a, b, lv = self._align(other)
        va, vb = a.valuation(), b.valuation()
        if va is None or vb is None:            # an exact zero factor
            return Series(lv, 0, np.zeros((0, lv.D), dtype=np.int64), None)
        if a.prec is None and b.prec is None:
            prec = None
        elif a.prec is None:
            prec = b.prec + va
        elif b.prec is None:
            prec = a.prec + vb
        else:
            prec = min(a.prec + vb, b.prec + va)
        low = a.low + b.low
        if not len(a.arr) or not len(b.arr):
            arr = np.zeros((0, lv.D), dtype=np.int64)
        else:
            arr = lv.polymul(a.arr, b.arr)
        if prec is None:
            return Series(lv, low, arr, None)
        if low > prec:
            low = prec
        out = np.zeros((prec - low, lv.D), dtype=np.int64)
        start = a.low + b.low
        for k in range(len(arr)):
            e = start + k
            if low <= e < prec:
                out[e - low] = arr[k]
        return Series(lv, low, out, prec)

    __rmul__ = __mul__

    def scale(self, c):
        c = self.level.tower.fq(c) if isinstance(c, (int, np.integer)) else c
        lv = _common_level(self.level, c.level)
        a = self.embed(lv)
        return Series(lv, a.low, lv.mul(a.arr, c.embed(lv).vec[None, :]), a.prec)

    def shift(self, k):
        """Multiply by t^k."""
        return Series(self.level, self.low + k, self.arr, None if self.prec is None else self.prec + k)

    def inverse(self, prec=None):
        """Inverse of a unit (valuation 0) to the given or inherent precision."""
        v = self.valuation()
        if v != 0 or self.coeff(0).is_zero():
            raise NotAUnit(f"series of valuation {v} is not a unit")
        if self.prec is not None:
            prec = self.prec if prec is None else min(prec, self.prec)
        if prec is None:
            raise PrecisionExhausted("inverse of an exact series needs a target precision")
        if prec <= 0:
            raise EmptyWindow("inverse requested on an empty window")
        lv = self.level
        a = self.coeff_array(0, prec) if self.prec is not None else self._exact_array(0, prec)
        inv0 = lv.inv(a[0])
        out = np.zeros((prec, lv.D), dtype=np.int64)
        out[0] = inv0
        for k in range(1, prec):
            acc = lv.mul(a[1:k + 1][::-1], out[:k]).sum(axis=0)
            out[k] = lv.mul(-acc % lv.p, inv0)
        return Series(lv, 0, out, prec)

    def _exact_array(self, lo, hi):
        out = np.zeros((hi - lo, self.level.D), dtype=np.int64)
        a, b = max(lo, self.low), min(hi, self.high)
        if a < b:
            out[a - lo:b - lo] = self.arr[a - self.low:b - self.low]
        return out

    def laurent_inverse(self, prec):
        """Inverse of a nonzero Laurent series: t^{-v} times a unit inverse."""
        v = self.valuation()
        if v is None or (self.prec is not None and v >= self.prec):
            raise PrecisionExhausted("cannot invert a series that vanishes in-window")
        unit = self.shift(-v)
        return unit.inverse(prec + v if unit.prec is None else None).shift(-v)

    def frobenius_twist(self, times=1):
        return Series(self.level, self.low, self.level.frob(self.arr, times), self.prec)

    # -- comparison
    def equals(self, other, upto=None):
        """Equality on the common known window (optionally below exponent ``upto``)."""
        a, b, _ = self._align(other)
        hi_candidates = [x.prec for x in (a, b) if x.prec is not None]
        if upto is not None:
            hi_candidates.append(upto)
        hi = min(hi_candidates) if hi_candidates else max(a.high, b.high)
        lo = min(a.low, b.low, hi)
        return np.array_equal(a.coeff_array(lo, hi), b.coeff_array(lo, hi))

    def __eq__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        return self.equals(other)

    __hash__ = None

    def coeffs(self):
        return [FieldElem(self.level, r) for r in self.arr]

    def to_json(self):
        return {
            "low": self.low,
            "prec": self.prec,
            "level": self.level.index,
            "coeffs": [[int(d) for d in self.level.nested(r)] for r in self.arr],
        }

    @classmethod
    def from_json(cls, tower, data):
        lv = tower.levels[data["level"]]
        arr = np.array([lv.absolute(c) for c in data["coeffs"]], dtype=np.int64).reshape(-1, lv.D)
        return cls(lv, data["low"], arr, data["prec"])

    def __repr__(self):
        terms = [f"{FieldElem(self.level, r)}*t^{self.low + i}" for i, r in enumerate(self.arr) if r.any()]
        tail = "" if self.prec is None else f" + O(t^{self.prec})"
        return (" + ".join(terms) or "0") + tail


def frobenius_twist(v):
    """Coefficientwise q-power on a Series, SeriesVec or SeriesMat."""
    return v.frobenius_twist()


class SeriesVec:
    """n Series components sharing a precision."""

    def __init__(self, comps):
        self.comps = list(comps)
        if not self.comps:
            raise DimensionMismatch("empty vector")

    @property
    def n(self):
        return len(self.comps)

    @property
    def level(self):
        return _common_level(*[c.level for c in self.comps])

    @property
    def prec(self):
        ps = [c.prec for c in self.comps if c.prec is not None]
        return min(ps) if ps else None

    def __getitem__(self, i):
        return self.comps[i]

    def __iter__(self):
        return iter(self.comps)

    def __len__(self):
        return len(self.comps)

    def __add__(self, other):
        _check_len(self, other)
        return SeriesVec([a + b for a, b in zip(self.comps, other.comps)])

    def __sub__(self, other):
        _check_len(self, other)
        return SeriesVec([a - b for a, b in zip(self.comps, other.comps)])

    def __neg__(self):
        return SeriesVec([-a for a in self.comps])

    def scale(self, c):
        if isinstance(c, Series):
            return SeriesVec([a * c for a in self.comps])
        return SeriesVec([a.scale(c) for a in self.comps])

    def shift(self, k):
        return SeriesVec([a.shift(k) for a in self.comps])

    def truncate(self, prec):
        return SeriesVec([a.truncate(prec) for a in self.comps])

    def embed(self, level):
        return SeriesVec([a.embed(level) for a in self.comps])

    def frobenius_twist(self, times=1):
        return SeriesVec([a.frobenius_twist(times) for a in self.comps])

    def valuation(self):
        vs = [c.valuation() for c in self.comps]
        vs = [v for v in vs if v is not None]
        return min(vs) if vs else None

    def constant_vector(self):
        return [c.coeff(0) for c in self.comps]

    def window_array(self, lo, hi, level=None):
        """Array (hi-lo, n, D): coefficient of t^j in component xi at [j-lo, xi]."""
        lv = level or self.level
        return np.stack([c.embed(lv).coeff_array(lo, hi) for c in self.comps], axis=1)

    @classmethod
    def from_window_array(cls, level, arr, lo, prec):
        return cls([Series(level, lo, arr[:, i, :], prec) for i in range(arr.shape[1])])

    def equals(self, other, upto=None):
        _check_len(self, other)
        return all(a.equals(b, upto) for a, b in zip(self.comps, other.comps))

    def __eq__(self, other):
        if not isinstance(other, SeriesVec):
            return NotImplemented
        return self.equals(other)

    __hash__ = None

    def to_json(self):
        return [c.to_json() for c in self.comps]

    @classmethod
    def from_json(cls, tower, data):
        return cls([Series.from_json(tower, c) for c in data])

    def __repr__(self):
        return "(" + ", ".join(repr(c) for c in self.comps) + ")"


def _check_len(a, b):
    if len(a) != len(b):
        raise DimensionMismatch(f"length {len(a)} vs {len(b)}")


class SeriesMat:
    """Square or rectangular matrix of Series (row major)."""

    def __init__(self, rows):
        self.rows = [list(r) for r in rows]
        if not self.rows or any(len(r) != len(self.rows[0]) for r in self.rows):
            raise DimensionMismatch("ragged matrix")

    @property
    def shape(self):
        return len(self.rows), len(self.rows[0])

    @property
    def n(self):
        return len(self.rows)

    @property
    def level(self):
        return _common_level(*[e.level for r in self.rows for e in r])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    @classmethod
    def identity(cls, level, n, prec=None):
        return cls([[Series.from_coeffs(level, [int(i == j)], prec=prec) for j in range(n)] for i in range(n)])

    @classmethod
    def from_polys(cls, level, entries, prec=None):
        """Matrix from nested lists of coefficient lists (or (low, coeffs) pairs)."""
        def mk(e):
            if isinstance(e, Series):
                return e
            if isinstance(e, tuple):
                low, cs = e
                return Series.from_coeffs(level, cs, low=low, prec=prec)
            return Series.from_coeffs(level, e, prec=prec)
        return cls([[mk(e) for e in row] for row in entries])

    @classmethod
    def diagonal(cls, level, entries):
        n = len(entries)
        zero = Series.zero(level)
        return cls([[entries[i] if i == j else zero for j in range(n)] for i in range(n)])

    def __mul__(self, other):
        if isinstance(other, SeriesMat):
            r, m = self.shape
            m2, c = other.shape
            if m != m2:
                raise DimensionMismatch("matrix shapes")
            return SeriesMat([[_dot([self.rows[i][k] for k in range(m)], [other.rows[k][j] for k in range(m)])
                               for j in range(c)] for i in range(r)])
        if isinstance(other, SeriesVec):
            r, m = self.shape
            if m != len(other):
                raise DimensionMismatch("matrix/vector shapes")
            return SeriesVec([_dot(self.rows[i], other.comps) for i in range(r)])
        return NotImplemented

    def __add__(self, other):
        return SeriesMat([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def __sub__(self, other):
        return SeriesMat([[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def frobenius_twist(self, times=1):
        return SeriesMat([[e.frobenius_twist(times) for e in r] for r in self.rows])

    def transpose(self):
        return SeriesMat([list(c) for c in zip(*self.rows)])

    def det(self):
        n, m = self.shape
        if n != m:
            raise DimensionMismatch("det of non-square matrix")
        return _det([row[:] for row in self.rows])

    def adjugate(self):
        n = self.n
        if n == 1:
            return SeriesMat([[Series.from_coeffs(self.level, [1])]])
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                minor = [[self.rows[a][b] for b in range(n) if b != i] for a in range(n) if a != j]
                d = _det(minor)
                row.append(d if (i + j) % 2 == 0 else -d)
            out.append(row)
        return SeriesMat(out)

    def inverse(self, prec):
        """Inverse over F((t)) with entries known at least below exponent ``prec``."""
        d = self.det()
        dinv = d.laurent_inverse(prec + max(0, -min(_minval(self), 0)) * self.n)
        adj = self.adjugate()
        return SeriesMat([[e * dinv for e in r] for r in adj.rows])

    def valuation(self):
        return _minval(self)

    def equals(self, other, upto=None):
        return all(a.equals(b, upto) for r1, r2 in zip(self.rows, other.rows) for a, b in zip(r1, r2))

    def to_json(self):
        return [[e.to_json() for e in r] for r in self.rows]

    @classmethod
    def from_json(cls, tower, data):
        return cls([[Series.from_json(tower, e) for e in r] for r in data])

    def __repr__(self):
        return "[" + "; ".join(", ".join(repr(e) for e in r) for r in self.rows) + "]"


def _minval(m):
    vs = [e.valuation() for r in m.rows for e in r]
    vs = [v for v in vs if v is not None]
    return min(vs) if vs else 0


def _dot(xs, ys):
    acc = None
    for a, b in zip(xs, ys):
        term = a * b
        acc = term if acc is None else acc + term
    return acc


def _det(rows):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    acc = None
    for j in range(n):
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = rows[0][j] * _det(minor)
        if j % 2:
            term = -term
        acc = term if acc is None else acc + term
    return acc


# ---------------------------------------------------------------- Smith form

@dataclass
class SmithForm:
    U1: SeriesMat
    D: SeriesMat
    U2: SeriesMat
    exponents: list

    def reconstruct(self):
        return self.U1 * self.D * self.U2


def smith_decompose(g: SeriesMat, prec: int = 32) -> SmithForm:
    """g = U1 * diag(t^a_1 .. t^a_n) * U2 with U1, U2 in GL_n(F[[t]]), a_i ascending.

    Works for exact or truncated entries; entries may be Laurent (then some
    a_i are negative).  Precision loss from pivot division is tracked by the
    series arithmetic.  ``prec`` bounds the inverse expansions needed when
    the input entries are exact.
    """
    n, m = g.shape
    if n != m:
        raise DimensionMismatch("smith_decompose needs a square matrix")
    lv = g.level
    cur = [[e.embed(lv) for e in r] for r in g.rows]
    one = Series.from_coeffs(lv, [1])
    zero = Series.zero(lv)
    U1 = [[one if i == j else zero for j in range(n)] for i in range(n)]
    U2 = [[one if i == j else zero for j in range(n)] for i in range(n)]
    exps = []
    for k in range(n):
        best = None
        for i in range(k, n):
            for j in range(k, n):
                e = cur[i][j]
                v = e.valuation()
                if e.is_zero() or v is None or (e.prec is not None and v >= e.prec):
                    continue
                if best is None or v < best[0]:
                    best = (v, i, j)
        if best is None:
            raise PrecisionExhausted("determinant valuation not determined within precision")
        v, i, j = best
        # swaps: cur <- P cur Q; U1 <- U1 P^-1; U2 <- Q^-1 U2
        cur[k], cur[i] = cur[i], cur[k]
        for r in U1:
            r[k], r[i] = r[i], r[k]
        for r in cur:
            r[k], r[j] = r[j], r[k]
        U2[k], U2[j] = U2[j], U2[k]
        piv = cur[k][k]
        unit = piv.shift(-v)
        uprec = unit.prec if unit.prec is not None else prec
        if uprec is None or uprec <= 0:
            raise PrecisionExhausted("pivot unit has no known coefficients")
        uinv = unit.inverse(uprec)
        # clear column k below: row_i -= f_i row_k, f_i = cur[i][k]/piv
        for i2 in range(k + 1, n):
            if cur[i2][k].is_zero():
                continue
            f = cur[i2][k].shift(-v) * uinv
            cur[i2] = [a - f * b for a, b in zip(cur[i2], cur[k])]
            for r in U1:                      # U1 <- U1 * E^-1, E^-1 adds +f * col i2 to col k
                r[k] = r[k] + r[i2] * f
        # clear row k right: col_j -= h_j col_k, h_j = cur[k][j]/piv
        for j2 in range(k + 1, n):
            if cur[k][j2].is_zero():
                continue
            h = cur[k][j2].shift(-v) * uinv
            for r in cur:
                r[j2] = r[j2] - r[k] * h
            U2[k] = [a + h * b for a, b in zip(U2[k], U2[j2])]
        # absorb the unit of the pivot into U2: cur[k][k] = t^v * unit
        U2[k] = [unit * b for b in U2[k]]
        cur[k][k] = Series.monomial(lv, v)
        for i2 in range(k + 1, n):
            cur[i2][k] = zero
        for j2 in range(k + 1, n):
            cur[k][j2] = zero
        exps.append(v)
    # reorder so exponents ascend (greedy choice already ascending for valuations)
    D = SeriesMat([[Series.monomial(lv, exps[i]) if i == j else zero for j in range(n)] for i in range(n)])
    return SmithForm(SeriesMat(U1), D, SeriesMat(U2), exps)


def poly_series(level, coeffs, prec=None):
    return Series.from_coeffs(level, coeffs, prec=prec)
