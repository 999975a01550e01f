"""Exact linear algebra over F_p (int arrays) and over a tower level K.

Matrices over K are int arrays of shape (rows, cols, D) holding absolute
coordinates of each entry; see ``ffield.Level``.
"""
from __future__ import annotations

import numpy as np


def rref_p(a, p):
    """Reduced row echelon form over F_p.  Returns (R, pivot_columns)."""
    r = np.array(a, dtype=np.int64) % p
    if r.ndim != 2:
        raise ValueError("rref_p expects a matrix")
    rows, cols = r.shape
    pivots = []
    i = 0
    for j in range(cols):
        if i == rows:
            break
        nz = np.nonzero(r[i:, j])[0]
        if nz.size == 0:
            continue
        k = i + nz[0]
        if k != i:
            r[[i, k]] = r[[k, i]]
        r[i] = (r[i] * pow(int(r[i, j]), -1, p)) % p
        f = r[:, j].copy()
        f[i] = 0
        if f.any():
            r = (r - np.outer(f, r[i])) % p
        pivots.append(j)
        i += 1
    return r[:i], pivots


def rank_p(a, p):
    a = np.asarray(a)
    if a.size == 0:
        return 0
    return len(rref_p(a, p)[1])


def nullspace_p(a, p):
    """Basis (rows, in RREF) of {x : a @ x = 0} over F_p."""
    a = np.asarray(a, dtype=np.int64)
    cols = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(cols, dtype=np.int64)
    r, piv = rref_p(a, p)
    free = [j for j in range(cols) if j not in piv]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for k, fj in enumerate(free):
        basis[k, fj] = 1
        for i, pj in enumerate(piv):
            basis[k, pj] = (-r[i, fj]) % p
    if len(free) == 0:
        return basis
    return rref_p(basis, p)[0]


def solve_p(a, b, p):
    """One solution x of a @ x = b over F_p, or None."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64).reshape(-1, 1)
    aug = np.hstack([a, b])
    r, piv = rref_p(aug, p)
    cols = a.shape[1]
    if cols in piv:
        return None
    x = np.zeros(cols, dtype=np.int64)
    for i, pj in enumerate(piv):
        x[pj] = r[i, cols]
    return x


def inv_p(a, p):
    a = np.asarray(a, dtype=np.int64)
    n = a.shape[0]
    r, piv = rref_p(np.hstack([a, np.eye(n, dtype=np.int64)]), p)
    if len(piv) < n or (n and piv[n - 1] != n - 1):
        raise ValueError("singular matrix")
    return r[:, n:]


def reduce_by_rref(x, r, pivots, p):
    """Reduce x modulo the row space of an RREF matrix (zeroes pivot slots)."""
    x = np.array(x, dtype=np.int64) % p
    for i, j in enumerate(pivots):
        if x[j]:
            x = (x - x[j] * r[i]) % p
    return x


# ---------------------------------------------------------------- over K

def k_rref(lvl, a):
    """RREF of a (rows, cols, D) matrix over the level ``lvl``.

    Returns (R, pivot_columns) with R of shape (rank, cols, D).
    """
    r = np.array(a, dtype=np.int64) % lvl.p
    rows, cols = r.shape[0], r.shape[1]
    pivots = []
    i = 0
    for j in range(cols):
        if i == rows:
            break
        nz = np.nonzero(r[i:, j].any(axis=-1))[0]
        if nz.size == 0:
            continue
        k = i + nz[0]
        if k != i:
            r[[i, k]] = r[[k, i]]
        inv = lvl.inv(r[i, j])
        r[i] = lvl.mul(r[i], inv)
        f = r[:, j].copy()
        f[i] = 0
        live = np.nonzero(f.any(axis=-1))[0]
        if live.size:
            r[live] = (r[live] - lvl.mul(f[live][:, None, :], r[i][None, :, :])) % lvl.p
        pivots.append(j)
        i += 1
    return r[:i], pivots


def k_rank(lvl, a):
    a = np.asarray(a)
    if a.shape[0] == 0:
        return 0
    return len(k_rref(lvl, a)[1])


def k_left_kernel(lvl, a):
    """Rows c (over K) with sum_i c_i * a[i] = 0.  Shape (nullity, rows, D)."""
    a = np.asarray(a, dtype=np.int64)
    rows, cols = a.shape[0], a.shape[1]
    eye = np.zeros((rows, rows, lvl.D), dtype=np.int64)
    for i in range(rows):
        eye[i, i, 0] = 1
    r, piv = k_rref(lvl, np.concatenate([a, eye], axis=1))
    keep = [i for i, j in enumerate(piv) if j >= cols]
    return r[keep, cols:]


def k_in_span(lvl, r, pivots, x):
    """Is the vector x (cols, D) in the row space of the RREF matrix r?"""
    x = np.array(x, dtype=np.int64) % lvl.p
    for i, j in enumerate(pivots):
        if x[j].any():
            x = (x - lvl.mul(x[j][None, :], r[i])) % lvl.p
    return not x.any()


def k_reduce(lvl, r, pivots, x):
    """Residual of x (cols, D) modulo the row space of an RREF matrix over K."""
    x = np.array(x, dtype=np.int64) % lvl.p
    for i, j in enumerate(pivots):
        if x[j].any():
            x = (x - lvl.mul(x[j][None, :], r[i])) % lvl.p
    return x
