"""Independent reference computations used by the tests."""
from __future__ import annotations

from fractions import Fraction

import numpy as np

RES = 2**20


def locate_interior(rng: np.random.Generator, n: int, k: int, count: int) -> tuple[list, dict]:
    """Sample dyadic points of the open cube and group them by containing Kuhn simplex.

    Points are integers over k * 2^20, so cell and ordering are exact integer
    operations. Points on a simplex face (ties or zero local coordinates) are
    dropped. Returns the distinct simplices hit as lattice vertex lists.
    """
    c = rng.integers(0, k * RES, size=(count, n))
    cell, local = c // RES, c % RES
    keep = (local > 0).all(axis=1)
    srt = np.sort(local, axis=1)
    keep &= (np.diff(srt, axis=1) != 0).all(axis=1) if n > 1 else True
    cell, local = cell[keep], local[keep]
    order = np.argsort(-local, axis=1)
    keys = np.unique(np.hstack([cell, order]), axis=0)
    verts = {}
    for row in keys:
        v = [int(x) for x in row[:n]]
        chain = [tuple(v)]
        for axis in row[n:]:
            v[int(axis)] += 1
            chain.append(tuple(v))
        verts[tuple(int(x) for x in row)] = chain
    return list(verts), verts


def fraction_solve(E: list[list[Fraction]], B: list[list[Fraction]]) -> list[list[Fraction]]:
    """Solve E X = B by Gauss-Jordan elimination over the rationals."""
    n = len(E)
    M = [list(E[i]) + list(B[i]) for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if M[r][col] != 0)
        M[col], M[piv] = M[piv], M[col]
        p = M[col][col]
        M[col] = [x / p for x in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[col])]
    return [row[n:] for row in M]


def fraction_gradient(verts: list[tuple], values: list, k: int) -> list[list[Fraction]]:
    """n x m gradient of the affine map through (vertex, value) pairs."""
    v0, f0 = verts[0], [Fraction(int(x.numerator), int(x.denominator)) for x in values[0]]
    E, B = [], []
    for v, val in zip(verts[1:], values[1:]):
        E.append([Fraction(a - b, k) for a, b in zip(v, v0)])
        B.append([Fraction(int(x.numerator), int(x.denominator)) - y for x, y in zip(val, f0)])
    return fraction_solve(E, B)


def rank_mod_p(M: np.ndarray, p: int) -> int:
    """Rank of an integer matrix over GF(p); a lower bound for its rational rank."""
    A = np.array(M, dtype=np.int64) % p
    rows, cols = A.shape
    rank = 0
    for col in range(cols):
        nz = np.flatnonzero(A[rank:, col])
        if not len(nz):
            continue
        piv = rank + nz[0]
        A[[rank, piv]] = A[[piv, rank]]
        A[rank] = A[rank] * pow(int(A[rank, col]), -1, p) % p
        others = np.flatnonzero(A[:, col])
        others = others[others != rank]
        A[others] = (A[others] - A[others, col][:, None] * A[rank][None, :]) % p
        rank += 1
        if rank == rows:
            break
    return rank
