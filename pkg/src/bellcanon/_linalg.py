"""Small exact linear algebra over the rationals (row reduction on Fractions)."""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Sequence


def _rows(m) -> list[list[Fraction]]:
    return [[Fraction(v) for v in row] for row in m]


def rref(m) -> tuple[list[list[Fraction]], list[int]]:
    a = _rows(m)
    if not a:
        return a, []
    nrows, ncols = len(a), len(a[0])
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, nrows) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        piv = a[r][c]
        a[r] = [v / piv for v in a[r]]
        for i in range(nrows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [vi - f * vr for vi, vr in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return a, pivots


def rank(m) -> int:
    """Rank of a rational matrix; integer inputs are reduced modulo nothing (exact)."""
    rows = [list(r) for r in m]
    if not rows or not rows[0]:
        return 0
    if all(isinstance(v, int) for r in rows for v in r):
        return _int_rank(rows)
    return len(rref(rows)[1])


def _int_rank(rows: list[list[int]]) -> int:
    # fraction-free elimination keeps integers small enough for 0/1 point sets
    a = [r[:] for r in rows]
    nrows, ncols = len(a), len(a[0])
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, nrows) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        pr = a[r]
        for i in range(r + 1, nrows):
            if a[i][c]:
                f, g = pr[c], a[i][c]
                row = [f * x - g * y for x, y in zip(a[i], pr)]
                d = 0
                for v in row:
                    d = gcd(d, v)
                a[i] = [v // d for v in row] if d > 1 else row
        r += 1
        if r == nrows:
            break
    return r


def inverse(m) -> list[list[Fraction]]:
    a = _rows(m)
    n = len(a)
    aug = [row + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in red]


def integer_scale(values: Sequence[Fraction]) -> Fraction:
    """Positive factor making ``values`` coprime integers; raises on all-zero input."""
    nz = [Fraction(v) for v in values if v != 0]
    if not nz:
        raise ValueError("cannot normalize a zero vector")
    den = 1
    for v in nz:
        den = lcm(den, v.denominator)
    g = 0
    for v in nz:
        g = gcd(g, int(v * den))
    return Fraction(den, g)
