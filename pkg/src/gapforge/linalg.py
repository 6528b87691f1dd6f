"""Exact linear algebra over the rationals (small dense matrices)."""

from fractions import Fraction


def rref(rows, ncols=None):
    """Reduced row echelon form; returns ``(matrix, pivot_columns)``."""
    m = [[Fraction(v) for v in r] for r in rows]
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(ncols):
        if r == len(m):
            break
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(rows, ncols=None) -> int:
    return len(rref(rows, ncols)[1])


def kernel_vector(rows, ncols):
    """A nonzero z with rows·z = 0, or None when the columns are independent.

    The free variable chosen is the first non-pivot column, set to 1.
    """
    if ncols == 0:
        return None
    if not rows:
        z = [Fraction(0)] * ncols
        z[0] = Fraction(1)
        return z
    m, pivots = rref(rows, ncols)
    free = next((c for c in range(ncols) if c not in set(pivots)), None)
    if free is None:
        return None
    z = [Fraction(0)] * ncols
    z[free] = Fraction(1)
    for r, c in enumerate(pivots):
        z[c] = -m[r][free]
    return z


def matvec(rows, v):
    return [sum((a * b for a, b in zip(r, v)), Fraction(0)) for r in rows]
