"""Two-phase revised simplex over the rationals with Bland's pivoting rule.

Solves ``min c·x  s.t.  A x = b, x >= 0`` where ``A`` is given column-wise
as sparse ``[(row, value), ...]`` lists and ``b >= 0``. Bland's rule
(smallest eligible index enters, smallest basic index leaves on ties)
guarantees termination under exact arithmetic.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .errors import InfeasibleError


@dataclass
class SimplexResult:
    x: list
    objective: Fraction
    basis: list
    duals: list
    pivots: int


class _Revised:
    def __init__(self, cols, b, m):
        self.m = m
        self.cols = cols
        self.b = [Fraction(v) for v in b]
        self.pivots = 0

    def start(self, basis):
        self.basis = list(basis)
        self.binv = [[Fraction(int(i == j)) for j in range(self.m)] for i in range(self.m)]
        self.xb = list(self.b)

    def column_times_binv(self, j):
        w = [Fraction(0)] * self.m
        for r, v in self.cols[j]:
            for i in range(self.m):
                a = self.binv[i][r]
                if a:
                    w[i] += a * v
        return w

    def duals(self, cost):
        u = [Fraction(0)] * self.m
        for i, bj in enumerate(self.basis):
            c = cost[bj]
            if c:
                row = self.binv[i]
                for r in range(self.m):
                    if row[r]:
                        u[r] += c * row[r]
        return u

    def pivot(self, r, j, w):
        piv = w[r]
        row_r = [v / piv for v in self.binv[r]]
        xr = self.xb[r] / piv
        for i in range(self.m):
            if i == r or not w[i]:
                continue
            f = w[i]
            row_i = self.binv[i]
            for t in range(self.m):
                if row_r[t]:
                    row_i[t] -= f * row_r[t]
            self.xb[i] -= f * xr
        self.binv[r] = row_r
        self.xb[r] = xr
        self.basis[r] = j
        self.pivots += 1

    def entering(self, cost, allowed):
        u = self.duals(cost)
        # Integer pricing: scale duals and costs to a common denominator.
        den = lcm(*(v.denominator for v in u), *(cost[j].denominator for j in allowed)) if allowed else 1
        iu = [int(v * den) for v in u]
        in_basis = set(self.basis)
        for j in allowed:
            if j in in_basis:
                continue
            d = int(cost[j] * den) - sum(iu[r] * v for r, v in self.cols[j])
            if d < 0:
                return j
        return None

    def leaving(self, w):
        best = None
        for i in range(self.m):
            if w[i] > 0:
                ratio = self.xb[i] / w[i]
                key = (ratio, self.basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        return None if best is None else best[1]

    def run(self, cost, allowed):
        while True:
            j = self.entering(cost, allowed)
            if j is None:
                return
            w = self.column_times_binv(j)
            r = self.leaving(w)
            if r is None:
                raise ArithmeticError("linear program is unbounded")
            self.pivot(r, j, w)


def solve(cols, b, cost):
    """Minimize ``cost·x`` subject to ``A x = b, x >= 0``.

    Args:
        cols: sparse columns of ``A`` as lists of ``(row, value)``.
        b: right-hand side, componentwise nonnegative.
        cost: objective coefficients, one per column.

    Returns:
        SimplexResult with a basic optimal ``x`` and the duals of the final basis.

    Raises:
        InfeasibleError: when phase I ends with positive artificial weight.
    """
    m = len(b)
    n = len(cols)
    if any(Fraction(v) < 0 for v in b):
        raise ValueError("right-hand side must be nonnegative")
    art = [[(i, Fraction(1))] for i in range(m)]
    all_cols = [[(r, Fraction(v)) for r, v in c] for c in cols] + art
    cost = [Fraction(c) for c in cost]
    phase1 = [Fraction(0)] * n + [Fraction(1)] * m
    solver = _Revised(all_cols, b, m)
    solver.start(range(n, n + m))
    solver.run(phase1, list(range(n + m)))
    if any(solver.xb[i] > 0 for i in range(m) if solver.basis[i] >= n):
        raise InfeasibleError("no feasible solution")
    # Drive zero-level artificials out of the basis where possible.
    for r in range(m):
        if solver.basis[r] < n:
            continue
        in_basis = set(solver.basis)
        for j in range(n):
            if j in in_basis:
                continue
            w = solver.column_times_binv(j)
            if w[r] != 0:
                solver.pivot(r, j, w)
                break
    full_cost = cost + [Fraction(0)] * m
    solver.run(full_cost, list(range(n)))
    x = [Fraction(0)] * n
    for i, j in enumerate(solver.basis):
        if j < n:
            x[j] = solver.xb[i]
    objective = sum((cost[j] * x[j] for j in range(n)), Fraction(0))
    return SimplexResult(x, objective, [j for j in solver.basis], solver.duals(full_cost), solver.pivots)
