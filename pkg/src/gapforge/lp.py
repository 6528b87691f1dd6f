"""Gilmore-Gomory configuration LP: pattern enumeration, exact solve, normalization.

The LP is ``min 1'y  s.t.  B y >= b, y >= 0`` with one column per feasible
pattern and ``b`` the item multiplicities (all ones for plain instances).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import floor
from typing import Optional

from . import simplex
from .errors import InfeasibleError, ResourceLimitError, default_cap
from .linalg import kernel_vector
from .model import FRACTIONAL, INTEGRAL, PackingInstance, Pattern, PatternMatrix, SolutionVector

DEFAULT_PATTERN_CAP = 10 ** 7


@dataclass(frozen=True)
class LpResult:
    matrix: PatternMatrix
    y: SolutionVector
    objective: Fraction
    is_basic: bool
    duals: Optional[tuple] = field(default=None, compare=False)

    @property
    def rhs(self) -> tuple:
        return self.matrix.instance.multiplicities

    def support_matrix(self):
        """Columns in the support of y together with their values."""
        supp = self.y.support()
        return self.matrix.restrict(supp), SolutionVector([self.y.values[j] for j in supp], self.y.kind)


def enumerate_patterns(instance: PackingInstance, max_items: Optional[int] = None,
                       cap: Optional[int] = None) -> PatternMatrix:
    """All maximal feasible patterns with at most ``max_items`` items.

    A pattern is maximal when no further item fits, either by size or by the
    item budget. Columns come out in lexicographic order of their item
    tuples. When every size exceeds ``1/(k+1)``, ``max_items=k`` loses
    nothing because no bin can hold more than ``k`` items anyway.
    """
    cap = default_cap(DEFAULT_PATTERN_CAP) if cap is None else cap
    sizes = instance.sizes
    mult = instance.multiplicities
    n = len(sizes)
    limit = max_items if max_items is not None else instance.total_items
    counts = [0] * n
    columns = []

    def smallest_available():
        for i in range(n - 1, -1, -1):
            if counts[i] < mult[i]:
                return sizes[i]
        return None

    def rec(start, load, used):
        if used:
            small = smallest_available()
            if used == limit or small is None or load + small > 1:
                columns.append(Pattern(tuple((i, c) for i, c in enumerate(counts) if c)))
                if len(columns) > cap:
                    raise ResourceLimitError(f"pattern count exceeds cap {cap}")
                return
        if used == limit:
            return
        for i in range(start, n):
            if counts[i] < mult[i] and load + sizes[i] <= 1:
                counts[i] += 1
                rec(i, load + sizes[i], used + 1)
                counts[i] -= 1

    rec(0, Fraction(0), 0)
    return PatternMatrix(instance, tuple(columns))


def solve_lp(matrix: PatternMatrix, rhs=None) -> LpResult:
    """Exact optimum of the configuration LP over the given columns.

    The returned ``y`` is a basic solution, so its support has at most as
    many columns as there are item types.

    Raises:
        InfeasibleError: if some item type appears in no column.
    """
    n = matrix.n_rows
    rhs = tuple(matrix.instance.multiplicities if rhs is None else rhs)
    covered = set()
    for p in matrix.columns:
        covered.update(i for i, _ in p.counts)
    missing = [i for i in range(n) if rhs[i] > 0 and i not in covered]
    if missing:
        raise InfeasibleError(f"item {missing[0] + 1} appears in no column")
    cols = [list(p.counts) for p in matrix.columns]
    cols += [[(i, -1)] for i in range(n)]
    cost = [1] * matrix.n_cols + [0] * n
    res = simplex.solve(cols, rhs, cost)
    y = SolutionVector(res.x[:matrix.n_cols], FRACTIONAL)
    return LpResult(matrix, y, y.total(), True, tuple(res.duals))


def _knapsack(values, instance):
    """Max ``values·c`` over integer ``0 <= c <= mult`` with ``sizes·c <= 1``."""
    sizes = instance.sizes
    mult = instance.multiplicities
    order = sorted((i for i in range(len(sizes)) if values[i] > 0),
                   key=lambda i: (-values[i] / sizes[i], i))
    best = [Fraction(0), ()]
    chosen = []

    def bound(t, room):
        total = Fraction(0)
        for i in order[t:]:
            take = min(Fraction(mult[i]), room / sizes[i])
            total += take * values[i]
            room -= take * sizes[i]
            if room <= 0:
                break
        return total

    def rec(t, room, value):
        if value > best[0]:
            best[0], best[1] = value, tuple(chosen)
        if t == len(order) or value + bound(t, room) <= best[0]:
            return
        i = order[t]
        most = min(mult[i], floor(room / sizes[i]))
        for c in range(most, -1, -1):
            chosen.extend([i] * c)
            rec(t + 1, room - c * sizes[i], value + c * values[i])
            del chosen[len(chosen) - c:]

    rec(0, Fraction(1), Fraction(0))
    return best[0], Pattern.of(best[1])


def solve_lp_colgen(instance: PackingInstance, max_rounds: int = 10000) -> LpResult:
    """Configuration LP by column generation with branch-and-bound knapsack pricing.

    Starts from single-type columns and adds the most valuable pattern under
    the current duals until no pattern prices out.
    """
    columns = [Pattern(((i, min(m, floor(1 / s))),)) for i, (s, m)
               in enumerate(zip(instance.sizes, instance.multiplicities))]
    for _ in range(max_rounds):
        result = solve_lp(PatternMatrix(instance, tuple(columns)))
        value, pattern = _knapsack(result.duals, instance)
        if value <= 1 or pattern in columns:
            return result
        columns.append(pattern)
    raise ResourceLimitError(f"column generation did not converge in {max_rounds} rounds")


def purify_columns(matrix: PatternMatrix, y: SolutionVector) -> SolutionVector:
    """Walk along kernel directions of the support until its columns are independent.

    Coverage ``B y`` is preserved exactly and ``1'y`` never increases.
    """
    values = list(y.values)
    n = matrix.n_rows
    while True:
        supp = [j for j, v in enumerate(values) if v > 0]
        rows = [[matrix.columns[j].count(i) for j in supp] for i in range(n)]
        z = kernel_vector(rows, len(supp))
        if z is None:
            return SolutionVector(values, y.kind)
        if sum(z) > 0:
            z = [-v for v in z]
        t = min(values[j] / -zj for j, zj in zip(supp, z) if zj < 0)
        for j, zj in zip(supp, z):
            values[j] += t * zj
            if values[j] < 0:
                raise AssertionError("kernel walk left the nonnegative orthant")


def normalize_to_equality(result: LpResult) -> LpResult:
    """Turn ``B y >= b`` into ``B' y' = b`` using sub-patterns of support columns.

    Over-covered items are removed from support patterns, shifting weight to
    the sub-pattern (added as a new column when absent); afterwards the
    support is purified back to a vertex.
    """
    matrix = result.matrix
    rhs = result.rhs
    columns = list(matrix.columns)
    index = {p: j for j, p in enumerate(columns)}
    values = list(result.y.values)
    changed = False
    while True:
        cov = PatternMatrix(matrix.instance, tuple(columns)).coverage(values)
        over = next((i for i in range(len(cov)) if cov[i] > rhs[i]), None)
        if over is None:
            break
        changed = True
        excess = cov[over] - rhs[over]
        j = next(j for j, p in enumerate(columns) if values[j] > 0 and p.count(over))
        w = min(values[j], excess)
        values[j] -= w
        sub = columns[j].without(over)
        if sub.counts:
            if sub not in index:
                index[sub] = len(columns)
                columns.append(sub)
                values.append(Fraction(0))
            values[index[sub]] += w
    if not changed:
        return result
    new_matrix = PatternMatrix(matrix.instance, tuple(columns))
    y = purify_columns(new_matrix, SolutionVector(values, FRACTIONAL))
    return LpResult(new_matrix, y, y.total(), True, result.duals)


def split_integral_part(y: SolutionVector, matrix: Optional[PatternMatrix] = None, rhs=None):
    """Split ``y`` into its componentwise floor and fractional remainder.

    With a pattern matrix, also returns the residual coverage
    ``b - B·floor(y)`` per item type (``None`` otherwise).
    """
    whole = [Fraction(floor(v)) for v in y.values]
    frac = [v - w for v, w in zip(y.values, whole)]
    residual = None
    if matrix is not None:
        rhs = matrix.instance.multiplicities if rhs is None else rhs
        residual = [int(b - c) for b, c in zip(rhs, matrix.coverage(whole))]
    return SolutionVector(whole, INTEGRAL), SolutionVector(frac, FRACTIONAL), residual


def lp_relaxation(instance: PackingInstance, max_items: Optional[int] = None) -> LpResult:
    """Enumerate patterns and solve, the usual entry point."""
    return solve_lp(enumerate_patterns(instance, max_items))


__all__ = [
    "LpResult",
    "enumerate_patterns",
    "solve_lp",
    "solve_lp_colgen",
    "normalize_to_equality",
    "purify_columns",
    "split_integral_part",
    "lp_relaxation",
]
