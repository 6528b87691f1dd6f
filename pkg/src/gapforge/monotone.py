"""Cumulative k-monotone matrices and their recursive linear-discrepancy rounding.

Rows are constraints and columns are variables throughout. The rounding
guarantee is ``||Ax - Ay||_inf <= 5k log2(2 min(rows, cols))``; the
logarithm is never evaluated in floating point, see :func:`log_bound_holds`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import log2

from .linalg import kernel_vector
from .model import KMonotoneMatrix, PatternMatrix, validate
from .serialize import format_rational

BASE_COLUMNS = 4


@dataclass(frozen=True)
class CumulativeMatrix:
    base: KMonotoneMatrix
    source: PatternMatrix


@dataclass
class LindiscTrace:
    """Replayable record of one rounding run.

    ``bound`` is ``bound_coefficient * log2(bound_argument)``; it is kept
    symbolic because it is irrational in general.
    """

    steps: list = field(default_factory=list)
    achieved: Fraction = Fraction(0)
    bound_coefficient: int = 0
    bound_argument: int = 1

    @property
    def within_bound(self) -> bool:
        return log_bound_holds(self.achieved, self.bound_coefficient, self.bound_argument)

    def bound_float(self) -> float:
        """Approximate bound, for display only."""
        return self.bound_coefficient * log2(self.bound_argument)

    def to_doc(self) -> dict:
        """Serializable form; row and column indices become 1-based."""
        steps = []
        for step in self.steps:
            step = dict(step)
            for key in ("indices", "rows", "columns"):
                if key in step:
                    step[key] = [i + 1 for i in step[key]]
            steps.append(step)
        return {
            "steps": steps,
            "achieved": format_rational(self.achieved),
            "bound": {"coefficient": self.bound_coefficient, "log2Of": self.bound_argument},
            "withinBound": self.within_bound,
        }


def log_bound_holds(value, coefficient: int, argument: int) -> bool:
    """Exact test of ``value <= coefficient * log2(argument)``.

    With ``value / coefficient = p/q`` the inequality is ``2**p <= argument**q``,
    decided in integer arithmetic after cheap bit-length screening.
    """
    value = Fraction(value)
    if value <= 0:
        return True
    if coefficient <= 0 or argument <= 1:
        return False
    floor_log = argument.bit_length() - 1
    if value <= coefficient * floor_log:
        return True
    if value > coefficient * (floor_log + 1):
        return False
    ratio = value / coefficient
    return 2 ** ratio.numerator <= argument ** ratio.denominator


def build_cumulative(matrix: PatternMatrix, k: int) -> CumulativeMatrix:
    """Prefix sums of the pattern rows with a constant ``(k,...,k)`` row appended.

    Entry ``(i, j)`` counts the items of types ``1..i`` in pattern ``j``.

    Raises:
        ValueError: if a column holds more than ``k`` items.
    """
    for j, p in enumerate(matrix.columns):
        if p.n_items > k:
            raise ValueError(f"column {j + 1} holds {p.n_items} > k = {k} items")
    b = matrix.entries()
    rows = []
    acc = [0] * matrix.n_cols
    for r in b:
        acc = [a + v for a, v in zip(acc, r)]
        rows.append(tuple(acc))
    rows.append((k,) * matrix.n_cols)
    return CumulativeMatrix(KMonotoneMatrix(tuple(rows), k), matrix)


def purify_to_vertex(a, y):
    """Move ``y`` to a vertex of ``{y' : A y' = A y, 0 <= y' <= 1}``.

    Repeatedly takes an exact kernel vector of the columns that are still
    fractional and walks along it until one coordinate reaches 0 or 1. The
    result has at most ``rank(A)`` fractional entries.
    """
    y = [Fraction(v) for v in y]
    nrows = len(a)
    while True:
        frac = [j for j, v in enumerate(y) if 0 < v < 1]
        if not frac:
            return y
        sub = [[a[i][j] for j in frac] for i in range(nrows)]
        z = kernel_vector(sub, len(frac))
        if z is None:
            return y
        steps = []
        for j, zj in zip(frac, z):
            if zj > 0:
                steps.append((1 - y[j]) / zj)
            elif zj < 0:
                steps.append(y[j] / -zj)
        t = min(steps)
        for j, zj in zip(frac, z):
            y[j] += t * zj


def _row_error(row, cols, x, y):
    return abs(sum((row[c] * (x[c] - y[c]) for c in cols), Fraction(0)))


def _base_case(a, rows, cols, y):
    """Lexicographically first 0/1 minimizer over the active rows."""
    best = None
    for choice in itertools.product((0, 1), repeat=len(cols)):
        err = max((abs(sum((a[r][c] * (v - y[c]) for c, v in zip(cols, choice)), Fraction(0)))
                   for r in rows), default=Fraction(0))
        if best is None or err < best[0]:
            best = (err, choice)
    return best[1]


def lindisc_round(matrix: KMonotoneMatrix, y):
    """Round ``y in [0,1]^m`` to ``x in {0,1}^m`` with small ``||Ax - Ay||_inf``.

    The procedure fixes integral coordinates, purifies to a vertex while there
    are more active columns than rows, deletes every second row among those
    whose successor differs by at most ``2k`` in l1 distance, and finishes
    with exhaustive search once at most four columns remain. Deterministic.

    Returns:
        ``(x, trace)`` where ``x`` is a list of 0/1 ints.
    """
    problems = validate(matrix)
    if problems:
        raise ValueError("; ".join(problems))
    a = matrix.entries
    k = matrix.k
    n, m = matrix.n_rows, matrix.n_cols
    y0 = [Fraction(v) for v in y]
    if len(y0) != m:
        raise ValueError(f"y has {len(y0)} entries, matrix has {m} columns")
    if any(not 0 <= v <= 1 for v in y0):
        raise ValueError("y must lie in [0,1]^m")
    trace = LindiscTrace(bound_coefficient=5 * k, bound_argument=2 * max(1, min(n, m)))
    x = [None] * m
    cur = dict(enumerate(y0))
    rows = list(range(n))
    cols = list(range(m))
    deletions = []
    size_before = n + m

    while True:
        fixed = [c for c in cols if cur[c] in (0, 1)]
        if fixed:
            for c in fixed:
                x[c] = int(cur[c])
            trace.steps.append({"op": "fix-columns", "indices": fixed, "values": [x[c] for c in fixed]})
            cols = [c for c in cols if c not in set(fixed)]
        if not cols:
            break
        if len(cols) > len(rows):
            before = len(cols)
            sub = [[a[r][c] for c in cols] for r in rows]
            new = purify_to_vertex(sub, [cur[c] for c in cols])
            for c, v in zip(cols, new):
                cur[c] = v
            after = sum(1 for v in new if 0 < v < 1)
            trace.steps.append({"op": "purify", "supportBefore": before, "supportAfter": after})
            continue
        if len(cols) <= BASE_COLUMNS:
            choice = _base_case(a, rows, cols, cur)
            for c, v in zip(cols, choice):
                x[c] = v
            trace.steps.append({"op": "base-case", "columns": cols, "choice": list(choice)})
            break
        nr = len(rows)
        d = [sum(abs(a[rows[t + 1]][c] - a[rows[t]][c]) for c in cols) for t in range(nr - 1)]
        q = [t for t in range(nr - 1) if d[t] <= 2 * k]
        j_pos = q[0::2]
        # Provable pigeonhole count: rows with d > 2k number at most floor(mk/(2k+1)).
        assert len(q) >= nr - 1 - (len(cols) * k) // (2 * k + 1), "pigeonhole count violated"
        assert j_pos, "no deletable row"
        deleted = [rows[t] for t in j_pos]
        deletions.append([(rows[t], rows[t + 1], d[t], list(cols)) for t in j_pos])
        trace.steps.append({
            "op": "delete-rows",
            "rows": deleted,
            "d": [d[t] for t in j_pos],
            "qualifying": len(q),
            "activeRows": nr,
            "activeColumns": len(cols),
        })
        rows = [r for r in rows if r not in set(deleted)]
        assert len(rows) + len(cols) < size_before, "recursion did not shrink"
        size_before = len(rows) + len(cols)

    errors = [_row_error(a[r], range(m), x, y0) for r in range(n)]
    trace.achieved = max(errors, default=Fraction(0))
    for batch in deletions:
        for j, nxt, dj, _ in batch:
            assert dj <= 2 * k
            assert errors[j] <= dj + errors[nxt], "row-deletion triangle inequality failed"
    assert trace.within_bound, "rounding exceeded 5k log2(2 min(n,m))"
    return x, trace


def replay(trace: LindiscTrace, m: int) -> list:
    """Reconstruct ``x`` from the fix and base-case records of a trace."""
    x = [None] * m
    for step in trace.steps:
        if step["op"] == "fix-columns":
            for c, v in zip(step["indices"], step["values"]):
                x[c] = v
        elif step["op"] == "base-case":
            for c, v in zip(step["columns"], step["choice"]):
                x[c] = v
    return x


def discrepancy_of(matrix: KMonotoneMatrix, x, y) -> Fraction:
    """``||Ax - Ay||_inf`` evaluated exactly."""
    return max((_row_error(r, range(matrix.n_cols), x, [Fraction(v) for v in y])
                for r in matrix.entries), default=Fraction(0))
