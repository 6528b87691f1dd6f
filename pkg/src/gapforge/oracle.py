"""Exhaustive and exact baselines used to check every bound at desk scale.

Nothing here shares code with the algorithms it validates beyond the domain
types. Enumerations over ``{0,1}^m`` run vectorized in numpy on scaled
integer data, so results stay exact; every search has an explicit cap and
exceeding it raises :class:`ResourceLimitError`.
"""

from __future__ import annotations

import itertools
import random
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from math import ceil, comb, lcm

import numpy as np

from .errors import ResourceLimitError, default_cap
from .model import (
    Coloring,
    PackingInstance,
    Pattern,
    PatternMatrix,
    PermutationFamily,
)
from .pipeline import assign_slots

COLUMN_CAP = 24
ITEM_CAP = 30
CHUNK_BITS = 15
INT64_SAFE = 2 ** 62
LP_BOUND_PATTERNS = 5000
LP_BOUND_NODES = 2000


def _cap(cap, fallback):
    return default_cap(fallback) if cap is None else cap


def _bit_block(m, start, stop):
    """Rows ``start..stop-1`` of the lexicographic 0/1 enumeration, first coordinate most significant."""
    idx = np.arange(start, stop, dtype=np.int64)
    shifts = np.arange(m - 1, -1, -1, dtype=np.int64)
    return ((idx[:, None] >> shifts[None, :]) & 1).astype(np.int64)


def _scaled(rows):
    """Integer matrix and the common denominator it was scaled by."""
    den = lcm(1, *(Fraction(v).denominator for r in rows for v in r))
    return [[int(Fraction(v) * den) for v in r] for r in rows], den


def _min_over_cube(int_rows, target, scale):
    """Min over lexicographic x in {0,1}^m of max_i |scale*(A x)_i - target_i|.

    ``int_rows`` and ``target`` are Python ints; returns ``(value, x)``.
    """
    m = len(int_rows[0]) if int_rows else 0
    if not int_rows or m == 0:
        return 0, (0,) * m
    big = max(abs(v) for r in int_rows for v in r) * m * scale + max(abs(t) for t in target)
    dtype = np.int64 if big < INT64_SAFE else object
    a_t = np.array(int_rows, dtype=dtype).T
    tgt = np.array(target, dtype=dtype)
    best = None
    total = 1 << m
    step = 1 << CHUNK_BITS
    for start in range(0, total, step):
        xs = _bit_block(m, start, min(total, start + step))
        if dtype is object:
            xs = xs.astype(object)
        err = np.abs(xs.dot(a_t) * scale - tgt).max(axis=1)
        pos = int(np.argmin(err))
        val = int(err[pos])
        if best is None or val < best[0]:
            best = (val, start + pos)
    val, idx = best
    x = tuple((idx >> (m - 1 - j)) & 1 for j in range(m))
    return val, x


def exact_lindisc_at(a, y, cap=None):
    """``min_{x in {0,1}^m} ||Ax - Ay||_inf`` exactly, with the lexicographically first minimizer."""
    rows = [list(r) for r in a]
    m = len(y)
    if m > _cap(cap, COLUMN_CAP):
        raise ResourceLimitError(f"{m} columns exceed cap {_cap(cap, COLUMN_CAP)}")
    ys = [Fraction(v) for v in y]
    int_rows, den_a = _scaled(rows)
    den_y = lcm(1, *(v.denominator for v in ys))
    yi = [int(v * den_y) for v in ys]
    target = [sum(a_ij * y_j for a_ij, y_j in zip(r, yi)) for r in int_rows]
    val, x = _min_over_cube(int_rows, target, den_y)
    return Fraction(val, den_a * den_y), x


def exact_disc(a, cap=None):
    """``min_x ||A(x - 1/2)||_inf`` over colorings, with the witnessing coloring."""
    rows = [list(r) for r in a]
    n = len(rows[0]) if rows else 0
    if n > _cap(cap, COLUMN_CAP):
        raise ResourceLimitError(f"{n} columns exceed cap {_cap(cap, COLUMN_CAP)}")
    if n == 0:
        return Fraction(0), Coloring(())
    int_rows, den = _scaled(rows)
    a_t = np.array(int_rows, dtype=object if max(abs(v) for r in int_rows for v in r) * n > INT64_SAFE else np.int64).T
    best = None
    total = 1 << n
    step = 1 << CHUNK_BITS
    for start in range(0, total, step):
        chi = 2 * _bit_block(n, start, min(total, start + step)) - 1
        if a_t.dtype == object:
            chi = chi.astype(object)
        norm = np.abs(chi.dot(a_t)).max(axis=1)
        pos = int(np.argmin(norm))
        if best is None or int(norm[pos]) < best[0]:
            best = (int(norm[pos]), start + pos)
    val, idx = best
    chi = tuple(2 * ((idx >> (n - 1 - j)) & 1) - 1 for j in range(n))
    return Fraction(val, 2 * den), Coloring(chi)


def _prefix_disc_table(perms, n, start, stop):
    chi = (2 * _bit_block(n, start, stop) - 1).astype(np.int16)
    worst = np.zeros(stop - start, dtype=np.int16)
    for p in perms:
        pref = np.abs(np.cumsum(chi[:, list(p)], axis=1)).max(axis=1)
        np.maximum(worst, pref, out=worst)
    return worst


def exact_perm_disc(family: PermutationFamily, cap=None):
    """Min over +-1 colorings of the largest prefix discrepancy, with a witness."""
    n = family.n
    if n > _cap(cap, COLUMN_CAP):
        raise ResourceLimitError(f"n = {n} exceeds cap {_cap(cap, COLUMN_CAP)}")
    best = None
    total = 1 << n
    step = 1 << CHUNK_BITS
    for start in range(0, total, step):
        worst = _prefix_disc_table(family.perms, n, start, min(total, start + step))
        pos = int(np.argmin(worst))
        if best is None or int(worst[pos]) < best[0]:
            best = (int(worst[pos]), start + pos)
    val, idx = best
    return val, Coloring(tuple(2 * ((idx >> (n - 1 - j)) & 1) - 1 for j in range(n)))


# -- bin packing ------------------------------------------------------------

def first_fit_decreasing(instance: PackingInstance) -> int:
    """Bins used by First Fit on the items sorted by non-increasing size."""
    sizes = sorted((instance.sizes[t] for t in instance.occurrence_types()), reverse=True)
    loads = []
    for s in sizes:
        for b in range(len(loads)):
            if loads[b] + s <= 1:
                loads[b] += s
                break
        else:
            loads.append(s)
    return len(loads)


def maximal_patterns(instance: PackingInstance, max_items=None) -> list:
    """Maximal feasible patterns by plain subset enumeration (unit multiplicities)."""
    sizes = [instance.sizes[t] for t in instance.occurrence_types()]
    types = instance.occurrence_types()
    n = len(sizes)
    limit = n if max_items is None else max_items
    found = set()
    for r in range(1, limit + 1):
        for combo in itertools.combinations(range(n), r):
            load = sum((sizes[i] for i in combo), Fraction(0))
            if load > 1:
                continue
            if r < limit and any(load + sizes[i] <= 1 for i in range(n) if i not in combo):
                continue
            found.add(Pattern.of(types[i] for i in combo))
    return sorted(found, key=lambda p: p.items)


def lp_dual_value(matrix: PatternMatrix, rhs=None):
    """Dual of the configuration LP by a dense dictionary simplex.

    Maximizes ``b·u`` subject to ``p·u <= 1`` for every column ``p`` and
    ``u >= 0``. The origin is feasible so no phase I is needed; Bland's rule
    picks the entering and leaving variables.

    Returns:
        ``(value, u)`` with ``u`` one dual price per item type.
    """
    n = matrix.n_rows
    b = [Fraction(v) for v in (matrix.instance.multiplicities if rhs is None else rhs)]
    m = matrix.n_cols
    # Dictionary: basic[r] = rhs[r] - sum_j t[r][j] * nonbasic[j]; z = z0 + sum_j c[j] nonbasic[j].
    t = [[Fraction(p.count(i)) for i in range(n)] for p in matrix.columns]
    rhs_col = [Fraction(1)] * m
    c = list(b)
    z0 = Fraction(0)
    nonbasic = list(range(n))          # labels 0..n-1 are u, n.. are slacks
    basic = [n + r for r in range(m)]
    while True:
        cand = [j for j in range(n) if c[j] > 0]
        if not cand:
            break
        e = min(cand, key=lambda j: nonbasic[j])
        rows = [r for r in range(m) if t[r][e] > 0]
        if not rows:
            raise ArithmeticError("dual unbounded: some item is in no column")
        lv = min(rows, key=lambda r: (rhs_col[r] / t[r][e], basic[r]))
        piv = t[lv][e]
        prow = [v / piv for v in t[lv]]
        prow[e] = 1 / piv
        prhs = rhs_col[lv] / piv
        for r in range(m):
            if r == lv or t[r][e] == 0:
                continue
            f = t[r][e]
            row = t[r]
            for j in range(n):
                row[j] = row[j] - f * prow[j] if j != e else -f * prow[e]
            rhs_col[r] -= f * prhs
        ce = c[e]
        for j in range(n):
            c[j] = c[j] - ce * prow[j] if j != e else -ce * prow[e]
        z0 += ce * prhs
        t[lv] = prow
        rhs_col[lv] = prhs
        basic[lv], nonbasic[e] = nonbasic[e], basic[lv]
    u = [Fraction(0)] * n
    for r, lab in enumerate(basic):
        if lab < n:
            u[lab] = rhs_col[r]
    return z0, u


def certify_lp_optimum(matrix: PatternMatrix, y, rhs=None):
    """Weak-duality certificate that ``y`` is optimal for the configuration LP.

    Returns ``(dual_value, certified)``; certified means ``y`` is primal
    feasible, the dual solution is feasible, and both objectives agree.
    """
    rhs = matrix.instance.multiplicities if rhs is None else rhs
    value, u = lp_dual_value(matrix, rhs)
    y = [Fraction(v) for v in y]
    primal_ok = all(v >= 0 for v in y) and all(c >= b for c, b in zip(matrix.coverage(y), rhs))
    dual_ok = all(v >= 0 for v in u) and all(
        sum((u[i] * cnt for i, cnt in p.counts), Fraction(0)) <= 1 for p in matrix.columns)
    agree = sum(y, Fraction(0)) == value == sum((Fraction(b) * v for b, v in zip(rhs, u)), Fraction(0))
    return value, primal_ok and dual_ok and agree


def exact_opt(instance: PackingInstance, cap=None) -> int:
    """Minimum number of bins by branch and bound.

    Branches on the maximal bins containing the largest remaining item (some
    optimal packing uses only such bins), prunes with size and cardinality
    bounds, starts from the First Fit Decreasing count and stops early when
    the root lower bound is met. The root bound is the size and cardinality
    bound, raised to the LP bound once the search exceeds a node budget.
    """
    types = instance.occurrence_types()
    if len(types) > _cap(cap, ITEM_CAP):
        raise ResourceLimitError(f"{len(types)} items exceed cap {_cap(cap, ITEM_CAP)}")
    sizes = sorted((instance.sizes[t] for t in types), reverse=True)
    n = len(sizes)
    if n == 0:
        return 0
    best = [first_fit_decreasing(instance)]
    asc = sorted(sizes)
    kmax = 0
    acc = Fraction(0)
    for s in asc:
        if acc + s > 1:
            break
        acc += s
        kmax += 1

    def lower(mask_items):
        total = sum((sizes[i] for i in mask_items), Fraction(0))
        big = sum(1 for i in mask_items if sizes[i] > Fraction(1, 2))
        return max(ceil(total), big, ceil(len(mask_items) / kmax))

    root = [lower(range(n))]
    if best[0] <= root[0]:
        return best[0]
    lp_patterns = sum(comb(n, r) for r in range(1, kmax + 1))
    nodes = [0]
    seen = {}

    def tighten_root():
        # The LP bound is costly, so it is only computed once the search proves hard.
        unit = PackingInstance(tuple(sizes))
        lp_value, _ = lp_dual_value(PatternMatrix(unit, tuple(maximal_patterns(unit, kmax))))
        root[0] = max(root[0], ceil(lp_value))

    def bins_with_first(items):
        first, rest = items[0], items[1:]
        out = {}

        def grow(pos, load, chosen):
            extended = False
            for t in range(pos, len(rest)):
                i = rest[t]
                if load + sizes[i] <= 1:
                    extended = True
                    grow(t + 1, load + sizes[i], chosen + [i])
            if not extended:
                # maximal only if no skipped item fits either
                if all(load + sizes[i] > 1 for i in rest if i not in chosen):
                    key = tuple(sizes[i] for i in chosen)
                    out.setdefault(key, (load, chosen))
        grow(0, sizes[first], [first])
        return sorted(out.values(), key=lambda lc: -lc[0])

    def search(items, used):
        if not items:
            best[0] = min(best[0], used)
            return
        if used + lower(items) >= best[0]:
            return
        # Remaining items matter only as a multiset of sizes.
        key = tuple(sizes[i] for i in items)
        if seen.get(key, n + 1) <= used:
            return
        seen[key] = used
        nodes[0] += 1
        if nodes[0] == LP_BOUND_NODES and lp_patterns <= LP_BOUND_PATTERNS:
            tighten_root()
        for _, chosen in bins_with_first(items):
            chosen = set(chosen)
            search([i for i in items if i not in chosen], used + 1)
            if best[0] <= root[0]:
                return

    search(list(range(n)), 0)
    return best[0]


# -- rounding-up gap ----------------------------------------------------------

def _discard_options(instance, d_cap):
    """All discard multisets with at most ``d_cap`` items, sorted by (size, lexicographic)."""
    n = instance.n
    options = []

    def rec(i, left, chosen):
        if i == n:
            options.append(tuple(chosen))
            return
        for c in range(min(left, instance.multiplicities[i]) + 1):
            rec(i + 1, left - c, chosen + [i] * c)

    rec(0, d_cap, [])
    return sorted(options, key=lambda d: (sum((instance.sizes[i] for i in d), Fraction(0)), d))


def _gap_key(gap, size, x, d):
    # Smallest gap, then least discarded size, then fewest bins, then earliest patterns.
    return (gap, size, sum(x), tuple(-v for v in x), d)


def _gap_chunk(args):
    matrix, supp, y_total, xs, options = args
    inst = matrix.instance
    best = None
    for xv in xs:
        full = [0] * matrix.n_cols
        for j, v in zip(supp, xv):
            full[j] = v
        slots = [int(c) for c in matrix.coverage(full)]
        base = sum(xv) - y_total
        for d, size in options:
            gap = base + 2 * size
            if best is not None and gap > best[0]:
                break
            if assign_slots(inst, slots, d).ok:
                cand = _gap_key(gap, size, full, d)
                if best is None or cand < best:
                    best = cand
                break
    return best


def min_rounding_gap(matrix: PatternMatrix, y, x_cap: int = 2, d_cap=None, jobs: int = 1,
                     support_cap: int = 12):
    """Smallest ``1'x + 2 s(D) - 1'y`` over rounding-up candidates ``(x, D)``.

    ``x`` ranges over integer vectors supported in ``supp(y)`` with entries
    at most ``x_cap``; ``D`` over discard multisets of at most ``d_cap``
    items (all items when None). A candidate counts when the undiscarded
    items can be assigned to slots of equal or larger items.

    Returns:
        ``(gap, (x, D))``. Among equal gaps the witness discards the least
        total size, then uses the fewest bins, then prefers earlier patterns.
    """
    y = [Fraction(v) for v in y]
    supp = [j for j, v in enumerate(y) if v > 0]
    if len(supp) > support_cap:
        raise ResourceLimitError(f"support {len(supp)} exceeds cap {support_cap}")
    inst = matrix.instance
    d_cap = inst.total_items if d_cap is None else d_cap
    options = [(d, sum((inst.sizes[i] for i in d), Fraction(0))) for d in _discard_options(inst, d_cap)]
    xs = list(itertools.product(range(x_cap + 1), repeat=len(supp)))
    y_total = sum(y, Fraction(0))
    if jobs > 1 and len(xs) > 1:
        chunks = [xs[i::jobs] for i in range(jobs)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_gap_chunk, [(matrix, supp, y_total, c, options) for c in chunks]))
    else:
        results = [_gap_chunk((matrix, supp, y_total, xs, options))]
    results = [r for r in results if r is not None]
    if not results:
        return None, None
    gap, _, _, neg_x, d = min(results)
    return gap, (tuple(-v for v in neg_x), d)


# -- high-discrepancy permutation search -----------------------------------------

def _disc_of(perms, n):
    return int(_prefix_disc_table(perms, n, 0, 1 << n).min())


def _exhaustive_family(n, k):
    perms = list(itertools.permutations(range(n)))
    ident = perms[0]
    table = np.stack([_prefix_disc_table([p], n, 0, 1 << n) for p in perms])
    base = table[0]
    best = (-1, None)
    if k == 1:
        return (ident,), _disc_of([ident], n)
    if k == 2:
        vals = np.maximum(base, table).min(axis=1)
        i = int(np.argmax(vals))
        return (ident, perms[i]), int(vals[i])
    for combo in itertools.combinations_with_replacement(range(len(perms)), k - 2):
        cur = base
        for i in combo:
            cur = np.maximum(cur, table[i])
        lo = combo[-1]
        vals = np.maximum(cur, table[lo:]).min(axis=1)
        j = int(np.argmax(vals))
        if vals[j] > best[0]:
            best = (int(vals[j]), tuple(perms[i] for i in combo) + (perms[lo + j],))
    return (ident,) + best[1], best[0]


_FAMILY_CACHE = {}


def find_high_disc_perms(n: int, k: int = 3, seed: int = 0, exhaustive_limit: int = 7,
                         iterations: int = 400, restarts: int = 4):
    """A family of k permutations of [n] with large prefix discrepancy.

    The first permutation is the identity (discrepancy is invariant under
    relabeling symbols). Up to ``exhaustive_limit`` symbols the maximum over
    all families is found exactly; beyond that a seeded local search over
    transpositions starts from the best family on ``n - 2`` symbols,
    extended at the end, so the value never drops below the smaller case.

    Returns:
        ``(family, exact_prefix_discrepancy)``
    """
    if n < 1:
        raise ValueError("n must be positive")
    key = (n, k, seed, exhaustive_limit, iterations, restarts)
    if key in _FAMILY_CACHE:
        return _FAMILY_CACHE[key]
    if n <= exhaustive_limit:
        perms, value = _exhaustive_family(n, k)
    else:
        rng = random.Random(seed * 1000003 + n)
        smaller, _ = find_high_disc_perms(n - 2, k, seed, exhaustive_limit, iterations, restarts)
        start = tuple(p + (n - 2, n - 1) for p in smaller.perms)
        starts = [start] + [tuple([tuple(range(n))] + [tuple(rng.sample(range(n), n)) for _ in range(k - 1)])
                            for _ in range(restarts - 1)]
        perms, value = start, _disc_of(start, n)
        for cand in starts:
            cur = [list(p) for p in cand]
            cur_val = _disc_of(cur, n)
            for _ in range(iterations):
                which = rng.randrange(1, k) if k > 1 else 0
                a, b = rng.sample(range(n), 2)
                cur[which][a], cur[which][b] = cur[which][b], cur[which][a]
                val = _disc_of(cur, n)
                if val >= cur_val:
                    cur_val = val
                else:
                    cur[which][a], cur[which][b] = cur[which][b], cur[which][a]
            if cur_val > value:
                perms, value = tuple(tuple(p) for p in cur), cur_val
    result = (PermutationFamily(n, tuple(tuple(p) for p in perms)), value)
    _FAMILY_CACHE[key] = result
    return result
