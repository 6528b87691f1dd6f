"""From a packing instance to an integral packing via monotone-matrix rounding.

For sizes above ``1/(k+1)`` the fractional optimum is rounded with the
cumulative k-monotone matrix of its support; ``ceil(delta)`` extra bins for
the largest item make up for the rounding error ``delta`` and a greedy
slot assignment places every item into a slot of an item at least as large.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor
from typing import Optional

from .lp import enumerate_patterns, normalize_to_equality, solve_lp, split_integral_part
from .model import (
    INTEGRAL,
    PackingInstance,
    Pattern,
    PatternMatrix,
    RoundingOutcome,
    SolutionVector,
    validate,
)
from .monotone import build_cumulative, lindisc_round


@dataclass(frozen=True)
class SlotAssignment:
    """Result of :func:`assign_slots`: ``sigma`` on success, else ``witness``.

    ``witness`` is the smallest item type ``i`` whose prefix ``1..i`` has
    fewer slots than undiscarded occurrences.
    """

    sigma: Optional[tuple]
    witness: Optional[int] = None

    @property
    def ok(self) -> bool:
        return self.sigma is not None


def default_k(instance: PackingInstance) -> int:
    """Smallest k with every size strictly above ``1/(k+1)``."""
    return floor(1 / min(instance.sizes))


def _discard_counts(instance, discards):
    counts = [0] * instance.n
    for d in discards or ():
        counts[d] += 1
    for i, c in enumerate(counts):
        if c > instance.multiplicities[i]:
            raise ValueError(f"item {i + 1} discarded {c} times, multiplicity {instance.multiplicities[i]}")
    return counts


def prefix_shortfall(instance: PackingInstance, slot_counts, discards=()) -> Optional[int]:
    """First item type where slots of types ``<= i`` fall short of demand, or None."""
    dropped = _discard_counts(instance, discards)
    have = need = 0
    for i in range(instance.n):
        have += slot_counts[i]
        need += instance.multiplicities[i] - dropped[i]
        if have < need:
            return i
    return None


def assign_slots(instance: PackingInstance, slot_counts, discards=()) -> SlotAssignment:
    """Place every undiscarded occurrence into a slot of an item type ``<= its own``.

    Occurrences are processed from the largest item down, each taking the
    smallest still-available slot that is at least as large. ``discards`` is
    a multiset of item types; the last occurrences of a type are dropped.
    """
    if len(slot_counts) != instance.n:
        raise ValueError("one slot count per item type required")
    witness = prefix_shortfall(instance, slot_counts, discards)
    if witness is not None:
        return SlotAssignment(None, witness)
    dropped = _discard_counts(instance, discards)
    left = [int(c) for c in slot_counts]
    sigma = []
    for i, m in enumerate(instance.multiplicities):
        for copy in range(m):
            if copy >= m - dropped[i]:
                sigma.append(None)
                continue
            j = i
            while left[j] == 0:
                j -= 1
            left[j] -= 1
            sigma.append(j)
    return SlotAssignment(tuple(sigma))


def _restricted_problem(support: PatternMatrix, frac: SolutionVector, residual):
    """Rows still to be covered by the fractional part, and its columns over them."""
    rows = [i for i, r in enumerate(residual) if r > 0]
    pos = {i: t for t, i in enumerate(rows)}
    inst = PackingInstance(tuple(support.instance.sizes[i] for i in rows))
    cols, vals, origin = [], [], []
    for j, p in enumerate(support.columns):
        if frac.values[j] > 0:
            cols.append(Pattern(tuple((pos[i], c) for i, c in p.counts)))
            vals.append(frac.values[j])
            origin.append(j)
    while len(cols) < len(rows):
        cols.append(Pattern())
        vals.append(Fraction(0))
        origin.append(None)
    return PatternMatrix(inst, tuple(cols)), vals, origin


def _trace_doc(trace):
    if trace is None:
        # integral optimum: nothing was rounded
        return {"steps": [], "achieved": "0", "withinBound": True}
    return trace.to_doc()


def round_packing(instance: PackingInstance, k: Optional[int] = None,
                  emit_trace: bool = False) -> RoundingOutcome:
    """Integral packing with at most ``ceil(OPT_f + (1 + 1/k) delta)`` bins.

    ``delta`` is the discrepancy achieved by :func:`lindisc_round` on the
    cumulative matrix of the fractional LP part. Instances with
    multiplicities are expanded to unit items first.
    """
    problems = validate(instance)
    if problems:
        raise ValueError("; ".join(problems))
    inst = instance if instance.has_unit_multiplicities() else instance.expand()
    k = default_k(inst) if k is None else k
    if any(s <= Fraction(1, k + 1) for s in inst.sizes):
        raise ValueError(f"every size must exceed 1/{k + 1}")

    lp = solve_lp(enumerate_patterns(inst, k))
    opt_f = lp.objective
    lp = normalize_to_equality(lp)
    support, y = lp.support_matrix()
    assert all(c == 1 for c in support.coverage(y.values)), "normalized solution must cover exactly once"

    whole, frac, residual = split_integral_part(y, support)
    assert all(r in (0, 1) for r in residual)
    restricted, fvals, origin = _restricted_problem(support, frac, residual)

    x = [int(v) for v in whole.values]
    delta = Fraction(0)
    trace = None
    if restricted.n_rows:
        cum = build_cumulative(restricted, k)
        xr, trace = lindisc_round(cum.base, fvals)
        delta = trace.achieved
        for j, v in zip(origin, xr):
            if j is not None:
                x[j] += v
        # The appended (k,...,k) row bounds the number of rounded-up patterns.
        assert k * sum(xr) <= k * sum(fvals) + delta
    extra = ceil(delta)
    xs = SolutionVector(x, INTEGRAL)
    slots = [int(c) for c in support.coverage(x)]
    slots[0] += extra
    assignment = assign_slots(inst, slots)
    assert assignment.ok, f"Hall prefix condition failed at item {assignment.witness}"
    total = sum(x) + extra
    assert total <= ceil(opt_f + (1 + Fraction(1, k)) * delta)
    return RoundingOutcome(
        instance=inst,
        matrix=support,
        x=xs,
        extra_bins=extra,
        discards=(),
        assignment=assignment.sigma,
        achieved_disc=delta,
        total_bins=total,
        opt_f=opt_f,
        k=k,
        trace=_trace_doc(trace) if emit_trace else None,
    )


def pack_bins(outcome: RoundingOutcome) -> list:
    """Concrete bins as ``(slot_types, occurrences)`` pairs under the assignment.

    Bins are the bought pattern copies in column order followed by the extra
    singleton bins. Occurrences fill slots of their assigned type in order.
    """
    bins = []
    free = {}
    for j, p in enumerate(outcome.matrix.columns):
        for _ in range(int(outcome.x.values[j])):
            b = len(bins)
            bins.append((p.items, []))
            for t in p.items:
                free.setdefault(t, []).append(b)
    for _ in range(outcome.extra_bins):
        b = len(bins)
        bins.append(((0,), []))
        free.setdefault(0, []).append(b)
    cursor = {t: 0 for t in free}
    overflow = []
    for occ, slot in enumerate(outcome.assignment):
        if slot is None:
            continue
        spots = free.get(slot, [])
        c = cursor.get(slot, 0)
        if c >= len(spots):
            overflow.append(occ)
            continue
        bins[spots[c]][1].append(occ)
        cursor[slot] = c + 1
    return bins, overflow


def verify_packing(instance: PackingInstance, outcome: RoundingOutcome) -> list:
    """Independent check of an outcome; returns human-readable violations."""
    out = list(validate(outcome))
    inst = instance if instance.has_unit_multiplicities() else instance.expand()
    if inst.sizes != outcome.instance.sizes:
        out.append("outcome belongs to a different instance")
        return out
    sizes = inst.sizes
    types = inst.occurrence_types()
    bins, overflow = pack_bins(outcome)
    for occ in overflow:
        out.append(f"occurrence {occ + 1} has no free slot of item {outcome.assignment[occ] + 1}")
    for b, (slot_types, occs) in enumerate(bins):
        slot_load = sum((sizes[t] for t in slot_types), Fraction(0))
        load = sum((sizes[types[o]] for o in occs), Fraction(0))
        if slot_load > 1 or load > 1:
            out.append(f"bin {b + 1} overfull: {max(slot_load, load)} > 1")
    placed = {o for _, occs in bins for o in occs}
    for occ in range(len(types)):
        if occ not in placed and occ not in set(outcome.discards):
            out.append(f"occurrence {occ + 1} neither placed nor discarded")
    if outcome.total_bins != len(bins):
        out.append(f"totalBins {outcome.total_bins} != bins built {len(bins)}")
    if outcome.opt_f is not None and outcome.k:
        limit = ceil(outcome.opt_f + (1 + Fraction(1, outcome.k)) * outcome.achieved_disc)
        if outcome.total_bins > limit:
            out.append(f"bin count {outcome.total_bins} exceeds bound {limit}")
    return out


def first_fit(sizes) -> list:
    """First-fit bins, each a list of positions into ``sizes``."""
    loads, bins = [], []
    for t, s in enumerate(sizes):
        for b, load in enumerate(loads):
            if load + s <= 1:
                loads[b] += s
                bins[b].append(t)
                break
        else:
            loads.append(Fraction(s))
            bins.append([t])
    return bins


def greedy_discard_bins(instance: PackingInstance, discards) -> int:
    """Bins first fit needs for the discarded items; at most ``2 s(D) + 1``."""
    sizes = [instance.sizes[d] for d in discards]
    count = len(first_fit(sizes))
    assert count <= 2 * sum(sizes, Fraction(0)) + 1
    return count
