"""Lower-bound instances for rounding-up algorithms and a gap certifier.

A family of three permutations on ``N`` symbols (``N`` odd) is turned into a
string in which every symbol of ``0..n-1`` (``n = N + 1``) occurs three
times. Pairing consecutive string positions gives a pattern matrix whose
uniform half solution covers every item exactly once; sizes just below
``1/3`` force any rounding-up solution to respect the string's prefix
imbalances. The general instance stacks scaled copies of it on the diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import NotRoundingUpError
from .model import Coloring, PackingInstance, Pattern, PatternMatrix, PermutationFamily, SolutionVector
from .permutations import SymbolString
from .pipeline import assign_slots

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class LowerBoundArtifacts:
    """String, occurrence matrix, paired pattern matrix, sizes and half solution."""

    sigma: SymbolString
    occurrences: tuple   # 3n x n, 0/1
    matrix: PatternMatrix
    instance: PackingInstance
    y: SolutionVector
    epsilon: Fraction

    @property
    def n(self) -> int:
        return self.sigma.n

    def pair_rows(self) -> list:
        """Row ``i`` of the paired matrix: occurrence rows ``2i`` and ``2i+1`` added."""
        return self.matrix.entries()


@dataclass(frozen=True)
class GeneralLowerBoundArtifacts:
    base: LowerBoundArtifacts
    groups: int
    matrix: PatternMatrix       # block diagonal, group j scaled by 2**j
    instance: PackingInstance   # compact form with multiplicities
    y: SolutionVector
    epsilon: Fraction

    @property
    def rhs(self) -> tuple:
        return self.instance.multiplicities


@dataclass(frozen=True)
class GapCertificate:
    """Exact accounting for one candidate ``(x, D)``.

    ``coverage_violations`` lists (1-based) item prefixes where the
    covering inequality fails; ``hall_witness`` is the first item type whose
    prefix has too few slots, or None when a slot assignment exists.
    """

    gap: Fraction
    coloring: Coloring
    worst_prefix: tuple          # (even length, chi of that prefix)
    coverage_violations: tuple
    hall_witness: Optional[int]

    @property
    def feasible(self) -> bool:
        return not self.coverage_violations and self.hall_witness is None

    def to_doc(self) -> dict:
        return {
            "gap": str(self.gap),
            "coloring": list(self.coloring.values),
            "worstPrefix": {"length": self.worst_prefix[0], "value": self.worst_prefix[1]},
            "coverageViolations": list(self.coverage_violations),
            "hallWitness": None if self.hall_witness is None else self.hall_witness + 1,
            "feasible": self.feasible,
        }


@dataclass(frozen=True)
class GroupReport:
    group: int                 # 1-based
    scale: int
    imbalance: Fraction        # 1'x^j - 1'y^j
    discard_count: int
    discard_size: Fraction
    local_violations: tuple    # prefixes failing the group-local covering inequality
    worst_prefix: tuple

    @property
    def condition_applies(self) -> bool:
        """Group covers its own items up to discards, so the single-group argument applies."""
        return not self.local_violations

    def to_doc(self) -> dict:
        return {
            "group": self.group,
            "scale": self.scale,
            "imbalance": str(self.imbalance),
            "discardCount": self.discard_count,
            "discardSize": str(self.discard_size),
            "localViolations": list(self.local_violations),
            "worstPrefix": {"length": self.worst_prefix[0], "value": self.worst_prefix[1]},
            "conditionApplies": self.condition_applies,
        }


@dataclass(frozen=True)
class GeneralGapCertificate:
    gap: Fraction
    groups: tuple
    hall_witness: Optional[int]

    @property
    def feasible(self) -> bool:
        return self.hall_witness is None

    def to_doc(self) -> dict:
        return {
            "gap": str(self.gap),
            "groups": [g.to_doc() for g in self.groups],
            "hallWitness": None if self.hall_witness is None else self.hall_witness + 1,
            "feasible": self.feasible,
        }


def build_sigma(family: PermutationFamily) -> SymbolString:
    """Concatenate three permutations of ``N`` symbols and append the new symbol ``N`` three times."""
    if family.k != 3:
        raise ValueError(f"need exactly 3 permutations, got {family.k}")
    if family.n % 2 == 0:
        raise ValueError(f"N = {family.n} must be odd so that the string length 3(N+1) is even")
    n = family.n + 1
    symbols = tuple(s for p in family.perms for s in p) + (n - 1,) * 3
    return SymbolString(symbols, n)


def build_large_items_instance(sigma: SymbolString) -> LowerBoundArtifacts:
    """Occurrence matrix, paired patterns, sizes ``1/3 - i/(20n)`` and ``y = 1/2``."""
    n = sigma.n
    if len(sigma) != 3 * n or n % 2:
        raise ValueError("string must have even length 3n")
    counts = [0] * n
    for s in sigma.symbols:
        counts[s] += 1
    if any(c != 3 for c in counts):
        raise ValueError("every symbol must occur exactly 3 times")
    occ = tuple(tuple(int(s == j) for j in range(n)) for s in sigma.symbols)
    items = 3 * n // 2
    eps = Fraction(1, 20 * n)
    inst = PackingInstance(tuple(Fraction(1, 3) - eps * (i + 1) for i in range(items)),
                           label=f"large-items n={n}")
    columns = []
    for j in range(n):
        columns.append(Pattern.of(t // 2 for t, s in enumerate(sigma.symbols) if s == j))
    matrix = PatternMatrix(inst, tuple(columns))
    y = SolutionVector((HALF,) * n)
    art = LowerBoundArtifacts(sigma, occ, matrix, inst, y, eps)
    problems = check_large_items(art)
    if problems:
        raise ValueError("; ".join(problems))
    return art


def check_large_items(art: LowerBoundArtifacts) -> list:
    """Structural invariants of a large-items artifact, as violation messages."""
    out = []
    b = art.matrix.entries()
    for i, row in enumerate(b):
        if tuple(row) != tuple(u + v for u, v in zip(art.occurrences[2 * i], art.occurrences[2 * i + 1])):
            out.append(f"pattern row {i + 1} is not the sum of occurrence rows {2 * i + 1}, {2 * i + 2}")
    if any(c != 1 for c in art.matrix.coverage(art.y.values)):
        out.append("half solution does not cover every item exactly once")
    for i, s in enumerate(art.instance.sizes):
        if not Fraction(1, 4) < s < Fraction(1, 3):
            out.append(f"size of item {i + 1} outside (1/4, 1/3)")
    for j, p in enumerate(art.matrix.columns):
        if p.n_items != 3 or p.size(art.instance) > 1:
            out.append(f"pattern {j + 1} is not a feasible triple")
    return out


def default_groups(n: int) -> int:
    """``floor(log2 n)``, computed on integers."""
    return n.bit_length() - 1


def build_general_instance(base: LowerBoundArtifacts, groups: Optional[int] = None) -> GeneralLowerBoundArtifacts:
    """Block-diagonal stack of ``groups`` copies of the base, copy ``j`` scaled by ``2**j``.

    Group ``j`` (0-based) has sizes ``(1/3)(1/2)**j - i/(12 n**3)`` and every
    item type multiplicity ``2**j``.
    """
    n = base.n
    groups = default_groups(n) if groups is None else groups
    if groups < 1:
        raise ValueError("need at least one group")
    eps = Fraction(1, 12 * n ** 3)
    items = base.matrix.n_rows
    sizes, mult, columns = [], [], []
    for j in range(groups):
        scale = 2 ** j
        sizes += [Fraction(1, 3 * scale) - eps * (i + 1) for i in range(items)]
        mult += [scale] * items
        for p in base.matrix.columns:
            columns.append(Pattern(tuple((j * items + i, scale * c) for i, c in p.counts)))
    inst = PackingInstance(tuple(sizes), tuple(mult), label=f"general n={n} groups={groups}")
    matrix = PatternMatrix(inst, tuple(columns))
    y = SolutionVector((HALF,) * (n * groups))
    art = GeneralLowerBoundArtifacts(base, groups, matrix, inst, y, eps)
    problems = check_general(art)
    if problems:
        raise ValueError("; ".join(problems))
    return art


def check_general(art: GeneralLowerBoundArtifacts) -> list:
    out = []
    n = art.base.n
    if tuple(art.matrix.coverage(art.y.values)) != art.rhs:
        out.append("C y differs from the multiplicity vector")
    for j, p in enumerate(art.matrix.columns):
        if p.size(art.instance) > 1:
            out.append(f"column {j + 1} exceeds capacity")
    for i, (s, m) in enumerate(zip(art.instance.sizes, art.instance.multiplicities)):
        if not Fraction(1, 3) - Fraction(1, n) <= m * s <= Fraction(1, 3):
            out.append(f"size contribution of item type {i + 1} outside [1/3 - 1/n, 1/3]")
    if list(art.instance.sizes) != sorted(art.instance.sizes, reverse=True):
        out.append("sizes not sorted non-increasing")
    return out


# -- certification ------------------------------------------------------------

def _integral_x(x, length):
    values = x.values if isinstance(x, SolutionVector) else tuple(x)
    if len(values) != length:
        raise NotRoundingUpError(f"x has {len(values)} entries, expected {length}")
    out = []
    for j, v in enumerate(values):
        v = Fraction(v)
        if v.denominator != 1 or v < 0:
            raise NotRoundingUpError(f"x[{j + 1}] = {v} is not a nonnegative integer")
        out.append(int(v))
    return out


def _check_support(x, y):
    for j, (xv, yv) in enumerate(zip(x, y.values)):
        if xv and not yv:
            raise NotRoundingUpError(f"x uses pattern {j + 1} outside the support of y")


def _prefix_values(symbols, chi):
    vals = [0]
    for s in symbols:
        vals.append(vals[-1] + chi[s])
    return vals


def _worst_even_prefix(prefix_vals):
    """Smallest value over even positive lengths; odd lengths are covered by the next even one."""
    best = None
    for length in range(2, len(prefix_vals), 2):
        if best is None or prefix_vals[length] < best[1]:
            best = (length, prefix_vals[length])
    return best if best is not None else (0, 0)


def _group_core(base, x, discard_weight):
    """Coloring, worst prefix and covering violations of one copy of the base.

    ``discard_weight`` is the (possibly fractional) number of discards the
    covering inequality may absorb.
    """
    chi = tuple(2 * v - 1 for v in x)
    pref = _prefix_values(base.sigma.symbols, chi)
    b = base.matrix.entries()
    slots = 0
    chi_sum = 0
    violations = []
    for q, row in enumerate(b, start=1):
        slots += sum(a * v for a, v in zip(row, x))
        chi_sum += sum(a * c for a, c in zip(row, chi))
        # Pairing identity and slot identity, structural for every q.
        assert pref[2 * q] == chi_sum, "paired prefix identity failed"
        assert 2 * slots == 2 * q + pref[2 * q], "slot identity failed"
        if slots < q - discard_weight:
            violations.append(q)
    return Coloring(chi), _worst_even_prefix(pref), tuple(violations)


def _discard_list(discards, inst):
    out = sorted(int(d) for d in discards)
    for d in out:
        if not 0 <= d < inst.n:
            raise NotRoundingUpError(f"discarded item {d + 1} does not exist")
        if out.count(d) > inst.multiplicities[d]:
            raise NotRoundingUpError(f"item {d + 1} discarded more often than it occurs")
    return out


def certify_gap(art: LowerBoundArtifacts, x, discards=()) -> GapCertificate:
    """Gap, induced coloring, worst prefix and feasibility of a candidate ``(x, D)``.

    Raises:
        NotRoundingUpError: if ``x`` is not a nonnegative integral vector
            supported inside the support of ``y``.
    """
    xv = _integral_x(x, art.matrix.n_cols)
    _check_support(xv, art.y)
    d = _discard_list(discards, art.instance)
    size_d = sum((art.instance.sizes[i] for i in d), Fraction(0))
    gap = sum(xv) + 2 * size_d - art.y.total()
    coloring, worst, violations = _group_core(art, xv, len(d))
    slots = [int(c) for c in art.matrix.coverage(xv)]
    hall = assign_slots(art.instance, slots, d).witness
    return GapCertificate(gap, coloring, worst, violations, hall)


def certify_gap_general(art: GeneralLowerBoundArtifacts, x, discards=()) -> GeneralGapCertificate:
    """Per-group accounting and the aggregate gap for a candidate on the stacked instance.

    Group ``j``'s local covering inequality is checked after dividing by
    its scale ``2**j``, so the discard allowance is ``|D_j| / 2**j``.
    """
    n = art.base.n
    items = art.base.matrix.n_rows
    xv = _integral_x(x, art.matrix.n_cols)
    _check_support(xv, art.y)
    d = _discard_list(discards, art.instance)
    sizes = art.instance.sizes
    reports = []
    for j in range(art.groups):
        scale = 2 ** j
        xj = xv[j * n:(j + 1) * n]
        dj = [i for i in d if j * items <= i < (j + 1) * items]
        _, worst, violations = _group_core(art.base, xj, Fraction(len(dj), scale))
        reports.append(GroupReport(
            group=j + 1,
            scale=scale,
            imbalance=sum(xj) - HALF * n,
            discard_count=len(dj),
            discard_size=sum((sizes[i] for i in dj), Fraction(0)),
            local_violations=violations,
            worst_prefix=worst,
        ))
    size_d = sum((sizes[i] for i in d), Fraction(0))
    gap = sum(xv) + 2 * size_d - art.y.total()
    slots = [int(c) for c in art.matrix.coverage(xv)]
    hall = assign_slots(art.instance, slots, d).witness
    return GeneralGapCertificate(gap, tuple(reports), hall)


def artifacts_doc(art) -> dict:
    """JSON document for generated artifacts (1-based symbols and items)."""
    from .serialize import instance_doc, pattern_doc

    if isinstance(art, GeneralLowerBoundArtifacts):
        return {
            "kind": "general",
            "sigma": [s + 1 for s in art.base.sigma.symbols],
            "groups": art.groups,
            "epsilon": str(art.epsilon),
            "instance": instance_doc(art.instance),
            "patterns": [pattern_doc(p) for p in art.matrix.columns],
            "y": [str(v) for v in art.y.values],
        }
    return {
        "kind": "large",
        "sigma": [s + 1 for s in art.sigma.symbols],
        "epsilon": str(art.epsilon),
        "instance": instance_doc(art.instance),
        "patterns": [pattern_doc(p) for p in art.matrix.columns],
        "y": [str(v) for v in art.y.values],
    }


def artifacts_from_doc(doc):
    """Rebuild artifacts from :func:`artifacts_doc` output; regenerates from ``sigma``."""
    from .errors import ParseError

    if not isinstance(doc, dict) or "sigma" not in doc:
        raise ParseError("artifacts document needs a sigma field", "sigma")
    symbols = doc["sigma"]
    if not isinstance(symbols, list) or not all(isinstance(s, int) and s >= 1 for s in symbols):
        raise ParseError("sigma must be a list of positive integers", "sigma")
    n = max(symbols, default=0)
    try:
        base = build_large_items_instance(SymbolString(tuple(s - 1 for s in symbols), n))
        if doc.get("kind") == "general":
            return build_general_instance(base, doc.get("groups"))
    except ValueError as exc:
        raise ParseError(str(exc), "sigma") from None
    return base
