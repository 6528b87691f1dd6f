"""Domain types and their invariants.

Every numeric quantity is a :class:`fractions.Fraction` or an ``int``; no
algorithmic path touches floating point. All types are frozen dataclasses
holding tuples, so values can be shared freely between workers.

Indices are 0-based in Python and 1-based in serialized documents and in
human-readable messages.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

Rational = Fraction

FRACTIONAL = "fractional"
INTEGRAL = "integral"


def _tuple_of_fractions(values):
    return tuple(Fraction(v) for v in values)


@dataclass(frozen=True)
class PackingInstance:
    """Item sizes in (0, 1], sorted non-increasing, with multiplicities.

    The constructor stores sizes as given; use :meth:`from_sizes` to sort.
    """

    sizes: tuple
    multiplicities: tuple = ()
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "sizes", _tuple_of_fractions(self.sizes))
        mult = tuple(int(m) for m in self.multiplicities) or (1,) * len(self.sizes)
        object.__setattr__(self, "multiplicities", mult)

    @classmethod
    def from_sizes(cls, sizes: Iterable, multiplicities: Optional[Iterable[int]] = None,
                   label: str = "") -> "PackingInstance":
        """Sort item types by non-increasing size; equal sizes keep input order."""
        sizes = [Fraction(s) for s in sizes]
        mult = list(multiplicities) if multiplicities is not None else [1] * len(sizes)
        order = sorted(range(len(sizes)), key=lambda i: -sizes[i])
        return cls(tuple(sizes[i] for i in order), tuple(mult[i] for i in order), label)

    @property
    def n(self) -> int:
        """Number of item types."""
        return len(self.sizes)

    @property
    def total_items(self) -> int:
        return sum(self.multiplicities)

    @property
    def total_size(self) -> Fraction:
        return sum((s * m for s, m in zip(self.sizes, self.multiplicities)), Fraction(0))

    def has_unit_multiplicities(self) -> bool:
        return all(m == 1 for m in self.multiplicities)

    def occurrence_types(self) -> tuple:
        """Item type of every occurrence in the expanded unit-multiplicity view."""
        return tuple(i for i, m in enumerate(self.multiplicities) for _ in range(m))

    def expand(self) -> "PackingInstance":
        """The same items with every multiplicity split into unit copies."""
        types = self.occurrence_types()
        return PackingInstance(tuple(self.sizes[i] for i in types), (), self.label)


@dataclass(frozen=True)
class Pattern:
    """Multiset of item types packed into one bin.

    ``counts`` is a sorted tuple of ``(item, multiplicity)`` pairs with
    positive multiplicities.
    """

    counts: tuple = ()

    def __post_init__(self):
        merged = Counter()
        for item, c in self.counts:
            if c:
                merged[int(item)] += int(c)
        object.__setattr__(self, "counts", tuple(sorted(merged.items())))

    @classmethod
    def of(cls, items: Iterable[int]) -> "Pattern":
        """Pattern from a list of item indices, repeated indices counting twice."""
        return cls(tuple(Counter(items).items()))

    def count(self, item: int) -> int:
        for i, c in self.counts:
            if i == item:
                return c
        return 0

    @property
    def items(self) -> tuple:
        return tuple(i for i, c in self.counts for _ in range(c))

    @property
    def n_items(self) -> int:
        return sum(c for _, c in self.counts)

    def size(self, instance: PackingInstance) -> Fraction:
        return sum((instance.sizes[i] * c for i, c in self.counts), Fraction(0))

    def without(self, item: int) -> "Pattern":
        """Sub-pattern with one copy of ``item`` removed."""
        return Pattern(tuple((i, c - 1 if i == item else c) for i, c in self.counts))

    def vector(self, n: int) -> list:
        v = [0] * n
        for i, c in self.counts:
            v[i] = c
        return v

    def __str__(self):
        return "{" + ",".join(str(i + 1) for i in self.items) + "}"


@dataclass(frozen=True)
class PatternMatrix:
    """Pattern columns over an instance; row i of the matrix is item type i."""

    instance: PackingInstance
    columns: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(self.columns))

    @property
    def n_rows(self) -> int:
        return self.instance.n

    @property
    def n_cols(self) -> int:
        return len(self.columns)

    def entries(self) -> list:
        rows = [[0] * self.n_cols for _ in range(self.n_rows)]
        for j, p in enumerate(self.columns):
            for i, c in p.counts:
                rows[i][j] = c
        return rows

    def coverage(self, values: Sequence) -> list:
        """The product B·values, one entry per item type."""
        cov = [Fraction(0)] * self.n_rows
        for p, v in zip(self.columns, values):
            if v:
                for i, c in p.counts:
                    cov[i] += c * v
        return cov

    def restrict(self, indices: Iterable[int]) -> "PatternMatrix":
        return PatternMatrix(self.instance, tuple(self.columns[j] for j in indices))


@dataclass(frozen=True)
class SolutionVector:
    values: tuple
    kind: str = FRACTIONAL

    def __post_init__(self):
        object.__setattr__(self, "values", _tuple_of_fractions(self.values))

    def support(self) -> tuple:
        return tuple(j for j, v in enumerate(self.values) if v > 0)

    def total(self) -> Fraction:
        return sum(self.values, Fraction(0))

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class KMonotoneMatrix:
    """Integer matrix, entries in 0..k, columns non-decreasing downwards."""

    entries: tuple
    k: int

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(tuple(int(v) for v in r) for r in self.entries))

    @property
    def n_rows(self) -> int:
        return len(self.entries)

    @property
    def n_cols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self.entries)


@dataclass(frozen=True)
class PermutationFamily:
    """k permutations of the symbols 0..n-1; ``perms[i][t]`` is the (t+1)-th symbol."""

    n: int
    perms: tuple

    def __post_init__(self):
        object.__setattr__(self, "perms", tuple(tuple(int(s) for s in p) for p in self.perms))

    @property
    def k(self) -> int:
        return len(self.perms)


@dataclass(frozen=True)
class Coloring:
    """Odd integer color per symbol; standard colorings use only -1 and +1."""

    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))

    @classmethod
    def from_rounding(cls, x: Sequence[int]) -> "Coloring":
        return cls(tuple(2 * int(v) - 1 for v in x))

    def is_standard(self) -> bool:
        return all(v in (-1, 1) for v in self.values)

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class RoundingOutcome:
    """Integral packing produced from a fractional solution.

    ``assignment[o]`` is the item type whose slot holds occurrence ``o`` of
    the expanded instance, or ``None`` if the occurrence is discarded. Slots
    of item type 0 include the ``extra_bins`` singleton bins.
    """

    instance: PackingInstance
    matrix: PatternMatrix
    x: SolutionVector
    extra_bins: int
    discards: tuple
    assignment: tuple
    achieved_disc: Fraction
    total_bins: int
    opt_f: Optional[Fraction] = None
    k: Optional[int] = None
    trace: Optional[dict] = field(default=None, compare=False)

    def slot_counts(self) -> list:
        slots = [int(v) for v in self.matrix.coverage(self.x.values)]
        if slots:
            slots[0] += self.extra_bins
        return slots


# -- validation -------------------------------------------------------------

def _validate_instance(inst: PackingInstance) -> list:
    out = []
    for i, s in enumerate(inst.sizes):
        if not 0 < s <= 1:
            out.append(f"size of item {i + 1} not in (0,1]: {s}")
    if any(inst.sizes[i] < inst.sizes[i + 1] for i in range(len(inst.sizes) - 1)):
        out.append("sizes not sorted non-increasing")
    if len(inst.multiplicities) != len(inst.sizes):
        out.append("multiplicities length differs from sizes length")
    for i, m in enumerate(inst.multiplicities):
        if m <= 0:
            out.append(f"multiplicity of item {i + 1} not positive: {m}")
    return out


def _validate_pattern(p: Pattern, inst: Optional[PackingInstance], where="pattern") -> list:
    out = []
    if inst is None:
        return out
    for i, c in p.counts:
        if not 0 <= i < inst.n:
            out.append(f"{where} references unknown item {i + 1}")
            return out
    load = p.size(inst)
    if load > 1:
        out.append(f"{where} exceeds capacity: {load} > 1")
    return out


def _validate_kmonotone(a: KMonotoneMatrix) -> list:
    out = []
    if a.k <= 0:
        out.append(f"k not positive: {a.k}")
    widths = {len(r) for r in a.entries}
    if len(widths) > 1:
        out.append("rows have different lengths")
        return out
    for i, row in enumerate(a.entries):
        for j, v in enumerate(row):
            if not 0 <= v <= a.k:
                out.append(f"entry ({i + 1},{j + 1}) = {v} outside 0..{a.k}")
    for i in range(a.n_rows - 1):
        for j in range(a.n_cols):
            if a.entries[i][j] > a.entries[i + 1][j]:
                out.append(f"column {j + 1} decreases at row {i + 2}")
    return out


def _validate_family(f: PermutationFamily) -> list:
    out = []
    if f.n <= 0:
        out.append(f"n not positive: {f.n}")
    for i, p in enumerate(f.perms):
        if sorted(p) != list(range(f.n)):
            out.append(f"permutation {i + 1} is not a bijection on [{f.n}]")
    return out


def _validate_outcome(o: RoundingOutcome) -> list:
    out = []
    if o.x.kind != INTEGRAL or any(v.denominator != 1 or v < 0 for v in o.x.values):
        out.append("x is not a nonnegative integral vector")
        return out
    if o.extra_bins < 0:
        out.append(f"extraBins negative: {o.extra_bins}")
    types = o.instance.occurrence_types()
    if len(o.assignment) != len(types):
        out.append("assignment length differs from item occurrence count")
        return out
    used = Counter()
    for occ, slot in enumerate(o.assignment):
        if slot is None:
            continue
        if slot > types[occ]:
            out.append(f"slot larger than item index: occurrence {occ + 1} of item "
                       f"{types[occ] + 1} placed in slot of item {slot + 1}")
        used[slot] += 1
    slots = o.slot_counts()
    for j, c in sorted(used.items()):
        cap = slots[j] if j < len(slots) else 0
        if c > cap:
            out.append(f"slot capacity of item {j + 1} exceeded: {c} > {cap}")
    if o.total_bins != int(o.x.total()) + o.extra_bins:
        out.append(f"totalBins {o.total_bins} != 1'x + extraBins")
    discarded = {occ for occ, slot in enumerate(o.assignment) if slot is None}
    if discarded != set(o.discards):
        out.append("discards disagree with unassigned occurrences")
    return out


def validate(obj, instance: Optional[PackingInstance] = None) -> list:
    """List the violated invariants of ``obj``; empty when it is valid.

    ``instance`` is needed only to check a bare :class:`Pattern`.
    """
    if isinstance(obj, PackingInstance):
        return _validate_instance(obj)
    if isinstance(obj, Pattern):
        return _validate_pattern(obj, instance)
    if isinstance(obj, PatternMatrix):
        out = _validate_instance(obj.instance)
        for j, p in enumerate(obj.columns):
            out += _validate_pattern(p, obj.instance, f"column {j + 1}")
        return out
    if isinstance(obj, SolutionVector):
        out = [f"value {j + 1} negative: {v}" for j, v in enumerate(obj.values) if v < 0]
        if obj.kind not in (FRACTIONAL, INTEGRAL):
            out.append(f"unknown kind {obj.kind!r}")
        elif obj.kind == INTEGRAL:
            out += [f"value {j + 1} not integral: {v}" for j, v in enumerate(obj.values)
                    if v.denominator != 1]
        return out
    if isinstance(obj, KMonotoneMatrix):
        return _validate_kmonotone(obj)
    if isinstance(obj, PermutationFamily):
        return _validate_family(obj)
    if isinstance(obj, Coloring):
        return [f"color of symbol {i + 1} not odd: {v}" for i, v in enumerate(obj.values) if v % 2 == 0]
    if isinstance(obj, RoundingOutcome):
        return _validate_outcome(obj)
    return [f"unsupported type {type(obj).__name__}"]
