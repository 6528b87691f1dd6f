"""Reductions between k-monotone matrices and families of k permutations.

Thresholding a k-monotone matrix at levels ``1..k`` gives k 1-monotone
layers, each of which is the prefix incidence matrix of a permutation of
the columns. In the other direction, concatenating k permutations and
counting symbol occurrences in every prefix gives a ``kn x n`` k-monotone
matrix whose roundings yield low-discrepancy colorings.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .model import Coloring, KMonotoneMatrix, PermutationFamily, validate

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class ThresholdDecomposition:
    source: KMonotoneMatrix
    layers: tuple
    perms: PermutationFamily


@dataclass(frozen=True)
class SymbolString:
    """Finite sequence over 0..n-1."""

    symbols: tuple
    n: int

    def prefix(self, length: int) -> tuple:
        return self.symbols[:length]

    def __len__(self):
        return len(self.symbols)


@dataclass(frozen=True)
class TransferCertificate:
    norm: int
    layer_norms: tuple
    holds: bool


@dataclass(frozen=True)
class PrefixColoring:
    coloring: Coloring
    max_prefix_disc: int
    rounding_error: Fraction


def _check(obj):
    problems = validate(obj)
    if problems:
        raise ValueError("; ".join(problems))


def decompose(b: KMonotoneMatrix) -> ThresholdDecomposition:
    """Threshold layers ``[B >= l]`` and the column order each one induces.

    Layer ``l``'s permutation lists columns by the row of their first 1,
    ascending; all-zero columns go last; ties keep column order.
    """
    _check(b)
    rows, cols = b.n_rows, b.n_cols
    layers, perms = [], []
    for level in range(1, b.k + 1):
        layer = tuple(tuple(int(v >= level) for v in r) for r in b.entries)
        first = [next((i for i in range(rows) if layer[i][j]), rows) for j in range(cols)]
        perms.append(tuple(sorted(range(cols), key=lambda j: (first[j], j))))
        layers.append(layer)
    return ThresholdDecomposition(b, tuple(layers), PermutationFamily(cols, tuple(perms)))


def _inf_norm_times(matrix, chi):
    return max((abs(sum(a * c for a, c in zip(r, chi))) for r in matrix), default=0)


def transfer_coloring(dec: ThresholdDecomposition, chi: Coloring) -> TransferCertificate:
    """``||B chi||_inf`` with the per-layer norms bounding it by the triangle inequality."""
    if not chi.is_standard() or len(chi) != dec.source.n_cols:
        raise ValueError("chi must be a +-1 coloring of the columns")
    norm = _inf_norm_times(dec.source.entries, chi.values)
    layer_norms = tuple(_inf_norm_times(layer, chi.values) for layer in dec.layers)
    holds = norm <= sum(layer_norms)
    assert holds, "triangle inequality over layers failed"
    return TransferCertificate(norm, layer_norms, holds)


def concat_string(family: PermutationFamily) -> SymbolString:
    return SymbolString(tuple(s for p in family.perms for s in p), family.n)


def concat_to_matrix(family: PermutationFamily) -> KMonotoneMatrix:
    """Row ``i`` counts each symbol among the first ``i`` entries of the concatenation."""
    _check(family)
    counts = [0] * family.n
    rows = []
    for s in concat_string(family).symbols:
        counts[s] += 1
        rows.append(tuple(counts))
    return KMonotoneMatrix(tuple(rows), family.k)


def prefix_discrepancy(family: PermutationFamily, chi: Coloring) -> int:
    """Largest ``|chi(prefix)|`` over all prefixes of all permutations."""
    worst = 0
    for p in family.perms:
        run = 0
        for s in p:
            run += chi.values[s]
            worst = max(worst, abs(run))
    return worst


def coloring_from_rounding(family: PermutationFamily, x) -> PrefixColoring:
    """Color ``+1`` where ``x = 1`` and ``-1`` elsewhere, certifying the prefix bound.

    Every prefix ``S`` of permutation ``i`` satisfies
    ``|chi(S)| <= 2(|r(x-y)| + |k1(x-y)|) <= 4 ||Cx - Cy||_inf`` with
    ``y = 1/2`` and ``r`` the row of ``C`` ending at that prefix.
    """
    x = [int(v) for v in x]
    if any(v not in (0, 1) for v in x) or len(x) != family.n:
        raise ValueError("x must be a 0/1 vector over the symbols")
    c = concat_to_matrix(family)
    diff = [v - HALF for v in x]
    row_err = [abs(sum((a * d for a, d in zip(r, diff)), Fraction(0))) for r in c.entries]
    err = max(row_err, default=Fraction(0))
    last = abs(family.k * sum(diff, Fraction(0)))
    chi = Coloring.from_rounding(x)
    n = family.n
    for i, p in enumerate(family.perms):
        run = 0
        for t, s in enumerate(p):
            run += chi.values[s]
            r = row_err[i * n + t]
            assert abs(run) <= 2 * (r + last) <= 4 * err, "prefix bound chain failed"
    return PrefixColoring(chi, prefix_discrepancy(family, chi), err)


def interval_discrepancy_bound(prefix_disc: int) -> int:
    """Upper bound for interval discrepancy: an interval is a difference of two prefixes."""
    return 2 * prefix_disc
