import itertools
import random
from fractions import Fraction

import pytest

from gapforge.generators import random_family, random_kmonotone
from gapforge.model import Coloring, KMonotoneMatrix, PackingInstance, Pattern, PatternMatrix, PermutationFamily, validate
from gapforge.monotone import build_cumulative, discrepancy_of, lindisc_round
from gapforge.oracle import exact_perm_disc
from gapforge.permutations import (
    coloring_from_rounding,
    concat_string,
    concat_to_matrix,
    decompose,
    interval_discrepancy_bound,
    prefix_discrepancy,
    transfer_coloring,
)

F = Fraction
HALF = F(1, 2)


def test_decompose_small():
    dec = decompose(KMonotoneMatrix(((1, 0), (2, 1)), 2))
    assert dec.layers == (((1, 0), (1, 1)), ((0, 0), (1, 0)))
    assert dec.perms.perms == ((0, 1), (0, 1))


def test_decompose_zero_matrix():
    dec = decompose(KMonotoneMatrix(((0, 0, 0),) * 2, 2))
    assert all(v == 0 for layer in dec.layers for r in layer for v in r)
    assert dec.perms.perms == ((0, 1, 2), (0, 1, 2))


@pytest.mark.parametrize("seed", range(8))
def test_decompose_random_sums_back(seed):
    b = random_kmonotone(random.Random(seed), 10, 6, 3)
    dec = decompose(b)
    for i in range(10):
        for j in range(6):
            assert sum(layer[i][j] for layer in dec.layers) == b.entries[i][j]
    for layer, perm in zip(dec.layers, dec.perms.perms):
        assert validate(KMonotoneMatrix(layer, 1)) == []
        cols = [tuple(r[j] for r in layer) for j in perm]
        # sorted so that each column dominates the next componentwise
        assert all(all(u >= v for u, v in zip(cols[t], cols[t + 1])) for t in range(len(cols) - 1))


def test_transfer_alternating_on_identity_layers():
    b = KMonotoneMatrix(((0, 0, 0, 1), (0, 0, 1, 1), (0, 1, 1, 1), (1, 1, 1, 1)), 1)
    cert = transfer_coloring(decompose(b), Coloring((1, -1, 1, -1)))
    assert all(v <= 1 for v in cert.layer_norms)
    assert cert.holds


def test_transfer_zero_matrix():
    cert = transfer_coloring(decompose(KMonotoneMatrix(((0, 0),), 2)), Coloring((1, -1)))
    assert cert.norm == 0


@pytest.mark.parametrize("seed", range(6))
def test_transfer_with_best_permutation_coloring(seed):
    rng = random.Random(seed)
    k = rng.randint(1, 3)
    b = random_kmonotone(rng, 6, 7, k)
    dec = decompose(b)
    value, chi = exact_perm_disc(dec.perms)
    cert = transfer_coloring(dec, chi)
    assert cert.norm <= k * value


def test_concat_examples():
    assert concat_to_matrix(PermutationFamily(2, ((1, 0),))).entries == ((0, 1), (1, 1))
    assert concat_to_matrix(PermutationFamily(2, ((0, 1), (0, 1)))).entries == ((1, 0), (1, 1), (2, 1), (2, 2))


@pytest.mark.parametrize("seed", range(5))
def test_concat_random_is_kmonotone(seed):
    fam = random_family(random.Random(seed), 8, 3)
    c = concat_to_matrix(fam)
    assert validate(c) == []
    assert c.entries[-1] == (3,) * 8
    for j in range(8):
        assert sum(1 for s in concat_string(fam).symbols if s == j) == 3


def test_concat_matches_cumulative_of_singletons():
    fam = PermutationFamily(3, ((2, 0, 1), (1, 2, 0)))
    sigma = concat_string(fam).symbols
    inst = PackingInstance((F(1, 6),) * len(sigma))
    cols = tuple(Pattern.of([t for t, s in enumerate(sigma) if s == j]) for j in range(3))
    cum = build_cumulative(PatternMatrix(inst, cols), 2).base
    assert cum.entries[:-1] == concat_to_matrix(fam).entries


def test_rounding_coloring_all_ones():
    res = coloring_from_rounding(PermutationFamily(2, ((0, 1),)), [1, 1])
    assert res.coloring.values == (1, 1)
    assert res.max_prefix_disc == 2


def test_rounding_coloring_alternating():
    res = coloring_from_rounding(PermutationFamily(6, (tuple(range(6)),)), [1, 0] * 3)
    assert res.max_prefix_disc <= 1


@pytest.mark.parametrize("seed", range(6))
def test_rounding_of_half_vector(seed):
    fam = random_family(random.Random(seed), 9, 3)
    c = concat_to_matrix(fam)
    x, _ = lindisc_round(c, [HALF] * 9)
    res = coloring_from_rounding(fam, x)
    assert res.rounding_error == discrepancy_of(c, x, [HALF] * 9)
    assert res.max_prefix_disc <= 4 * res.rounding_error


def test_prefix_discrepancy_examples():
    ident = PermutationFamily(4, ((0, 1, 2, 3),))
    assert prefix_discrepancy(ident, Coloring((1, -1, 1, -1))) == 1
    fam = PermutationFamily(5, ((4, 2, 0, 1, 3),))
    assert prefix_discrepancy(fam, Coloring((1,) * 5)) == 5
    assert interval_discrepancy_bound(3) == 6


@pytest.mark.parametrize("seed", range(3))
def test_prefix_discrepancy_exhaustive_matches_oracle(seed):
    fam = random_family(random.Random(seed), 10, 3)
    best = min(prefix_discrepancy(fam, Coloring(chi)) for chi in itertools.product((-1, 1), repeat=10))
    assert exact_perm_disc(fam)[0] == best
