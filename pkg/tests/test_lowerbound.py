import itertools
import random
from fractions import Fraction

import pytest

from gapforge.errors import NotRoundingUpError
from gapforge.generators import random_family
from gapforge.lowerbound import (
    build_general_instance,
    build_large_items_instance,
    build_sigma,
    certify_gap,
    certify_gap_general,
    check_general,
    check_large_items,
    default_groups,
)
from gapforge.lp import solve_lp
from gapforge.model import PermutationFamily
from gapforge.oracle import find_high_disc_perms, min_rounding_gap
from gapforge.pipeline import prefix_shortfall

F = Fraction
IDENTITY3 = PermutationFamily(3, ((0, 1, 2),) * 3)


def _identity_artifacts():
    return build_large_items_instance(build_sigma(IDENTITY3))


def test_sigma_from_identities():
    sigma = build_sigma(IDENTITY3)
    assert [s + 1 for s in sigma.symbols] == [1, 2, 3, 1, 2, 3, 1, 2, 3, 4, 4, 4]


def test_sigma_needs_odd_length():
    with pytest.raises(ValueError, match="odd"):
        build_sigma(PermutationFamily(4, (tuple(range(4)),) * 3))


def test_sigma_needs_three_permutations():
    with pytest.raises(ValueError):
        build_sigma(PermutationFamily(3, ((0, 1, 2),) * 2))


@pytest.mark.parametrize("seed", range(4))
def test_sigma_histogram(seed):
    sigma = build_sigma(random_family(random.Random(seed), 7, 3))
    assert sorted(sigma.symbols) == sorted(list(range(8)) * 3)


def test_sigma_from_search_has_even_length():
    fam, _ = find_high_disc_perms(9)
    assert len(build_sigma(fam)) == 30


def test_identity_instance_shape():
    art = _identity_artifacts()
    b = art.matrix.entries()
    assert len(b) == 6 and len(b[0]) == 4
    assert all(sum(r) == 2 for r in b)
    assert all(sum(r[j] for r in b) == 3 for j in range(4))
    assert art.matrix.coverage(art.y.values) == [1] * 6
    assert check_large_items(art) == []


def test_sizes_strictly_between_quarter_and_third():
    art = build_large_items_instance(build_sigma(random_family(random.Random(1), 11, 3)))
    assert all(F(1, 4) < s < F(1, 3) for s in art.instance.sizes)


def test_half_solution_is_lp_optimal():
    art = build_large_items_instance(build_sigma(find_high_disc_perms(5)[0]))
    assert solve_lp(art.matrix).objective == F(art.n, 2)


def test_all_ones_candidate():
    art = _identity_artifacts()
    cert = certify_gap(art, [1] * 4)
    assert cert.coloring.values == (1,) * 4
    assert cert.gap == 2
    assert cert.coverage_violations == ()
    assert cert.feasible


def test_all_discarded_candidate():
    art = _identity_artifacts()
    cert = certify_gap(art, [0] * 4, range(6))
    assert cert.coloring.values == (-1,) * 4
    assert cert.gap == 2 * art.instance.total_size - 2
    assert cert.gap > 0


def test_violation_names_prefix():
    art = _identity_artifacts()
    cert = certify_gap(art, [0, 0, 0, 1])
    assert cert.coverage_violations[0] == 1
    assert cert.worst_prefix == (8, -8)
    assert not cert.feasible


def test_rejects_non_integral_candidate():
    with pytest.raises(NotRoundingUpError):
        certify_gap(_identity_artifacts(), [F(1, 2)] * 4)
    with pytest.raises(NotRoundingUpError):
        certify_gap(_identity_artifacts(), [1, 1, 1])


def test_rejects_repeated_unit_discard():
    with pytest.raises(NotRoundingUpError):
        certify_gap(_identity_artifacts(), [1] * 4, [0, 0])


def test_certifier_matches_oracle_on_identity():
    art = _identity_artifacts()
    options = [d for r in range(3) for d in itertools.combinations(range(6), r)]
    best = min(certify_gap(art, x, d).gap for x in itertools.product(range(3), repeat=4)
               for d in options if certify_gap(art, x, d).feasible)
    assert min_rounding_gap(art.matrix, art.y.values, 2, 2)[0] == best


@pytest.mark.parametrize("seed", range(5))
def test_certifier_completeness(seed):
    rng = random.Random(seed)
    art = build_large_items_instance(build_sigma(random_family(rng, 5, 3)))
    for _ in range(40):
        x = [rng.randint(0, 2) for _ in range(6)]
        d = sorted(rng.sample(range(9), rng.randint(0, 3)))
        cert = certify_gap(art, x, d)
        slots = [int(c) for c in art.matrix.coverage(x)]
        assert cert.feasible == (prefix_shortfall(art.instance, slots, d) is None
                                 and not cert.coverage_violations)


def test_general_single_group_matches_base():
    base = _identity_artifacts()
    gen = build_general_instance(base, 1)
    assert gen.matrix.columns == base.matrix.columns
    assert gen.instance.sizes == tuple(F(1, 3) - F(i + 1, 12 * 64) for i in range(6))


def test_general_two_groups_shape():
    gen = build_general_instance(_identity_artifacts(), 2)
    c = gen.matrix.entries()
    assert len(c) == 12 and len(c[0]) == 8
    assert {v for r in c[6:] for v in r[4:]} <= {0, 2, 4}
    assert all(v == 0 for r in c[6:] for v in r[:4])
    assert all(v == 0 for r in c[:6] for v in r[4:])
    assert gen.rhs == (1,) * 6 + (2,) * 6


def test_default_groups_is_floor_log():
    assert [default_groups(n) for n in (2, 3, 4, 7, 8, 28, 64)] == [1, 1, 2, 2, 3, 4, 6]


def test_general_default_on_larger_input():
    base = build_large_items_instance(build_sigma(random_family(random.Random(2), 27, 3)))
    gen = build_general_instance(base)
    assert gen.groups == 4
    assert tuple(gen.matrix.coverage(gen.y.values)) == gen.rhs
    assert check_general(gen) == []


def test_general_all_up():
    gen = build_general_instance(_identity_artifacts(), 2)
    cert = certify_gap_general(gen, [1] * 8)
    assert [g.imbalance for g in cert.groups] == [2, 2]
    assert cert.gap == 4 and cert.feasible


def test_general_groups_are_independent():
    gen = build_general_instance(_identity_artifacts(), 2)
    one = certify_gap_general(gen, [1, 1, 1, 1, 1, 1, 1, 1])
    two = certify_gap_general(gen, [1, 1, 1, 1, 0, 0, 1, 0])
    assert one.groups[0] == two.groups[0]
    assert two.groups[1].imbalance == -1
    assert two.groups[1].local_violations


def test_general_min_gap_matches_certifier():
    gen = build_general_instance(_identity_artifacts(), 2)
    n_types = gen.instance.n
    options = [()] + [(i,) for i in range(n_types)]
    best = None
    for x in itertools.product(range(2), repeat=8):
        for d in options:
            cert = certify_gap_general(gen, x, d)
            if cert.feasible and (best is None or cert.gap < best):
                best = cert.gap
    assert min_rounding_gap(gen.matrix, gen.y.values, 1, 1)[0] == best
