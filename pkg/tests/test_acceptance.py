"""The nine acceptance criteria, each checked with exact arithmetic and zero tolerance.

Every criterion prints one PASS/FAIL line in the terminal summary.
"""

import itertools
import random
import time
from fractions import Fraction

import pytest

from gapforge.generators import random_family, random_kmonotone, random_three_partition, random_unit_vector
from gapforge.lowerbound import build_general_instance, build_large_items_instance, build_sigma, certify_gap
from gapforge.lp import enumerate_patterns, solve_lp
from gapforge.model import PackingInstance
from gapforge.monotone import discrepancy_of, lindisc_round, log_bound_holds
from gapforge.oracle import (
    certify_lp_optimum,
    exact_disc,
    exact_lindisc_at,
    exact_opt,
    exact_perm_disc,
    find_high_disc_perms,
    first_fit_decreasing,
    min_rounding_gap,
)
from gapforge.permutations import coloring_from_rounding, concat_to_matrix, decompose
from gapforge.pipeline import round_packing, verify_packing

F = Fraction
HALF = F(1, 2)


@pytest.mark.criterion(1, "recursive rounding sandwiched between exhaustive optimum and 5k log2(2 min(n,m))")
def test_rounding_sandwich():
    rng = random.Random(20241)
    start = time.perf_counter()
    for _ in range(1000):
        k = rng.randint(1, 3)
        a = random_kmonotone(rng, rng.randint(1, 16), rng.randint(1, 16), k)
        y = random_unit_vector(rng, a.n_cols, rng.choice((2, 3, 7, 12)))
        x, trace = lindisc_round(a, y)
        achieved = discrepancy_of(a, x, y)
        assert achieved == trace.achieved
        assert exact_lindisc_at(a.entries, y)[0] <= achieved
        assert log_bound_holds(achieved, 5 * k, 2 * min(a.n_rows, a.n_cols))
    assert time.perf_counter() - start < 60


@pytest.mark.criterion(2, "pipeline clean with OPT_f <= OPT <= totalBins <= ceil(OPT_f + 4/3 delta)")
def test_pipeline_sandwich():
    rng = random.Random(20242)
    start = time.perf_counter()
    for case in range(200):
        inst = random_three_partition(rng, case % 8 + 1)
        out = round_packing(inst, 3)
        assert verify_packing(inst, out) == []
        bound = out.opt_f + F(4, 3) * out.achieved_disc
        assert out.total_bins <= -(-bound.numerator // bound.denominator)
        assert out.opt_f <= exact_opt(inst) <= out.total_bins
    assert time.perf_counter() - start < 120


@pytest.mark.criterion(3, "2 disc(B) <= k * prefix discrepancy of the threshold permutations")
def test_matrix_to_permutations():
    rng = random.Random(20243)
    for _ in range(200):
        k = rng.randint(1, 3)
        b = random_kmonotone(rng, rng.randint(1, 10), rng.randint(1, 10), k)
        disc, _ = exact_disc(b.entries)
        assert 2 * disc <= k * exact_perm_disc(decompose(b).perms)[0]


@pytest.mark.criterion(4, "prefix discrepancy <= 4 * rounding error of the concatenation matrix")
def test_permutations_to_matrix():
    rng = random.Random(20244)
    for _ in range(100):
        fam = random_family(rng, rng.randint(1, 10), 3)
        c = concat_to_matrix(fam)
        err, x = exact_lindisc_at(c.entries, [HALF] * fam.n)
        res = coloring_from_rounding(fam, x)
        assert res.rounding_error == err
        assert res.max_prefix_disc <= 4 * err
        assert exact_perm_disc(fam)[0] <= 4 * err


@pytest.mark.criterion(5, "lindisc of the 1x1 matrix (k) at y = 1/2 equals k/2")
def test_single_entry_witness():
    for k in range(1, 7):
        assert exact_lindisc_at([[k]], [HALF])[0] == F(k, 2)


@pytest.mark.criterion(6, "large-items instance: B y = 1, sizes in (1/4,1/3), paired prefix identity, FFD = n/2")
def test_large_items_structure():
    rng = random.Random(20246)
    for big_n in (5, 7, 9):
        fam, _ = find_high_disc_perms(big_n)
        art = build_large_items_instance(build_sigma(fam))
        n = art.n
        assert art.matrix.coverage(art.y.values) == [1] * (3 * n // 2)
        assert all(F(1, 4) < s < F(1, 3) for s in art.instance.sizes)
        b = art.matrix.entries()
        for _ in range(100):
            chi = [rng.choice((-1, 1)) for _ in range(n)]
            for q in range(1, 3 * n // 2 + 1):
                string_side = sum(chi[s] for s in art.sigma.symbols[:2 * q])
                matrix_side = sum(b[i][j] * chi[j] for i in range(q) for j in range(n))
                assert string_side == matrix_side
        assert first_fit_decreasing(art.instance) == n // 2 == art.y.total()


@pytest.mark.criterion(7, "exhaustive min rounding gap equals certifier minimum at N = 5")
def test_certifier_matches_oracle():
    fam, _ = find_high_disc_perms(5)
    art = build_large_items_instance(build_sigma(fam))
    start = time.perf_counter()
    gap, (x, d) = min_rounding_gap(art.matrix, art.y.values, x_cap=2, d_cap=3)
    items = art.instance.n
    options = [d for r in range(4) for d in itertools.combinations(range(items), r)]
    best = None
    for xv in itertools.product(range(3), repeat=art.n):
        for dv in options:
            cert = certify_gap(art, xv, dv)
            if cert.feasible and (best is None or cert.gap < best):
                best = cert.gap
    assert gap == best
    assert certify_gap(art, x, d).feasible and certify_gap(art, x, d).gap == gap
    assert time.perf_counter() - start < 600


@pytest.mark.criterion(8, "general instance: C y = b, feasible columns, contributions in [1/3 - 1/n, 1/3]")
def test_general_structure():
    rng = random.Random(20248)
    for big_n in range(3, 64, 2):
        base = build_large_items_instance(build_sigma(random_family(rng, big_n, 3)))
        gen = build_general_instance(base)
        n = base.n
        assert gen.groups == n.bit_length() - 1
        assert tuple(gen.matrix.coverage(gen.y.values)) == gen.rhs
        assert all(p.size(gen.instance) <= 1 for p in gen.matrix.columns)
        for s, m in zip(gen.instance.sizes, gen.instance.multiplicities):
            assert F(1, 3) - F(1, n) <= m * s <= F(1, 3)


@pytest.mark.criterion(9, "LP objective certified by an independent dual solve; support <= item count")
def test_lp_exactness():
    rng = random.Random(20249)
    for _ in range(50):
        count = rng.randint(1, 12)
        inst = PackingInstance.from_sizes([F(rng.randint(40, 240), 240) for _ in range(count)])
        matrix = enumerate_patterns(inst)
        res = solve_lp(matrix)
        value, certified = certify_lp_optimum(matrix, res.y.values)
        assert certified
        assert res.objective == value
        assert len(res.y.support()) <= inst.n
