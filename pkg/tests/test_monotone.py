import random
from fractions import Fraction

import pytest

from gapforge.generators import random_kmonotone, random_unit_vector
from gapforge.linalg import matvec
from gapforge.model import KMonotoneMatrix, PackingInstance, Pattern, PatternMatrix, validate
from gapforge.monotone import (
    build_cumulative,
    discrepancy_of,
    lindisc_round,
    log_bound_holds,
    purify_to_vertex,
    replay,
)
from gapforge.oracle import exact_lindisc_at

F = Fraction


def test_cumulative_prefix_sums_and_last_row():
    inst = PackingInstance((F(1, 3),) * 3)
    m = PatternMatrix(inst, (Pattern.of([0, 1]), Pattern.of([1, 2])))
    assert build_cumulative(m, 2).base.entries == ((1, 0), (2, 1), (2, 2), (2, 2))


def test_cumulative_single_column():
    m = PatternMatrix(PackingInstance((F(1),)), (Pattern.of([0]),))
    assert build_cumulative(m, 1).base.entries == ((1,), (1,))


def test_cumulative_rejects_oversized_column():
    m = PatternMatrix(PackingInstance((F(1, 4),) * 3), (Pattern.of([0, 1, 2]),))
    with pytest.raises(ValueError, match="k = 2"):
        build_cumulative(m, 2)


@pytest.mark.parametrize("seed", range(5))
def test_cumulative_random_recomputed(seed):
    rng = random.Random(seed)
    inst = PackingInstance((F(1, 4),) * 6)
    cols = tuple(Pattern.of(rng.sample(range(6), rng.randint(0, 3))) for _ in range(5))
    cum = build_cumulative(PatternMatrix(inst, cols), 3).base
    assert validate(cum) == []
    for i in range(6):
        assert cum.entries[i] == tuple(sum(p.count(r) for r in range(i + 1)) for p in cols)


def test_log_bound_exact_edges():
    # 5 * log2(4) = 10 exactly
    assert log_bound_holds(10, 5, 4)
    assert not log_bound_holds(F(10000001, 1000000), 5, 4)
    # log2(3) = 1.58496...
    assert log_bound_holds(F(158496, 100000), 1, 3)
    assert not log_bound_holds(F(158497, 100000), 1, 3)
    assert log_bound_holds(0, 1, 1)
    assert not log_bound_holds(F(1, 10**6), 1, 1)


def test_single_entry_matrix():
    a = KMonotoneMatrix(((3,),), 3)
    x, trace = lindisc_round(a, [F(1, 2)])
    assert x == [0]
    assert trace.achieved == F(3, 2)
    assert trace.bound_coefficient == 15 and trace.bound_argument == 2


def test_integral_y_is_fixed():
    a = KMonotoneMatrix(((0, 1, 1), (1, 2, 2)), 2)
    x, trace = lindisc_round(a, [1, 0, 1])
    assert x == [1, 0, 1]
    assert trace.achieved == 0
    assert trace.steps == [{"op": "fix-columns", "indices": [0, 1, 2], "values": [1, 0, 1]}]


def test_purify_vertex_is_kept():
    assert purify_to_vertex([[1, 0], [0, 1]], [F(1, 2), F(1, 3)]) == [F(1, 2), F(1, 3)]


def test_purify_single_constraint():
    y = purify_to_vertex([[1, 1]], [F(1, 2), F(1, 2)])
    assert y in ([1, 0], [0, 1])


@pytest.mark.parametrize("seed", range(10))
def test_purify_random(seed):
    rng = random.Random(seed)
    a = [[rng.randint(-2, 3) for _ in range(6)] for _ in range(3)]
    y = [F(rng.randint(1, 11), 12) for _ in range(6)]
    out = purify_to_vertex(a, y)
    assert matvec(a, out) == matvec(a, y)
    assert all(0 <= v <= 1 for v in out)
    assert sum(1 for v in out if 0 < v < 1) <= 3


@pytest.mark.parametrize("seed", range(25))
def test_rounding_replays_and_respects_oracle(seed):
    rng = random.Random(seed)
    k = rng.randint(1, 3)
    a = random_kmonotone(rng, rng.randint(1, 10), rng.randint(1, 10), k)
    y = random_unit_vector(rng, a.n_cols)
    x, trace = lindisc_round(a, y)
    assert replay(trace, a.n_cols) == x
    assert discrepancy_of(a, x, y) == trace.achieved
    assert exact_lindisc_at(a.entries, y)[0] <= trace.achieved
    assert trace.within_bound
    assert lindisc_round(a, y) == (x, trace)


def test_trace_document_is_one_based():
    a = KMonotoneMatrix(((1, 1), (2, 2)), 2)
    _, trace = lindisc_round(a, [F(1, 2), 1])
    doc = trace.to_doc()
    assert doc["steps"][0] == {"op": "fix-columns", "indices": [2], "values": [1]}
    assert doc["bound"] == {"coefficient": 10, "log2Of": 4}


def test_rejects_y_outside_cube():
    with pytest.raises(ValueError):
        lindisc_round(KMonotoneMatrix(((1,),), 1), [F(3, 2)])
