"""Randomized invariants driven by hypothesis."""

from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from gapforge.linalg import matvec
from gapforge.lowerbound import build_large_items_instance, build_sigma, certify_gap
from gapforge.model import (
    Coloring,
    KMonotoneMatrix,
    PackingInstance,
    Pattern,
    PatternMatrix,
    PermutationFamily,
    SolutionVector,
    validate,
)
from gapforge.monotone import lindisc_round, purify_to_vertex, replay
from gapforge.oracle import exact_lindisc_at
from gapforge.permutations import decompose
from gapforge.pipeline import assign_slots
from gapforge.serialize import parse, serialize

rationals = st.fractions(min_value=-10, max_value=10, max_denominator=50)
unit_sizes = st.fractions(min_value=Fraction(1, 100), max_value=1, max_denominator=100)


@st.composite
def kmonotone(draw, max_rows=8, max_cols=8, max_k=3):
    k = draw(st.integers(1, max_k))
    rows = draw(st.integers(1, max_rows))
    cols = draw(st.integers(1, max_cols))
    columns = [sorted(draw(st.lists(st.integers(0, k), min_size=rows, max_size=rows))) for _ in range(cols)]
    return KMonotoneMatrix(tuple(tuple(c[i] for c in columns) for i in range(rows)), k)


@st.composite
def families(draw, max_n=7, max_k=3):
    n = draw(st.integers(1, max_n))
    perms = draw(st.lists(st.permutations(range(n)), min_size=1, max_size=max_k))
    return PermutationFamily(n, tuple(tuple(p) for p in perms))


@given(rationals, rationals)
def test_field_identities(a, b):
    assert (a + b) - b == a
    if b:
        assert (a * b) / b == a


@given(st.lists(unit_sizes, min_size=1, max_size=8), st.data())
def test_instance_round_trip(sizes, data):
    mult = data.draw(st.lists(st.integers(1, 4), min_size=len(sizes), max_size=len(sizes)))
    inst = PackingInstance.from_sizes(sizes, mult, label="h")
    assert validate(inst) == []
    assert parse(serialize(inst)) == inst


@given(kmonotone())
def test_matrix_round_trip(a):
    assert parse(serialize(a)) == a


@given(families())
def test_family_round_trip(f):
    assert parse(serialize(f)) == f


@given(st.lists(st.integers(-5, 5).map(lambda v: 2 * v + 1), min_size=1, max_size=8))
def test_coloring_round_trip(values):
    assert parse(serialize(Coloring(tuple(values)))) == Coloring(tuple(values))


@given(st.lists(st.lists(st.integers(-3, 5), max_size=4), max_size=4), st.integers(-1, 4))
def test_validate_is_total(rows, k):
    validate(KMonotoneMatrix(tuple(tuple(r) for r in rows), k))
    validate(PermutationFamily(max(k, 0), tuple(tuple(r) for r in rows)))


@given(kmonotone(), st.data())
@settings(max_examples=60)
def test_rounding_sandwich_and_replay(a, data):
    y = data.draw(st.lists(st.fractions(0, 1, max_denominator=9), min_size=a.n_cols, max_size=a.n_cols))
    x, trace = lindisc_round(a, y)
    assert trace.within_bound
    assert exact_lindisc_at(a.entries, y)[0] <= trace.achieved
    assert replay(trace, a.n_cols) == x


@given(kmonotone(max_rows=10, max_cols=6))
def test_threshold_layers_sum_back(b):
    dec = decompose(b)
    for i, row in enumerate(b.entries):
        assert tuple(sum(layer[i][j] for layer in dec.layers) for j in range(b.n_cols)) == row


@given(st.lists(st.lists(st.integers(-2, 2), min_size=5, max_size=5), min_size=1, max_size=3),
       st.lists(st.fractions(0, 1, max_denominator=7), min_size=5, max_size=5))
def test_purify_preserves_products(a, y):
    out = purify_to_vertex(a, y)
    assert matvec(a, out) == matvec(a, y)
    assert sum(1 for v in out if 0 < v < 1) <= len(a)


@given(st.lists(st.integers(1, 3), min_size=1, max_size=6), st.data())
def test_assignment_iff_prefix_condition(mult, data):
    n = len(mult)
    inst = PackingInstance(tuple(Fraction(1, 2 + i) for i in range(n)), tuple(mult))
    slots = data.draw(st.lists(st.integers(0, 4), min_size=n, max_size=n))
    prefix_ok = all(sum(slots[:i + 1]) >= sum(mult[:i + 1]) for i in range(n))
    assert assign_slots(inst, slots).ok == prefix_ok


_LB = build_large_items_instance(build_sigma(PermutationFamily(5, ((0, 1, 2, 3, 4), (4, 3, 2, 1, 0), (1, 3, 0, 4, 2)))))


@given(st.lists(st.integers(0, 3), min_size=6, max_size=6),
       st.lists(st.integers(0, 8), max_size=3, unique=True))
def test_certifier_identities_hold_for_any_candidate(x, d):
    cert = certify_gap(_LB, x, d)
    assert validate(cert.coloring) == []
    assert all(v >= -1 for v in cert.coloring.values)
    assert cert.gap == sum(x) + 2 * sum(_LB.instance.sizes[i] for i in d) - 3


@given(st.lists(st.integers(0, 2), min_size=2, max_size=5))
def test_solution_vector_support(values):
    sol = SolutionVector(tuple(values))
    assert sol.support() == tuple(j for j, v in enumerate(values) if v)
    m = PatternMatrix(PackingInstance((Fraction(1, 2),)), tuple(Pattern.of([0]) for _ in values))
    assert m.coverage(values) == [sum(values)]
