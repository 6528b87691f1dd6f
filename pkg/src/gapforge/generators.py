"""Seeded random inputs shared by the report sweeps, the CLI and the tests."""

from __future__ import annotations

import random
from fractions import Fraction

from .model import KMonotoneMatrix, PackingInstance, PermutationFamily


def random_kmonotone(rng: random.Random, rows: int, cols: int, k: int) -> KMonotoneMatrix:
    """Each column is a sorted sample from ``0..k``, so it is nondecreasing."""
    columns = [sorted(rng.randint(0, k) for _ in range(rows)) for _ in range(cols)]
    return KMonotoneMatrix(tuple(tuple(c[i] for c in columns) for i in range(rows)), k)


def random_unit_vector(rng: random.Random, m: int, denominator: int = 12) -> list:
    """Rationals in ``[0, 1]`` with the given denominator, endpoints included."""
    return [Fraction(rng.randint(0, denominator), denominator) for _ in range(m)]


def random_three_partition(rng: random.Random, triples: int, denominator: int = 240) -> PackingInstance:
    """``3 * triples`` items with sizes strictly between 1/4 and 1/2."""
    lo, hi = denominator // 4 + 1, denominator // 2 - 1
    sizes = [Fraction(rng.randint(lo, hi), denominator) for _ in range(3 * triples)]
    return PackingInstance.from_sizes(sizes, label=f"3-partition t={triples}")


def random_family(rng: random.Random, n: int, k: int) -> PermutationFamily:
    return PermutationFamily(n, tuple(tuple(rng.sample(range(n), n)) for _ in range(k)))


def random_coloring(rng: random.Random, n: int) -> tuple:
    return tuple(rng.choice((-1, 1)) for _ in range(n))
