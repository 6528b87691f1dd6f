"""Exact configuration-LP rounding for bin packing via monotone-matrix discrepancy."""

from .errors import (
    GapforgeError,
    InfeasibleError,
    InvariantError,
    NotRoundingUpError,
    ParseError,
    ResourceLimitError,
)
from .lowerbound import (
    build_general_instance,
    build_large_items_instance,
    build_sigma,
    certify_gap,
    certify_gap_general,
)
from .lp import enumerate_patterns, normalize_to_equality, solve_lp, split_integral_part
from .model import (
    Coloring,
    KMonotoneMatrix,
    PackingInstance,
    Pattern,
    PatternMatrix,
    PermutationFamily,
    RoundingOutcome,
    SolutionVector,
    validate,
)
from .monotone import build_cumulative, lindisc_round, purify_to_vertex
from .oracle import (
    exact_disc,
    exact_lindisc_at,
    exact_opt,
    exact_perm_disc,
    find_high_disc_perms,
    first_fit_decreasing,
    min_rounding_gap,
)
from .permutations import coloring_from_rounding, concat_to_matrix, decompose, prefix_discrepancy, transfer_coloring
from .pipeline import assign_slots, greedy_discard_bins, round_packing, verify_packing
from .serialize import parse, serialize

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
