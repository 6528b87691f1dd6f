"""Command-line entry point: ``gapforge <subcommand> [options]``.

Results go to stdout (or ``--output``), diagnostics to stderr. Exit codes:
0 success, 1 a bound or feasibility violation was found, 2 usage or input
error, 3 a resource cap was exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import lowerbound, oracle, permutations
from .errors import GapforgeError, ParseError, ResourceLimitError
from .lp import enumerate_patterns, solve_lp, solve_lp_colgen
from .model import PatternMatrix
from .monotone import lindisc_round
from .pipeline import pack_bins, round_packing, verify_packing
from .serialize import (
    family_doc,
    format_rational,
    from_doc,
    load_json,
    matrix_doc,
    parse_coloring,
    parse_family,
    parse_instance,
    parse_patterns,
    parse_rational_matrix,
    parse_values,
    to_doc,
)

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


class Finding(Exception):
    """A mathematical violation: the result is still printed, the exit code is 1."""

    def __init__(self, result, message):
        super().__init__(message)
        self.result = result


def _read_doc(args):
    if args.input in (None, "-"):
        text = sys.stdin.read()
    else:
        try:
            with open(args.input) as fh:
                text = fh.read()
        except OSError as exc:
            raise ParseError(f"cannot read {args.input}: {exc.strerror}") from None
    return load_json(text)


def _read_file_doc(path):
    try:
        with open(path) as fh:
            return load_json(fh.read())
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def _rat(v):
    return format_rational(Fraction(v))


def _jobs(args):
    return args.jobs if args.jobs else (os.cpu_count() or 1)


# -- subcommands ----------------------------------------------------------------

def cmd_solve(args):
    inst = from_doc(_read_doc(args), "instance")
    if args.colgen:
        res = solve_lp_colgen(inst)
    else:
        res = solve_lp(enumerate_patterns(inst, args.max_items, args.cap))
    support, y = res.support_matrix()
    return {
        "patterns": to_doc(support)["patterns"],
        "values": [_rat(v) for v in y.values],
        "kind": y.kind,
        "objective": _rat(res.objective),
        "columns": res.matrix.n_cols,
    }


def _bin_listing(outcome):
    bins, _ = pack_bins(outcome)
    types = outcome.instance.occurrence_types()
    lines = []
    for b, (slot_types, occs) in enumerate(bins, start=1):
        load = sum((outcome.instance.sizes[types[o]] for o in occs), Fraction(0))
        lines.append(f"bin {b}: items {[o + 1 for o in occs]} load {load}")
    return lines


def cmd_round(args):
    inst = from_doc(_read_doc(args), "instance")
    outcome = round_packing(inst, args.k, emit_trace=args.emit_trace)
    doc = to_doc(outcome)
    if outcome.trace is not None:
        doc["trace"] = outcome.trace
    doc["bins"] = _bin_listing(outcome)
    problems = verify_packing(inst, outcome)
    if problems:
        doc["violations"] = problems
        raise Finding(doc, "; ".join(problems))
    return doc


def cmd_lindisc(args):
    doc = _read_doc(args)
    a = from_doc(doc, "matrix")
    if "y" not in doc:
        raise ParseError("missing field", "y")
    y = parse_values(doc["y"], "y")
    x, trace = lindisc_round(a, y)
    out = {
        "x": x,
        "achieved": _rat(trace.achieved),
        "bound": {"coefficient": trace.bound_coefficient, "log2Of": trace.bound_argument},
        "withinBound": trace.within_bound,
    }
    if args.emit_trace:
        out["trace"] = trace.to_doc()["steps"]
    return out


def cmd_decompose(args):
    a = from_doc(_read_doc(args), "matrix")
    dec = permutations.decompose(a)
    return {"layers": [[list(r) for r in layer] for layer in dec.layers], **family_doc(dec.perms)}


def cmd_concat(args):
    family = from_doc(_read_doc(args), "permutations")
    return matrix_doc(permutations.concat_to_matrix(family))


def cmd_perm_disc(args):
    doc = _read_doc(args)
    family = from_doc(doc, "permutations")
    if "coloring" in doc:
        chi = parse_coloring(doc)
        return {"coloring": list(chi.values), "prefixDisc": permutations.prefix_discrepancy(family, chi)}
    c = permutations.concat_to_matrix(family)
    x, _ = lindisc_round(c, [Fraction(1, 2)] * family.n)
    res = permutations.coloring_from_rounding(family, x)
    return {
        "coloring": list(res.coloring.values),
        "prefixDisc": res.max_prefix_disc,
        "roundingError": _rat(res.rounding_error),
        "intervalDiscBound": permutations.interval_discrepancy_bound(res.max_prefix_disc),
    }


def _family_for_lb(args):
    if args.input is not None:
        return from_doc(_read_doc(args), "permutations")
    family, _ = oracle.find_high_disc_perms(args.N, 3, args.seed)
    return family


def cmd_gen_lb(args):
    family = _family_for_lb(args)
    try:
        base = lowerbound.build_large_items_instance(lowerbound.build_sigma(family))
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    art = base if args.kind == "large" else lowerbound.build_general_instance(base, args.groups)
    doc = lowerbound.artifacts_doc(art)
    doc["perms"] = family_doc(family)["perms"]
    return doc


def _parse_candidate(path):
    doc = _read_file_doc(path)
    if not isinstance(doc, dict) or "x" not in doc:
        raise ParseError("candidate needs an x field", "x")
    x = parse_values(doc["x"], "x")
    d = doc.get("discards", [])
    if not isinstance(d, list) or not all(isinstance(v, int) and v >= 1 for v in d):
        raise ParseError("discards must be 1-based item indices", "discards")
    return x, [v - 1 for v in d]


def cmd_certify(args):
    if not args.candidate:
        raise ParseError("--candidate is required")
    art = lowerbound.artifacts_from_doc(_read_doc(args))
    x, d = _parse_candidate(args.candidate)
    if isinstance(art, lowerbound.GeneralLowerBoundArtifacts):
        cert = lowerbound.certify_gap_general(art, x, d)
        doc = cert.to_doc()
        if not cert.feasible:
            raise Finding(doc, f"slot shortfall at item type {cert.hall_witness + 1}")
        return doc
    cert = lowerbound.certify_gap(art, x, d)
    doc = cert.to_doc()
    if not cert.feasible:
        where = (f"covering inequality violated at prefix {cert.coverage_violations[0]}"
                 if cert.coverage_violations else f"slot shortfall at item {cert.hall_witness + 1}")
        length, value = cert.worst_prefix
        raise Finding(doc, f"{where}; worst string prefix length {length} has imbalance {value}")
    return doc


def _min_gap_inputs(doc):
    if "sigma" in doc:
        art = lowerbound.artifacts_from_doc(doc)
        return art.matrix, art.y.values
    if "y" not in doc:
        raise ParseError("missing field", "y")
    matrix = PatternMatrix(parse_instance(doc["instance"], "instance"), parse_patterns(doc["patterns"]))
    return matrix, parse_values(doc["y"], "y")


def cmd_oracle(args):
    mode = args.mode
    if mode == "find-perms":
        family, value = oracle.find_high_disc_perms(args.n, args.perms, args.seed)
        return {**family_doc(family), "prefixDisc": value}
    doc = _read_doc(args)
    if mode == "disc":
        value, chi = oracle.exact_disc(parse_rational_matrix(doc), args.cap)
        return {"disc": _rat(value), "coloring": list(chi.values)}
    if mode == "lindisc":
        y = parse_values(doc.get("y"), "y") if "y" in doc else None
        if y is None:
            raise ParseError("missing field", "y")
        value, x = oracle.exact_lindisc_at(parse_rational_matrix(doc), y, args.cap)
        return {"lindisc": _rat(value), "x": list(x)}
    if mode == "perm-disc":
        value, chi = oracle.exact_perm_disc(parse_family(doc), args.cap)
        return {"prefixDisc": value, "coloring": list(chi.values)}
    if mode == "opt":
        return {"opt": oracle.exact_opt(from_doc(doc, "instance"), args.cap)}
    if mode == "ffd":
        return {"bins": oracle.first_fit_decreasing(from_doc(doc, "instance"))}
    if mode == "min-gap":
        matrix, y = _min_gap_inputs(doc)
        gap, witness = oracle.min_rounding_gap(matrix, y, args.x_cap, args.d_cap, _jobs(args),
                                               support_cap=args.cap or 12)
        if gap is None:
            return {"gap": None}
        x, d = witness
        return {"gap": _rat(gap), "x": list(x), "discards": [i + 1 for i in d]}
    raise ParseError(f"unknown oracle mode {mode}")


def cmd_ffd(args):
    return {"bins": oracle.first_fit_decreasing(from_doc(_read_doc(args), "instance"))}


def cmd_report(args):
    from .report import write_report

    summary = write_report(args.out_dir, args.cases, args.seed)
    if not (summary["lindiscWithinBound"] and summary["pipelineClean"]):
        raise Finding(summary, "a sweep found a bound violation")
    return summary


# -- parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="input JSON file (default: stdin)")
    common.add_argument("--output", help="write the result here instead of stdout")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized searches")
    common.add_argument("--format", choices=("json", "pretty"), default="json")
    common.add_argument("--cap", type=int, default=None, help="resource cap for exhaustive searches")
    common.add_argument("--emit-trace", action="store_true", help="include the rounding trace")
    common.add_argument("--jobs", type=int, default=None, help="worker processes (default: CPU count)")

    parser = argparse.ArgumentParser(prog="gapforge", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="exact configuration LP")
    p.add_argument("--max-items", type=int, default=None)
    p.add_argument("--colgen", action="store_true", help="use column generation")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("round", parents=[common], help="LP rounding to an integral packing")
    p.add_argument("--k", type=int, default=None)
    p.set_defaults(func=cmd_round)

    p = sub.add_parser("lindisc", parents=[common], help="round y for a k-monotone matrix")
    p.set_defaults(func=cmd_lindisc)

    p = sub.add_parser("decompose", parents=[common], help="threshold layers and permutations")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("concat", parents=[common], help="prefix-count matrix of concatenated permutations")
    p.set_defaults(func=cmd_concat)

    p = sub.add_parser("perm-disc", parents=[common], help="prefix discrepancy of a coloring")
    p.set_defaults(func=cmd_perm_disc)

    p = sub.add_parser("gen-lb", parents=[common], help="generate lower-bound artifacts")
    p.add_argument("kind", choices=("large", "general"))
    p.add_argument("--N", type=int, default=5, help="odd permutation length when no --input")
    p.add_argument("--groups", type=int, default=None, help="number of scaled groups (general)")
    p.set_defaults(func=cmd_gen_lb)

    p = sub.add_parser("certify", parents=[common], help="certify a rounding-up candidate")
    p.add_argument("--candidate", help="JSON with x and 1-based discards")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("oracle", parents=[common], help="exhaustive baselines")
    p.add_argument("mode", choices=("disc", "lindisc", "perm-disc", "opt", "min-gap", "find-perms", "ffd"))
    p.add_argument("--n", type=int, default=5, help="ground set size for find-perms")
    p.add_argument("--perms", type=int, default=3, help="number of permutations for find-perms")
    p.add_argument("--x-cap", type=int, default=2)
    p.add_argument("--d-cap", type=int, default=None)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("ffd", parents=[common], help="First Fit Decreasing bin count")
    p.set_defaults(func=cmd_ffd)

    p = sub.add_parser("report", parents=[common], help="sweeps written as CSV tables and PNG figures")
    p.add_argument("--out-dir", default="report")
    p.add_argument("--cases", type=int, default=60)
    p.set_defaults(func=cmd_report)
    return parser


def _pretty(result, indent=0) -> str:
    """Indented ``key: value`` text; dicts nest, string lists go one per line."""
    pad = "  " * indent
    lines = []
    for key, v in result.items():
        if isinstance(v, dict):
            lines.append(f"{pad}{key}:")
            lines.append(_pretty(v, indent + 1))
        elif isinstance(v, list) and v and all(isinstance(e, dict) for e in v):
            lines.append(f"{pad}{key}:")
            for e in v:
                lines.append(_pretty(e, indent + 1))
        elif isinstance(v, list) and v and all(isinstance(e, str) for e in v) and key != "sizes":
            lines.append(f"{pad}{key}:")
            lines.extend(f"{pad}  {e}" for e in v)
        elif isinstance(v, (list, type(None), bool)):
            lines.append(f"{pad}{key}: {json.dumps(v)}")
        else:
            lines.append(f"{pad}{key}: {v}")
    return "\n".join(lines)


def _emit(result, args):
    text = json.dumps(result, indent=2) if args.format == "json" else _pretty(result)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _emit(args.func(args), args)
        return EXIT_OK
    except Finding as found:
        _emit(found.result, args)
        print(f"gapforge: violation: {found}", file=sys.stderr)
        return EXIT_VIOLATION
    except ResourceLimitError as exc:
        print(f"gapforge: resource cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (GapforgeError, ValueError, KeyError, TypeError) as exc:
        print(f"gapforge: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


__all__ = ["run", "main", "build_parser"]
