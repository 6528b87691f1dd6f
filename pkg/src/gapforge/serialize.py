"""JSON documents for the domain types.

Rationals are encoded as strings ``"p/q"`` (``"p"`` for integers) so they
survive a round trip bit-exactly. Item and symbol indices are 1-based in
documents.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction

from .errors import InvariantError, ParseError
from .model import (
    FRACTIONAL,
    INTEGRAL,
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

_RATIONAL = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*([+-]?\d+)\s*)?$")


def format_rational(value) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text, field=None) -> Fraction:
    """Parse ``"p/q"``, ``"p"`` or a JSON integer into a Fraction."""
    if isinstance(text, bool):
        raise ParseError(f"expected rational, got {text!r}", field)
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ParseError(f"expected rational string, got {text!r}", field)
    m = _RATIONAL.match(text)
    if not m:
        raise ParseError(f"malformed rational {text!r}", field)
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ParseError("zero denominator", field)
    return Fraction(num, den)


def _int(value, field):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"expected integer, got {value!r}", field)
    return value


def _list(value, field):
    if not isinstance(value, list):
        raise ParseError(f"expected list, got {type(value).__name__}", field)
    return value


def _require(doc, key, field=""):
    if not isinstance(doc, dict):
        raise ParseError("expected object", field or None)
    if key not in doc:
        raise ParseError(f"missing key {key!r}", f"{field}.{key}" if field else key)
    return doc[key]


# -- to documents -----------------------------------------------------------

def instance_doc(inst: PackingInstance) -> dict:
    doc = {"sizes": [format_rational(s) for s in inst.sizes],
           "multiplicities": list(inst.multiplicities)}
    if inst.label:
        doc["label"] = inst.label
    return doc


def pattern_doc(p: Pattern) -> list:
    return [[i + 1, c] for i, c in p.counts]


def solution_doc(matrix: PatternMatrix, sol: SolutionVector) -> dict:
    return {"patterns": [pattern_doc(p) for p in matrix.columns],
            "values": [format_rational(v) for v in sol.values],
            "kind": sol.kind}


def matrix_doc(a: KMonotoneMatrix) -> dict:
    return {"k": a.k, "rows": a.n_rows, "cols": a.n_cols, "entries": [list(r) for r in a.entries]}


def family_doc(f: PermutationFamily) -> dict:
    return {"n": f.n, "perms": [[s + 1 for s in p] for p in f.perms]}


def to_doc(obj) -> dict:
    """Document (plain JSON-compatible dict) for any serializable domain value."""
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, PackingInstance):
        return instance_doc(obj)
    if isinstance(obj, Pattern):
        return {"pattern": pattern_doc(obj)}
    if isinstance(obj, PatternMatrix):
        return {"instance": instance_doc(obj.instance),
                "patterns": [pattern_doc(p) for p in obj.columns]}
    if isinstance(obj, SolutionVector):
        return {"values": [format_rational(v) for v in obj.values], "kind": obj.kind}
    if isinstance(obj, KMonotoneMatrix):
        return matrix_doc(obj)
    if isinstance(obj, PermutationFamily):
        return family_doc(obj)
    if isinstance(obj, Coloring):
        return {"coloring": list(obj.values)}
    if isinstance(obj, RoundingOutcome):
        doc = {
            "instance": instance_doc(obj.instance),
            "patterns": [pattern_doc(p) for p in obj.matrix.columns],
            "x": [int(v) for v in obj.x.values],
            "extraBins": obj.extra_bins,
            "discards": [d + 1 for d in obj.discards],
            "assignment": [None if s is None else s + 1 for s in obj.assignment],
            "achievedDisc": format_rational(obj.achieved_disc),
            "totalBins": obj.total_bins,
        }
        if obj.opt_f is not None:
            doc["optF"] = format_rational(obj.opt_f)
        if obj.k is not None:
            doc["k"] = obj.k
        return doc
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def serialize(obj) -> str:
    """Canonical JSON text for ``obj``."""
    if isinstance(obj, Fraction):
        return format_rational(obj)
    return json.dumps(to_doc(obj), indent=2)


# -- from documents ---------------------------------------------------------

def parse_instance(doc, field="") -> PackingInstance:
    pre = f"{field}." if field else ""
    sizes = [parse_rational(s, f"{pre}sizes[{i}]")
             for i, s in enumerate(_list(_require(doc, "sizes", field), f"{pre}sizes"))]
    mult = doc.get("multiplicities")
    if mult is None:
        mult = [1] * len(sizes)
    mult = [_int(m, f"{pre}multiplicities[{i}]")
            for i, m in enumerate(_list(mult, f"{pre}multiplicities"))]
    label = doc.get("label", "")
    return PackingInstance(tuple(sizes), tuple(mult), label if isinstance(label, str) else "")


def parse_pattern(doc, field="pattern") -> Pattern:
    pairs = []
    for t, pair in enumerate(_list(doc, field)):
        if not isinstance(pair, list) or len(pair) != 2:
            raise ParseError("expected [item, count] pair", f"{field}[{t}]")
        item = _int(pair[0], f"{field}[{t}][0]")
        count = _int(pair[1], f"{field}[{t}][1]")
        if item < 1 or count < 0:
            raise ParseError("item must be >= 1 and count >= 0", f"{field}[{t}]")
        pairs.append((item - 1, count))
    return Pattern(tuple(pairs))


def parse_patterns(doc, field="patterns") -> tuple:
    return tuple(parse_pattern(p, f"{field}[{j}]") for j, p in enumerate(_list(doc, field)))


def parse_values(doc, field="values") -> tuple:
    return tuple(parse_rational(v, f"{field}[{j}]") for j, v in enumerate(_list(doc, field)))


def parse_solution(doc) -> SolutionVector:
    values = parse_values(_require(doc, "values"))
    kind = doc.get("kind")
    if kind is None:
        kind = INTEGRAL if all(v.denominator == 1 for v in values) else FRACTIONAL
    if kind not in (FRACTIONAL, INTEGRAL):
        raise ParseError(f"unknown kind {kind!r}", "kind")
    return SolutionVector(values, kind)


def parse_matrix(doc, field="") -> KMonotoneMatrix:
    pre = f"{field}." if field else ""
    entries = _list(_require(doc, "entries", field), f"{pre}entries")
    rows = [[_int(v, f"{pre}entries[{i}][{j}]") for j, v in enumerate(_list(r, f"{pre}entries[{i}]"))]
            for i, r in enumerate(entries)]
    if "k" in doc:
        k = _int(doc["k"], f"{pre}k")
    else:
        k = max((max(r) for r in rows if r), default=1) or 1
    if "rows" in doc and _int(doc["rows"], f"{pre}rows") != len(rows):
        raise ParseError("row count disagrees with entries", f"{pre}rows")
    if "cols" in doc and rows and _int(doc["cols"], f"{pre}cols") != len(rows[0]):
        raise ParseError("column count disagrees with entries", f"{pre}cols")
    return KMonotoneMatrix(tuple(tuple(r) for r in rows), k)


def parse_rational_matrix(doc, field="") -> list:
    """Entries of a matrix document as Fractions, with no k-monotonicity required."""
    pre = f"{field}." if field else ""
    entries = _list(_require(doc, "entries", field), f"{pre}entries")
    return [[parse_rational(v, f"{pre}entries[{i}][{j}]") for j, v in enumerate(_list(r, f"{pre}entries[{i}]"))]
            for i, r in enumerate(entries)]


def parse_family(doc, field="") -> PermutationFamily:
    pre = f"{field}." if field else ""
    perms = _list(_require(doc, "perms", field), f"{pre}perms")
    parsed = []
    for i, p in enumerate(perms):
        parsed.append(tuple(_int(s, f"{pre}perms[{i}][{t}]") - 1 for t, s in enumerate(_list(p, f"{pre}perms[{i}]"))))
    n = _int(doc["n"], f"{pre}n") if "n" in doc else (len(parsed[0]) if parsed else 0)
    return PermutationFamily(n, tuple(parsed))


def parse_coloring(doc) -> Coloring:
    values = _list(_require(doc, "coloring"), "coloring")
    return Coloring(tuple(_int(v, f"coloring[{i}]") for i, v in enumerate(values)))


def parse_outcome(doc) -> RoundingOutcome:
    inst = parse_instance(_require(doc, "instance"), "instance")
    cols = parse_patterns(_require(doc, "patterns"))
    x = tuple(_int(v, f"x[{j}]") for j, v in enumerate(_list(_require(doc, "x"), "x")))
    assignment = tuple(None if s is None else _int(s, f"assignment[{o}]") - 1
                       for o, s in enumerate(_list(_require(doc, "assignment"), "assignment")))
    opt_f = doc.get("optF")
    return RoundingOutcome(
        instance=inst,
        matrix=PatternMatrix(inst, cols),
        x=SolutionVector(x, INTEGRAL),
        extra_bins=_int(_require(doc, "extraBins"), "extraBins"),
        discards=tuple(_int(d, f"discards[{t}]") - 1 for t, d in enumerate(_list(doc.get("discards", []), "discards"))),
        assignment=assignment,
        achieved_disc=parse_rational(_require(doc, "achievedDisc"), "achievedDisc"),
        total_bins=_int(_require(doc, "totalBins"), "totalBins"),
        opt_f=None if opt_f is None else parse_rational(opt_f, "optF"),
        k=doc.get("k"),
    )


def detect_kind(doc) -> str:
    if not isinstance(doc, dict):
        raise ParseError("expected a JSON object at top level")
    if "totalBins" in doc:
        return "outcome"
    if "instance" in doc and "patterns" in doc:
        return "pattern-matrix"
    if "sizes" in doc:
        return "instance"
    if "entries" in doc:
        return "matrix"
    if "perms" in doc:
        return "permutations"
    if "coloring" in doc:
        return "coloring"
    if "pattern" in doc:
        return "pattern"
    if "values" in doc:
        return "solution"
    raise ParseError("cannot determine document kind")


_PARSERS = {
    "instance": parse_instance,
    "pattern": lambda d: parse_pattern(d["pattern"]),
    "pattern-matrix": lambda d: PatternMatrix(parse_instance(d["instance"], "instance"),
                                              parse_patterns(d["patterns"])),
    "solution": parse_solution,
    "matrix": parse_matrix,
    "permutations": parse_family,
    "coloring": parse_coloring,
    "outcome": parse_outcome,
}


def load_json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from None


def from_doc(doc, kind=None, check=True):
    kind = kind or detect_kind(doc)
    if kind not in _PARSERS:
        raise ParseError(f"unknown document kind {kind!r}")
    obj = _PARSERS[kind](doc)
    if check:
        problems = validate(obj)
        if problems:
            raise InvariantError(problems)
    return obj


def parse(text: str, kind=None, check=True):
    """Inverse of :func:`serialize`.

    A bare rational literal such as ``"1/3"`` parses to a Fraction. Raises
    :class:`ParseError` on malformed text and :class:`InvariantError` when
    the parsed object violates its invariants.
    """
    stripped = text.strip()
    if kind == "rational" or (kind is None and _RATIONAL.match(stripped)):
        return parse_rational(stripped)
    return from_doc(load_json(text), kind, check)
