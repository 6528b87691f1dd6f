"""Seeded sweeps that write delimited tables and matching figures.

Each sweep returns its rows as dicts; :func:`write_report` stores them as
CSV files and renders one PNG per table with the non-interactive Agg
backend. Values in the tables are exact rationals written as ``p/q``;
figures use their float approximations.
"""

from __future__ import annotations

import csv
import random
from fractions import Fraction
from pathlib import Path

from .generators import random_kmonotone, random_three_partition, random_unit_vector
from .monotone import lindisc_round
from .oracle import exact_lindisc_at, exact_opt, find_high_disc_perms, first_fit_decreasing
from .pipeline import round_packing, verify_packing


def lindisc_sweep(cases: int, seed: int, max_dim: int = 12) -> list:
    rng = random.Random(seed)
    rows = []
    for case in range(cases):
        k = rng.randint(1, 3)
        n, m = rng.randint(1, max_dim), rng.randint(1, max_dim)
        a = random_kmonotone(rng, n, m, k)
        y = random_unit_vector(rng, m)
        _, trace = lindisc_round(a, y)
        best, _ = exact_lindisc_at(a.entries, y)
        rows.append({
            "case": case, "k": k, "rows": n, "cols": m,
            "oracle": best, "achieved": trace.achieved,
            "bound": round(trace.bound_float(), 6), "withinBound": trace.within_bound,
        })
    return rows


def pipeline_sweep(cases: int, seed: int, max_triples: int = 6) -> list:
    rng = random.Random(seed)
    rows = []
    for case in range(cases):
        inst = random_three_partition(rng, rng.randint(1, max_triples))
        out = round_packing(inst, 3)
        rows.append({
            "case": case, "items": inst.n, "optF": out.opt_f,
            "opt": exact_opt(inst), "ffd": first_fit_decreasing(inst),
            "totalBins": out.total_bins, "achieved": out.achieved_disc,
            "clean": not verify_packing(inst, out),
        })
    return rows


def permutation_sweep(sizes, seed: int) -> list:
    rows = []
    for n in sizes:
        family, value = find_high_disc_perms(n, 3, seed)
        rows.append({"n": n, "k": family.k, "prefixDisc": value})
    return rows


def _cell(v):
    return str(v) if isinstance(v, Fraction) else v


def write_csv(path: Path, rows: list) -> None:
    with open(path, "w", newline="") as fh:
        if not rows:
            return
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({key: _cell(v) for key, v in r.items()})


def write_report(out_dir, cases: int = 60, seed: int = 0) -> dict:
    """Run all sweeps, write ``*.csv`` and ``*.png`` into ``out_dir``, return a summary."""
    from . import plotting

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tables = {
        "lindisc": lindisc_sweep(cases, seed),
        "pipeline": pipeline_sweep(max(1, cases // 2), seed),
        "permutations": permutation_sweep((3, 5, 7, 9), seed),
    }
    files = []
    for name, rows in tables.items():
        write_csv(out / f"{name}.csv", rows)
        files.append(f"{name}.csv")
    plotting.plot_lindisc(tables["lindisc"], out / "lindisc.png")
    plotting.plot_pipeline(tables["pipeline"], out / "pipeline.png")
    plotting.plot_permutations(tables["permutations"], out / "permutations.png")
    files += ["lindisc.png", "pipeline.png", "permutations.png"]
    lin, pipe = tables["lindisc"], tables["pipeline"]
    return {
        "files": files,
        "lindiscCases": len(lin),
        "lindiscWithinBound": all(r["withinBound"] and r["oracle"] <= r["achieved"] for r in lin),
        "pipelineCases": len(pipe),
        "pipelineClean": all(r["clean"] and r["optF"] <= r["opt"] <= r["totalBins"] for r in pipe),
        "maxPrefixDisc": {str(r["n"]): r["prefixDisc"] for r in tables["permutations"]},
    }
