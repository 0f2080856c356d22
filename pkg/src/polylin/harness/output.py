"""Result files: long-format CSV, per-problem plot data and a JSON summary.

Floats are written with ``repr`` (shortest round-trip form), so identical
runs give identical bytes and re-parsing recovers the exact values.
"""

from __future__ import annotations

import csv
import json
import math
import os
from collections import defaultdict

import numpy as np

from ..polycore import HomogeneousPoint
from .compare import ComparisonRow

CSV_COLUMNS = (
    "problem", "eig_index", "method", "error", "status", "detail",
    "ref_lambda_re", "ref_lambda_im", "ref_mu_re", "ref_mu_im",
)


def _f(x):
    return repr(float(x))


def _methods(table):
    seen = []
    for row in table:
        for m in row.errors:
            if m not in seen:
                seen.append(m)
    return seen


def write_csv(table, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for row in table:
            lam, mu = row.reference.lam, row.reference.mu
            for m, err in row.errors.items():
                detail = row.hmt_choice if m == "hmt_switch" else ""
                w.writerow([row.problem, row.index, m, _f(err), row.status[m], detail,
                            _f(lam.real), _f(lam.imag), _f(mu.real), _f(mu.imag)])


def read_csv(path):
    """Parse a results CSV back into ComparisonRows."""
    rows = {}
    order = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            key = (rec["problem"], int(rec["eig_index"]))
            if key not in rows:
                ref = HomogeneousPoint(
                    complex(float(rec["ref_lambda_re"]), float(rec["ref_lambda_im"])),
                    complex(float(rec["ref_mu_re"]), float(rec["ref_mu_im"])),
                )
                rows[key] = {"ref": ref, "errors": {}, "status": {}, "choice": ""}
                order.append(key)
            rows[key]["errors"][rec["method"]] = float(rec["error"])
            rows[key]["status"][rec["method"]] = rec["status"]
            if rec["method"] == "hmt_switch":
                rows[key]["choice"] = rec["detail"]
    return [ComparisonRow(k[0], k[1], rows[k]["ref"], rows[k]["errors"], rows[k]["status"], rows[k]["choice"])
            for k in order]


def _safe_name(name):
    return "".join(c if c.isalnum() or c in "-_." else "_" for c in name)


def write_plot_data(table, out_dir):
    """One whitespace-separated file per problem: index, log10(error) per method."""
    by_problem = defaultdict(list)
    for row in table:
        by_problem[row.problem].append(row)
    methods = _methods(table)
    paths = []
    for prob, rows in by_problem.items():
        path = os.path.join(out_dir, f"{_safe_name(prob)}.dat")
        with open(path, "w") as fh:
            fh.write("# index " + " ".join(methods) + "\n")
            for row in rows:
                vals = []
                for m in methods:
                    e = row.errors.get(m, math.nan)
                    if not np.isfinite(e):
                        vals.append("nan")
                    elif e == 0:
                        vals.append("-inf")
                    else:
                        vals.append(repr(math.log10(e)))
                fh.write(f"{row.index} " + " ".join(vals) + "\n")
        paths.append(path)
    return paths


def summarize(table):
    """Median and max error per method (finite entries only), overall and per problem."""
    methods = _methods(table)

    def stats(rows):
        out = {}
        for m in methods:
            e = [r.errors[m] for r in rows if m in r.errors and np.isfinite(r.errors[m])]
            out[m] = {"median": float(np.median(e)) if e else None, "max": float(np.max(e)) if e else None, "count": len(e)}
        return out

    by_problem = defaultdict(list)
    for row in table:
        by_problem[row.problem].append(row)
    return {"overall": stats(table), "problems": {p: stats(r) for p, r in by_problem.items()}}


def emit_results(table, out_dir, formats=("csv", "plot-data", "summary")):
    """Write the requested outputs into ``out_dir``; returns the written paths."""
    os.makedirs(out_dir, exist_ok=True)
    written = []
    if "csv" in formats:
        p = os.path.join(out_dir, "results.csv")
        write_csv(table, p)
        written.append(p)
    if "plot-data" in formats:
        d = os.path.join(out_dir, "plot-data")
        os.makedirs(d, exist_ok=True)
        written += write_plot_data(table, d)
    if "summary" in formats:
        p = os.path.join(out_dir, "summary.json")
        with open(p, "w") as fh:
            json.dump(summarize(table), fh, indent=2, sort_keys=True)
            fh.write("\n")
        written.append(p)
    return written
