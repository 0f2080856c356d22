"""Forward-error comparison of linearization strategies against oracle references."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..eigen import match_eigenvalues, solve_pencil
from ..errors import PreconditionError
from ..linearize import companion_second_form, dl_pencil, w_linearization
from ..polycore import HomogeneousPoint

log = logging.getLogger(__name__)

METHODS = ("companion", "w", "dl_e1", "dl_ed", "hmt_switch")
DL_METHODS = ("dl_e1", "dl_ed", "hmt_switch")
OK = "ok"
NOT_ADMITTED = "not_admitted"


@dataclass(frozen=True)
class ComparisonRow:
    problem: str
    index: int
    reference: HomogeneousPoint
    errors: dict  # method -> chordal error (nan when not available)
    status: dict  # method -> "ok" | "not_admitted" | "error:<reason>"
    hmt_choice: str = ""  # DL variant the switch picked for this eigenvalue


def _pencil(method, A):
    d = A.d
    if method == "companion":
        return companion_second_form(A)
    if method == "w":
        return w_linearization(A).pencil
    v = np.zeros(d)
    v[0 if method == "dl_e1" else d - 1] = 1.0
    return dl_pencil(A, v)


def _paired(method, A, reference):
    """Computed eigenvalues of ``method`` paired to ``reference`` order."""
    pts = solve_pencil(_pencil(method, A), tag=method).points
    perm, dist = match_eigenvalues(reference, pts)
    return [pts[k] for k in perm], dist


def compare_problem(problem, methods=METHODS):
    """Rows (one per reference eigenvalue) for a single problem."""
    A = problem.poly
    ref = problem.reference_eigs
    K = len(ref)
    errors = {m: [math.nan] * K for m in methods}
    status = {m: [OK] * K for m in methods}
    choice = [""] * K
    paired = {}
    needed = [m for m in methods if m != "hmt_switch"]
    if "hmt_switch" in methods:
        needed += [m for m in ("dl_e1", "dl_ed") if m not in needed]
    for m in needed:
        if m in DL_METHODS and not problem.admitted_dl:
            paired[m] = NOT_ADMITTED
            continue
        try:
            paired[m] = _paired(m, A, ref)
        except Exception as exc:  # recorded in-row, the run continues
            log.warning("%s/%s failed: %s", problem.name, m, exc)
            paired[m] = f"error:{type(exc).__name__}"
    for m in methods:
        if m == "hmt_switch":
            src = [paired.get("dl_e1"), paired.get("dl_ed")]
            bad = next((s for s in src if isinstance(s, str)), None)
            if bad is not None:
                status[m] = [bad] * K
                continue
            (pts1, d1), (_, dd) = src
            # ascending coefficient order: v = e_1 suits |x| <= 1, v = e_d suits |x| > 1
            for i in range(K):
                big = abs(pts1[i].lam) > abs(pts1[i].mu)
                choice[i] = "dl_ed" if big else "dl_e1"
                errors[m][i] = float(dd[i] if big else d1[i])
            continue
        res = paired[m]
        if isinstance(res, str):
            status[m] = [res] * K
            continue
        errors[m] = [float(e) for e in res[1]]
    return [
        ComparisonRow(
            problem.name, i, ref[i], {m: errors[m][i] for m in methods}, {m: status[m][i] for m in methods}, choice[i]
        )
        for i in range(K)
    ]


def run_comparison(problems, methods=METHODS, jobs=1):
    """All rows, ordered by (problem order, eigenvalue index) regardless of ``jobs``."""
    methods = tuple(methods)
    unknown = set(methods) - set(METHODS)
    if unknown:
        raise PreconditionError(f"unknown methods {sorted(unknown)}; choose from {METHODS}")
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            chunks = list(ex.map(lambda p: compare_problem(p, methods), problems))
    else:
        chunks = [compare_problem(p, methods) for p in problems]
    return [row for chunk in chunks for row in chunk]

