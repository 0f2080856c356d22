"""Command line interface: ``polylin {linearize,dual,eig,cond,bench}``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys

import numpy as np

from . import io
from .conditioning import w_condition_bound
from .duality import block_permutation, dual_identity_block, left_dual_qr, right_dual_qr, verify_dual
from .eigen import poly_eigentriples, residual_norm, solve_pencil
from .errors import FormatError, PolyLinError
from .linearize import (
    companion_second_form,
    dl_pencil,
    fiedler_pencil,
    orthobasis_companion,
    w_linearization,
)
from .polycore import MatrixPolynomial

log = logging.getLogger("polylin")


def _complex_list(text):
    try:
        return [complex(t.strip().replace(" ", "")) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise FormatError(f"cannot parse number list {text!r}") from exc


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise FormatError(f"cannot parse integer list {text!r}") from exc


def _recurrence(text):
    parts = text.split(";")
    if len(parts) != 3:
        raise FormatError("--recurrence must be 'alpha0,..;beta0,..;gamma1,..'")
    return [_complex_list(p) for p in parts]


def _require_poly(obj, what):
    if not isinstance(obj, MatrixPolynomial):
        raise FormatError(f"{what} needs a polynomial file")
    return obj


# ---------------------------------------------------------------------------


def cmd_linearize(args):
    A = io.read_polynomial(args.input)
    if args.form == "companion":
        L = companion_second_form(A)
    elif args.form == "w":
        L = w_linearization(A).pencil
    elif args.form == "fiedler":
        sigma = _int_list(args.sigma) if args.sigma else list(range(1, A.d + 1))
        L = fiedler_pencil(A, sigma, transfer=args.transfer)
    elif args.form == "dl":
        v = _complex_list(args.v) if args.v else [1.0] + [0.0] * (A.d - 1)
        L = dl_pencil(A, v)
    else:
        if not args.recurrence:
            raise FormatError("--form ortho needs --recurrence")
        L = orthobasis_companion(A, *_recurrence(args.recurrence))
    io.write_pencil(L, args.output)
    return 0


def cmd_dual(args):
    L = io.read_pencil(args.input)
    if args.method == "qr":
        M = left_dual_qr(L) if args.side == "left" else right_dual_qr(L)
    else:
        if not args.pi:
            raise FormatError("--method identity-block needs --pi")
        perm = _int_list(args.pi)
        pi = block_permutation(perm, args.block_size) if args.block_size else np.array(perm) - 1
        if args.side == "left":
            M = dual_identity_block(L, pi, mode=args.mode)
        else:
            M = dual_identity_block(L.conj_transpose(), pi, mode=args.mode).conj_transpose()
    cert = verify_dual(M, L, tol=args.tol)
    io.write_pencil(M, args.output)
    print(json.dumps(cert.as_dict(), indent=1))
    want = cert.is_left if args.side == "left" else cert.is_right
    return 0 if want else 1


def _point_list(pt):
    return [pt.lam.real, pt.lam.imag, pt.mu.real, pt.mu.imag]


def cmd_eig(args):
    obj = io.read_any(args.input)
    out = {}
    if not isinstance(obj, MatrixPolynomial):
        sol = solve_pencil(obj, tag="input")
        out["eigenvalues"] = [_point_list(t.point) for t in sol]
        out["residuals"] = [[t.residual_right, t.residual_left] for t in sol]
        if args.recover_vectors:
            out["vectors"] = [{"x": io.encode_vector(t.x), "y": io.encode_vector(t.y)} for t in sol]
    else:
        sigma = _int_list(args.sigma) if args.sigma else None
        v = _complex_list(args.v) if args.v else None
        sol, _ = poly_eigentriples(obj, args.via, sigma=sigma, v=v)
        out["via"] = args.via
        out["eigenvalues"] = [_point_list(t.point) for t in sol]
        out["pencil_backward_errors"] = sol.solver_info["backward_errors"]
        if args.recover_vectors:
            out["vectors"] = [{"x": io.encode_vector(t.x), "y": io.encode_vector(t.y)} for t in sol]
            out["residuals"] = [list(residual_norm(obj, t.point, t.x, t.y)) for t in sol]
    text = json.dumps(out, indent=1)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


REPORT_FIELDS = ("lambda_re", "lambda_im", "mu_re", "mu_im", "kappa_pencil", "kappa_poly", "bound_general",
                 "bound_orthonormal", "T_d", "Lambda_norm", "denominator", "ratio", "problematic", "certified_vectors")


def cmd_cond(args):
    A = _require_poly(io.read_any(args.input), "cond")
    if args.via != "w":
        raise FormatError("cond supports --via w only")
    WL = w_linearization(A)
    C = companion_second_form(A)
    sol, _ = poly_eigentriples(A, "companion")
    reports = [w_condition_bound(A, WL, t, C=C) for t in sol]
    if args.report == "json":
        def enc(r):
            d = r.as_dict()
            d["point"] = [r.point[0].real, r.point[0].imag, r.point[1].real, r.point[1].imag]
            return d
        print(json.dumps([enc(r) for r in reports], indent=1))
    else:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(REPORT_FIELDS)
        for r in reports:
            lam, mu = r.point
            w.writerow([repr(lam.real), repr(lam.imag), repr(mu.real), repr(mu.imag)]
                       + [repr(getattr(r, f)) for f in REPORT_FIELDS[4:]])
    return 0


def cmd_bench(args):
    from .harness.compare import METHODS, run_comparison
    from .harness.config import load_suite_config
    from .harness.output import emit_results
    from .harness.problems import builtin_suite, generate_problem

    if args.config:
        specs, methods = load_suite_config(args.config, seed=args.seed)
    else:
        specs = builtin_suite(args.suite, seed=args.seed)
        methods = ("companion", "w") if args.suite == "degenerate" else METHODS
    if args.methods:
        methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    problems = [generate_problem(s, scaling=not args.no_scaling) for s in specs]
    for p in problems:
        for note in p.notes:
            log.warning("%s: %s", p.name, note)
        if p.provenance != "extended_precision":
            log.warning("%s: reference eigenvalues not fully polished (%s)", p.name, p.provenance)
    table = run_comparison(problems, methods, jobs=args.jobs)
    for path in emit_results(table, args.out):
        log.info("wrote %s", path)
    return 0


# ---------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="polylin", description="Linearizations of matrix polynomials.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("linearize", help="build a pencil from a polynomial file")
    s.add_argument("--form", required=True, choices=["companion", "w", "fiedler", "dl", "ortho"])
    s.add_argument("--input", required=True)
    s.add_argument("--output", required=True)
    s.add_argument("--sigma", help="Fiedler permutation, e.g. 2,3,1")
    s.add_argument("--transfer", type=int, default=0, help="Fiedler factors moved to the constant side")
    s.add_argument("--v", help="DL ansatz vector, e.g. 1,0 or 1,2+1j")
    s.add_argument("--recurrence", help="alpha0,..;beta0,..;gamma1,..")
    s.set_defaults(func=cmd_linearize)

    s = sub.add_parser("dual", help="left or right dual of a pencil")
    s.add_argument("--side", required=True, choices=["left", "right"])
    s.add_argument("--method", required=True, choices=["qr", "identity-block"])
    s.add_argument("--input", required=True)
    s.add_argument("--output", required=True)
    s.add_argument("--pi", help="1-based permutation of the 2N stacked rows (or blocks with --block-size)")
    s.add_argument("--block-size", type=int, default=0)
    s.add_argument("--mode", choices=["exact_identity", "invert_Y"], default="exact_identity")
    s.add_argument("--tol", type=float, default=1e-10)
    s.set_defaults(func=cmd_dual)

    s = sub.add_parser("eig", help="eigenvalues (and vectors) of a pencil or polynomial")
    s.add_argument("--input", required=True)
    s.add_argument("--via", choices=["companion", "w", "fiedler", "dl"], default="companion")
    s.add_argument("--sigma")
    s.add_argument("--v")
    s.add_argument("--recover-vectors", action="store_true")
    s.add_argument("--output")
    s.set_defaults(func=cmd_eig)

    s = sub.add_parser("cond", help="condition numbers and W bounds per eigenvalue")
    s.add_argument("--input", required=True)
    s.add_argument("--via", default="w", choices=["w"])
    s.add_argument("--report", default="json", choices=["json", "csv"])
    s.set_defaults(func=cmd_cond)

    s = sub.add_parser("bench", help="forward-error benchmark against oracle references")
    s.add_argument("--suite", default="default", choices=["default", "stress", "degenerate"])
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.add_argument("--methods", help="comma-separated subset of companion,w,dl_e1,dl_ed,hmt_switch")
    s.add_argument("--no-scaling", action="store_true")
    s.add_argument("--config", help="INI suite file (overrides --suite)")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_bench)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (PolyLinError, OSError) as exc:
        print(f"polylin: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
