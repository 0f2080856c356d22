"""Synthetic benchmark problems (quadratic by default) and built-in suites."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.stats import unitary_group

from ..errors import PolyLinError, PreconditionError, SingularPolynomialError
from ..polycore import MatrixPolynomial, ScalingReport, scale_fan_lin_van_dooren
from .oracle import oracle_reference

log = logging.getLogger(__name__)

LAYOUTS = ("random_dense", "prescribed", "mass_spring", "degenerate")
PROFILES = ("balanced", "stress")
ADMISSION_COND = 1e10


@dataclass(frozen=True)
class ProblemSpec:
    name: str
    n: int
    d: int = 2
    layout: str = "random_dense"
    profile: str = "balanced"
    seed: int = 0
    complex: bool = False
    stress_ratio: float = 1e6
    spectrum: tuple = ()  # prescribed layout; empty means 1..nd
    zero_rows: int = 1  # degenerate layout: zero rows in A_0 and in A_d


@dataclass(frozen=True, eq=False)
class BenchmarkProblem:
    name: str
    poly: MatrixPolynomial  # the polynomial the methods run on (scaled if ``scaled``)
    original: MatrixPolynomial
    scaled: bool
    scaling: ScalingReport | None
    reference_eigs: list
    provenance: str
    condA0: float
    condAd: float
    spec: ProblemSpec
    notes: tuple = field(default=())

    @property
    def admitted_dl(self):
        return self.condA0 < ADMISSION_COND and self.condAd < ADMISSION_COND


def _rand(rng, shape, cplx):
    M = rng.standard_normal(shape)
    if cplx:
        M = M + 1j * rng.standard_normal(shape)
    return M


def _coefficients(spec, rng):
    n, d = spec.n, spec.d
    if spec.layout == "random_dense":
        coeffs = [_rand(rng, (n, n), spec.complex) for _ in range(d + 1)]
    elif spec.layout == "prescribed":
        spectrum = np.array(spec.spectrum if spec.spectrum else np.arange(1, n * d + 1), dtype=complex)
        if len(spectrum) != n * d:
            raise PreconditionError(f"prescribed spectrum needs {n * d} values")
        S = unitary_group.rvs(n, random_state=rng) if spec.complex else np.linalg.qr(rng.standard_normal((n, n)))[0]
        T = unitary_group.rvs(n, random_state=rng) if spec.complex else np.linalg.qr(rng.standard_normal((n, n)))[0]
        # diagonal entry k is prod_j (x - r_kj), coefficients ascending
        diag = np.zeros((d + 1, n), dtype=complex)
        for k in range(n):
            diag[:, k] = np.polynomial.polynomial.polyfromroots(spectrum[k * d:(k + 1) * d])
        coeffs = [S @ np.diag(diag[i]) @ T for i in range(d + 1)]
        if not spec.complex and np.all(np.isreal(spectrum)):
            coeffs = [c.real for c in coeffs]
    elif spec.layout == "mass_spring":
        if d != 2:
            raise PreconditionError("mass_spring layout is quadratic")
        k = 1.0 + rng.random(n + 1)
        K = np.diag(k[:-1] + k[1:]) - np.diag(k[1:-1], 1) - np.diag(k[1:-1], -1)
        Cd = rng.standard_normal((n, n))
        Cd = 0.1 * (Cd + Cd.T)
        M = np.diag(1.0 + rng.random(n))
        coeffs = [K, Cd, M]
    elif spec.layout == "degenerate":
        coeffs = [_rand(rng, (n, n), spec.complex) for _ in range(d + 1)]
        r = min(spec.zero_rows, n - 1)
        coeffs[0][:r] = 0
        coeffs[d][n - r:] = 0
    else:
        raise PreconditionError(f"unknown layout {spec.layout!r}; choose from {LAYOUTS}")
    coeffs = [np.asarray(c) for c in coeffs]
    if spec.profile == "stress":
        if d != 2:
            raise PreconditionError("stress profile is defined for quadratics")
        n0, n2 = (np.linalg.norm(coeffs[i], 2) for i in (0, 2))
        coeffs[1] = coeffs[1] * (spec.stress_ratio * (n0 + n2) / np.linalg.norm(coeffs[1], 2))
    elif spec.profile != "balanced":
        raise PreconditionError(f"unknown profile {spec.profile!r}; choose from {PROFILES}")
    return coeffs


def _cond(M):
    s = np.linalg.svd(M, compute_uv=False)
    return float(s[0] / s[-1]) if s[-1] > 0 else float("inf")


def generate_problem(spec, scaling=True, max_retries=5):
    """Deterministic problem from ``spec``; reference eigenvalues from the oracle.

    If the oracle finds the polynomial singular, the seed is bumped (up to
    ``max_retries`` times) and the retry is recorded in ``notes``.
    """
    if spec.n * spec.d > 100:
        raise PreconditionError("desk scale requires n*d <= 100")
    notes = []
    cur = spec
    for attempt in range(max_retries + 1):
        rng = np.random.default_rng(cur.seed)
        original = MatrixPolynomial(_coefficients(cur, rng))
        poly, report = original, None
        if scaling and original.d == 2:
            try:
                poly, report = scale_fan_lin_van_dooren(original)
            except PolyLinError as exc:
                notes.append(f"scaling skipped: {exc}")
        try:
            ref = oracle_reference(poly)
        except SingularPolynomialError:
            msg = f"seed {cur.seed} gave a singular polynomial; retrying with seed {cur.seed + 1}"
            log.warning("%s: %s", spec.name, msg)
            notes.append(msg)
            cur = replace(cur, seed=cur.seed + 1)
            continue
        return BenchmarkProblem(
            name=spec.name,
            poly=poly,
            original=original,
            scaled=report is not None,
            scaling=report,
            reference_eigs=ref.points,
            provenance=ref.provenance,
            condA0=_cond(poly[0]),
            condAd=_cond(poly[poly.d]),
            spec=cur,
            notes=tuple(notes),
        )
    raise SingularPolynomialError(f"{spec.name}: no regular instance after {max_retries} retries")


def builtin_suite(name, seed=0):
    """Problem specs of the built-in suites (seeds derived from ``seed``)."""
    s = int(seed) * 1000
    if name == "default":
        return [
            ProblemSpec("dense_real_n4", 4, seed=s + 1),
            ProblemSpec("dense_real_n8", 8, seed=s + 2),
            ProblemSpec("dense_complex_n5", 5, complex=True, seed=s + 3),
            ProblemSpec("dense_complex_n10", 10, complex=True, seed=s + 4),
            ProblemSpec("prescribed_n4", 4, layout="prescribed", seed=s + 5),
            ProblemSpec(
                "prescribed_complex_n3", 3, layout="prescribed", complex=True, seed=s + 6,
                spectrum=(0.5j, -1.0, 2.0 + 1.0j, -3.0, 1.5, 0.25 - 0.5j),
            ),
            ProblemSpec("mass_spring_n6", 6, layout="mass_spring", seed=s + 7),
            ProblemSpec("mass_spring_n12", 12, layout="mass_spring", seed=s + 8),
        ]
    if name == "stress":
        return [
            ProblemSpec("stress_real_n4", 4, profile="stress", seed=s + 11),
            ProblemSpec("stress_real_n8", 8, profile="stress", seed=s + 12),
            ProblemSpec("stress_complex_n5", 5, profile="stress", complex=True, seed=s + 13),
            ProblemSpec("stress_mass_spring_n6", 6, layout="mass_spring", profile="stress", seed=s + 14),
        ]
    if name == "degenerate":
        return [
            ProblemSpec("degenerate_n4", 4, layout="degenerate", seed=s + 21),
            ProblemSpec("degenerate_n6_r2", 6, layout="degenerate", zero_rows=2, seed=s + 22),
            ProblemSpec("degenerate_complex_n5", 5, layout="degenerate", complex=True, seed=s + 23),
        ]
    raise PreconditionError(f"unknown suite {name!r}; choose from default, stress, degenerate")
