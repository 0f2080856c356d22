"""Eigenvalue condition numbers in the chordal metric.

For a pencil ``mu P0 - lam P1`` with weights ``|P0|, |P1|``::

    kappa = sqrt(|lam|^2 |P1|^2 + |mu|^2 |P0|^2) |x| |y|
            / |y^* (conj(mu) P1 + conj(lam) P0) x|

and for a polynomial the numerator becomes
``sqrt(sum_i |lam|^(2i) |mu|^(2(d-i)) |A_i|^2)`` and the denominator
``|y^* (conj(mu) dA/dlam - conj(lam) dA/dmu) x|``.  A vanishing denominator
returns ``inf``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .eigen import recover_w_vectors, solve_pencil
from .errors import PreconditionError
from .polycore import EPS, MatrixPolynomial, Pencil, as_point, chordal_distance, col_stack, spectral_norm

# ratio below which the polynomial is in the regime where |A_1| dominates
PROBLEMATIC_RATIO = 1e-3


def t_of_d(d):
    """Spectral norm of the d x d upper-triangular all-ones matrix."""
    if d < 1:
        raise PreconditionError("T(d) needs d >= 1")
    return float(np.linalg.norm(np.triu(np.ones((d, d))), 2))


def t_of_d_printed(d):
    """The closed form ``1/(2 sin(pi/(2d+2)))``; it does not match the SVD value."""
    return 1.0 / (2.0 * math.sin(math.pi / (2 * d + 2)))


def t_of_d_corrected(d):
    """``1/(2 sin(pi/(4d+2)))``, equal to :func:`t_of_d` (asymptotically (2d+1)/pi)."""
    return 1.0 / (2.0 * math.sin(math.pi / (4 * d + 2)))


def lambda_norm(pt, d):
    """2-norm of ``(|mu|^d, |lam| |mu|^(d-1), ..., |lam|^d)``."""
    lam, mu = as_point(pt)
    v = np.array([abs(lam) ** i * abs(mu) ** (d - i) for i in range(d + 1)])
    return float(np.linalg.norm(v))


def _is_zero(den, num, N):
    return not np.isfinite(den) or den <= 10 * N * EPS * num


def pencil_eig_condition(P, pt, x, y):
    """Condition number of the eigenvalue ``pt`` of ``P`` (``inf`` if defective)."""
    lam, mu = as_point(pt)
    x = np.asarray(x, dtype=complex).ravel()
    y = np.asarray(y, dtype=complex).ravel()
    n0, n1 = P.norms()
    weight = math.sqrt(abs(lam) ** 2 * n1**2 + abs(mu) ** 2 * n0**2)
    num = weight * np.linalg.norm(x) * np.linalg.norm(y)
    den = abs(np.vdot(y, (np.conj(mu) * P.P1 + np.conj(lam) * P.P0) @ x))
    if _is_zero(den, num, P.N):
        return math.inf
    return float(num / den)


def poly_denominator(A, pt, x, y):
    lam, mu = as_point(pt)
    dl, dm = A.derivatives(lam, mu)
    return float(abs(np.vdot(np.asarray(y).ravel(), (np.conj(mu) * dl - np.conj(lam) * dm) @ np.asarray(x).ravel())))


def poly_eig_condition(A, pt, x, y):
    """Condition number of an eigenvalue of ``A`` with coefficient weights ``|A_i|``."""
    lam, mu = as_point(pt)
    norms = A.norms()
    weight = math.sqrt(sum(abs(lam) ** (2 * i) * abs(mu) ** (2 * (A.d - i)) * s**2 for i, s in enumerate(norms)))
    num = weight * np.linalg.norm(x) * np.linalg.norm(y)
    den = poly_denominator(A, pt, x, y)
    if _is_zero(den, num, A.n * A.d):
        return math.inf
    return float(num / den)


@dataclass(frozen=True)
class ConditionReport:
    point: tuple
    kappa_pencil: float
    kappa_poly: float
    bound_general: float
    bound_orthonormal: float | None
    T_d: float
    Lambda_norm: float
    denominator: float
    ratio: float  # sum_i |lam|^i |mu|^(d-i) |A_i|  /  (|Lambda| |col A|)
    problematic: bool
    certified_vectors: bool

    def as_dict(self):
        d = dict(self.__dict__)
        d["point"] = list(self.point)
        return d


def w_condition_bound(A, WL, triple, C=None):
    """Measured condition number on the W pencil together with its upper bounds.

    ``triple`` is an eigentriple of ``A`` (unit x, y); the W-pencil vectors
    come from :func:`polylin.eigen.recover_w_vectors`.
    """
    from .linearize import companion_second_form

    if C is None:
        C = companion_second_form(A)
    pt = as_point(triple.point)
    lam, mu = pt
    x, y = np.asarray(triple.x), np.asarray(triple.y)
    rec = recover_w_vectors(WL, C, triple, A=A)
    k_pencil = pencil_eig_condition(WL.pencil, pt, rec.x_check, rec.y_check)
    k_poly = poly_eig_condition(A, pt, x, y)
    d = A.d
    T = t_of_d(d)
    Lam = lambda_norm(pt, d)
    colA = spectral_norm(col_stack(A))
    den = poly_denominator(A, pt, x, y)
    xy = np.linalg.norm(x) * np.linalg.norm(y)
    n0, n1 = WL.pencil.norms()
    weight = math.sqrt(abs(lam) ** 2 * n1**2 + abs(mu) ** 2 * n0**2)
    core = math.sqrt(2) * T * Lam * colA * xy
    if _is_zero(den, core, A.n * d):
        general = orth = math.inf
    else:
        general = weight * core * spectral_norm(WL.B) / den
        orth = core / den
    inner = sum(abs(lam) ** i * abs(mu) ** (d - i) * s for i, s in enumerate(A.norms()))
    ratio = inner / (Lam * colA)
    return ConditionReport(
        point=(lam, mu),
        kappa_pencil=k_pencil,
        kappa_poly=k_poly,
        bound_general=float(general),
        bound_orthonormal=float(orth) if WL.orthonormal else None,
        T_d=T,
        Lambda_norm=Lam,
        denominator=den,
        ratio=float(ratio),
        problematic=bool(ratio < PROBLEMATIC_RATIO),
        certified_vectors=rec.certified,
    )


# ---------------------------------------------------------------------------
# Monte-Carlo perturbation estimates


def _unit_gaussian(rng, shape):
    E = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return E / np.linalg.norm(E, 2)


def _nearest_move(points, pt):
    return min(chordal_distance(p, pt) for p in points)


def mc_pencil_condition(P, pt, eps=1e-8, trials=100, rng=None):
    """Largest chordal eigenvalue movement divided by ``eps`` under random
    perturbations ``eps |P_i| E_i`` with ``|E_i| = 1``."""
    rng = np.random.default_rng(rng)
    n0, n1 = P.norms()
    worst = 0.0
    for _ in range(trials):
        Q = Pencil(P.P0 + eps * n0 * _unit_gaussian(rng, P.P0.shape), P.P1 + eps * n1 * _unit_gaussian(rng, P.P1.shape))
        worst = max(worst, _nearest_move(solve_pencil(Q).points, pt))
    return worst / eps


def mc_poly_condition(A, pt, eps=1e-8, trials=100, rng=None):
    """Polynomial analogue of :func:`mc_pencil_condition` (coefficientwise
    perturbations, eigenvalues via the companion form)."""
    from .linearize import companion_second_form

    rng = np.random.default_rng(rng)
    norms = A.norms()
    worst = 0.0
    for _ in range(trials):
        B = MatrixPolynomial([c + eps * s * _unit_gaussian(rng, c.shape) for c, s in zip(A.coeffs, norms)])
        worst = max(worst, _nearest_move(solve_pencil(companion_second_form(B)).points, pt))
    return worst / eps
