"""Reference eigenvalues from the scalar determinant, independent of the
pencil eigensolver.

1. ``p(x) = det A(x)`` is evaluated in double-double at ``M = dn + 1`` nodes
   ``rho * exp(2 pi i k / M)`` (``rho`` balances ``|A_0|`` against ``|A_d|``),
   and its coefficients are interpolated by a double-double Vandermonde solve.
2. ``k_inf = n - rank(A_d)`` eigenvalues are placed at infinity; the remaining
   ``N`` roots start from the companion matrix of the truncated coefficients.
3. Ehrlich-Aberth sweeps refine all roots simultaneously using the logarithmic
   derivative ``tr(A(x)^-1 A'(x))`` (in the reversed variable when |x| > 1).
4. Newton steps with the double-double determinant polish each root; a step
   that would move a root by more than 1e-6 (chordal) is rejected.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .. import ddarith as dd
from ..errors import SingularPolynomialError
from ..polycore import EPS, HomogeneousPoint, chordal_distance

log = logging.getLogger(__name__)

EXTENDED = "extended_precision"
INTERPOLATION = "oracle_interpolation"


@dataclass(frozen=True)
class OracleResult:
    points: list
    provenance: str
    coefficients: np.ndarray  # det A(x) in ascending powers (double rounding)
    k_inf: int
    polished: int


def _det_dd(coeffs, z):
    return dd.lu_det(dd.polyval_matrix(coeffs, z))


def det_coefficients(A):
    """Interpolated coefficients of ``det A(x)`` (ascending), as a CDD vector."""
    n, d = A.n, A.d
    N = n * d
    M = N + 1
    norms = A.norms()
    rho = (norms[0] / norms[-1]) ** (1.0 / d) if norms[0] > 0 and norms[-1] > 0 else 1.0
    nodes = np.exp(2j * np.pi * np.arange(M) / M)
    vals = _det_dd(list(A.coeffs), rho * nodes)
    V = nodes[:, None] ** np.arange(M)[None, :]
    c = dd.solve(V, vals)
    scale = rho ** -np.arange(M, dtype=float)
    return dd.CDD(c.rh * scale, c.rl * scale, c.ih * scale, c.il * scale), rho


def check_regular(A, rho=1.0, samples=7):
    """Raise unless ``A(x)`` is numerically nonsingular somewhere on a circle."""
    nodes = rho * np.exp(2j * np.pi * (np.arange(samples) + 0.3) / samples)
    best = 0.0
    for z in nodes:
        s = np.linalg.svd(sum(c * z**i for i, c in enumerate(A.coeffs)), compute_uv=False)
        best = max(best, s[-1] / s[0] if s[0] > 0 else 0.0)
    if best <= 100 * A.n * EPS:
        raise SingularPolynomialError("det A vanishes identically (singular matrix polynomial)")


def _logderiv(coeffs, z):
    """``p'(z)/p(z)`` for ``p = det sum coeffs[i] z^i``."""
    A = sum(c * z**i for i, c in enumerate(coeffs))
    dA = sum(i * c * z ** (i - 1) for i, c in enumerate(coeffs) if i > 0)
    return np.trace(np.linalg.solve(A, dA))


def _logderiv_any(coeffs, rcoeffs, dn, z):
    if abs(z) <= 1:
        return _logderiv(coeffs, z)
    w = 1.0 / z
    return dn / z - _logderiv(rcoeffs, w) / z**2


def aberth(coeffs, z0, maxit=200):
    """Ehrlich-Aberth iteration on ``det sum coeffs[i] x^i``."""
    rcoeffs = coeffs[::-1]
    dn = (len(coeffs) - 1) * coeffs[0].shape[0]
    z = np.array(z0, dtype=complex)
    N = len(z)
    done = np.zeros(N, dtype=bool)
    for _ in range(maxit):
        if done.all():
            break
        for k in range(N):
            if done[k]:
                continue
            try:
                g = _logderiv_any(coeffs, rcoeffs, dn, z[k])
            except np.linalg.LinAlgError:
                done[k] = True  # landed exactly on a root
                continue
            diff = z[k] - np.delete(z, k)
            with np.errstate(divide="ignore", invalid="ignore"):
                s = np.sum(1.0 / diff) if N > 1 else 0.0
            den = g - s
            if not np.isfinite(den) or den == 0:
                done[k] = True
                continue
            step = 1.0 / den
            z[k] -= step
            if abs(step) <= 4 * EPS * max(abs(z[k]), 1e-300):
                done[k] = True
    return z


def _newton_polish(coeffs, z, iters=6):
    """Newton on the double-double determinant; returns (roots, accepted mask)."""
    z = np.array(z, dtype=complex)
    ok = np.ones(len(z), dtype=bool)
    for _ in range(iters):
        if len(z) == 0:
            break
        p = _det_dd(coeffs, z).to_complex()
        step = np.zeros_like(z)
        for k, zk in enumerate(z):
            if p[k] == 0:
                continue
            A = sum(c * zk**i for i, c in enumerate(coeffs))
            dA = sum(i * c * zk ** (i - 1) for i, c in enumerate(coeffs) if i > 0)
            try:
                dp = np.linalg.det(A) * np.trace(np.linalg.solve(A, dA))
            except np.linalg.LinAlgError:
                continue
            if dp == 0 or not np.isfinite(dp):
                continue
            step[k] = p[k] / dp
        new = z - step
        for k in range(len(z)):
            if chordal_distance((z[k], 1), (new[k], 1)) > 1e-6 or not np.isfinite(new[k]):
                ok[k] = False
                new[k] = z[k]
        if np.all(np.abs(step) <= 2 * EPS * np.abs(z)):
            z = new
            break
        z = new
    return z, ok


def oracle_reference(A):
    """Reference eigenvalues of ``A`` (``dn`` points, infinite ones as (1, 0))."""
    n, d = A.n, A.d
    coeffs_dd, rho = det_coefficients(A)
    check_regular(A, rho)
    c = coeffs_dd.to_complex()
    s = np.linalg.svd(A[d], compute_uv=False)
    rank_d = int(np.sum(s > max(A[d].shape) * EPS * max(s[0], np.max(A.norms()) * EPS))) if s[0] > 0 else 0
    k_inf = n - rank_d
    N = n * d - k_inf
    finite = np.zeros(0, dtype=complex)
    polished = 0
    provenance = EXTENDED
    if N > 0:
        top = c[: N + 1]
        if top[-1] == 0:
            top = top.copy()
            top[-1] = EPS * np.max(np.abs(top))
        comp = np.zeros((N, N), dtype=complex)
        comp[0, :] = -top[-2::-1] / top[-1]
        if N > 1:
            comp[1:, :-1] = np.eye(N - 1)
        z0 = np.linalg.eigvals(comp)
        # nudge exact duplicates apart so the Aberth sums stay finite
        z0 = z0 + 1e-10 * (1 + np.abs(z0)) * np.exp(1j * np.arange(N))
        z = aberth(list(A.coeffs), z0)
        small = np.abs(z) <= 1
        zs, oks = _newton_polish(list(A.coeffs), z[small])
        ws, okw = _newton_polish(list(A.coeffs[::-1]), 1.0 / z[~small])
        polished = int(oks.sum() + okw.sum())
        if polished < N:
            provenance = INTERPOLATION
            log.info("oracle: %d of %d roots kept their unpolished values", N - polished, N)
        pts = [HomogeneousPoint(zk, 1.0) for zk in zs] + [HomogeneousPoint(1.0, wk) for wk in ws]
    else:
        pts = []
    pts += [HomogeneousPoint(1.0, 0.0)] * k_inf
    return OracleResult(points=pts, provenance=provenance, coefficients=c, k_inf=k_inf, polished=polished)
