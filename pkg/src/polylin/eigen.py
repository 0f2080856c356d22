"""Generalized eigenproblems on pencils and eigenvector maps between a
polynomial, its companion form and its W-linearization.

Vector conventions (storage sign ``mu P0 - lam P1`` throughout):

* companion right vector, ``|lam| >= |mu|``::

      xh_0 = lam^(d-1) x,   xh_k = sum_{j<=k} mu^(k-j) lam^(d-1-k+j) A_j x

  and for ``|mu| > |lam|``::

      xh_0 = mu^(d-1) x,    xh_k = -sum_{j>k} lam^(j-k) mu^(d-1-j+k) A_j x

* companion left vector: block ``k`` of ``yh`` is ``conj(mu^(d-1-k) lam^k) y``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from scipy.optimize import linear_sum_assignment

from .duality import anchor_grid
from .errors import AnchorError, PreconditionError, SingularPencilError, SolverError
from .polycore import (
    EPS,
    EigenTriple,
    HomogeneousPoint,
    MatrixPolynomial,
    Pencil,
    as_point,
    chordal_distance,
    col_stack,
    direction_distance,
    evaluate,
    spectral_norm,
)

# ---------------------------------------------------------------------------
# pencil solver


@dataclass(frozen=True, eq=False)
class PencilEigenSolution:
    triples: list
    source: str
    solver_info: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.triples)

    def __iter__(self):
        return iter(self.triples)

    @property
    def points(self):
        return [t.point for t in self.triples]


def _order_key(pt):
    arg = math.atan2((pt.lam * np.conj(pt.mu)).imag, (pt.lam * np.conj(pt.mu)).real)
    # round so that roundoff-level differences cannot reorder real spectra
    return (round(arg, 12), round(math.atan2(abs(pt.lam), abs(pt.mu)), 12))


def solve_pencil(P, tag="pencil"):
    """All eigentriples of the regular pencil ``mu P0 - lam P1``.

    A QZ-based solver returns homogeneous pairs ``(alpha, beta)`` with
    ``beta P0 v = alpha P1 v``, i.e. ``(lam, mu) = (alpha, beta)``; zero and
    infinite eigenvalues come out as ``(0, 1)`` and ``(1, 0)`` directly.
    LAPACK is re-entrant, so concurrent calls on distinct inputs are safe.
    """
    N = P.N
    try:
        w, vl, vr = sla.eig(P.P0, P.P1, left=True, right=True, homogeneous_eigvals=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SolverError(f"generalized eigensolver failed: {exc}") from exc
    if not (np.all(np.isfinite(w)) and np.all(np.isfinite(vr)) and np.all(np.isfinite(vl))):
        raise SolverError("generalized eigensolver returned non-finite values")
    alpha, beta = w
    n0, n1 = P.norms()
    scale = max(n0, n1, np.finfo(float).tiny)
    # both Schur diagonal entries negligible: the pencil is (numerically) singular
    zero_pair = np.hypot(np.abs(alpha), np.abs(beta)) <= N * EPS * scale
    if np.any(zero_pair):
        raise SingularPencilError(f"{int(zero_pair.sum())} eigenvalue(s) of the form 0/0: singular pencil")
    triples, berr = [], []
    for k in range(N):
        pt = HomogeneousPoint(alpha[k], beta[k])
        t = EigenTriple(pt, vr[:, k], vl[:, k], source=P, tag=tag)
        denom = abs(pt.mu) * n0 + abs(pt.lam) * n1
        berr.append(max(t.residual_right, t.residual_left) / denom)
        triples.append(t)
    order = sorted(range(N), key=lambda k: _order_key(triples[k].point))
    triples = [triples[k] for k in order]
    berr = [berr[k] for k in order]
    return PencilEigenSolution(triples, tag, {"backward_errors": berr, "max_backward_error": max(berr, default=0.0)})


def residual_norm(P, pt, x, y):
    """``(|P(pt) x|, |y^* P(pt)|)``."""
    M = evaluate(P, tuple(as_point(pt)))
    x = np.asarray(x, dtype=complex).ravel()
    y = np.asarray(y, dtype=complex).ravel()
    return float(np.linalg.norm(M @ x)), float(np.linalg.norm(y.conj() @ M))


def _poly_scale(A, pt):
    lam, mu = pt
    return float(sum(abs(lam) ** i * abs(mu) ** (A.d - i) * s for i, s in enumerate(A.norms())))


def poly_null_vectors(A, pt):
    """Right/left singular vectors of ``A(pt)`` for its smallest singular value."""
    M = evaluate(A, tuple(as_point(pt)))
    U, s, Vh = np.linalg.svd(M)
    return Vh[-1].conj(), U[:, -1]


# ---------------------------------------------------------------------------
# pairing


def match_eigenvalues(reference, computed):
    """Optimal assignment minimizing total chordal distance.

    Returns ``(perm, dist)`` with ``computed[perm[i]]`` paired to
    ``reference[i]`` at distance ``dist[i]``.
    """
    reference = [as_point(p) for p in reference]
    computed = [as_point(p) for p in computed]
    if len(reference) != len(computed):
        raise PreconditionError(f"cannot pair {len(reference)} reference with {len(computed)} computed values")
    if not reference:
        return np.zeros(0, dtype=int), np.zeros(0)
    C = np.array([[chordal_distance(r, c) for c in computed] for r in reference])
    rows, cols = linear_sum_assignment(C)
    perm = np.empty(len(reference), dtype=int)
    perm[rows] = cols
    return perm, C[np.arange(len(reference)), perm]


# ---------------------------------------------------------------------------
# companion maps


def _companion_xhat(A, x, lam, mu):
    n, d = A.n, A.d
    Ax = [A[j] @ x for j in range(d + 1)]
    blocks = []
    if abs(lam) >= abs(mu):
        blocks.append(lam ** (d - 1) * x)
        for k in range(1, d):
            blocks.append(sum(mu ** (k - j) * lam ** (d - 1 - k + j) * Ax[j] for j in range(k + 1)))
    else:
        blocks.append(mu ** (d - 1) * x)
        for k in range(1, d):
            blocks.append(-sum(lam ** (j - k) * mu ** (d - 1 - j + k) * Ax[j] for j in range(k + 1, d + 1)))
    return np.concatenate(blocks)


def _companion_xhat_both(A, x, lam, mu):
    """Both formulas, unbranched (``None`` where a formula degenerates)."""
    d = A.d
    Ax = [A[j] @ x for j in range(d + 1)]
    first = second = None
    if lam != 0:
        first = np.concatenate(
            [lam ** (d - 1) * x]
            + [sum(mu ** (k - j) * lam ** (d - 1 - k + j) * Ax[j] for j in range(k + 1)) for k in range(1, d)]
        )
    if mu != 0:
        second = np.concatenate(
            [mu ** (d - 1) * x]
            + [-sum(lam ** (j - k) * mu ** (d - 1 - j + k) * Ax[j] for j in range(k + 1, d + 1)) for k in range(1, d)]
        )
    return first, second


def _companion_yhat(A, y, lam, mu):
    d = A.d
    return np.concatenate([np.conj(mu ** (d - 1 - k) * lam**k) * y for k in range(d)])


@dataclass(frozen=True, eq=False)
class CompanionVectors:
    xhat: np.ndarray
    yhat: np.ndarray
    residual_right: float
    residual_left: float
    formula_agreement: float | None  # direction distance of the two xhat formulas


def companion_vectors_forward(A, x, y, pt, C=None, tol=1e-8):
    """Companion eigenvectors ``(xh, yh)`` built from an eigentriple of ``A``."""
    from .linearize import companion_second_form

    pt = as_point(pt)
    lam, mu = pt
    x = np.asarray(x, dtype=complex).ravel()
    y = np.asarray(y, dtype=complex).ravel()
    x, y = x / np.linalg.norm(x), y / np.linalg.norm(y)
    scale = max(_poly_scale(A, pt), np.finfo(float).tiny)
    rr, rl = residual_norm(A, pt, x, y)
    if max(rr, rl) > tol * scale:
        raise PreconditionError(f"not an eigentriple of A (residuals {rr:.3e}, {rl:.3e} vs scale {scale:.3e})")
    if C is None:
        C = companion_second_form(A)
    xh = _companion_xhat(A, x, lam, mu)
    yh = _companion_yhat(A, y, lam, mu)
    first, second = _companion_xhat_both(A, x, lam, mu)
    agree = direction_distance(first, second) if first is not None and second is not None else None
    cr, cl = residual_norm(C, pt, xh / np.linalg.norm(xh), yh / np.linalg.norm(yh))
    return CompanionVectors(xh, yh, cr, cl, agree)


def companion_to_poly_vectors(A, xh, yh, pt):
    """Read ``x`` (leading block) and ``y`` (dominant weighted block)."""
    n, d = A.n, A.d
    lam, mu = as_point(pt)
    x = np.asarray(xh)[:n]
    k = 0 if abs(mu) >= abs(lam) else d - 1
    y = np.asarray(yh)[k * n:(k + 1) * n]
    return x, y


@dataclass(frozen=True, eq=False)
class CompanionConsistency:
    x: np.ndarray
    y: np.ndarray
    residual_right: float
    residual_left: float
    rebuild_distance: float  # direction distance between given and rebuilt xhat


def companion_right_vector(A, triple):
    """Recover ``x, y`` from a companion eigentriple and check consistency
    against the forward map."""
    x, y = companion_to_poly_vectors(A, triple.x, triple.y, triple.point)
    rr, rl = residual_norm(A, triple.point, x / np.linalg.norm(x), y / np.linalg.norm(y))
    xh = _companion_xhat(A, x, *triple.point)
    return CompanionConsistency(x, y, rr, rl, direction_distance(xh, triple.x))


def kron_block_vectors(v, n):
    """Largest-norm block of a vector with Kronecker structure ``a kron x``."""
    v = np.asarray(v).reshape(-1, n)
    return v[int(np.argmax(np.linalg.norm(v, axis=1)))]


# ---------------------------------------------------------------------------
# W-linearization maps


def choose_anchors(A, count=2, min_separation=math.pi / 8):
    """Grid anchors ranked by ``sigma_min(A(a, b))``, mutually separated."""
    scored = []
    for pt in anchor_grid():
        s = np.linalg.svd(evaluate(A, tuple(pt)), compute_uv=False)
        scored.append((s[-1] / max(s[0], np.finfo(float).tiny), pt))
    scored.sort(key=lambda t: -t[0])
    chosen = []
    for val, pt in scored:
        if val <= 10 * A.n * EPS:
            break
        if all(chordal_distance(pt, q) >= min_separation for q in chosen):
            chosen.append(pt)
        if len(chosen) == count:
            break
    if not chosen:
        raise AnchorError("A(a, b) is numerically singular at every grid anchor")
    return chosen


def closed_form_x(WL, A, x, pt, anchor):
    """``x_check`` from the cleared closed form (no vanishing denominators)."""
    n, d = A.n, A.d
    lam, mu = as_point(pt)
    a, b = as_point(anchor)
    f = b * lam - a * mu
    S = col_stack(A) @ np.asarray(x, dtype=complex)
    Sb = S.reshape(d + 1, n)
    K = np.zeros((d, d + 1), dtype=complex)
    if abs(lam) <= abs(mu):
        r = lam / mu
        for k in range(d):
            for j in range(k + 1, d + 1):
                K[k, j] = r ** (j - k - 1)
        c = -f / mu
    else:
        r = mu / lam
        for k in range(d):
            for j in range(k + 1):
                K[k, j] = r ** (k - j)
        c = f / lam
    return c * (K @ Sb).ravel()


def closed_form_y(WL, A, y, pt, anchor):
    """``y_check`` with ``y_check^* = f^-1 [mu^d y^*, ..., lam^d y^*] B``."""
    d = A.d
    lam, mu = as_point(pt)
    a, b = as_point(anchor)
    f = b * lam - a * mu
    u = np.concatenate([np.conj(mu ** (d - i) * lam**i) * y for i in range(d + 1)])
    return WL.B.conj().T @ u / np.conj(f)


@dataclass(frozen=True, eq=False)
class WRecovery:
    x_check: np.ndarray
    y_check: np.ndarray
    anchors: tuple
    route_distance_x: float  # anchor route vs closed form
    route_distance_y: float
    anchor_distance_x: float  # first vs second anchor
    anchor_distance_y: float
    residual_right: float  # on the W pencil, unit vectors
    residual_left: float
    scale: float
    certified: bool
    norm_product: tuple = ()  # |x_check| |y_check| from the closed forms, per anchor


def recover_w_vectors(WL, C, triple, A=None, anchors=None, tol=1e-8):
    """Eigenvectors of the W pencil from an eigentriple of ``A`` or of ``C``.

    Both the anchor route (``x_check = C(a, b) xh``,
    ``y_check^* = yh^* W(a, b)^-1``) and the closed forms are evaluated at two
    anchors; ``certified`` is set when the four directions agree and the
    W-pencil residuals are below ``tol`` times the pencil scale.
    """
    if A is None:
        raise PreconditionError("the polynomial A is required")
    n, d = A.n, A.d
    pt = as_point(triple.point)
    lam, mu = pt
    if len(triple.x) == n:
        x, y = np.asarray(triple.x), np.asarray(triple.y)
    elif len(triple.x) == d * n:
        x, y = companion_to_poly_vectors(A, triple.x, triple.y, pt)
    else:
        raise PreconditionError(f"eigenvector length {len(triple.x)} fits neither A nor C")
    x, y = x / np.linalg.norm(x), y / np.linalg.norm(y)
    xh = _companion_xhat(A, x, lam, mu)
    yh = _companion_yhat(A, y, lam, mu)
    if anchors is None:
        anchors = choose_anchors(A, 2)
    anchors = [as_point(p) for p in anchors]
    W = WL.pencil
    xs, ys, closed_x, closed_y, prods = [], [], [], [], []
    for anc in anchors:
        a, b = anc
        xs.append(C.evaluate(a, b) @ xh)
        ys.append(np.linalg.solve(W.evaluate(a, b).conj().T, yh))
        cx = closed_form_x(WL, A, x, pt, anc)
        cy = closed_form_y(WL, A, y, pt, anc)
        closed_x.append(cx)
        closed_y.append(cy)
        prods.append(float(np.linalg.norm(cx) * np.linalg.norm(cy)))
    xc, yc = closed_x[0], closed_y[0]
    rdx = max(direction_distance(u, v) for u, v in zip(xs, closed_x))
    rdy = max(direction_distance(u, v) for u, v in zip(ys, closed_y))
    adx = max((direction_distance(closed_x[0], v) for v in closed_x[1:]), default=0.0)
    ady = max((direction_distance(closed_y[0], v) for v in closed_y[1:]), default=0.0)
    rr, rl = residual_norm(W, pt, xc / np.linalg.norm(xc), yc / np.linalg.norm(yc))
    n0, n1 = W.norms()
    scale = abs(mu) * n0 + abs(lam) * n1
    ok = max(rdx, rdy, adx, ady) <= tol and max(rr, rl) <= tol * scale
    return WRecovery(xc, yc, tuple(anchors), rdx, rdy, adx, ady, rr, rl, scale, bool(ok), tuple(prods))


def w_to_poly_vectors(WL, C, A, xw, yw, pt, anchor=None):
    """Map W-pencil eigenvectors back to ``A`` by inverting the anchor route:
    ``xh = C(a, b)^-1 x_check`` and ``yh = W(a, b)^* y_check``."""
    if anchor is None:
        anchor = choose_anchors(A, 1)[0]
    a, b = as_point(anchor)
    xh = np.linalg.solve(C.evaluate(a, b), np.asarray(xw, dtype=complex))
    yh = WL.pencil.evaluate(a, b).conj().T @ np.asarray(yw, dtype=complex)
    return companion_to_poly_vectors(A, xh, yh, pt)


# ---------------------------------------------------------------------------
# polynomial eigentriples through a linearization


VIA = ("companion", "w", "fiedler", "dl")


def linearize_for(A, via, sigma=None, v=None):
    from . import linearize as lz

    if via == "companion":
        return lz.companion_second_form(A)
    if via == "w":
        return lz.w_linearization(A)
    if via == "fiedler":
        return lz.fiedler_pencil(A, sigma if sigma is not None else list(range(1, A.d + 1)))
    if via == "dl":
        if v is None:
            v = np.zeros(A.d)
            v[0] = 1
        return lz.dl_pencil(A, v)
    raise PreconditionError(f"unknown linearization {via!r}; choose from {VIA}")


def poly_eigentriples(A, via="companion", sigma=None, v=None):
    """Eigentriples of ``A`` computed through one linearization.

    Vector extraction: companion and DL read structured blocks, W inverts
    the anchor route through the companion form, Fiedler falls back to the
    smallest singular vectors of ``A(lam, mu)``.
    """
    from .linearize import WLinearization, companion_second_form

    L = linearize_for(A, via, sigma=sigma, v=v)
    pencil = L.pencil if isinstance(L, WLinearization) else L
    sol = solve_pencil(pencil, tag=via)
    C = companion_second_form(A) if via == "w" else None
    anchor = choose_anchors(A, 1)[0] if via == "w" else None
    out = []
    for t in sol:
        if via == "companion":
            x, y = companion_to_poly_vectors(A, t.x, t.y, t.point)
        elif via == "dl":
            x, y = kron_block_vectors(t.x, A.n), kron_block_vectors(t.y, A.n)
        elif via == "w":
            x, y = w_to_poly_vectors(L, C, A, t.x, t.y, t.point, anchor)
        else:
            x, y = poly_null_vectors(A, t.point)
        if np.linalg.norm(x) == 0 or np.linalg.norm(y) == 0:
            x, y = poly_null_vectors(A, t.point)
        out.append(EigenTriple(t.point, x, y, source=A, tag=via))
    return PencilEigenSolution(out, via, dict(sol.solver_info)), L
