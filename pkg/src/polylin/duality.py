"""Pencil duality.

``M`` is a *left dual* of ``L`` when ``M1 L0 = M0 L1`` and ``[M0 M1]`` has
full row rank; it is a *right dual* when ``L0 M1 = L1 M0`` and ``[M0; M1]``
has full column rank.  Dual pencils are strongly equivalent, the witness
being

    M(a, b)^-1 M(lam, mu) L(a, b) = L(lam, mu)          (left dual)
    L(a, b) M(lam, mu) M(a, b)^-1 = L(lam, mu)          (right dual)

for any anchor ``(a, b)`` where the evaluations are nonsingular.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import AnchorError, IdentityBlockError, PreconditionError, RankDeficiencyError
from .polycore import EPS, HomogeneousPoint, Pencil, rank_tolerance

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10


# ---------------------------------------------------------------------------
# bases completion


@dataclass(frozen=True, eq=False)
class BasisCompletion:
    """``V`` (k x (m+k)) and ``B`` ((m+k) x m) with ``[V; W] [A B] = I``."""

    V: np.ndarray
    B: np.ndarray
    W: np.ndarray
    A: np.ndarray

    @property
    def m(self):
        return self.W.shape[0]

    @property
    def k(self):
        return self.A.shape[1]

    def identity_residual(self):
        top = np.vstack([self.V, self.W])
        right = np.hstack([self.A, self.B])
        return float(np.linalg.norm(top @ right - np.eye(top.shape[0]), 2))


def bases_completion(W, A, tol=None):
    """Complete ``A`` (full column rank) and ``W`` (full row rank, ``WA = 0``).

    Follows the constructive proof: orthonormal complements ``B_hat`` of
    range(A) and ``V_hat^*`` of range(W^*), the block triangular product
    ``R = [V_hat; W][A B_hat]`` and the two corrections with ``R11^-1``,
    ``R22^-1``.
    """
    W = np.asarray(W, dtype=complex)
    A = np.asarray(A, dtype=complex)
    m, total = W.shape
    if A.shape[0] != total or A.shape[1] + m != total:
        raise PreconditionError(f"incompatible shapes W {W.shape}, A {A.shape}")
    k = A.shape[1]
    sa = np.linalg.svd(A, compute_uv=False)
    if k and sa[-1] <= rank_tolerance(A, sa):
        raise RankDeficiencyError("A (columns)", sa[-1])
    sw = np.linalg.svd(W, compute_uv=False)
    if m and sw[-1] <= rank_tolerance(W, sw):
        raise RankDeficiencyError("W (rows)", sw[-1])
    if tol is None:
        tol = 10 * total * EPS * (sa[0] if k else 1.0) * (sw[0] if m else 1.0)
    wa = np.linalg.norm(W @ A, 2) if (m and k) else 0.0
    if wa > tol:
        raise PreconditionError(f"W A != 0 (norm {wa:.3e} > {tol:.3e})")

    Qa = sla.qr(A, mode="full")[0]
    B_hat = Qa[:, k:]
    V_hat = sla.null_space(W, rcond=0).conj().T if m else np.eye(total, dtype=complex)
    if V_hat.shape[0] != k:
        # rank-revealing fallback: trailing right singular vectors
        V_hat = np.linalg.svd(W)[2][m:].conj() if m else np.eye(total, dtype=complex)
    R11 = V_hat @ A
    R12 = V_hat @ B_hat
    R22 = W @ B_hat
    B = (B_hat - A @ np.linalg.solve(R11, R12)) @ np.linalg.inv(R22) if m else B_hat
    V = np.linalg.solve(R11, V_hat)
    return BasisCompletion(V=V, B=B, W=W, A=A)


# ---------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class DualityCertificate:
    commute_residual: float  # |M1 L0 - M0 L1|_F
    commute_residual_j: float  # |row(M) J col(L)|_F, same matrix rearranged
    right_commute_residual: float  # |L0 M1 - L1 M0|_F
    row_rank_margin: float
    col_rank_margin: float
    row_rank_tol: float
    col_rank_tol: float
    tol: float
    verdict: str

    @property
    def is_left(self):
        return self.verdict in ("left_dual", "both")

    @property
    def is_right(self):
        return self.verdict in ("right_dual", "both")

    def as_dict(self):
        return {
            "commute_residual": self.commute_residual,
            "commute_residual_j": self.commute_residual_j,
            "right_commute_residual": self.right_commute_residual,
            "row_rank_margin": self.row_rank_margin,
            "col_rank_margin": self.col_rank_margin,
            "tol": self.tol,
            "verdict": self.verdict,
        }


def j_matrix(N):
    Z = np.zeros((N, N))
    I = np.eye(N)
    return np.block([[Z, I], [-I, Z]])


def verify_dual(M, L, tol=DEFAULT_TOL):
    """Duality certificate for the pair ``(M, L)``.

    ``tol`` is relative: residuals are compared with
    ``tol * |M|_F * |L|_F``.
    """
    if M.N != L.N:
        raise PreconditionError(f"size mismatch: {M.N} vs {L.N}")
    N = M.N
    left = M.P1 @ L.P0 - M.P0 @ L.P1
    jform = M.row_stack() @ j_matrix(N) @ L.col_stack()
    right = L.P0 @ M.P1 - L.P1 @ M.P0
    rs = np.linalg.svd(M.row_stack(), compute_uv=False)
    cs = np.linalg.svd(M.col_stack(), compute_uv=False)
    rtol, ctol = rank_tolerance(M.row_stack(), rs), rank_tolerance(M.col_stack(), cs)
    abstol = tol * max(M.fro_norm() * L.fro_norm(), np.finfo(float).tiny)
    res_l = float(np.linalg.norm(left))
    res_r = float(np.linalg.norm(right))
    is_left = res_l <= abstol and rs[-1] > rtol
    is_right = res_r <= abstol and cs[-1] > ctol
    verdict = {(True, True): "both", (True, False): "left_dual", (False, True): "right_dual"}.get(
        (is_left, is_right), "neither"
    )
    return DualityCertificate(
        commute_residual=res_l,
        commute_residual_j=float(np.linalg.norm(jform)),
        right_commute_residual=res_r,
        row_rank_margin=float(rs[-1]),
        col_rank_margin=float(cs[-1]),
        row_rank_tol=float(rtol),
        col_rank_tol=float(ctol),
        tol=float(abstol),
        verdict=verdict,
    )


# ---------------------------------------------------------------------------
# constructions


def left_dual_qr(L):
    """Left dual from a pivoted QR of ``[L0; L1]``: ``M1 = Q12^*``, ``M0 = -Q22^*``.

    The trailing columns of Q are an orthonormal basis of the complement of
    range([L0; L1]); column pivoting only reorders R.
    """
    N = L.N
    S = L.col_stack()
    Q, R, _ = sla.qr(S, mode="full", pivoting=True)
    diag = np.abs(np.diag(R))
    if diag[-1] <= max(S.shape) * EPS * diag[0]:
        raise RankDeficiencyError("[L0; L1] (columns): constant right kernel", float(diag[-1]))
    Q12 = Q[:N, N:]
    Q22 = Q[N:, N:]
    return Pencil(-Q22.conj().T, Q12.conj().T)


def right_dual_qr(L):
    """Right dual: the conjugate transpose of the left dual of ``L^*``."""
    try:
        Mh = left_dual_qr(L.conj_transpose())
    except RankDeficiencyError as exc:
        raise RankDeficiencyError("[L0 L1] (rows): constant left kernel", exc.margin) from None
    return Mh.conj_transpose()


def block_permutation(blocks, n):
    """Expand a 1-based block permutation (as printed, e.g. ``(1,3,6,4,5,2)``)
    into a 0-based scalar index permutation for blocks of size ``n``."""
    return np.concatenate([np.arange((b - 1) * n, b * n) for b in blocks])


def dual_identity_block(L, pi, mode="exact_identity"):
    """Left dual by enforcing an identity block.

    ``pi`` lists 2N row indices of ``S = [L0; L1]`` (0-based) such that
    ``S[pi] = [Y; Z]`` with ``Y = S[pi[:N]]``.  Then
    ``[M1, -M0] = [-Z Y^-1, I] Pi^-1``; in ``exact_identity`` mode ``Y``
    must be exactly the identity.
    """
    N = L.N
    pi = np.asarray(pi, dtype=int)
    if sorted(pi.tolist()) != list(range(2 * N)):
        raise PreconditionError(f"pi must be a permutation of 0..{2 * N - 1}")
    S = L.col_stack()
    Y = S[pi[:N]]
    Z = S[pi[N:]]
    if mode == "exact_identity":
        dev = float(np.max(np.abs(Y - np.eye(N)))) if N else 0.0
        if dev != 0.0:
            raise IdentityBlockError(f"selected rows are not the identity (max deviation {dev:.3e})")
        X = Z
    elif mode == "invert_Y":
        cond = np.linalg.cond(Y)
        if not np.isfinite(cond) or cond * N * EPS >= 1.0:
            raise IdentityBlockError(f"selected block Y is numerically singular (condition number {cond:.3e})")
        log.debug("dual_identity_block: cond(Y) = %.3e", cond)
        X = np.linalg.solve(Y.T, Z.T).T
    else:
        raise ValueError(f"unknown mode {mode!r}")
    T = np.hstack([-X, np.eye(N)])
    R = np.empty_like(T)
    R[:, pi] = T
    return Pencil(-R[:, N:], R[:, :N])


# ---------------------------------------------------------------------------
# equivalence witness


def anchor_grid():
    """Deterministic anchors: 17 real-circle points plus 4 complex-phase points."""
    pts = [HomogeneousPoint(math.cos(t), math.sin(t)) for t in np.arange(17) * math.pi / 17]
    for theta, phi in [(math.pi / 4, math.pi / 2), (math.pi / 4, math.pi / 4),
                       (math.pi / 3, 3 * math.pi / 4), (math.pi / 6, math.pi / 3)]:
        pts.append(HomogeneousPoint(math.cos(theta), math.sin(theta) * complex(math.cos(phi), math.sin(phi))))
    return pts


def _smin(M):
    return float(np.linalg.svd(M, compute_uv=False)[-1])


@dataclass(frozen=True, eq=False)
class EquivalenceWitness:
    E: np.ndarray
    F: np.ndarray
    anchor: HomogeneousPoint

    def __iter__(self):
        yield self.E
        yield self.F
        yield self.anchor

    def residual(self, M, L, lam, mu):
        return float(np.linalg.norm(self.E @ M.evaluate(lam, mu) @ self.F - L.evaluate(lam, mu)))


def equivalence_witness(M, L, cert=None):
    """Constant ``E, F`` with ``E M(lam, mu) F = L(lam, mu)`` for a dual pair."""
    if cert is None:
        cert = verify_dual(M, L)
    if not (cert.is_left or cert.is_right):
        raise PreconditionError(f"pair is not dual (verdict {cert.verdict})")
    best, best_val = None, -1.0
    for pt in anchor_grid():
        Ma = M.evaluate(pt.lam, pt.mu)
        La = L.evaluate(pt.lam, pt.mu)
        val = min(_smin(Ma), _smin(La))
        if val > best_val:
            best, best_val = (pt, Ma, La), val
    pt, Ma, La = best
    scale = max(M.fro_norm(), L.fro_norm())
    if best_val <= M.N * EPS * scale:
        raise AnchorError("no anchor on the grid makes both pencils nonsingular (singular pencil?)")
    if cert.is_left:
        return EquivalenceWitness(np.linalg.inv(Ma), La, pt)
    return EquivalenceWitness(La, np.linalg.inv(Ma), pt)
