"""Linearizations of a matrix polynomial.

All constructors return pencils in the storage convention of
:mod:`polylin.polycore` (``mu P0 - lam P1``).  Block index ``k`` of a
``dn``-sized pencil refers to rows/columns ``k*n .. (k+1)*n``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .duality import BasisCompletion, bases_completion
from .errors import (
    CommonKernelError,
    DegreeError,
    DLConstructionError,
    InvalidAnnihilatorError,
    PreconditionError,
)
from .polycore import EPS, MatrixPolynomial, Pencil, col_stack, rank_tolerance, spectral_norm


def _blocks(d, n):
    return [slice(k * n, (k + 1) * n) for k in range(d)]


# ---------------------------------------------------------------------------
# second companion form


def companion_second_form(A):
    """``C0 = diag(A0, I, ..., I)``; ``C1`` has ``-A1 .. -A_d`` down the first
    block column and identities on the block superdiagonal."""
    n, d = A.n, A.d
    if d < 1:
        raise DegreeError("companion form needs degree >= 1")
    N = d * n
    blk = _blocks(d, n)
    C0 = np.eye(N, dtype=complex)
    C0[blk[0], blk[0]] = A[0]
    C1 = np.zeros((N, N), dtype=complex)
    for k in range(d):
        C1[blk[k], blk[0]] = -A[k + 1]
    for k in range(d - 1):
        C1[blk[k], blk[k + 1]] = np.eye(n)
    return Pencil(C0, C1)


# ---------------------------------------------------------------------------
# W linearization


@dataclass(frozen=True, eq=False)
class WLinearization:
    """``W(lam, mu) = mu W0 - lam W1`` with ``W0 = W[0; I]``, ``W1 = W[I; 0]``."""

    pencil: Pencil
    W: np.ndarray
    completion: BasisCompletion
    orthonormal: bool

    @property
    def B(self):
        return self.completion.B

    @property
    def V(self):
        return self.completion.V

    @property
    def W0(self):
        return self.pencil.P0

    @property
    def W1(self):
        return self.pencil.P1


def _check_col_rank(A):
    S = col_stack(A)
    sv = np.linalg.svd(S, compute_uv=False)
    if sv[-1] <= rank_tolerance(S, sv):
        raise CommonKernelError(
            f"col stack has numerical rank < n (sigma_min = {sv[-1]:.3e}); the coefficients share a right kernel"
        )
    return S


def w_linearization(A, W=None, tol=None):
    """W-linearization of ``A``.

    With ``W=None`` the annihilator is taken from a column-pivoted QR of
    the column stack: ``W`` is the conjugate transpose of the trailing
    ``dn`` columns of Q, so it has orthonormal rows.  A user ``W`` must
    satisfy ``W col(A) = 0`` and have full row rank ``dn``.
    """
    n, d = A.n, A.d
    if d < 1:
        raise DegreeError("W-linearization needs degree >= 1")
    S = _check_col_rank(A)
    N = d * n
    if W is None:
        Q = sla.qr(S, mode="full", pivoting=True)[0]
        W = Q[:, n:].conj().T
        orthonormal = True
    else:
        W = np.asarray(W, dtype=complex)
        if W.shape != (N, N + n):
            raise InvalidAnnihilatorError("shape", f"(expected {(N, N + n)}, got {W.shape})")
        if tol is None:
            tol = (d + 1) * n * EPS * spectral_norm(S) * spectral_norm(W) * 10
        res = spectral_norm(W @ S)
        if res > tol:
            raise InvalidAnnihilatorError("W col(A) = 0", f"(residual {res:.3e} > {tol:.3e})")
        sv = np.linalg.svd(W, compute_uv=False)
        if sv[-1] <= rank_tolerance(W, sv):
            raise InvalidAnnihilatorError("full row rank", f"(sigma_min {sv[-1]:.3e})")
        orthonormal = bool(np.linalg.norm(W @ W.conj().T - np.eye(N), 2) <= 10 * N * EPS)
    pencil = Pencil(W[:, n:], W[:, :N])
    completion = bases_completion(W, S)
    return WLinearization(pencil=pencil, W=W, completion=completion, orthonormal=orthonormal)


# ---------------------------------------------------------------------------
# Fiedler pencils


def fiedler_factor(A, i):
    """``F_i = diag(I_(i-1)n, [[-A_i, I], [I, 0]], I)`` for ``i < d`` and
    ``F_d = diag(I_(d-1)n, -A_d)``."""
    n, d = A.n, A.d
    N = d * n
    F = np.eye(N, dtype=complex)
    s = slice((i - 1) * n, i * n)
    F[s, s] = -A[i]
    if i < d:
        t = slice(i * n, (i + 1) * n)
        F[t, t] = 0
        F[s, t] = np.eye(n)
        F[t, s] = np.eye(n)
    return F


def fiedler_factor_inverse(A, i):
    """Exact inverse of ``F_i`` for ``i < d``: the active block becomes ``[[0, I], [I, A_i]]``."""
    n, d = A.n, A.d
    if not 1 <= i < d:
        raise PreconditionError(f"only F_1..F_(d-1) have a closed-form inverse, got i = {i}")
    G = np.eye(d * n, dtype=complex)
    s, t = slice((i - 1) * n, i * n), slice(i * n, (i + 1) * n)
    G[s, s] = 0
    G[s, t] = np.eye(n)
    G[t, s] = np.eye(n)
    G[t, t] = A[i]
    return G


def fiedler_pencil(A, sigma, transfer=0):
    """Fiedler pencil ``(C0, F_sigma(1) F_sigma(2) ... F_sigma(d))``.

    The product is formed left to right.  ``sigma = (1..d)`` and its
    reversal give the two companion forms (the reversal gives exactly
    :func:`companion_second_form`).  ``transfer=k`` moves the last ``k``
    factors of the product to the constant coefficient as inverses,
    ``(C0 F^-1 ..., F ...)``, which is a strongly equivalent pencil; those
    factors must have index < d (always invertible).
    """
    d = A.d
    if d < 2:
        raise DegreeError("Fiedler pencils need degree >= 2")
    sigma = [int(s) for s in sigma]
    if sorted(sigma) != list(range(1, d + 1)):
        raise PreconditionError(f"sigma must be a permutation of 1..{d}, got {sigma}")
    if not 0 <= transfer < d:
        raise PreconditionError(f"transfer must be in [0, {d - 1}]")
    moved = sigma[d - transfer:]
    if d in moved:
        raise PreconditionError("F_d cannot be transferred (it is singular when A_d is)")
    C0 = companion_second_form(A).P0
    P1 = np.eye(d * A.n, dtype=complex)
    for i in sigma[: d - transfer]:
        P1 = P1 @ fiedler_factor(A, i)
    P0 = np.array(C0)
    for i in reversed(moved):
        P0 = P0 @ fiedler_factor_inverse(A, i)
    return Pencil(P0, P1)


# ---------------------------------------------------------------------------
# DL pencils


def _dl_system(d):
    """Scalar constraint matrix of the two shifted-sum conditions.

    Unknowns: block entries X0[a, b], X1[a, b] (a, b < d), flattened as
    ``a*d + b`` and ``d*d + a*d + b``.  Rows: the row-shifted sum for
    (i <= d, j < d), then the column-shifted sum for (i < d, j <= d).
    """
    nu = 2 * d * d
    rows, rhs = [], []
    for i in range(d + 1):
        for j in range(d):
            r = np.zeros(nu)
            if i < d:
                r[i * d + j] += 1
            if i >= 1:
                r[d * d + (i - 1) * d + j] -= 1
            rows.append(r)
            rhs.append((i, j, "row"))
    for i in range(d):
        for j in range(d + 1):
            r = np.zeros(nu)
            if j < d:
                r[i * d + j] += 1
            if j >= 1:
                r[d * d + i * d + j - 1] -= 1
            rows.append(r)
            rhs.append((j, i, "col"))
    return np.array(rows), rhs


def dl_pencil(A, v, tol=1e-10):
    """The pencil in both ansatz spaces for the vector ``v``.

    Row-shifted sum: ``[I; 0] L0 - [0; I] L1 = col(A) (v^* kron I)``.
    Column-shifted sum: ``L0 [I, 0] - L1 [0, I] = (conj(v) kron I) row(A)``.
    The two conditions act entrywise inside the n x n blocks, so the
    ``2 d^2 n^2`` unknowns split into ``n^2`` independent systems sharing
    one ``2d(d+1) x 2d^2`` matrix, solved together by least squares.
    """
    n, d = A.n, A.d
    v = np.asarray(v, dtype=complex).ravel()
    if v.shape != (d,):
        raise PreconditionError(f"ansatz vector must have length {d}")
    if not np.any(v):
        raise PreconditionError("ansatz vector must be nonzero")
    K, rhs = _dl_system(d)
    vb = np.conj(v)
    R = np.array([A[i].ravel() * vb[j] for i, j, _ in rhs])
    sol, _, rank, _ = np.linalg.lstsq(K, R, rcond=None)
    resid = np.linalg.norm(K @ sol - R)
    scale = max(np.linalg.norm(R), 1.0)
    if rank < K.shape[1] or resid > tol * scale:
        raise DLConstructionError(f"shifted-sum system inconsistent or singular (rank {rank}, residual {resid:.3e})")
    N = d * n
    blk = _blocks(d, n)
    L0 = np.zeros((N, N), dtype=complex)
    L1 = np.zeros((N, N), dtype=complex)
    for a in range(d):
        for b in range(d):
            L0[blk[a], blk[b]] = sol[a * d + b].reshape(n, n)
            L1[blk[a], blk[b]] = sol[d * d + a * d + b].reshape(n, n)
    L = Pencil(L0, L1)
    res, _ = l2_residual(L, A)
    if res > tol * scale:
        raise DLConstructionError(f"certificate failed: row-shifted residual {res:.3e}")
    return L


def row_shifted_sum(L, n):
    """``[0; I] L1 - [I; 0] L0`` for a pencil of size ``dn``."""
    N = L.N
    top = np.vstack([L.P0, np.zeros((n, N))])
    bottom = np.vstack([np.zeros((n, N)), L.P1])
    return bottom - top


def l2_residual(L, A):
    """Least-squares fit of ``[0; I] L1 - [I; 0] L0 = col(A) Z``.

    Returns ``(residual, Z)``; a vanishing residual means ``L`` is a right
    dual of every W-linearization of ``A``.  For a DL pencil with ansatz
    ``v`` the fit gives ``Z = -(v^* kron I)``.
    """
    n, d = A.n, A.d
    if L.N != d * n:
        raise PreconditionError(f"pencil size {L.N} != dn = {d * n}")
    S = col_stack(A)
    T = row_shifted_sum(L, n)
    Z, *_ = np.linalg.lstsq(S, T, rcond=None)
    return float(np.linalg.norm(S @ Z - T)), Z


# ---------------------------------------------------------------------------
# companion form in a three-term-recurrence basis


def _check_recurrence(d, alpha, beta, gamma):
    alpha = np.asarray(alpha, dtype=complex).ravel()
    beta = np.asarray(beta, dtype=complex).ravel()
    gamma = np.asarray(gamma, dtype=complex).ravel()
    if d < 2:
        raise DegreeError("orthogonal-basis companion needs degree >= 2")
    if len(alpha) != d - 1 or len(beta) != d or len(gamma) != d - 1:
        raise PreconditionError(
            f"recurrence lengths must be alpha: {d - 1}, beta: {d}, gamma: {d - 1} "
            f"(got {len(alpha)}, {len(beta)}, {len(gamma)})"
        )
    return alpha, beta, gamma


def orthobasis_companion(A, alpha, beta, gamma):
    """``(C0, C1~)`` with ``C1~`` block tridiagonal plus a first block column.

    ``alpha = (a_0..a_{d-2})`` on the block subdiagonal, ``beta = (b_0..b_{d-1})``
    on the diagonal, ``gamma = (g_1..g_{d-1})`` on the superdiagonal; the first
    block column holds ``-A_{k+1}`` and absorbs ``b_0 A0`` and ``a_0 A0``
    (the first basis block is ``A0`` rather than ``I``).  The monomial
    recurrence (zeros, ``gamma = 1``) gives the companion ``C1``.
    """
    n, d = A.n, A.d
    alpha, beta, gamma = _check_recurrence(d, alpha, beta, gamma)
    N = d * n
    blk = _blocks(d, n)
    I = np.eye(n)
    C1 = np.zeros((N, N), dtype=complex)
    for k in range(d):
        C1[blk[k], blk[0]] = -A[k + 1]
    for k in range(d):
        first = A[0] if k == 0 else I
        C1[blk[k], blk[k]] += beta[k] * first
        if k + 1 < d:
            C1[blk[k], blk[k + 1]] += gamma[k] * I
            C1[blk[k + 1], blk[k]] += alpha[k] * first
    C0 = companion_second_form(A).P0
    return Pencil(C0, C1)


def _basis_polys(d, alpha, beta, gamma):
    """Scalar polynomials psi_0..psi_d (ascending coefficient arrays in y).

    ``psi_{k+1} = ((y - b_{d-1-k}) psi_k - a_{d-1-k} psi_{k-1}) / g_{d-1-k}``
    with ``g_0 = 1`` and ``a_{d-1} = 0``.
    """
    a = list(alpha) + [0.0]
    g = [1.0] + list(gamma)
    psi = [np.array([1.0 + 0j])]
    for k in range(d):
        c = d - 1 - k
        nxt = np.zeros(k + 2, dtype=complex)
        nxt[1:] += psi[k]
        nxt[: k + 1] -= beta[c] * psi[k]
        if k >= 1:
            nxt[:k] -= a[c] * psi[k - 1]
        psi.append(nxt / g[c])
    return psi


def _basis_matrix(d, alpha, beta, gamma):
    """G[j, i] = coefficient of x^j in the polynomial paired with A_i."""
    psi = _basis_polys(d, alpha, beta, gamma)
    G = np.zeros((d + 1, d + 1), dtype=complex)
    for i in range(d + 1):
        p = psi[d - i]
        for k, c in enumerate(p):
            # y = 1/x and homogenization: y^k -> x^(d-k)
            G[d - k, i] = c
    return G


def orthobasis_polynomial(A, alpha, beta, gamma):
    """The monomial-basis polynomial linearized by :func:`orthobasis_companion`."""
    n, d = A.n, A.d
    alpha, beta, gamma = _check_recurrence(d, alpha, beta, gamma)
    G = _basis_matrix(d, alpha, beta, gamma)
    coeffs = [sum(G[j, i] * A[i] for i in range(d + 1)) for j in range(d + 1)]
    return MatrixPolynomial(coeffs)


def orthobasis_coefficients(T, alpha, beta, gamma):
    """Coefficients ``A`` with ``orthobasis_polynomial(A, ...) == T``."""
    d = T.d
    alpha, beta, gamma = _check_recurrence(d, alpha, beta, gamma)
    G = _basis_matrix(d, alpha, beta, gamma)
    if np.any(np.diag(G) == 0):
        raise PreconditionError("recurrence has a zero leading coefficient (gamma_k = 0)")
    Ginv = np.linalg.inv(G)
    return MatrixPolynomial([sum(Ginv[i, j] * T[j] for j in range(d + 1)) for i in range(d + 1)])
