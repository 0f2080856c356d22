"""Vectorized complex double-double arithmetic.

A double-double number is an unevaluated sum ``hi + lo`` of two doubles with
``|lo| <= ulp(hi)/2``, giving about 32 significant digits.  Error-free
transformations are the classical ones (Knuth two-sum, Dekker split/product).
Only what the reference oracle needs is provided: add, sub, mul, div,
Horner evaluation and an LU factorization with partial pivoting.
"""

from __future__ import annotations

import numpy as np

_SPLIT = 134217729.0  # 2**27 + 1


def two_sum(a, b):
    s = a + b
    bb = s - a
    e = (a - (s - bb)) + (b - bb)
    return s, e


def quick_two_sum(a, b):
    s = a + b
    e = b - (s - a)
    return s, e


def split(a):
    t = _SPLIT * a
    hi = t - (t - a)
    return hi, a - hi


def two_prod(a, b):
    p = a * b
    ah, al = split(a)
    bh, bl = split(b)
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


# real double-double on (hi, lo) pairs


def dd_add(a, b):
    s, e = two_sum(a[0], b[0])
    t, f = two_sum(a[1], b[1])
    e = e + t
    s, e = quick_two_sum(s, e)
    e = e + f
    return quick_two_sum(s, e)


def dd_neg(a):
    return -a[0], -a[1]


def dd_mul(a, b):
    p, e = two_prod(a[0], b[0])
    e = e + (a[0] * b[1] + a[1] * b[0])
    return quick_two_sum(p, e)


def dd_div(a, b):
    q1 = a[0] / b[0]
    r = dd_add(a, dd_neg(dd_mul((q1, np.zeros_like(q1)), b)))
    q2 = r[0] / b[0]
    r = dd_add(r, dd_neg(dd_mul((q2, np.zeros_like(q2)), b)))
    q3 = r[0] / b[0]
    q, e = quick_two_sum(q1, q2)
    return dd_add((q, e), (q3, np.zeros_like(q3)))


class CDD:
    """Array of complex double-doubles (real and imaginary dd parts)."""

    __slots__ = ("rh", "rl", "ih", "il")

    def __init__(self, rh, rl=None, ih=None, il=None):
        self.rh = np.asarray(rh, dtype=float)
        self.rl = np.zeros_like(self.rh) if rl is None else np.asarray(rl, dtype=float)
        self.ih = np.zeros_like(self.rh) if ih is None else np.asarray(ih, dtype=float)
        self.il = np.zeros_like(self.rh) if il is None else np.asarray(il, dtype=float)

    @classmethod
    def from_complex(cls, z):
        z = np.asarray(z, dtype=complex)
        return cls(z.real.copy(), None, z.imag.copy(), None)

    @property
    def re(self):
        return self.rh, self.rl

    @property
    def im(self):
        return self.ih, self.il

    @property
    def shape(self):
        return self.rh.shape

    def to_complex(self):
        return (self.rh + self.rl) + 1j * (self.ih + self.il)

    def abs_hi(self):
        return np.hypot(self.rh, self.ih)

    def __getitem__(self, idx):
        return CDD(self.rh[idx], self.rl[idx], self.ih[idx], self.il[idx])

    def __setitem__(self, idx, val):
        self.rh[idx], self.rl[idx], self.ih[idx], self.il[idx] = val.rh, val.rl, val.ih, val.il

    def copy(self):
        return CDD(self.rh.copy(), self.rl.copy(), self.ih.copy(), self.il.copy())

    def __add__(self, other):
        other = _lift(other)
        r = dd_add(self.re, other.re)
        i = dd_add(self.im, other.im)
        return CDD(r[0], r[1], i[0], i[1])

    def __neg__(self):
        return CDD(-self.rh, -self.rl, -self.ih, -self.il)

    def __sub__(self, other):
        return self + (-_lift(other))

    def __mul__(self, other):
        other = _lift(other)
        r = dd_add(dd_mul(self.re, other.re), dd_neg(dd_mul(self.im, other.im)))
        i = dd_add(dd_mul(self.re, other.im), dd_mul(self.im, other.re))
        return CDD(r[0], r[1], i[0], i[1])

    def __truediv__(self, other):
        other = _lift(other)
        den = dd_add(dd_mul(other.re, other.re), dd_mul(other.im, other.im))
        num = self * CDD(other.rh, other.rl, -other.ih, -other.il)
        r = dd_div(num.re, den)
        i = dd_div(num.im, den)
        return CDD(r[0], r[1], i[0], i[1])


def _lift(x):
    return x if isinstance(x, CDD) else CDD.from_complex(x)


def polyval_matrix(coeffs, z):
    """``sum_i coeffs[i] z^i`` for each ``z`` (Horner, double-double).

    ``coeffs`` is a list of (n, n) complex matrices, ``z`` a 1-D array of
    nodes; returns a CDD of shape (len(z), n, n).
    """
    z = np.asarray(z, dtype=complex)
    zz = CDD.from_complex(z[:, None, None])
    acc = CDD.from_complex(np.broadcast_to(coeffs[-1], (len(z),) + coeffs[-1].shape).copy())
    for c in coeffs[-2::-1]:
        acc = acc * zz + CDD.from_complex(np.broadcast_to(c, acc.shape).copy())
    return acc


def lu_det(M):
    """Determinants of a batch (K, n, n) of double-double matrices."""
    M = M.copy()
    K, n, _ = M.shape
    det = CDD.from_complex(np.ones(K, dtype=complex))
    rows = np.arange(K)
    for k in range(n):
        p = k + np.argmax(M[:, k:, k].abs_hi(), axis=1)
        swap = p != k
        if np.any(swap):
            idx = rows[swap]
            a = M[idx, k, :].copy()
            M[idx, k, :] = M[idx, p[swap], :]
            M[idx, p[swap], :] = a
            det[idx] = -det[idx]
        piv = M[:, k, k]
        det = det * piv
        if k + 1 == n:
            break
        # batches whose pivot is exactly zero are singular; keep them finite
        zero = piv.abs_hi() == 0
        safe = piv.copy()
        safe[zero] = CDD.from_complex(np.ones(int(zero.sum()), dtype=complex))
        l = M[:, k + 1:, k] / CDD(safe.rh[:, None], safe.rl[:, None], safe.ih[:, None], safe.il[:, None])
        upd = CDD(l.rh[:, :, None], l.rl[:, :, None], l.ih[:, :, None], l.il[:, :, None]) * M[:, None, k, k + 1:]
        M[:, k + 1:, k + 1:] = M[:, k + 1:, k + 1:] - upd
    return det


def solve(A, b):
    """Solve one dense system ``A x = b`` in double-double (partial pivoting).

    ``A`` is (m, m) and ``b`` is (m,) or (m, r), both CDD or complex arrays.
    """
    A = _lift(A).copy()
    b = _lift(b).copy()
    vec = b.rh.ndim == 1
    if vec:
        b = CDD(b.rh[:, None], b.rl[:, None], b.ih[:, None], b.il[:, None])
    m = A.shape[0]
    for k in range(m):
        p = k + int(np.argmax(A[k:, k].abs_hi()))
        if p != k:
            for X in (A, b):
                a = X[k].copy()
                X[k] = X[p]
                X[p] = a
        if A[k, k].abs_hi() == 0:
            raise np.linalg.LinAlgError("singular matrix in double-double solve")
        l = A[k + 1:, k] / A[k, k]
        lc = CDD(l.rh[:, None], l.rl[:, None], l.ih[:, None], l.il[:, None])
        A[k + 1:, k:] = A[k + 1:, k:] - lc * A[None, k, k:]
        b[k + 1:] = b[k + 1:] - lc * b[None, k]
    x = b.copy()
    for k in range(m - 1, -1, -1):
        s = b[k]
        if k + 1 < m:
            prod = CDD(A.rh[k, k + 1:, None], A.rl[k, k + 1:, None], A.ih[k, k + 1:, None], A.il[k, k + 1:, None]) * x[k + 1:]
            tot = prod[0]
            for j in range(1, prod.shape[0]):
                tot = tot + prod[j]
            s = s - tot
        x[k] = s / A[k, k]
    return x[:, 0] if vec else x
