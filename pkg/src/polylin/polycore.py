"""Homogeneous matrix polynomials, pencils and points on the Riemann sphere.

A degree-d polynomial is stored by its coefficients ``A_0 .. A_d`` where
``A_i`` multiplies ``lam**i * mu**(d - i)``; the affine variable is
``x = lam / mu`` and ``x = inf`` is the point ``(1, 0)``.

Every pencil in the package is stored as a pair ``(P0, P1)`` meaning

    P(lam, mu) = mu * P0 - lam * P1

so its affine form is ``P0 - x P1``.  Forms that are usually written with the
opposite overall sign (e.g. ``lam C1 - mu C0``) are stored as ``(C0, C1)``;
a global sign does not change eigenvalues, eigenvectors or Jordan structure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegreeError, ScalingError, ZeroPolynomialError

EPS = np.finfo(float).eps


def _frozen(a):
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def spectral_norm(M):
    """2-norm (largest singular value); 0 for empty matrices."""
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def rank_tolerance(M, sv=None):
    """Standard numerical-rank threshold ``max(m, n) * eps * sigma_max``."""
    M = np.asarray(M)
    if sv is None:
        sv = np.linalg.svd(M, compute_uv=False)
    return max(M.shape) * EPS * (sv[0] if len(sv) else 0.0)


# ---------------------------------------------------------------------------
# points


@dataclass(frozen=True)
class HomogeneousPoint:
    """A point ``(lam, mu)`` of the projective line, stored canonically.

    The pair is scaled to unit 2-norm and its phase is fixed so that the
    larger-modulus coordinate is real and nonnegative (``lam`` on ties).
    """

    lam: complex
    mu: complex

    def __post_init__(self):
        lam, mu = complex(self.lam), complex(self.mu)
        if not (np.isfinite(lam) and np.isfinite(mu)):
            raise ValueError("homogeneous coordinates must be finite")
        s = math.hypot(abs(lam), abs(mu))
        if s == 0.0:
            raise ValueError("(0, 0) is not a point of the projective line")
        if abs(s - 1.0) > 4 * EPS:  # keeps canonical points bit-stable on reconstruction
            lam, mu = lam / s, mu / s
        on_lam = abs(lam) >= abs(mu)
        pivot = lam if on_lam else mu
        phase = pivot / abs(pivot)
        lam, mu = lam / phase, mu / phase
        if on_lam:
            lam = complex(lam.real, 0.0)
        else:
            mu = complex(mu.real, 0.0)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "mu", mu)

    @classmethod
    def from_affine(cls, x):
        if np.isinf(x):
            return cls(1.0, 0.0)
        return cls(complex(x), 1.0)

    @property
    def affine(self):
        """``lam / mu`` or ``inf``."""
        if self.mu == 0:
            return complex(np.inf)
        return self.lam / self.mu

    @property
    def is_infinite(self):
        return self.mu == 0

    def __iter__(self):
        yield self.lam
        yield self.mu

    def as_list(self):
        return [self.lam.real, self.lam.imag, self.mu.real, self.mu.imag]


def as_point(pt):
    if isinstance(pt, HomogeneousPoint):
        return pt
    lam, mu = pt
    return HomogeneousPoint(lam, mu)


def chordal_distance(p, q):
    """Angle between the complex lines spanned by ``p`` and ``q``, in [0, pi/2].

    Equals ``arccos |<p, q>|`` for unit representatives; evaluated through
    ``atan2(|det|, |<p, q>|)`` so that tiny distances keep full relative
    accuracy.
    """
    p, q = as_point(p), as_point(q)
    inner = abs(p.lam * np.conj(q.lam) + p.mu * np.conj(q.mu))
    cross = abs(p.lam * q.mu - p.mu * q.lam)
    return float(math.atan2(cross, inner))


def direction_distance(u, v):
    """Angle between the complex lines spanned by two nonzero vectors."""
    u = np.asarray(u, dtype=complex).ravel()
    v = np.asarray(v, dtype=complex).ravel()
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        return math.pi / 2
    u, v = u / nu, v / nv
    c = np.vdot(u, v)
    s = np.linalg.norm(v - u * c)
    return float(math.atan2(s, abs(c)))


# ---------------------------------------------------------------------------
# polynomials


@dataclass(frozen=True)
class MatrixPolynomial:
    """``A(lam, mu) = sum_i A_i lam**i mu**(d-i)`` with square coefficients."""

    coeffs: tuple

    def __init__(self, coeffs):
        mats = [np.atleast_2d(np.asarray(c, dtype=complex)) for c in coeffs]
        if not mats:
            raise DegreeError("a matrix polynomial needs at least one coefficient")
        n = mats[0].shape[0]
        for i, c in enumerate(mats):
            if c.ndim != 2 or c.shape != (n, n):
                raise ValueError(f"coefficient {i} has shape {c.shape}, expected {(n, n)}")
        if n == 0:
            raise ValueError("matrix dimension must be positive")
        if all(not np.any(c) for c in mats):
            raise ZeroPolynomialError("the zero polynomial is not allowed")
        object.__setattr__(self, "coeffs", tuple(_frozen(c) for c in mats))

    @property
    def n(self):
        return self.coeffs[0].shape[0]

    @property
    def d(self):
        return len(self.coeffs) - 1

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, i):
        return self.coeffs[i]

    def evaluate(self, lam, mu):
        return evaluate(self, (lam, mu))

    def norms(self):
        return np.array([spectral_norm(c) for c in self.coeffs])

    def derivatives(self, lam, mu):
        """Partial derivatives ``(dA/dlam, dA/dmu)`` at ``(lam, mu)``."""
        d = self.d
        dl = np.zeros((self.n, self.n), dtype=complex)
        dm = np.zeros((self.n, self.n), dtype=complex)
        for i, c in enumerate(self.coeffs):
            if i > 0:
                dl += i * lam ** (i - 1) * mu ** (d - i) * c
            if i < d:
                dm += (d - i) * lam**i * mu ** (d - i - 1) * c
        return dl, dm

    def __eq__(self, other):
        if not isinstance(other, MatrixPolynomial):
            return NotImplemented
        return len(self) == len(other) and all(np.array_equal(a, b) for a, b in zip(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash(tuple(c.tobytes() for c in self.coeffs))


def evaluate(P, pt):
    """Evaluate a polynomial (or pencil) at a homogeneous point.

    Horner's rule runs in the ratio of the smaller to the larger coordinate,
    so no negative powers or overflowing ratios appear.
    """
    if isinstance(P, Pencil):
        return P.evaluate(*pt)
    lam, mu = (complex(c) for c in pt)
    A = P.coeffs
    d = len(A) - 1
    if abs(lam) >= abs(mu):
        t = mu / lam
        acc = np.array(A[0])
        for i in range(1, d + 1):
            acc = acc * t + A[i]
        return acc * lam**d
    t = lam / mu
    acc = np.array(A[d])
    for i in range(d - 1, -1, -1):
        acc = acc * t + A[i]
    return acc * mu**d


def rev_poly(P):
    """Coefficient reversal ``A_i -> A_{d-i}`` (swaps the roles of lam and mu)."""
    return MatrixPolynomial(P.coeffs[::-1])


def col_stack(P):
    """``[A_0; A_1; ...; A_d]``, shape ``((d+1)n, n)``."""
    return np.vstack(P.coeffs)


def row_stack(P):
    """``[A_0, A_1, ..., A_d]``, shape ``(n, (d+1)n)``."""
    return np.hstack(P.coeffs)


# ---------------------------------------------------------------------------
# pencils


@dataclass(frozen=True)
class Pencil:
    """``P(lam, mu) = mu * P0 - lam * P1`` (affine form ``P0 - x P1``)."""

    P0: np.ndarray
    P1: np.ndarray

    def __post_init__(self):
        P0 = np.atleast_2d(np.asarray(self.P0, dtype=complex))
        P1 = np.atleast_2d(np.asarray(self.P1, dtype=complex))
        if P0.ndim != 2 or P0.shape[0] != P0.shape[1] or P0.shape != P1.shape:
            raise ValueError(f"pencil coefficients must be square and equal-sized, got {P0.shape} and {P1.shape}")
        object.__setattr__(self, "P0", _frozen(P0))
        object.__setattr__(self, "P1", _frozen(P1))

    @property
    def N(self):
        return self.P0.shape[0]

    def evaluate(self, lam, mu):
        return mu * self.P0 - lam * self.P1

    def swapped(self):
        """Reversal: ``(P1, P0)``, a pencil in the roles-exchanged variables."""
        return Pencil(self.P1, self.P0)

    def conj_transpose(self):
        return Pencil(self.P0.conj().T, self.P1.conj().T)

    def scaled(self, c):
        return Pencil(c * self.P0, c * self.P1)

    def row_stack(self):
        return np.hstack([self.P0, self.P1])

    def col_stack(self):
        return np.vstack([self.P0, self.P1])

    def fro_norm(self):
        return float(np.linalg.norm(self.col_stack()))

    def norms(self):
        return spectral_norm(self.P0), spectral_norm(self.P1)

    def as_polynomial(self):
        """The pencil as a degree-1 ``MatrixPolynomial`` ``[P0, -P1]``."""
        return MatrixPolynomial([self.P0, -self.P1])

    def __eq__(self, other):
        if not isinstance(other, Pencil):
            return NotImplemented
        return np.array_equal(self.P0, other.P0) and np.array_equal(self.P1, other.P1)

    def __hash__(self):
        return hash((self.P0.tobytes(), self.P1.tobytes()))


# ---------------------------------------------------------------------------
# eigentriples


@dataclass(frozen=True, eq=False)
class EigenTriple:
    """An eigenvalue with unit right/left eigenvectors of ``source``.

    ``source`` is the Pencil or MatrixPolynomial the vectors belong to; the
    residuals are recomputed from it on every access.
    """

    point: HomogeneousPoint
    x: np.ndarray
    y: np.ndarray
    source: object = field(repr=False, default=None)
    tag: str = ""

    def __post_init__(self):
        object.__setattr__(self, "point", as_point(self.point))
        for name in ("x", "y"):
            v = np.asarray(getattr(self, name), dtype=complex).ravel()
            nv = np.linalg.norm(v)
            if nv == 0:
                raise ValueError(f"eigenvector {name} must be nonzero")
            object.__setattr__(self, name, _frozen(v / nv))

    def _matrix(self):
        return evaluate(self.source, (self.point.lam, self.point.mu))

    @property
    def residual_right(self):
        return float(np.linalg.norm(self._matrix() @ self.x))

    @property
    def residual_left(self):
        return float(np.linalg.norm(self.y.conj() @ self._matrix()))


# ---------------------------------------------------------------------------
# Fan--Lin--Van Dooren scaling


@dataclass(frozen=True)
class ScalingReport:
    """``A_scaled(x') = delta * A(gamma * x')``; original eigenvalue = gamma * scaled."""

    gamma: float
    delta: float

    def unscale(self, pt):
        pt = as_point(pt)
        return HomogeneousPoint(self.gamma * pt.lam, pt.mu)

    def scale(self, pt):
        pt = as_point(pt)
        return HomogeneousPoint(pt.lam, self.gamma * pt.mu)


def scale_fan_lin_van_dooren(P):
    """Standard quadratic scaling with ``gamma = sqrt(|A0|/|A2|)`` and
    ``delta = 2 / (|A0| + gamma |A1|)`` (spectral norms)."""
    if P.d != 2:
        raise DegreeError(f"Fan-Lin-Van Dooren scaling needs degree 2, got {P.d}")
    n0, n1, n2 = P.norms()
    if n0 == 0 or n2 == 0:
        raise ScalingError("scaling undefined: A0 or A2 is zero")
    gamma = math.sqrt(n0 / n2)
    delta = 2.0 / (n0 + gamma * n1)
    scaled = MatrixPolynomial([delta * gamma**i * c for i, c in enumerate(P.coeffs)])
    return scaled, ScalingReport(gamma, delta)
