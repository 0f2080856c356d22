"""JSON file formats.

Polynomial::

    {"n": 2, "d": 1, "coeffs": [M_0, ..., M_d]}

Pencil::

    {"N": 2, "P0": M, "P1": M}

where each matrix ``M`` is a list of rows and every entry a ``[re, im]``
pair (row-major).  Ragged rows, wrong counts or malformed entries raise
:class:`FormatError`.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import FormatError, PolyLinError
from .polycore import MatrixPolynomial, Pencil


def encode_matrix(M):
    M = np.asarray(M, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def decode_matrix(obj, shape, what="matrix"):
    rows, cols = shape
    if not isinstance(obj, list) or len(obj) != rows:
        raise FormatError(f"{what}: expected {rows} rows")
    out = np.empty(shape, dtype=complex)
    for i, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != cols:
            raise FormatError(f"{what}: row {i} must have {cols} entries (ragged matrix)")
        for j, z in enumerate(row):
            if (not isinstance(z, list) or len(z) != 2
                    or not all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in z)):
                raise FormatError(f"{what}[{i}][{j}]: entries must be [re, im] number pairs")
            out[i, j] = complex(z[0], z[1])
    return out


def encode_vector(v):
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex).ravel()]


def _posint(obj, key):
    v = obj.get(key)
    if not isinstance(v, int) or isinstance(v, bool) or v < 0:
        raise FormatError(f"field {key!r} must be a nonnegative integer")
    return v


def polynomial_from_json(obj):
    if not isinstance(obj, dict) or not {"n", "d", "coeffs"} <= set(obj):
        raise FormatError("polynomial needs fields n, d, coeffs")
    n, d = _posint(obj, "n"), _posint(obj, "d")
    if n == 0:
        raise FormatError("n must be positive")
    coeffs = obj["coeffs"]
    if not isinstance(coeffs, list) or len(coeffs) != d + 1:
        raise FormatError(f"coeffs must list d+1 = {d + 1} matrices")
    mats = [decode_matrix(c, (n, n), f"coeffs[{i}]") for i, c in enumerate(coeffs)]
    try:
        return MatrixPolynomial(mats)
    except PolyLinError:
        raise
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def polynomial_to_json(P):
    return {"n": P.n, "d": P.d, "coeffs": [encode_matrix(c) for c in P.coeffs]}


def pencil_from_json(obj):
    if not isinstance(obj, dict) or not {"N", "P0", "P1"} <= set(obj):
        raise FormatError("pencil needs fields N, P0, P1")
    N = _posint(obj, "N")
    if N == 0:
        raise FormatError("N must be positive")
    return Pencil(decode_matrix(obj["P0"], (N, N), "P0"), decode_matrix(obj["P1"], (N, N), "P1"))


def pencil_to_json(L):
    return {"N": L.N, "P0": encode_matrix(L.P0), "P1": encode_matrix(L.P1)}


def _load(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc


def read_polynomial(path):
    return polynomial_from_json(_load(path))


def read_pencil(path):
    return pencil_from_json(_load(path))


def read_any(path):
    """A MatrixPolynomial or a Pencil, decided by the fields present."""
    obj = _load(path)
    if isinstance(obj, dict) and "coeffs" in obj:
        return polynomial_from_json(obj)
    if isinstance(obj, dict) and "P0" in obj:
        return pencil_from_json(obj)
    raise FormatError(f"{path}: neither a polynomial (coeffs) nor a pencil (P0, P1)")


def write_json(obj, path):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1)
        fh.write("\n")


def write_polynomial(P, path):
    write_json(polynomial_to_json(P), path)


def write_pencil(L, path):
    write_json(pencil_to_json(L), path)
