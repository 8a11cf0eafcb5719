"""Array coercion shared by the domain types.

Inputs containing :class:`fractions.Fraction` entries are kept as object
arrays of Fractions so that model <-> network conversions stay exact.
Everything else becomes float64 (or complex128 where allowed).
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np


def _contains_fraction(values) -> bool:
    if isinstance(values, Fraction):
        return True
    if isinstance(values, np.ndarray):
        return values.dtype == object and any(isinstance(v, Fraction) for v in values.flat)
    if isinstance(values, (list, tuple)):
        return any(_contains_fraction(v) for v in values)
    return False


def as_real_array(values, ndim: int, name: str = "array") -> np.ndarray:
    """Coerce to a read-only real array, exact (Fraction) if any entry is a Fraction."""
    if _contains_fraction(values):
        arr = np.array(values, dtype=object)
        arr = np.vectorize(Fraction, otypes=[object])(arr) if arr.size else arr
    else:
        arr = np.array(values, dtype=float)
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"{name} has non-finite entries")
    if arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


def as_numeric(values, name: str = "array") -> np.ndarray:
    """Coerce to float64 or complex128 (Fractions are converted to float)."""
    arr = np.asarray(values)
    if arr.dtype == object:
        arr = arr.astype(complex) if any(isinstance(v, complex) for v in arr.flat) else arr.astype(float)
    elif not np.issubdtype(arr.dtype, np.complexfloating):
        arr = arr.astype(float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def is_exact(arr: np.ndarray) -> bool:
    return arr.dtype == object


def real_if_close(arr: np.ndarray, tol: float) -> np.ndarray:
    """Drop the imaginary part when it is below ``tol`` everywhere."""
    if np.iscomplexobj(arr) and np.all(np.abs(arr.imag) <= tol):
        return arr.real.copy()
    return arr


def encode_array(arr) -> list:
    """JSON form of an array: plain numbers when real, ``[re, im]`` pairs otherwise.

    Fraction entries are written as ``"p/q"`` strings.
    """
    arr = np.asarray(arr)
    if arr.dtype == object:
        return [encode_array(a) for a in arr] if arr.ndim > 1 else [
            (str(v) if v.denominator != 1 else v.numerator) if isinstance(v, Fraction) else float(v) for v in arr
        ]
    if np.iscomplexobj(arr):
        return np.stack([arr.real, arr.imag], axis=-1).tolist()
    return arr.astype(float).tolist()


def _decode_entry(v):
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ValueError(f"complex entries must be [re, im] pairs, got {v!r}")
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValueError(f"not a number: {v!r}")
    return v


def decode_matrix(data) -> np.ndarray:
    """Inverse of :func:`encode_array` for matrices (rows of numbers, "p/q" strings or [re, im] pairs)."""
    if not isinstance(data, list) or not data or not all(isinstance(r, list) for r in data):
        raise ValueError("expected a non-empty list of rows")
    rows = [[_decode_entry(v) for v in row] for row in data]
    if len({len(r) for r in rows}) != 1:
        raise ValueError("ragged matrix")
    flat = [v for r in rows for v in r]
    if any(isinstance(v, complex) for v in flat):
        return np.array([[complex(v) for v in r] for r in rows])
    if any(isinstance(v, Fraction) for v in flat):
        return as_real_array(rows, 2, "matrix")
    return np.array(rows, dtype=float)
