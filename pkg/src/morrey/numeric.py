"""Exact/float number handling shared by every module.

Rational mode stores values as ``gmpy2.mpq`` (inside numpy object arrays for
bulk data); float mode uses plain ``float`` / ``float64``.  ``mpq`` compares and
hashes equal to :class:`fractions.Fraction`, so callers may pass either.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Any, Iterable, Literal

import gmpy2
import numpy as np

Mode = Literal["rational", "float"]
MODES: tuple[str, ...] = ("rational", "float")

mpq = gmpy2.mpq
_MPQ_TYPE = type(mpq(0))

FLOAT_TOLERANCE = 1e-9


def check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ValueError(f"unknown arithmetic mode {mode!r}; expected one of {MODES}")
    return mode


def exact(x: Any):
    """Convert an int/Fraction/mpq/float/str to ``mpq`` without rounding."""
    if isinstance(x, _MPQ_TYPE):
        return x
    if isinstance(x, (bool, np.bool_)):
        return mpq(int(x))
    if isinstance(x, (int, np.integer)):
        return mpq(int(x))
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, Rational):
        return mpq(int(x.numerator), int(x.denominator))
    if isinstance(x, (float, np.floating)):
        if not math.isfinite(x):
            raise ValueError(f"cannot represent {x!r} exactly")
        return mpq(float(x))
    if isinstance(x, str):
        return exact(Fraction(x.strip()))
    # mpz and friends
    return mpq(x)


def is_exact_scalar(x: Any) -> bool:
    return isinstance(x, (int, np.integer, Fraction, _MPQ_TYPE)) and not isinstance(x, bool)


def as_mode(x: Any, mode: str):
    return exact(x) if mode == "rational" else float(x)


def to_fraction(x: Any) -> Fraction:
    q = exact(x)
    return Fraction(int(q.numerator), int(q.denominator))


def array(values: Iterable, mode: str) -> np.ndarray:
    """Build a numpy array in the requested mode (object-of-mpq or float64)."""
    check_mode(mode)
    if mode == "float":
        return np.asarray(values, dtype=float)
    arr = np.asarray(values, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    flat_in = arr.reshape(-1)
    flat_out = out.reshape(-1)
    for i, v in enumerate(flat_in):
        flat_out[i] = exact(v)
    return out


def mode_of_array(arr: np.ndarray) -> str:
    return "rational" if arr.dtype == object else "float"


def mode_of_values(values: Iterable) -> str:
    """Rational iff every value is exact."""
    return "rational" if all(is_exact_scalar(v) for v in values) else "float"


def exact_sqrt(q) -> Any:
    """sqrt of a nonnegative rational: exact ``mpq`` if a perfect square, else float."""
    q = exact(q)
    if q < 0:
        raise ValueError("sqrt of negative number")
    num, den = int(q.numerator), int(q.denominator)
    if gmpy2.is_square(num) and gmpy2.is_square(den):
        return mpq(int(gmpy2.isqrt(num)), int(gmpy2.isqrt(den)))
    return math.sqrt(num / den) if num < 2**1000 else float(gmpy2.sqrt(q))


def dump_number(x: Any) -> Any:
    """JSON form: exact values become ``"p/q"`` strings, floats stay numbers."""
    if isinstance(x, (float, np.floating)):
        return float(x)
    if is_exact_scalar(x):
        q = exact(x)
        return str(q) if q.denominator != 1 else str(int(q.numerator))
    raise TypeError(f"cannot serialize {type(x).__name__}")


def load_number(x: Any, mode: str | None = None) -> Any:
    if isinstance(x, str):
        q = exact(x)
        return q if mode != "float" else float(q)
    if isinstance(x, bool):
        raise TypeError("boolean is not a number")
    if isinstance(x, int):
        return exact(x) if mode != "float" else float(x)
    if isinstance(x, float):
        return float(x) if mode != "rational" else exact(x)
    raise TypeError(f"cannot parse number from {x!r}")
