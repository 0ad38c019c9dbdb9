"""Enumeration of the axis-parallel lines with rational offsets.

A point with at least n-1 rational coordinates lies on the axis-parallel line
that fixes those coordinates, so this countable family covers every point
that is *not* in the Nöbeling space of codimension 2.

Index layout, for ambient dimension n and index i::

    free_axis = i mod n
    t         = i div n        # tuple index
    t         = pair(c_0, pair(c_1, ... pair(c_{n-3}, c_{n-2})))
    offset_j  = nth_rational(c_j)

``pair`` is the Cantor pairing function and ``nth_rational`` walks the
Calkin-Wilf tree, interleaving positives (odd slots) and negatives (even
slots) after 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Sequence

import numpy as np

from . import _kernels
from .geometry import AxisLine


# --- rationals ----------------------------------------------------------------


def calkin_wilf(j: int) -> Fraction:
    """The j-th term (1-based) of the Calkin-Wilf sequence: 1, 1/2, 2, 1/3, ..."""
    if j < 1:
        raise ValueError("Calkin-Wilf terms are indexed from 1")
    a, b = 1, 1
    for bit in bin(j)[3:]:
        if bit == "0":
            b = a + b
        else:
            a = a + b
    return Fraction(a, b)


def calkin_wilf_index(q: Fraction) -> int:
    """Inverse of :func:`calkin_wilf` for a positive rational."""
    a, b = q.numerator, q.denominator
    if a <= 0:
        raise ValueError("only positive rationals sit in the Calkin-Wilf tree")
    # Climb to the root in runs: a left run strips multiples of a from b,
    # a right run strips multiples of b from a.
    bits = []
    while a != b:
        if a < b:
            k = (b - 1) // a
            b -= k * a
            bits.append("0" * k)
        else:
            k = (a - 1) // b
            a -= k * b
            bits.append("1" * k)
    return int("1" + "".join(reversed(bits)), 2)


def nth_rational(i: int) -> Fraction:
    if i < 0:
        raise ValueError("rational index must be non-negative")
    if i == 0:
        return Fraction(0)
    if i % 2:
        return calkin_wilf((i + 1) // 2)
    return -calkin_wilf(i // 2)


def rational_index(q) -> int:
    q = Fraction(q)
    if q == 0:
        return 0
    if q > 0:
        return 2 * calkin_wilf_index(q) - 1
    return 2 * calkin_wilf_index(-q)


# --- tuples -------------------------------------------------------------------


def pair(a: int, b: int) -> int:
    s = a + b
    return s * (s + 1) // 2 + b


def unpair(z: int) -> tuple[int, int]:
    w = (isqrt(8 * z + 1) - 1) // 2
    b = z - w * (w + 1) // 2
    return w - b, b


def tuple_index(values: Sequence[int]) -> int:
    if not values:
        raise ValueError("empty tuple")
    t = values[-1]
    for v in reversed(values[:-1]):
        t = pair(v, t)
    return t


def tuple_from_index(t: int, length: int) -> list[int]:
    out = []
    for _ in range(length - 1):
        v, t = unpair(t)
        out.append(v)
    out.append(t)
    return out


# --- lines --------------------------------------------------------------------


def nth_line(n_dim: int, i: int) -> AxisLine:
    if n_dim < 2:
        raise ValueError("lines need ambient dimension >= 2")
    if i < 0:
        raise ValueError("line index must be non-negative")
    axis, t = i % n_dim, i // n_dim
    offsets = tuple(nth_rational(c) for c in tuple_from_index(t, n_dim - 1))
    return AxisLine(axis, offsets)


def index_of_line(line: AxisLine) -> int:
    t = tuple_index([rational_index(q) for q in line.offsets])
    return line.free_axis + line.dim * t


def rationals_of_height(height: int) -> list[Fraction]:
    """All rationals with ``max(|num|, den) <= height``, sorted."""
    pos = {Fraction(p, q) for p in range(1, height + 1) for q in range(1, height + 1)}
    return sorted({Fraction(0)} | pos | {-q for q in pos})


def prefix_bound(height: int, n_dim: int) -> int:
    """An N such that every line with offsets of height <= ``height`` has index < N.

    Cantor pairing is increasing in each argument, so the largest index is
    reached when every offset takes the largest rational index of that height.
    """
    top = max(rational_index(q) for q in rationals_of_height(height))
    return (n_dim - 1) + n_dim * tuple_index([top] * (n_dim - 1)) + 1


def all_lines_of_height(height: int, n_dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Every line of bounded height as ``(axes, rational_index_columns)`` arrays."""
    idx = np.array([rational_index(q) for q in rationals_of_height(height)], dtype=np.int64)
    grids = np.meshgrid(*([idx] * (n_dim - 1)), indexing="ij")
    cols = np.stack([g.ravel() for g in grids], axis=1)
    axes = np.repeat(np.arange(n_dim, dtype=np.int64), cols.shape[0])
    return axes, np.tile(cols, (n_dim, 1))


def bulk_line_indices(axes, cols, n_dim: int, use_numba: bool | None = None) -> np.ndarray:
    return _kernels.line_indices(axes, cols, n_dim, use_numba)


# --- covering -----------------------------------------------------------------


@dataclass(frozen=True)
class FlaggedPoint:
    """A stored point plus a per-coordinate "this coordinate is rational" flag.

    Stored coordinates are always rationals; the flags model which of them
    stand in for genuinely rational values of the underlying real point.
    """

    coords: tuple
    rational: tuple

    def __post_init__(self):
        if len(self.coords) != len(self.rational):
            raise ValueError("one rationality flag per coordinate")


def lines_through(p: FlaggedPoint) -> list[AxisLine]:
    n = len(p.coords)
    flagged = [j for j in range(n) if p.rational[j]]
    if len(flagged) < n - 1:
        return []
    out = []
    for axis in range(n):
        if all(p.rational[j] for j in range(n) if j != axis):
            out.append(AxisLine(axis, tuple(p.coords[j] for j in range(n) if j != axis)))
    return out
