"""Exact rational points, axis-parallel lines and metrics.

Every quantity is a :class:`fractions.Fraction`; nothing in here ever touches
a float.  Points are plain tuples of fractions so they hash, compare and
serialize without ceremony.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Scalar = Fraction
Point = tuple  # tuple[Fraction, ...]; kept loose so callers may pass any tuple


class DimensionError(ValueError):
    """Operands live in different ambient dimensions."""


class MetricKind(enum.Enum):
    CHEBYSHEV = "chebyshev"
    EUCLIDEAN_SQUARED = "euclidean_squared"


CHEBYSHEV = MetricKind.CHEBYSHEV
EUCLIDEAN_SQUARED = MetricKind.EUCLIDEAN_SQUARED


def as_scalar(value) -> Fraction:
    """Coerce ints, Fractions and ``"num/den"`` strings to a Fraction.

    Floats are rejected: a float has already lost the exact value.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or isinstance(value, float):
        raise TypeError(f"refusing inexact scalar {value!r}")
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def point(*coords) -> tuple:
    """Build a point from exact coordinates, e.g. ``point(0, "1/2", 3)``."""
    if len(coords) == 1 and not isinstance(coords[0], (int, str, Fraction)):
        coords = tuple(coords[0])
    if len(coords) < 2:
        raise DimensionError("points need dimension n >= 2")
    return tuple(as_scalar(c) for c in coords)


@dataclass(frozen=True)
class AxisLine:
    """The line ``{x : x_j = offsets_j for j != free_axis}``.

    ``offsets`` lists the n-1 fixed coordinates in increasing axis order,
    skipping the free axis.
    """

    free_axis: int
    offsets: tuple

    def __post_init__(self):
        offsets = tuple(as_scalar(q) for q in self.offsets)
        object.__setattr__(self, "offsets", offsets)
        if len(offsets) < 1:
            raise DimensionError("a line needs ambient dimension n >= 2")
        if not 0 <= self.free_axis <= len(offsets):
            raise ValueError(f"free_axis {self.free_axis} out of range for n={self.dim}")

    @property
    def dim(self) -> int:
        return len(self.offsets) + 1

    def fixed_axes(self) -> list[int]:
        return [j for j in range(self.dim) if j != self.free_axis]

    def offset_at(self, axis: int) -> Fraction:
        """The fixed coordinate value on ``axis`` (which must not be the free axis)."""
        if axis == self.free_axis:
            raise ValueError("the free axis carries no offset")
        return self.offsets[axis if axis < self.free_axis else axis - 1]

    def at(self, t) -> tuple:
        """The point of the line whose free coordinate equals ``t``."""
        t = as_scalar(t)
        coords = list(self.offsets)
        coords.insert(self.free_axis, t)
        return tuple(coords)

    def normal(self, p: Sequence[Fraction]) -> dict[int, Fraction]:
        """Offset vector from the line to ``p`` on the fixed axes."""
        _check_dim(p, self.dim)
        return {j: p[j] - self.offset_at(j) for j in self.fixed_axes()}

    def contains(self, p: Sequence[Fraction]) -> bool:
        return all(v == 0 for v in self.normal(p).values())

    def height(self) -> int:
        return max(rational_height(q) for q in self.offsets)


def rational_height(q: Fraction) -> int:
    """``max(|numerator|, denominator)`` of a reduced fraction."""
    return max(abs(q.numerator), q.denominator)


def _check_dim(p: Sequence, n: int) -> None:
    if len(p) != n:
        raise DimensionError(f"expected dimension {n}, got {len(p)}")


def _combine(gaps: Iterable[Fraction], metric: MetricKind) -> Fraction:
    if metric is MetricKind.CHEBYSHEV:
        return max((abs(g) for g in gaps), default=Fraction(0))
    if metric is MetricKind.EUCLIDEAN_SQUARED:
        return sum((g * g for g in gaps), Fraction(0))
    raise ValueError(f"unknown metric {metric!r}")


def dist(p: Sequence[Fraction], q: Sequence[Fraction], metric: MetricKind = CHEBYSHEV) -> Fraction:
    """Exact Chebyshev distance, or exact squared Euclidean distance."""
    _check_dim(q, len(p))
    return _combine((a - b for a, b in zip(p, q)), metric)


def dist_point_line(p: Sequence[Fraction], line: AxisLine, metric: MetricKind = CHEBYSHEV) -> Fraction:
    """Distance from ``p`` to ``line``; the free axis contributes nothing."""
    return _combine(line.normal(p).values(), metric)


def diameter(points: Iterable[Sequence[Fraction]], metric: MetricKind = CHEBYSHEV) -> Fraction:
    pts = list(points)
    if not pts:
        raise ValueError("diameter of an empty set is undefined")
    best = Fraction(0)
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            d = dist(pts[i], pts[j], metric)
            if d > best:
                best = d
    return best


def sub(p: Sequence[Fraction], q: Sequence[Fraction]) -> tuple:
    _check_dim(q, len(p))
    return tuple(a - b for a, b in zip(p, q))


def add(p: Sequence[Fraction], q: Sequence[Fraction]) -> tuple:
    _check_dim(q, len(p))
    return tuple(a + b for a, b in zip(p, q))


def scale(c: Fraction, p: Sequence[Fraction]) -> tuple:
    return tuple(c * a for a in p)


# --- JSON forms -------------------------------------------------------------


def scalar_to_json(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def scalar_from_json(s) -> Fraction:
    if isinstance(s, int) and not isinstance(s, bool):
        return Fraction(s)
    if not isinstance(s, str):
        raise ValueError(f"rationals travel as 'num/den' strings, got {s!r}")
    try:
        q = Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"invalid rational {s!r}") from exc
    if "." in s or "e" in s.lower():
        raise ValueError(f"decimal notation is not accepted: {s!r}")
    return q


def point_to_json(p: Sequence[Fraction]) -> list[str]:
    return [scalar_to_json(c) for c in p]


def point_from_json(data) -> tuple:
    return point(*[scalar_from_json(c) for c in data])


def line_to_json(line: AxisLine) -> dict:
    return {"axis": line.free_axis, "offsets": [scalar_to_json(q) for q in line.offsets]}


def line_from_json(data: dict) -> AxisLine:
    return AxisLine(int(data["axis"]), tuple(scalar_from_json(q) for q in data["offsets"]))
