"""Seeded generators for sample sets, lines and flagged points.

Every generator takes a :class:`random.Random` (or a seed) so a fixture is a
pure function of its seed.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .geometry import AxisLine
from .lines import FlaggedPoint, nth_line


def _rng(seed_or_rng) -> random.Random:
    if isinstance(seed_or_rng, random.Random):
        return seed_or_rng
    return random.Random(seed_or_rng)


def random_rational(rng, height: int) -> Fraction:
    """A rational with ``max(|num|, den) <= height``."""
    return Fraction(rng.randint(-height, height), rng.randint(1, height))


def random_point(rng, dim: int, height: int) -> tuple:
    return tuple(random_rational(rng, height) for _ in range(dim))


def random_line(rng, dim: int, height: int) -> AxisLine:
    return AxisLine(rng.randrange(dim), tuple(random_rational(rng, height) for _ in range(dim - 1)))


def snap_to_line(p: tuple, line: AxisLine) -> tuple:
    """Keep the free coordinate of ``p`` and copy the line's fixed coordinates."""
    return line.at(p[line.free_axis])


def game_samples(seed, dim: int, count: int, rounds: int, height: int = 8) -> list[tuple]:
    """Random distinct samples; the first ``min(count // 2, rounds)`` sit on
    lines 1, 2, ... of the enumeration so that those rounds have work to do."""
    rng = _rng(seed)
    out: list[tuple] = []
    on_line = min(count // 2, rounds)
    while len(out) < count:
        p = random_point(rng, dim, height)
        if len(out) < on_line:
            p = snap_to_line(p, nth_line(dim, len(out) + 1))
        if p not in out:
            out.append(p)
    return out


def straighten_fixture(seed, dim: int = 4, max_samples: int = 20, height: int = 8):
    """(samples, line, eps, clearance) with some samples exactly on the line and
    some just off it."""
    rng = _rng(seed)
    line = random_line(rng, dim, height)
    eps = Fraction(1, rng.choice([2, 4, 10, 16]))
    clearance = eps / rng.choice([8, 10, 16, 32])
    pts: list[tuple] = []
    count = rng.randint(1, max_samples)
    while len(pts) < count:
        p = random_point(rng, dim, height)
        mode = rng.random()
        if mode < 0.35:
            p = snap_to_line(p, line)
        elif mode < 0.6:
            # a near miss: offset by a small rational on one fixed axis
            base = list(snap_to_line(p, line))
            j = rng.choice(line.fixed_axes())
            base[j] += Fraction(rng.randint(-8, 8), rng.randint(8, 64)) * eps
            p = tuple(base)
        if p not in pts:
            pts.append(p)
    return pts, line, eps, clearance


def flagged_point(rng, dim: int, rational_count: int, height: int = 16) -> FlaggedPoint:
    rng = _rng(rng)
    coords = random_point(rng, dim, height)
    axes = list(range(dim))
    rng.shuffle(axes)
    flags = [False] * dim
    for j in axes[:rational_count]:
        flags[j] = True
    return FlaggedPoint(coords, tuple(flags))
