"""Invertible self-maps of R^n used as moves in the perturbation game.

Four kinds of map live here:

* :class:`Identity`
* :class:`PushAway`: the radial push away from an axis line, which moves
  every point within ``eps`` of the line out to distance at least ``eps/2``
* :class:`Bump`: a piecewise-linear translation supported in a cylinder
  around a segment of a line, the identity on the cylinder boundary
* :class:`Composite`: a chain of the above

All evaluation is exact on rational points with the Chebyshev norm, and
every map carries its displacement bound and an inverse-modulus factor
``c`` with ``|p - p'| <= c |F(p) - F(p')|``.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .geometry import (
    AxisLine,
    as_scalar,
    dist,
    dist_point_line,
    line_from_json,
    line_to_json,
    point_from_json,
    point_to_json,
    scalar_from_json,
    scalar_to_json,
)


class DomainError(ValueError):
    """The map is not defined at the given point."""


class InfeasibleError(ValueError):
    """A requested move cannot be built with the given parameters."""


class MoveKind(enum.Enum):
    PUSH_AWAY = "PUSH_AWAY"
    BUMP = "BUMP"
    COMPOSITE = "COMPOSITE"
    IDENTITY = "IDENTITY"


class MoveMap:
    kind: MoveKind
    displacement_bound: Fraction
    inverse_modulus: Fraction

    def forward(self, p):
        raise NotImplementedError

    def inverse(self, p):
        raise NotImplementedError

    def __call__(self, p):
        return self.forward(p)

    def in_support(self, p) -> bool:
        """True on a closed set outside of which the map is the identity."""
        raise NotImplementedError

    def support_box(self):
        """Bounding box ``(lo, hi)`` of the support, None if unbounded, () if empty."""
        raise NotImplementedError

    @property
    def support_radius(self) -> Fraction | None:
        box = self.support_box()
        if box is None:
            return None
        if box == ():
            return Fraction(0)
        lo, hi = box
        return max(h - l for l, h in zip(lo, hi)) / 2

    def to_json(self) -> dict:
        raise NotImplementedError


class Identity(MoveMap):
    kind = MoveKind.IDENTITY
    displacement_bound = Fraction(0)
    inverse_modulus = Fraction(1)

    def forward(self, p):
        return tuple(p)

    def inverse(self, p):
        return tuple(p)

    def in_support(self, p) -> bool:
        return False

    def support_box(self):
        return ()

    def to_json(self) -> dict:
        return {"kind": self.kind.value}

    def __repr__(self):
        return "Identity()"


IDENTITY = Identity()


# --- push away ----------------------------------------------------------------


def xi(r: Fraction, eps: Fraction) -> Fraction:
    """Radial profile: ``(eps + r)/2`` below ``eps``, identity from ``eps`` on."""
    if r <= 0:
        raise DomainError("xi is defined on (0, inf)")
    return (eps + r) / 2 if r < eps else r


def xi_inverse(s: Fraction, eps: Fraction) -> Fraction:
    if s >= eps:
        return s
    if s <= eps / 2:
        raise DomainError(f"radius {s} is not in the image of xi (needs > eps/2)")
    return 2 * s - eps


class PushAway(MoveMap):
    """Rescale the normal part of ``p`` so its Chebyshev norm ``r`` becomes ``xi(r)``."""

    kind = MoveKind.PUSH_AWAY
    inverse_modulus = Fraction(2)

    def __init__(self, line: AxisLine, eps):
        eps = as_scalar(eps)
        if eps <= 0:
            raise ValueError("push_away needs eps > 0")
        self.line = line
        self.eps = eps
        self.displacement_bound = eps / 2

    def _rescale(self, p, radial):
        normal = self.line.normal(p)
        r = max(abs(v) for v in normal.values())
        if r == 0:
            raise DomainError(f"{p} lies on the excluded line")
        s = radial(r, self.eps)
        if s == r:
            return tuple(p)
        factor = s / r
        out = list(p)
        for j, v in normal.items():
            out[j] = self.line.offset_at(j) + factor * v
        return tuple(out)

    def forward(self, p):
        return self._rescale(p, xi)

    def inverse(self, p):
        return self._rescale(p, xi_inverse)

    def in_support(self, p) -> bool:
        return dist_point_line(p, self.line) <= self.eps

    def support_box(self):
        return None

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "line": line_to_json(self.line),
            "eps": scalar_to_json(self.eps),
        }

    def __repr__(self):
        return f"PushAway({self.line!r}, eps={self.eps})"


def push_away(line: AxisLine, eps) -> PushAway:
    return PushAway(line, eps)


# --- cylinders and bumps ------------------------------------------------------


@dataclass(frozen=True)
class Cylinder:
    """Chebyshev tube of ``radius`` around the segment ``t0 <= x_axis <= t1`` of ``line``."""

    line: AxisLine
    t0: Fraction
    t1: Fraction
    radius: Fraction

    def __post_init__(self):
        for name in ("t0", "t1", "radius"):
            object.__setattr__(self, name, as_scalar(getattr(self, name)))
        if not self.t0 < self.t1:
            raise ValueError("cylinder segment must have t0 < t1")
        if self.radius <= 0:
            raise ValueError("cylinder radius must be positive")

    @property
    def segment(self):
        return self.line.at(self.t0), self.line.at(self.t1)

    @property
    def diameter(self) -> Fraction:
        return max(self.t1 - self.t0, 2 * self.radius)

    def contains(self, p) -> bool:
        t = p[self.line.free_axis]
        return self.t0 <= t <= self.t1 and dist_point_line(p, self.line) <= self.radius

    def box(self):
        a = self.line.free_axis
        lo, hi = [], []
        for j in range(self.line.dim):
            if j == a:
                lo.append(self.t0)
                hi.append(self.t1)
            else:
                q = self.line.offset_at(j)
                lo.append(q - self.radius)
                hi.append(q + self.radius)
        return tuple(lo), tuple(hi)

    def to_json(self) -> dict:
        return {
            "line": line_to_json(self.line),
            "t0": scalar_to_json(self.t0),
            "t1": scalar_to_json(self.t1),
            "radius": scalar_to_json(self.radius),
        }

    @classmethod
    def from_json(cls, data) -> "Cylinder":
        return cls(
            line_from_json(data["line"]),
            scalar_from_json(data["t0"]),
            scalar_from_json(data["t1"]),
            scalar_from_json(data["radius"]),
        )


class Bump(MoveMap):
    """``p -> p + amplitude * profile(p) * direction`` inside a cylinder.

    ``profile = max(0, min(1 - rho/R, taper(t)))`` where ``rho`` is the
    Chebyshev distance to the core line and ``taper`` rises linearly from 0
    at the segment ends to 1 at distance ``taper_width`` from them.  With the
    default taper width (half the segment) the profile peaks only at the
    core midpoint.

    Because the direction has no component along the line and
    ``amplitude < R``, each fibre ``lambda -> p + lambda * direction`` is
    mapped monotonically onto itself, so the map is a bijection of R^n.
    """

    kind = MoveKind.BUMP

    def __init__(self, cylinder: Cylinder, direction: Sequence, amplitude, taper_width=None):
        amplitude = as_scalar(amplitude)
        direction = tuple(as_scalar(d) for d in direction)
        line = cylinder.line
        if len(direction) != line.dim:
            raise ValueError("direction has the wrong dimension")
        if direction[line.free_axis] != 0:
            raise ValueError("direction must be normal to the line's free axis")
        if max(abs(d) for d in direction) != 1:
            raise ValueError("direction must have unit Chebyshev norm")
        if amplitude <= 0:
            raise ValueError("amplitude must be positive")
        if amplitude >= cylinder.radius:
            raise ValueError(f"amplitude {amplitude} must be below the radius {cylinder.radius}")
        half = (cylinder.t1 - cylinder.t0) / 2
        taper_width = half if taper_width is None else as_scalar(taper_width)
        if not 0 < taper_width <= half:
            raise ValueError("taper width must lie in (0, half the segment length]")
        self.cylinder = cylinder
        self.direction = direction
        self.amplitude = amplitude
        self.taper_width = taper_width
        self.displacement_bound = amplitude
        R = cylinder.radius
        slope = max(1 / R, 1 / taper_width)
        self.inverse_modulus = (1 + amplitude * slope) / (1 - amplitude / R)

    def taper(self, t: Fraction) -> Fraction:
        c = self.cylinder
        level = min(t - c.t0, c.t1 - t) / self.taper_width
        return min(max(level, Fraction(0)), Fraction(1))

    def profile(self, p) -> Fraction:
        c = self.cylinder
        tap = self.taper(p[c.line.free_axis])
        if tap == 0:
            return Fraction(0)
        rho = dist_point_line(p, c.line)
        return max(Fraction(0), min(1 - rho / c.radius, tap))

    def forward(self, p):
        w = self.amplitude * self.profile(p)
        if w == 0:
            return tuple(p)
        return tuple(x + w * d for x, d in zip(p, self.direction))

    def _kinks(self, y) -> list[Fraction]:
        """Values of lambda in [0, amplitude] where ``profile(y - lambda*d)`` may bend."""
        c = self.cylinder
        R = c.radius
        gaps = c.line.normal(y)
        moving = [(gaps[j], self.direction[j]) for j in gaps if self.direction[j] != 0]
        levels = {Fraction(0), R, R * (1 - self.taper(y[c.line.free_axis]))}
        levels.update(abs(g) for j, g in gaps.items() if self.direction[j] == 0)
        out = {Fraction(0), self.amplitude}
        for g, d in moving:
            for lev in levels:
                out.add((g - lev) / d)
                out.add((g + lev) / d)
        for (g1, d1), (g2, d2) in itertools.combinations(moving, 2):
            if d1 != d2:
                out.add((g1 - g2) / (d1 - d2))
            if d1 != -d2:
                out.add((g1 + g2) / (d1 + d2))
        return sorted(x for x in out if 0 <= x <= self.amplitude)

    def inverse(self, y):
        y = tuple(y)
        if not self.in_support(y):
            return y

        def residual(lam):
            # Zero exactly when y - lam*d is the preimage of y.
            q = tuple(a - lam * d for a, d in zip(y, self.direction))
            return lam - self.amplitude * self.profile(q)

        # residual is piecewise linear and strictly increasing; the kinks
        # bracket a linear piece that contains the root.
        knots = self._kinks(y)
        prev_x, prev_h = knots[0], residual(knots[0])
        lam = None
        if prev_h == 0:
            lam = prev_x
        else:
            for x in knots[1:]:
                h = residual(x)
                if h == 0:
                    lam = x
                    break
                if prev_h < 0 < h:
                    lam = prev_x - prev_h * (x - prev_x) / (h - prev_h)
                    break
                prev_x, prev_h = x, h
        if lam is None:  # pragma: no cover - residual(0) <= 0 <= residual(amplitude)
            raise ArithmeticError("failed to bracket the bump preimage")
        p = tuple(a - lam * d for a, d in zip(y, self.direction))
        if self.forward(p) != y:  # pragma: no cover - kink list is complete
            raise ArithmeticError("bump inverse is not exact")
        return p

    def in_support(self, p) -> bool:
        return self.cylinder.contains(p)

    def support_box(self):
        return self.cylinder.box()

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "cylinder": self.cylinder.to_json(),
            "direction": point_to_json(self.direction),
            "amplitude": scalar_to_json(self.amplitude),
            "taper_width": scalar_to_json(self.taper_width),
        }

    def __repr__(self):
        return f"Bump({self.cylinder!r}, direction={self.direction}, amplitude={self.amplitude})"


def bump_displacement(cylinder: Cylinder, direction: Sequence, amplitude, taper_width=None) -> Bump:
    return Bump(cylinder, direction, amplitude, taper_width)


# --- composition --------------------------------------------------------------


def _boxes_overlap(a, b) -> bool:
    """Open interiors of two closed boxes intersect."""
    (alo, ahi), (blo, bhi) = a, b
    return all(max(l1, l2) < min(h1, h2) for l1, h1, l2, h2 in zip(alo, ahi, blo, bhi))


class Composite(MoveMap):
    """Apply ``children`` in order (first child innermost).

    With ``disjoint=True`` the children must have bounded supports with
    pairwise disjoint interiors; then at most one child moves any point and
    both the displacement bound and the inverse modulus are maxima rather
    than a sum and a product.
    """

    kind = MoveKind.COMPOSITE

    def __init__(self, children: Iterable[MoveMap], disjoint: bool = False):
        flat = []
        for m in children:
            if isinstance(m, Composite) and not m.disjoint and not disjoint:
                flat.extend(m.children)
            else:
                flat.append(m)
        self.children = tuple(flat)
        self.disjoint = disjoint
        if disjoint:
            boxes = [m.support_box() for m in self.children]
            if any(b is None for b in boxes):
                raise ValueError("disjoint composites need bounded supports")
            boxes = [b for b in boxes if b != ()]
            for a, b in itertools.combinations(boxes, 2):
                if _boxes_overlap(a, b):
                    raise ValueError("supports of a disjoint composite overlap")
            self.displacement_bound = max((m.displacement_bound for m in self.children), default=Fraction(0))
            self.inverse_modulus = max((m.inverse_modulus for m in self.children), default=Fraction(1))
        else:
            self.displacement_bound = sum((m.displacement_bound for m in self.children), Fraction(0))
            mod = Fraction(1)
            for m in self.children:
                mod *= m.inverse_modulus
            self.inverse_modulus = mod

    def forward(self, p):
        p = tuple(p)
        for m in self.children:
            p = m.forward(p)
        return p

    def inverse(self, p):
        p = tuple(p)
        for m in reversed(self.children):
            p = m.inverse(p)
        return p

    def in_support(self, p) -> bool:
        # A point outside every child's support is fixed by each child in turn.
        return any(m.in_support(p) for m in self.children)

    def support_box(self):
        boxes = [m.support_box() for m in self.children]
        if any(b is None for b in boxes):
            return None
        boxes = [b for b in boxes if b != ()]
        if not boxes:
            return ()
        n = len(boxes[0][0])
        lo = tuple(min(b[0][j] for b in boxes) for j in range(n))
        hi = tuple(max(b[1][j] for b in boxes) for j in range(n))
        return lo, hi

    def to_json(self) -> dict:
        out = {"kind": self.kind.value, "children": [m.to_json() for m in self.children]}
        if self.disjoint:
            out["disjoint"] = True
        return out

    def __repr__(self):
        return f"Composite({list(self.children)!r}, disjoint={self.disjoint})"


def compose(outer: MoveMap, inner: MoveMap) -> Composite:
    """``outer o inner``.  Points that ``inner`` sends outside ``outer``'s
    domain raise :class:`DomainError` when evaluated."""
    return Composite([inner, outer])


# --- straightening ------------------------------------------------------------


def _best_amplitude(members, b, s, cap):
    """Maximize the smallest post-move clearance over ``amp`` in ``[0, cap]``.

    Each member contributes ``max(|v_b + s*amp*phi|, other)``; the minimum of
    these is piecewise linear in ``amp``, so its maximum sits at an endpoint
    or where two of the underlying lines cross.
    """
    lines = []  # (intercept, slope) in amp
    rows = []
    for gaps, phi in members:
        vb = gaps[b]
        other = max((abs(v) for j, v in gaps.items() if j != b), default=Fraction(0))
        rows.append((vb, s * phi, other))
        lines += [(vb, s * phi), (-vb, -s * phi), (other, Fraction(0))]

    def objective(amp):
        return min(max(abs(vb + k * amp), other) for vb, k, other in rows)

    cands = {Fraction(0), cap}
    for (c1, k1), (c2, k2) in itertools.combinations(set(lines), 2):
        if k1 != k2:
            x = (c2 - c1) / (k1 - k2)
            if 0 <= x <= cap:
                cands.add(x)
    best_amp, best_val = None, None
    for amp in sorted(cands):
        val = objective(amp)
        if best_val is None or val > best_val:
            best_amp, best_val = amp, val
    return best_amp, best_val


def straighten(samples: Iterable, line: AxisLine, eps, clearance) -> MoveMap:
    """Compactly supported homeomorphism moving every sample at least ``clearance`` off ``line``.

    One cylinder (radius ``eps/4``, length at most ``eps/4``) is centred on
    the projection of each sample that sits closer than ``clearance`` to the
    line; its half-length is also capped at half the gap to the neighbouring
    sample projections, so the segment ends never meet a sample projection
    and the cylinders are pairwise disjoint.  Each cylinder gets one bump
    whose axis, sign and amplitude maximize the smallest clearance of the
    samples inside it.
    """
    pts = [tuple(p) for p in samples]
    if not pts:
        raise ValueError("straighten needs at least one sample")
    eps, clearance = as_scalar(eps), as_scalar(clearance)
    if eps <= 0 or clearance <= 0:
        raise ValueError("eps and clearance must be positive")
    R = eps / 4
    if clearance >= R:
        raise InfeasibleError(
            f"clearance {clearance} must be below the cylinder radius eps/4 = {R}"
        )
    a = line.free_axis
    needy = [p for p in pts if dist_point_line(p, line) < clearance]
    if not needy:
        return IDENTITY

    projections = sorted({p[a] for p in pts})
    centers = sorted({p[a] for p in needy})
    cap = (clearance + R) / 2
    bumps = []
    for t in centers:
        k = projections.index(t)
        h = eps / 8
        if k > 0:
            h = min(h, (t - projections[k - 1]) / 2)
        if k + 1 < len(projections):
            h = min(h, (projections[k + 1] - t) / 2)
        cyl = Cylinder(line, t - h, t + h, R)
        members = []
        for p in pts:
            if p[a] == t and cyl.contains(p):
                gaps = line.normal(p)
                rho = max(abs(v) for v in gaps.values())
                members.append((gaps, max(Fraction(0), 1 - rho / R)))

        best = None  # (value, axis, sign, amp)
        for b in line.fixed_axes():
            for s in (1, -1):
                amp, val = _best_amplitude(members, b, s, cap)
                if best is None or val > best[0]:
                    best = (val, b, s, amp)
        val, b, s, amp = best
        if val < clearance:
            raise InfeasibleError(
                f"no bump in the cylinder at t={t} reaches clearance {clearance}; "
                f"best achievable is {val} (axis {b}, sign {s:+d})"
            )
        direction = [Fraction(0)] * line.dim
        direction[b] = Fraction(s)
        bumps.append(Bump(cyl, direction, amp))
    return Composite(bumps, disjoint=True)


# --- JSON ---------------------------------------------------------------------


def move_from_json(data: dict) -> MoveMap:
    kind = MoveKind(data["kind"])
    if kind is MoveKind.IDENTITY:
        return IDENTITY
    if kind is MoveKind.PUSH_AWAY:
        return PushAway(line_from_json(data["line"]), scalar_from_json(data["eps"]))
    if kind is MoveKind.BUMP:
        return Bump(
            Cylinder.from_json(data["cylinder"]),
            point_from_json(data["direction"]),
            scalar_from_json(data["amplitude"]),
            scalar_from_json(data["taper_width"]) if "taper_width" in data else None,
        )
    return Composite([move_from_json(c) for c in data["children"]], disjoint=bool(data.get("disjoint")))


def move_to_json(move: MoveMap) -> dict:
    out = move.to_json()
    out["displacement_bound"] = scalar_to_json(move.displacement_bound)
    out["inverse_modulus"] = scalar_to_json(move.inverse_modulus)
    return out


def max_displacement(move: MoveMap, points: Iterable) -> Fraction:
    return max((dist(p, move.forward(p)) for p in points), default=Fraction(0))
