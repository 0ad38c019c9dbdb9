"""The perturbation game over a finite sample set.

Player I picks tolerances from the current modulus witness; Player II answers
each round with "straighten, then push away" against the next line of the
enumeration.  Everything is exact, and a run ends with a :class:`Certificate`
that can be rechecked from the stored state alone (:func:`check_certificate`).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .geometry import AxisLine, as_scalar, dist, dist_point_line, scalar_to_json
from .lines import nth_line
from .moves import IDENTITY, MoveKind, MoveMap, compose, push_away, straighten


class RuleViolation(AssertionError):
    """A move broke a rule of the game.  Signals a bug, not bad input."""


@dataclass(frozen=True)
class RunConfig:
    dim: int
    samples: tuple
    global_eps: Fraction
    rounds: int
    clearance_fraction: Fraction = Fraction(1, 4)

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(tuple(as_scalar(c) for c in p) for p in self.samples))
        object.__setattr__(self, "global_eps", as_scalar(self.global_eps))
        object.__setattr__(self, "clearance_fraction", as_scalar(self.clearance_fraction))
        if self.dim < 4:
            raise ValueError("the straightening move needs dimension n > 3")
        if not self.samples:
            raise ValueError("need at least one sample")
        if any(len(p) != self.dim for p in self.samples):
            raise ValueError(f"all samples must have dimension {self.dim}")
        if len(set(self.samples)) != len(self.samples):
            raise ValueError("samples must be pairwise distinct")
        # budget_scale = global_eps/2 must stay <= 1 for the per-round
        # contraction factor (1 - 2^-(k-1)) to hold.
        if not 0 < self.global_eps <= 2:
            raise ValueError("global_eps must lie in (0, 2]")
        if self.rounds < 1:
            raise ValueError("need at least one round")
        if not 0 < self.clearance_fraction < 1:
            raise ValueError("clearance_fraction must lie in (0, 1)")

    @property
    def budget_scale(self) -> Fraction:
        return self.global_eps / 2


@dataclass(frozen=True)
class RoundRecord:
    k: int
    eps: Fraction
    eps_strategy: Fraction
    delta: Fraction
    line_index: int | None
    line: AxisLine
    move: MoveMap
    requested_clearance: Fraction
    clearance: Fraction
    gap_before: Fraction | None
    gap_after: Fraction | None


@dataclass(frozen=True)
class EmbeddingState:
    domain: tuple
    images: tuple
    history: tuple = ()
    round: int = 0
    composite: MoveMap = IDENTITY
    trajectory: tuple = field(default=(), repr=False)

    @classmethod
    def initial(cls, samples: Sequence) -> "EmbeddingState":
        pts = tuple(tuple(p) for p in samples)
        if len(set(pts)) != len(pts):
            raise ValueError("samples must be pairwise distinct")
        return cls(domain=pts, images=pts, trajectory=(pts,))


@dataclass(frozen=True)
class Certificate:
    global_eps: Fraction
    epsilon_budget: Fraction
    injectivity_constant: Fraction
    rounds: tuple  # (k, eps, delta, line_index, clearance)
    per_scale_bounds: tuple  # (k, delta, attained min final gap or None)

    @property
    def line_clearances(self):
        return [(r[3], r[4]) for r in self.rounds]

    def to_json(self) -> dict:
        def s(q):
            return None if q is None else scalar_to_json(q)

        return {
            "global_eps": s(self.global_eps),
            "epsilon_budget": s(self.epsilon_budget),
            "C_partial": s(self.injectivity_constant),
            "rounds": [
                {"k": k, "eps": s(e), "delta": s(d), "line_index": i, "clearance": s(c)}
                for k, e, d, i, c in self.rounds
            ],
            "min_gap_table": [
                {
                    "k": k,
                    "delta": s(d),
                    "min_final_gap": s(g),
                    "bound": s(self.injectivity_constant * d),
                }
                for k, d, g in self.per_scale_bounds
            ],
        }


_RATIONAL = {"type": "string", "pattern": r"^-?[0-9]+/[0-9]+$"}

CERTIFICATE_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["epsilon_budget", "C_partial", "rounds", "min_gap_table"],
    "properties": {
        "global_eps": _RATIONAL,
        "epsilon_budget": _RATIONAL,
        "C_partial": _RATIONAL,
        "rounds": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["k", "eps", "delta", "line_index", "clearance"],
                "properties": {
                    "k": {"type": "integer", "minimum": 1},
                    "eps": _RATIONAL,
                    "delta": _RATIONAL,
                    "line_index": {"type": ["integer", "null"], "minimum": 0},
                    "clearance": _RATIONAL,
                },
            },
        },
        "min_gap_table": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["k", "delta", "min_final_gap", "bound"],
                "properties": {
                    "k": {"type": "integer", "minimum": 1},
                    "delta": _RATIONAL,
                    "min_final_gap": {"anyOf": [_RATIONAL, {"type": "null"}]},
                    "bound": _RATIONAL,
                },
            },
        },
    },
}


# --- Player I -----------------------------------------------------------------


def constant_C(terms: int) -> Fraction:
    """Exact partial product of (1 - 2^-m) for m = 1..terms."""
    if terms < 1:
        raise ValueError("need at least one factor")
    out = Fraction(1)
    for m in range(1, terms + 1):
        out *= 1 - Fraction(1, 2**m)
    return out


def qualifying_min_gap(domain: Sequence, images: Sequence, k: int) -> Fraction | None:
    """Smallest image gap over pairs whose domain gap is at least 2^-k."""
    scale = Fraction(1, 2**k)
    best = None
    for i, j in itertools.combinations(range(len(domain)), 2):
        if dist(domain[i], domain[j]) >= scale:
            g = dist(images[i], images[j])
            if best is None or g < best:
                best = g
    return best


def delta_k(state: EmbeddingState, k: int) -> Fraction:
    """Largest threshold such that image gaps below it force domain gaps below 2^-k."""
    if k != state.round + 1:
        raise ValueError(f"delta_{k} needs the state after round {k - 1}, got round {state.round}")
    gap = qualifying_min_gap(state.domain, state.images, k)
    return Fraction(1) if gap is None else gap


def epsilon_k(delta, k: int, budget_scale) -> Fraction:
    delta, budget_scale = as_scalar(delta), as_scalar(budget_scale)
    if delta <= 0 or budget_scale <= 0:
        raise ValueError("delta and budget_scale must be positive")
    return budget_scale * min(Fraction(1), delta) / 2**k


def persistence_cap(history: Sequence[RoundRecord], k: int) -> Fraction | None:
    """Keep later rounds from undoing earlier clearances.

    Round k's move displaces by less than eps_k/4, so capping
    eps_k <= clearance_i * 2^-(k-i) keeps the total later drift from line i
    below clearance_i/4.
    """
    caps = [r.clearance / 2 ** (k - r.k) for r in history]
    return min(caps) if caps else None


# --- rounds -------------------------------------------------------------------


def play_round(state: EmbeddingState, line: AxisLine, cfg: RunConfig, line_index: int | None = None) -> EmbeddingState:
    k = state.round + 1
    delta = delta_k(state, k)
    eps_strategy = epsilon_k(delta, k, cfg.budget_scale)
    cap = persistence_cap(state.history, k)
    eps = eps_strategy if cap is None else min(eps_strategy, cap)

    clearance = cfg.clearance_fraction * eps / 4
    straight = straighten(state.images, line, eps / 2, clearance)
    push = push_away(line, clearance * cfg.clearance_fraction)
    move = push if straight.kind is MoveKind.IDENTITY else compose(push, straight)

    images = tuple(move.forward(p) for p in state.images)

    # rule (a): eps_k-close to the identity
    if move.displacement_bound > eps:
        raise RuleViolation(f"round {k}: displacement bound {move.displacement_bound} exceeds eps {eps}")
    for p, q in zip(state.images, images):
        if dist(p, q) > eps:
            raise RuleViolation(f"round {k}: a sample moved by {dist(p, q)} > eps {eps}")
    # rule (b): inverse modulus witness must be a finite positive factor
    if not move.inverse_modulus >= 1:
        raise RuleViolation(f"round {k}: bad inverse modulus {move.inverse_modulus}")
    if len(set(images)) != len(images):
        raise RuleViolation(f"round {k}: two samples collided")

    gap_before = qualifying_min_gap(state.domain, state.images, k)
    gap_after = qualifying_min_gap(state.domain, images, k)
    if gap_before is not None and gap_after < (1 - Fraction(1, 2 ** (k - 1))) * gap_before:
        raise RuleViolation(f"round {k}: min gap fell from {gap_before} to {gap_after}")

    achieved = min(dist_point_line(p, line) for p in images)
    if achieved < clearance:
        raise RuleViolation(f"round {k}: clearance {achieved} below requested {clearance}")

    record = RoundRecord(
        k=k,
        eps=eps,
        eps_strategy=eps_strategy,
        delta=delta,
        line_index=line_index,
        line=line,
        move=move,
        requested_clearance=clearance,
        clearance=achieved,
        gap_before=gap_before,
        gap_after=gap_after,
    )
    return EmbeddingState(
        domain=state.domain,
        images=images,
        history=state.history + (record,),
        round=k,
        composite=compose(move, state.composite),
        trajectory=state.trajectory + (images,),
    )


def certificate(state: EmbeddingState, cfg: RunConfig) -> Certificate:
    K = state.round
    C = constant_C(K)
    bounds = tuple((r.k, r.delta, qualifying_min_gap(state.domain, state.images, r.k)) for r in state.history)
    return Certificate(
        global_eps=cfg.global_eps,
        epsilon_budget=sum((r.eps for r in state.history), Fraction(0)),
        injectivity_constant=C,
        rounds=tuple((r.k, r.eps, r.delta, r.line_index, r.clearance) for r in state.history),
        per_scale_bounds=bounds,
    )


def run(cfg: RunConfig) -> tuple[EmbeddingState, Certificate]:
    """Play rounds against lines 1..K of the enumeration (index 0 is skipped)."""
    state = EmbeddingState.initial(cfg.samples)
    for i in range(1, cfg.rounds + 1):
        state = play_round(state, nth_line(cfg.dim, i), cfg, line_index=i)
    return state, certificate(state, cfg)


# --- independent re-check -----------------------------------------------------


def check_certificate(state: EmbeddingState, cert: Certificate, cfg: RunConfig) -> dict[str, bool]:
    """Recompute every certified inequality from the stored trajectory.

    Returns one boolean per claim:

    ``budget``      sum of eps_k below the global eps
    ``replay``      composing the recorded moves reproduces every round's images
    ``contraction`` per-round min gap >= (1 - 2^-(k-1)) * previous min gap
    ``injectivity`` final gaps >= C_K * delta_k over pairs with domain gap >= 2^-k
    ``clearance``   every recorded line clearance is positive and matches the images
    ``closeness``   every sample's total drift is below the global eps
    """
    K = state.round
    traj = state.trajectory
    out = {}
    out["budget"] = cert.epsilon_budget == sum((r.eps for r in state.history), Fraction(0)) and cert.epsilon_budget < cfg.global_eps

    images = state.domain
    replay = True
    for r, expected in zip(state.history, traj[1:]):
        images = tuple(r.move.forward(p) for p in images)
        replay = replay and images == expected
    out["replay"] = replay and tuple(state.composite.forward(p) for p in state.domain) == state.images

    contraction = True
    for k in range(1, K + 1):
        before = qualifying_min_gap(state.domain, traj[k - 1], k)
        after = qualifying_min_gap(state.domain, traj[k], k)
        if before is not None and after < (1 - Fraction(1, 2 ** (k - 1))) * before:
            contraction = False
    out["contraction"] = contraction

    C = constant_C(K)
    injectivity = cert.injectivity_constant == C
    for k, delta, _ in cert.per_scale_bounds:
        scale = Fraction(1, 2**k)
        for i, j in itertools.combinations(range(len(state.domain)), 2):
            if dist(state.domain[i], state.domain[j]) >= scale:
                if dist(state.images[i], state.images[j]) < C * delta:
                    injectivity = False
    out["injectivity"] = injectivity

    clear = len(cert.rounds) == K
    for (k, _, _, _, c), r, imgs in zip(cert.rounds, state.history, traj[1:]):
        clear = clear and c > 0 and c == min(dist_point_line(p, r.line) for p in imgs)
    out["clearance"] = clear

    out["closeness"] = all(dist(x, y) < cfg.global_eps for x, y in zip(state.domain, state.images))
    return out


def persistence_violations(state: EmbeddingState) -> list[tuple[int, int, int]]:
    """(line round i, later round j, sample) triples where a sample came back
    within half of line i's recorded clearance."""
    bad = []
    for r in state.history:
        for j in range(r.k, state.round + 1):
            for s, p in enumerate(state.trajectory[j]):
                if dist_point_line(p, r.line) < r.clearance / 2:
                    bad.append((r.k, j, s))
    return bad


def certificate_for_lines(line_rounds: Sequence[tuple[int, AxisLine]], cfg: RunConfig):
    """Like :func:`run` but against an explicit list of ``(index, line)`` pairs."""
    state = EmbeddingState.initial(cfg.samples)
    for idx, line in line_rounds:
        state = play_round(state, line, cfg, line_index=idx)
    return state, certificate(state, cfg)

