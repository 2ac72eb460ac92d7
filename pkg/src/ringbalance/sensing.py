"""Range-limited, noisy, sign-ambiguous proximity measurements.

A pair of agents observes a single shared noisy distance per step when their
angular separation is at most the detection range `theta_max`. The distance
carries no orientation, so each observation is compatible with two opposite
relative phases. Noise draws happen for every pair every step in a fixed
(i < j) order even when out of range, which makes trajectories invariant to
edge-set changes and allows golden-seed regression tests.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

from .intervals import Interval
from .kinematics import relative_phase


@dataclass(frozen=True)
class SensingParams:
    """Detection range and noise amplitude bound, both in radians."""

    theta_max: float
    phi: float


class Measurement(NamedTuple):
    pair: tuple[int, int]
    y: float


@dataclass(frozen=True)
class ProximityGraph:
    """Undirected edge set of agent pairs currently within detection range."""

    edges: frozenset  # frozenset[tuple[int, int]] with i < j

    def has(self, i: int, j: int) -> bool:
        return ((i, j) if i < j else (j, i)) in self.edges


def angular_distance(vartheta: float) -> float:
    """Unsigned angular separation for a signed relative phase."""
    return abs(vartheta)


def sample_noise(rng: random.Random, phi: float) -> float:
    """One uniform draw from [-phi, phi]; always consumes exactly one draw."""
    return rng.uniform(-phi, phi)


def measure(alpha: float, nu: float, p: SensingParams) -> Optional[float]:
    """Noisy distance reading, or None when out of range.

    The reading is floored at zero: a proximity sensor cannot report a
    negative distance, and the flooring keeps the true distance inside the
    band built by `build_upsilon`.
    """
    if alpha > p.theta_max:
        return None
    y = alpha + nu
    return y if y > 0.0 else 0.0


def build_upsilon(y: float, p: SensingParams) -> Interval:
    """Guaranteed distance band implied by one reading; always within range."""
    lo = y - p.phi
    if lo < 0.0:
        lo = 0.0
    hi = y + p.phi
    if hi > p.theta_max:
        hi = p.theta_max
    return Interval(lo, hi)


def build_graph(phases: Sequence[float], p: SensingParams) -> ProximityGraph:
    """Edges between all pairs within detection range at the sampled step."""
    n = len(phases)
    edges = set()
    for i in range(n):
        for j in range(i + 1, n):
            if abs(relative_phase(phases[i], phases[j])) <= p.theta_max:
                edges.add((i, j))
    return ProximityGraph(frozenset(edges))
