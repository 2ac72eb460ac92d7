"""Circle arithmetic and the physical phase update.

Phases are plain floats kept normalized to [-pi, pi) by `rem` after every
public update, so relative-phase computations never see accumulated drift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

TAU = math.tau
PI = math.pi

#: a phase is a plain float, kept in [-pi, pi) by `rem` after every update
Phase = float


@dataclass(frozen=True)
class Speeds:
    """Per-step angular speeds: natural drift, cruise speed and push gain."""

    omega: float
    omega0: float
    k_gain: float


def rem(x: float) -> float:
    """Reduce x to the unique representative in [-pi, pi).

    Maps pi itself to -pi; rejects non-finite input.
    """
    if not math.isfinite(x):
        raise ValueError(f"non-finite angle: {x}")
    r = math.remainder(x, TAU)
    if r >= PI:
        r -= TAU
    return r


def sgn_plus(x: float) -> int:
    """1 for x >= 0, else 0."""
    return 1 if x >= 0 else 0


def step_phase(theta: float, omega: float, u: float) -> float:
    """One synchronous step of a single oscillator."""
    return rem(theta + omega + u)


def relative_phase(theta_i: float, theta_j: float) -> float:
    """Signed phase of i relative to j, in [-pi, pi)."""
    return rem(theta_i - theta_j)
