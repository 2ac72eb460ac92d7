"""Per-agent decentralized estimation and control stack.

Each non-pacemaker agent maintains, for every peer it has not yet ruled out,
a guaranteed enclosure of their relative phase: a multi-interval of at most
two pieces (one per sign, reflecting the sign ambiguity of distance
measurements). The enclosure is propagated through an interval estimate of
the peer's unknown input, corrected against each measurement band, and used
to identify the agent's closest follower. Once the follower is identified,
all other enclosures are dropped and a three-level bang-bang controller
pushes the agent away from its follower until the estimated spacing exceeds
the target spacing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

from .intervals import (
    EMPTY_MULTI,
    Interval,
    MultiInterval,
    hull,
    multi,
    multi_intersect,
    multi_sum,
)
from .kinematics import PI, Speeds, sgn_plus
from .sensing import SensingParams


class EmptyFollowerSetError(RuntimeError):
    """The follower enclosure became empty: a noise bound or separation
    precondition was violated and the estimator is inconsistent."""


class AmbiguousFollowerError(RuntimeError):
    """Two candidates satisfied the follower test at the same step.

    This falsifies a premise of the balancing strategy and is surfaced as a
    diagnostic rather than silently resolved.
    """


@dataclass(frozen=True)
class AgentRole:
    is_pacemaker: bool


@dataclass
class EstimatorBank:
    """Estimator memory of one non-pacemaker agent.

    `enclosures` maps peer id -> multi-interval enclosure of the peer's
    relative phase. `identified` latches permanently once the closest
    follower is found; from then on only the follower enclosure is kept and
    `spacing_estimate` carries the scalar estimate used by the controller.
    """

    agent_id: int
    enclosures: dict = field(default_factory=dict)  # dict[int, MultiInterval]
    identified: bool = False
    follower: Optional[int] = None
    identified_at: Optional[int] = None
    spacing_estimate: Optional[float] = None


@lru_cache(maxsize=128)
def out_of_range_set(p: SensingParams) -> MultiInterval:
    """Phases compatible with "no measurement": separation above range.

    Endpoint convention is closed; the boundary overlap with the measured
    region has measure zero and keeps every set operation total.
    """
    return (Interval(-PI, -p.theta_max), Interval(p.theta_max, PI))


def measurement_set(band: Interval) -> MultiInterval:
    """Phases compatible with one distance band: the band and its mirror.

    Distance bands never go negative, so the mirror precedes the band and
    the two touch only when the band starts at zero.
    """
    if band.lo <= 0.0:
        return (Interval(-band.hi, band.hi),)
    return (Interval(-band.hi, -band.lo), band)


def estimate_peer_input(
    identified: bool, has_edge: bool, is_follower: bool, speeds: Speeds
) -> Interval:
    """Interval estimate of a peer's control input.

    After identification the follower is known to cruise or push depending
    on whether the pair is still in measurement range; before that, and for
    any non-follower, only the global input range is known.
    """
    if identified and is_follower:
        if has_edge:
            return Interval(speeds.omega0, speeds.omega0 + speeds.k_gain)
        return Interval(speeds.omega0, speeds.omega0)
    return Interval(0.0, speeds.omega0 + speeds.k_gain)


def relative_input_estimate(u_i: float, u_hat_j: Interval) -> Interval:
    """Enclosure of the relative input u_i - u_j from the peer estimate."""
    return Interval(u_i - u_hat_j.hi, u_i - u_hat_j.lo)


def propagate(gamma: MultiInterval, u_hat_ij: Interval) -> MultiInterval:
    """Shift an enclosure by the relative-input estimate, on the circle.

    Any shifted piece crossing the +-pi seam is split into its wrapped
    representatives; fragments merge back into at most two pieces for every
    operand shape the protocol produces.
    """
    if not gamma:
        return EMPTY_MULTI
    shifted = multi_sum(gamma, u_hat_ij)
    if shifted and (shifted[0].lo >= -PI) and (shifted[-1].hi <= PI):
        return shifted
    frags = []
    for p in shifted:
        if p.hi - p.lo >= 2.0 * PI:
            return (Interval(-PI, PI),)
        lo, hi = p.lo, p.hi
        if lo < -PI:
            frags.append(Interval(lo + 2.0 * PI, PI))
            lo = -PI
        if hi > PI:
            frags.append(Interval(-PI, hi - 2.0 * PI))
            hi = PI
        frags.append(Interval(lo, hi))
    return multi(frags)


def crosses_seam(gamma: MultiInterval, u_hat_ij: Interval) -> bool:
    """True when propagating gamma by u_hat_ij would wrap past +-pi."""
    return bool(gamma) and (
        gamma[0].lo + u_hat_ij.lo < -PI or gamma[-1].hi + u_hat_ij.hi > PI
    )


def correct(
    gamma_prior: MultiInterval,
    identified: bool,
    is_follower: bool,
    band: Optional[Interval],
    p: SensingParams,
) -> MultiInterval:
    """Measurement update of one peer enclosure.

    `band` is the distance band from this step's measurement, or None when
    the pair is out of range. Before identification an out-of-range step
    replaces the enclosure outright with the out-of-range set; afterwards
    only the follower is tracked and out-of-range steps intersect with it.
    """
    if not identified:
        if band is None:
            return out_of_range_set(p)
        return multi_intersect(gamma_prior, measurement_set(band))
    if not is_follower:
        return EMPTY_MULTI
    if band is None:
        result = multi_intersect(gamma_prior, out_of_range_set(p))
    else:
        result = multi_intersect(gamma_prior, measurement_set(band))
    if not result:
        raise EmptyFollowerSetError(
            "follower enclosure is empty: noise bound or separation "
            "precondition violated"
        )
    return result


def _positive_inf(gamma: MultiInterval) -> float:
    """Infimum of the non-negative part of an enclosure, +inf when empty.

    A peer with no non-negative part is certainly ahead, so it vacuously
    passes the separation test against any candidate.
    """
    for piece in gamma:
        if piece.hi >= 0.0:
            return piece.lo if piece.lo > 0.0 else 0.0
    return float("inf")


def try_identify(bank: EstimatorBank) -> Optional[int]:
    """Closest-follower test over the current enclosures.

    A peer qualifies when its whole enclosure lies strictly on the positive
    side and strictly below the non-negative part of every other peer's
    enclosure. Returns the unique qualifying peer, None when there is none,
    and raises AmbiguousFollowerError when several qualify at once.
    """
    candidate: Optional[int] = None
    for j, gamma in bank.enclosures.items():
        if not gamma or gamma[0].lo <= 0.0:
            continue
        h = hull(gamma)
        ok = True
        for jj, other in bank.enclosures.items():
            if jj != j and h.hi >= _positive_inf(other):
                ok = False
                break
        if ok:
            if candidate is not None:
                raise AmbiguousFollowerError(
                    f"agent {bank.agent_id}: peers {candidate} and {j} both "
                    "qualify as closest follower"
                )
            candidate = j
    return candidate


def latch_identification(bank: EstimatorBank, follower: int, k: int) -> None:
    """Latch the follower permanently and drop every other enclosure."""
    bank.identified = True
    bank.follower = follower
    bank.identified_at = k
    bank.enclosures = {follower: bank.enclosures[follower]}
    bank.spacing_estimate = hull(bank.enclosures[follower]).hi


def scalar_estimate(bank: EstimatorBank) -> float:
    """Scalar spacing estimate: the supremum of the follower hull."""
    return hull(bank.enclosures[bank.follower]).hi


def control(role: AgentRole, bank: Optional[EstimatorBank], psi: float, speeds: Speeds) -> float:
    """Three-level bang-bang control law.

    The pacemaker always cruises; an agent that knows its follower cruises
    plus a push gain until the estimated spacing strictly exceeds the target
    spacing psi; everyone else holds still.
    """
    if role.is_pacemaker:
        return speeds.omega0
    if bank is not None and bank.identified:
        return speeds.omega0 + speeds.k_gain * sgn_plus(psi - bank.spacing_estimate)
    return 0.0
