"""Synchronous round orchestrator, precondition validator and run analyzer.

One run: validate the configuration, place the agents on the circle with the
pacemaker as label 0 and labels increasing along the direction of motion,
then advance synchronous rounds. Each round measures, corrects every tracked
enclosure, runs the follower test, applies the bang-bang law and finally
moves the oscillators. Runtime monitors assert the soundness of every
follower enclosure and a set of structural properties; any violation marks
the run as diagnostic-failed instead of silently continuing.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Union

from .agent import (
    AgentRole,
    AmbiguousFollowerError,
    EmptyFollowerSetError,
    EstimatorBank,
    control,
    correct,
    crosses_seam,
    estimate_peer_input,
    latch_identification,
    out_of_range_set,
    propagate,
    relative_input_estimate,
    try_identify,
)
from .intervals import Interval, hull, multi_contains
from .kinematics import PI, TAU, Speeds, rem, step_phase
from .sensing import Measurement, SensingParams, build_upsilon

GENERATOR_ID = "python-random-mt19937"

#: steps simulated past the last deactivation, used for constancy checks
GRACE_STEPS = 50

#: one-sided widening of every relative-input estimate before propagation.
#: Rounding makes the recomputed true separation wobble by an ulp against
#: the propagated prior; without this guard a zero-noise run can empty an
#: enclosure that mathematically contains the truth. The guard is nine
#: orders of magnitude below any admissible gain, so it never shows above
#: the protocol's own tolerances.
PROPAGATION_GUARD = 1e-12

#: slack for monitors that compare against bounds the guard accumulates
#: into (at most 2 * PROPAGATION_GUARD per step over any admissible run)
GUARD_ALLOWANCE = 1e-9

FULL_CIRCLE = (Interval(-PI, PI),)


class InvalidConfigError(ValueError):
    def __init__(self, violations: list[str]):
        self.violations = violations
        super().__init__("; ".join(violations))


class InfeasibleInitError(ValueError):
    """The requested minimum separation does not fit on the circle."""


class NotConvergedError(RuntimeError):
    """The horizon was reached before every agent deactivated."""


@dataclass
class SimConfig:
    n_agents: int = 6
    omega: float = 0.0
    omega0: float = 0.005
    k_gain: float = 0.005
    phi: float = 0.01
    theta_max: float = math.pi / 4
    horizon: Optional[int] = None
    seed: int = 0
    init: Union[str, tuple] = "sampled"  # "sampled" or explicit phases
    pacemaker: Union[str, int] = 0  # index into supplied phases, or "random"
    fault_noise_factor: float = 1.0  # >1 injects noise beyond the assumed bound

    @property
    def psi(self) -> float:
        return TAU / self.n_agents

    @property
    def speeds(self) -> Speeds:
        return Speeds(self.omega, self.omega0, self.k_gain)

    @property
    def sensing(self) -> SensingParams:
        return SensingParams(self.theta_max, self.phi)

    @property
    def min_separation(self) -> float:
        """Smallest admissible initial pairwise separation."""
        return min(4.0 * self.phi + 2.0 * (self.omega0 + self.k_gain), self.theta_max)


@dataclass
class AssumptionReport:
    clauses: list  # list[tuple[str, bool, str]]

    @property
    def ok(self) -> bool:
        return all(passed for _, passed, _ in self.clauses)

    def violations(self) -> list[str]:
        return [f"{name}: {detail}" for name, passed, detail in self.clauses if not passed]

    def to_dict(self) -> dict:
        return {name: {"ok": passed, "detail": detail} for name, passed, detail in self.clauses}


def assumption_report(config: SimConfig) -> AssumptionReport:
    """Evaluate every configuration-level admissibility clause."""
    c = config
    clauses = [
        (
            "agents",
            c.n_agents >= 3,
            f"n_agents = {c.n_agents} (need >= 3)",
        ),
        (
            "Assumption 1",
            math.isfinite(c.phi) and c.phi >= 0.0,
            f"phi = {c.phi} (need finite, >= 0)",
        ),
        (
            "Assumption 3",
            2.0 * c.omega0 + 2.0 * c.k_gain < c.theta_max,
            f"2*omega0 + 2*k_gain = {2.0 * c.omega0 + 2.0 * c.k_gain} vs theta_max = {c.theta_max}",
        ),
        (
            "Assumption 4",
            c.omega0 > 0.0 and c.k_gain > 0.0,
            f"omega0 = {c.omega0}, k_gain = {c.k_gain} (need both > 0)",
        ),
        (
            "point (d)",
            0.0 < c.theta_max < c.psi,
            f"theta_max = {c.theta_max} vs spacing psi = {c.psi} (need 0 < theta_max < psi)",
        ),
    ]
    if c.horizon is not None:
        clauses.append(("horizon", c.horizon >= 1, f"horizon = {c.horizon} (need >= 1)"))
    return AssumptionReport(clauses)


def validate(config: SimConfig) -> AssumptionReport:
    """Return the assumption report, raising if any clause is violated."""
    report = assumption_report(config)
    if not report.ok:
        raise InvalidConfigError(report.violations())
    return report


def check_initial_phases(phases: Sequence[float], d_min: float) -> None:
    """Pairwise circular separations must all reach the admissible minimum."""
    n = len(phases)
    for i in range(n):
        for j in range(i + 1, n):
            sep = abs(rem(phases[i] - phases[j]))
            if sep < d_min - 1e-12:
                raise InvalidConfigError(
                    [
                        "Assumption 2: agents "
                        f"{i + 1} and {j + 1} start {sep:.6g} apart "
                        f"(need >= {d_min:.6g})"
                    ]
                )


def init_phases(config: SimConfig, rng: random.Random) -> tuple[list[float], list[int]]:
    """Initial phases with label order following the direction of motion.

    Returns (phases, original_index) where phases[0] is the pacemaker and
    original_index maps each label back to its position in an explicit input
    list (the identity for sampled initial conditions). Sampled gaps are the
    minimum separation plus a uniform-simplex share of the leftover arc, so
    every pairwise separation clears the admissible minimum by construction.
    """
    n = config.n_agents
    d_min = config.min_separation
    if isinstance(config.init, str):
        if config.init != "sampled":
            raise ValueError(f"unknown init policy: {config.init!r}")
        if n * d_min > TAU:
            raise InfeasibleInitError(
                f"{n} agents with minimum separation {d_min:.6g} do not fit on the circle"
            )
        if config.pacemaker == "random":
            rng.randrange(n)  # election draw; sampled positions are exchangeable
        slack = TAU - n * d_min
        cuts = sorted(rng.random() for _ in range(n - 1))
        parts = [b - a for a, b in zip([0.0] + cuts, cuts + [1.0])]
        gaps = [d_min + p * slack for p in parts]
        base = rng.uniform(-PI, PI)
        phases = []
        acc = 0.0
        for i in range(n):
            phases.append(rem(base + acc))
            acc += gaps[i]
        return phases, list(range(n))

    given = [rem(t) for t in config.init]
    if len(given) != n:
        raise InvalidConfigError(
            [f"init: expected {n} phases, got {len(given)}"]
        )
    if config.pacemaker == "random":
        pace = rng.randrange(n)
    else:
        pace = int(config.pacemaker)
        if not 0 <= pace < n:
            raise InvalidConfigError([f"pacemaker index {pace} out of range"])
    order = sorted(
        (i for i in range(n) if i != pace),
        key=lambda i: (given[i] - given[pace]) % TAU,
    )
    original = [pace] + order
    phases = [given[i] for i in original]
    return phases, original


class Event(NamedTuple):
    kind: str
    agent: int  # 1-based label, 0 for run-level events
    k: int
    detail: str = ""


@dataclass
class RoundRecord:
    """Per-step snapshot; append-only."""

    k: int
    phases: tuple
    edges: tuple
    measurements: tuple
    controls: tuple
    indicators: tuple
    consecutive: tuple  # signed relative phase of each (i, i-1) pair, then (1, N)
    hull_lo: tuple  # per non-pacemaker agent, follower-pair hull bounds
    hull_hi: tuple
    events: tuple


@dataclass
class RunSummary:
    status: str  # ok | diagnostic_failed | not_converged
    seed: int
    generator: str
    n_agents: int
    n_steps: int
    identified_at: dict  # 1-based agent label -> step
    deactivated_at: dict
    steady_errors: dict
    closing_gap_error: Optional[float]
    epsilon_achieved: Optional[float]
    bounds: dict
    assumptions: dict
    diagnostics: list
    events: list
    initial_consecutive: dict
    labels_to_input: list

    def to_dict(self) -> dict:
        return {
            "schema": "ringbalance.summary/1",
            "status": self.status,
            "seed": self.seed,
            "generator": self.generator,
            "n_agents": self.n_agents,
            "n_steps": self.n_steps,
            "identified_at": {str(k): v for k, v in sorted(self.identified_at.items())},
            "deactivated_at": {str(k): v for k, v in sorted(self.deactivated_at.items())},
            "steady_errors": {str(k): v for k, v in sorted(self.steady_errors.items())},
            "closing_gap_error": self.closing_gap_error,
            "epsilon_achieved": self.epsilon_achieved,
            "bounds": self.bounds,
            "assumptions": self.assumptions,
            "diagnostics": list(self.diagnostics),
            "events": [list(e) for e in self.events],
            "initial_consecutive": {
                str(k): v for k, v in sorted(self.initial_consecutive.items())
            },
            "labels_to_input": list(self.labels_to_input),
        }


class DiagnosticFailure(RuntimeError):
    def __init__(self, kind: str, agent_label: int, detail: str):
        self.kind = kind
        self.agent_label = agent_label
        self.detail = detail
        super().__init__(f"{kind} (agent {agent_label}): {detail}")


def default_horizon(config: SimConfig) -> int:
    """Four times the worst-case first-settle bound plus one settle increment
    per agent; reaching it without full deactivation is a failure, never a
    silent truncation."""
    w = config.omega0 + config.k_gain
    t1_worst = math.ceil((PI - 2.0 * w) / config.omega0)
    t2_worst = (
        t1_worst
        + math.floor((config.theta_max - w) / config.k_gain)
        + 1
        + math.ceil((config.psi - (config.theta_max + config.k_gain)) / config.k_gain)
    )
    per_agent = math.ceil((config.psi - 2.0 * w) / config.k_gain)
    return 4 * max(t2_worst, 1) + config.n_agents * max(per_agent, 1)


def analytical_bounds(
    config: SimConfig,
    initial_consecutive: dict,
    identified_at: dict,
    deactivated_at: dict,
) -> dict:
    """Analytical convergence-time bounds compared against observed times.

    Keys: t1 (identification time of agent 2), t2 (settle time of agent 2),
    t4 (settle time of each later agent, keyed by 1-based label). Labels are
    1-based; initial_consecutive[i] is the signed relative phase of agent i
    with respect to agent i-1 at step 0.
    """
    w = config.omega0 + config.k_gain
    out: dict = {}

    # A wrapped (negative) relative phase means the arc the pacemaker has to
    # close exceeds pi; the closing time depends on the full arc.
    theta21 = initial_consecutive[2]
    if theta21 <= 0.0:
        theta21 += TAU
    t1 = math.ceil((theta21 - 2.0 * w) / config.omega0)
    k2 = identified_at.get(2)
    out["t1"] = {"bound": t1, "observed": k2, "pass": k2 is not None and k2 <= t1}

    t2 = (
        t1
        + math.floor((config.theta_max - w) / config.k_gain)
        + 1
        + math.ceil((config.psi - (config.theta_max + config.k_gain)) / config.k_gain)
    )
    k2c = deactivated_at.get(2)
    out["t2"] = {"bound": t2, "observed": k2c, "pass": k2c is not None and k2c <= t2}

    settle_term = math.ceil((config.psi - 2.0 * w) / config.k_gain)
    t4: dict = {}
    for i in range(3, config.n_agents + 1):
        rel0 = initial_consecutive[i]
        x = rel0 if rel0 > 0.0 else TAU + rel0
        prev_id = identified_at.get(i - 1)
        prev_de = deactivated_at.get(i - 1)
        obs = deactivated_at.get(i)
        if prev_id is None or prev_de is None:
            t4[str(i)] = {"bound": None, "observed": obs, "pass": False}
            continue
        first = prev_id + math.ceil((x - 2.0 * w) / config.omega0)
        bound = max(first, prev_de) + settle_term
        t4[str(i)] = {"bound": bound, "observed": obs, "pass": obs is not None and obs <= bound}
    out["t4"] = t4
    return out


class Simulation:
    """Mutable world state for one run."""

    def __init__(self, config: SimConfig, record: bool = True):
        self.config = config
        self.record = record
        self.report = validate(config)
        self.rng = random.Random(config.seed)
        phases, labels_to_input = init_phases(config, self.rng)
        check_initial_phases(phases, config.min_separation)
        self.phases = phases
        self.labels_to_input = labels_to_input

        n = config.n_agents
        self.n = n
        self.k = 0
        self.horizon = config.horizon if config.horizon is not None else default_horizon(config)
        self.psi = config.psi
        self.sensing = config.sensing
        self.speeds = config.speeds
        self.out_set = out_of_range_set(self.sensing)
        self.u_pre = Interval(
            -(config.omega0 + config.k_gain) - PROPAGATION_GUARD, PROPAGATION_GUARD
        )

        self.roles = [AgentRole(is_pacemaker=(i == 0)) for i in range(n)]
        self.banks: list[Optional[EstimatorBank]] = [None] + [
            EstimatorBank(
                agent_id=i,
                enclosures={j: FULL_CIRCLE for j in range(n) if j != i},
            )
            for i in range(1, n)
        ]
        # relative-input enclosure used to propagate each follower pair
        self.u_hat_follower: list[Optional[Interval]] = [None] * n
        self.deactivated_at: list[Optional[int]] = [None] * n
        self.range_exited: list[bool] = [False] * n
        self.settle_value: list[Optional[float]] = [None] * n
        self.controls = [0.0] * n

        # continuous arc from each agent's follower, for the overtake monitor
        self.arcs = [0.0] * n
        for i in range(n):
            f = i - 1 if i >= 1 else n - 1
            a = (phases[i] - phases[f]) % TAU
            self.arcs[i] = a

        self.initial_consecutive = {
            i + 1: rem(phases[i] - phases[i - 1]) for i in range(1, n)
        }
        self.initial_consecutive[1] = rem(phases[0] - phases[n - 1])

        self.records: list[RoundRecord] = []
        self.events: list[Event] = []
        self.diagnostics: list[str] = []

        self._pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]

    # -- helpers ---------------------------------------------------------

    def _fail(self, kind: str, agent_label: int, detail: str):
        raise DiagnosticFailure(kind, agent_label, detail)

    def _event(self, kind: str, agent_label: int, detail: str = ""):
        self.events.append(Event(kind, agent_label, self.k, detail))

    # -- one synchronous round -------------------------------------------

    def step(self) -> None:
        n = self.n
        k = self.k
        cfg = self.config
        phases = self.phases
        theta_max = cfg.theta_max
        rng_uniform = self.rng.uniform
        nu_bound = cfg.phi * cfg.fault_noise_factor

        # (1)-(2) true separations, edges, shared noise draw per pair, bands
        rel = [[0.0] * n for _ in range(n)]
        band: list[list[Optional[Interval]]] = [[None] * n for _ in range(n)]
        edges = []
        measurements = []
        for i, j in self._pairs:
            d = rem(phases[i] - phases[j])
            rel[i][j] = d
            rel[j][i] = -d if d != -PI else -PI
            alpha = abs(d)
            nu = rng_uniform(-nu_bound, nu_bound)
            if alpha <= theta_max:
                y = alpha + nu
                if y < 0.0:
                    y = 0.0
                b = build_upsilon(y, self.sensing)
                band[i][j] = b
                band[j][i] = b
                edges.append((i, j))
                if self.record:
                    measurements.append(Measurement((i + 1, j + 1), y))
                if not (b.lo <= alpha <= b.hi):
                    self._fail(
                        "soundness",
                        0,
                        f"true separation {alpha!r} of pair ({i + 1},{j + 1}) "
                        f"outside measured band [{b.lo!r}, {b.hi!r}]",
                    )

        # (3) correct -> identify -> estimate, per non-pacemaker agent
        step_events_start = len(self.events)
        for i in range(1, n):
            bank = self.banks[i]
            if not bank.identified:
                encl = bank.enclosures
                for j in list(encl.keys()):
                    b = band[i][j]
                    if b is None:
                        encl[j] = self.out_set
                    else:
                        if crosses_seam(encl[j], self.u_pre):
                            self._event("seam_wrap", i + 1, f"peer {j + 1}")
                        prior = propagate(encl[j], self.u_pre)
                        new = correct(prior, False, False, b, self.sensing)
                        if not new:
                            self._fail(
                                "estimator_inconsistency",
                                i + 1,
                                f"enclosure for peer {j + 1} became empty before identification",
                            )
                        encl[j] = new
                try:
                    found = try_identify(bank)
                except AmbiguousFollowerError as exc:
                    self._fail("ambiguous_follower", i + 1, str(exc))
                if found is not None:
                    latch_identification(bank, found, k)
                    self._event("identification", i + 1, f"follower {found + 1}")
                    if found != i - 1:
                        self._fail(
                            "misidentification",
                            i + 1,
                            f"latched peer {found + 1}, true follower is {i}",
                        )
                    prev = self.banks[i - 1] if i - 1 >= 1 else None
                    if prev is not None and (
                        prev.identified_at is None or prev.identified_at >= k
                    ):
                        self._fail(
                            "cascade_order",
                            i + 1,
                            f"identified at step {k} before its follower",
                        )
            else:
                f = bank.follower
                b = band[i][f]
                u_hat = self.u_hat_follower[i]
                if crosses_seam(bank.enclosures[f], u_hat):
                    self._event("seam_wrap", i + 1, f"peer {f + 1}")
                prior = propagate(bank.enclosures[f], u_hat)
                try:
                    new = correct(prior, True, True, b, self.sensing)
                except EmptyFollowerSetError as exc:
                    self._fail("empty_follower_set", i + 1, str(exc))
                bank.enclosures[f] = new
                bank.spacing_estimate = hull(new).hi
                if b is None and not self.range_exited[i]:
                    self.range_exited[i] = True
                    self._event("range_exit", i + 1)

        # soundness of every follower enclosure, zero tolerance
        for i in range(1, n):
            bank = self.banks[i]
            truth = rel[i][i - 1]
            gamma = bank.enclosures.get(i - 1)
            if bank.identified and bank.follower != i - 1:
                continue  # already flagged as misidentification
            if gamma is not None and not multi_contains(gamma, truth):
                self._fail(
                    "soundness",
                    i + 1,
                    f"true relative phase {truth!r} escaped the follower enclosure at step {k}",
                )

        # (4) controls, deactivation detection
        controls = self.controls
        controls[0] = self.speeds.omega0
        for i in range(1, n):
            bank = self.banks[i]
            if bank.identified and self.deactivated_at[i] is None and (
                bank.spacing_estimate > self.psi
            ):
                self.deactivated_at[i] = k
                self.settle_value[i] = rel[i][i - 1]
                self._event("deactivation", i + 1, f"estimate {bank.spacing_estimate!r}")
            controls[i] = control(self.roles[i], bank, self.psi, self.speeds)

        # post-identification / post-deactivation monitors
        for i in range(1, n):
            bank = self.banks[i]
            if not bank.identified:
                continue
            truth = rel[i][i - 1]
            if self.deactivated_at[i] is not None:
                if controls[i] != self.speeds.omega0:
                    self._fail(
                        "deactivation_latch",
                        i + 1,
                        f"control {controls[i]!r} after deactivation",
                    )
                err = abs(truth - self.psi)
                if err > cfg.k_gain + GUARD_ALLOWANCE:
                    self._fail(
                        "settle_band",
                        i + 1,
                        f"|spacing - psi| = {err!r} exceeds k_gain after deactivation",
                    )
                if abs(truth - self.settle_value[i]) > 1e-12:
                    self._fail(
                        "settle_constancy",
                        i + 1,
                        f"spacing drifted by {abs(truth - self.settle_value[i])!r}",
                    )
            elif self.range_exited[i] and band[i][i - 1] is None:
                bias = bank.spacing_estimate - truth
                if not (0.0 <= bias < cfg.k_gain + GUARD_ALLOWANCE):
                    self._fail(
                        "estimate_bias",
                        i + 1,
                        f"estimate bias {bias!r} outside [0, k_gain) during push",
                    )

        # (7) record
        if self.record:
            consecutive = tuple(rel[i][i - 1] for i in range(1, n)) + (rel[0][n - 1],)
            hull_lo = []
            hull_hi = []
            for i in range(1, n):
                gamma = self.banks[i].enclosures.get(i - 1)
                if gamma:
                    h = hull(gamma)
                    hull_lo.append(h.lo)
                    hull_hi.append(h.hi)
                else:
                    hull_lo.append(math.nan)
                    hull_hi.append(math.nan)
            self.records.append(
                RoundRecord(
                    k=k,
                    phases=tuple(phases),
                    edges=tuple((i + 1, j + 1) for i, j in edges),
                    measurements=tuple(measurements),
                    controls=tuple(controls),
                    indicators=tuple(
                        1 if self.banks[i].identified else 0 for i in range(1, n)
                    ),
                    consecutive=consecutive,
                    hull_lo=tuple(hull_lo),
                    hull_hi=tuple(hull_hi),
                    events=tuple(self.events[step_events_start:]),
                )
            )

        # (5) input estimates for the next propagation of follower pairs
        for i in range(1, n):
            bank = self.banks[i]
            if bank.identified:
                f = bank.follower
                u_hat_j = estimate_peer_input(
                    True, band[i][f] is not None, True, self.speeds
                )
                uh = relative_input_estimate(controls[i], u_hat_j)
                self.u_hat_follower[i] = Interval(
                    uh.lo - PROPAGATION_GUARD, uh.hi + PROPAGATION_GUARD
                )

        # (6) physical update and overtake monitor
        omega = cfg.omega
        for i in range(n):
            phases[i] = step_phase(phases[i], omega, controls[i])
        arcs = self.arcs
        for i in range(n):
            f = i - 1 if i >= 1 else n - 1
            arcs[i] += controls[i] - controls[f]
            if arcs[i] <= 0.0:
                self._fail(
                    "overtake",
                    i + 1,
                    f"agent {i + 1} crossed its follower at step {k}",
                )
        self.k = k + 1

    # -- full run ----------------------------------------------------------

    def all_deactivated(self) -> bool:
        return all(self.deactivated_at[i] is not None for i in range(1, self.n))

    def run(self) -> RunSummary:
        status = "ok"
        try:
            grace_left: Optional[int] = None
            while self.k < self.horizon:
                self.step()
                if grace_left is None:
                    if self.all_deactivated():
                        grace_left = GRACE_STEPS
                else:
                    grace_left -= 1
                    if grace_left <= 0:
                        break
            if not self.all_deactivated():
                status = "not_converged"
                self.diagnostics.append(
                    f"not converged within horizon {self.horizon}"
                )
        except DiagnosticFailure as exc:
            status = "diagnostic_failed"
            self.diagnostics.append(f"{exc.kind}: agent {exc.agent_label}: {exc.detail}")
            self._event(exc.kind, exc.agent_label, exc.detail)
        return self._summarize(status)

    def _summarize(self, status: str) -> RunSummary:
        n = self.n
        identified_at = {
            i + 1: self.banks[i].identified_at
            for i in range(1, n)
            if self.banks[i].identified_at is not None
        }
        deactivated_at = {
            i + 1: self.deactivated_at[i]
            for i in range(1, n)
            if self.deactivated_at[i] is not None
        }
        steady_errors = {}
        closing = None
        epsilon = None
        if status == "ok":
            for i in range(1, n):
                steady_errors[i + 1] = abs(rem(self.phases[i] - self.phases[i - 1]) - self.psi)
            closing = abs(rem(self.phases[0] - self.phases[n - 1]) - self.psi)
            epsilon = max(max(steady_errors.values()), closing)
        initial = dict(sorted(self.initial_consecutive.items()))
        bounds = (
            analytical_bounds(self.config, self.initial_consecutive, identified_at, deactivated_at)
            if status == "ok"
            else {}
        )
        return RunSummary(
            status=status,
            seed=self.config.seed,
            generator=GENERATOR_ID,
            n_agents=n,
            n_steps=self.k,
            identified_at=identified_at,
            deactivated_at=deactivated_at,
            steady_errors=steady_errors,
            closing_gap_error=closing,
            epsilon_achieved=epsilon,
            bounds=bounds,
            assumptions=self.report.to_dict(),
            diagnostics=list(self.diagnostics),
            events=list(self.events),
            initial_consecutive=initial,
            labels_to_input=self.labels_to_input,
        )


def run(config: SimConfig, record: bool = True) -> tuple[list[RoundRecord], RunSummary]:
    """Execute one full run and return (trajectory records, summary)."""
    sim = Simulation(config, record=record)
    summary = sim.run()
    return sim.records, summary


def detect_convergence(
    records: Sequence[RoundRecord], psi: float, k_gain: float
) -> dict:
    """Recover per-agent deactivation step and steady error from a trajectory.

    The steady spacing must be constant (to 1e-12) over the trailing window;
    raises NotConvergedError when some agent never deactivates.
    """
    if not records:
        raise NotConvergedError("empty trajectory")
    n_tracked = len(records[0].indicators)
    last = records[-1]
    out = {}
    for idx in range(n_tracked):
        label = idx + 2
        k_c = None
        for rec in records:
            if rec.indicators[idx] and not math.isnan(rec.hull_hi[idx]) and rec.hull_hi[idx] > psi:
                k_c = rec.k
                break
        if k_c is None:
            raise NotConvergedError(f"agent {label} never reached the target spacing")
        final = last.consecutive[idx]
        window = records[-GRACE_STEPS:]
        for rec in window:
            if rec.k >= k_c and abs(rec.consecutive[idx] - final) > 1e-12:
                raise NotConvergedError(
                    f"agent {label}: spacing not constant after deactivation"
                )
        out[label] = (k_c, abs(final - psi))
    return out
