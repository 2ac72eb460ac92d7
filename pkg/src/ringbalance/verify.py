"""Randomized assertion battery over full simulation runs.

Samples admissible configurations, executes complete runs with every runtime
monitor armed, and aggregates violations: enclosure soundness, analytical
time bounds, balance accuracy, identification cascade order and
pre-identification stasis. Parameters are drawn from the admissible region
with comfortable margins (noise, gains and detection range scaled so that
identification always resolves before agents can meet); the margins match
the published operating point and avoid degenerate corners where a noise
band as wide as the detection range makes identification impossible.

A deliberate fault hook draws noise beyond the bound the estimators assume,
which must trip the soundness detector: the battery's negative control.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from .kinematics import TAU
from .sim import SimConfig, run
from .sweep import derive_seed


@dataclass
class VerifyReport:
    runs: int
    ok_runs: int
    diagnostic_runs: int
    not_converged_runs: int
    soundness_detections: int
    bound_violations: dict = field(default_factory=dict)  # t1/t2/t4 -> count
    balance_violations: int = 0
    cascade_violations: int = 0
    failure_kinds: dict = field(default_factory=dict)
    seed: int = 0
    inject_fault: bool = False

    @property
    def violations(self) -> int:
        return (
            sum(self.bound_violations.values())
            + self.balance_violations
            + self.cascade_violations
            + self.not_converged_runs
            + self.diagnostic_runs
        )

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        return {
            "schema": "ringbalance.verify/1",
            "seed": self.seed,
            "inject_fault": self.inject_fault,
            "runs": self.runs,
            "ok_runs": self.ok_runs,
            "diagnostic_runs": self.diagnostic_runs,
            "not_converged_runs": self.not_converged_runs,
            "soundness_detections": self.soundness_detections,
            "bound_violations": dict(self.bound_violations),
            "balance_violations": self.balance_violations,
            "cascade_violations": self.cascade_violations,
            "failure_kinds": dict(self.failure_kinds),
            "violations": self.violations,
            "ok": self.ok,
        }

    def lines(self) -> list[str]:
        return [
            f"runs: {self.runs} (ok {self.ok_runs}, diagnostic {self.diagnostic_runs}, "
            f"not converged {self.not_converged_runs})",
            f"soundness detections: {self.soundness_detections}",
            f"bound violations: t1={self.bound_violations.get('t1', 0)} "
            f"t2={self.bound_violations.get('t2', 0)} t4={self.bound_violations.get('t4', 0)}",
            f"balance violations: {self.balance_violations}",
            f"cascade violations: {self.cascade_violations}",
            f"verdict: {'PASS' if self.ok else 'FAIL'}",
        ]


def sample_config(rng: random.Random, n_agents: int, seed: int, inject_fault: bool = False) -> SimConfig:
    """Draw one admissible configuration with comfortable margins.

    Constraints beyond plain admissibility: the noise bound is at least half
    of one relative step (so measurement bands saturate meaningfully) and the
    detection range clears four noise bands plus four relative steps, while
    staying one settle band short of the target spacing. Inside this region
    identification provably resolves while agents are still separated.
    """
    psi = TAU / n_agents
    omega0 = rng.uniform(0.005, 0.01)
    k_gain = omega0 * rng.uniform(1.0, 3.0)
    w = omega0 + k_gain
    phi = w * rng.uniform(0.5, 1.25)
    lo = 4.0 * phi + 4.0 * w
    hi = psi - 2.0 * k_gain
    theta_max = rng.uniform(lo, min(hi, 0.95 * psi))
    return SimConfig(
        n_agents=n_agents,
        omega0=omega0,
        k_gain=k_gain,
        phi=phi,
        theta_max=theta_max,
        seed=seed,
        fault_noise_factor=3.0 if inject_fault else 1.0,
    )


def check_summary(summary, n_agents: int, k_gain: float, report: VerifyReport) -> None:
    """Fold one successful run into the aggregate report."""
    b = summary.bounds
    if not b.get("t1", {}).get("pass"):
        report.bound_violations["t1"] = report.bound_violations.get("t1", 0) + 1
    if not b.get("t2", {}).get("pass"):
        report.bound_violations["t2"] = report.bound_violations.get("t2", 0) + 1
    if any(not v["pass"] for v in b.get("t4", {}).values()):
        report.bound_violations["t4"] = report.bound_violations.get("t4", 0) + 1
    epsilon_cap = (n_agents - 1) * k_gain
    if (
        any(e > k_gain for e in summary.steady_errors.values())
        or summary.closing_gap_error > epsilon_cap
    ):
        report.balance_violations += 1
    ks = [summary.identified_at.get(i) for i in range(2, n_agents + 1)]
    if any(k is None for k in ks) or any(a >= bb for a, bb in zip(ks, ks[1:])):
        report.cascade_violations += 1


def _battery_chunk(args) -> dict:
    base_seed, n_min, n_max, inject_fault, start, count = args
    report = VerifyReport(
        runs=0,
        ok_runs=0,
        diagnostic_runs=0,
        not_converged_runs=0,
        soundness_detections=0,
        seed=base_seed,
        inject_fault=inject_fault,
    )
    for idx in range(start, start + count):
        prng = random.Random(derive_seed(base_seed, "params", idx))
        n_agents = prng.randrange(n_min, n_max + 1)
        cfg = sample_config(prng, n_agents, derive_seed(base_seed, "run", idx), inject_fault)
        _, summary = run(cfg, record=False)
        report.runs += 1
        if summary.status == "ok":
            report.ok_runs += 1
            check_summary(summary, n_agents, cfg.k_gain, report)
        elif summary.status == "not_converged":
            report.not_converged_runs += 1
        else:
            report.diagnostic_runs += 1
            for diag in summary.diagnostics:
                kind = diag.split(":", 1)[0]
                report.failure_kinds[kind] = report.failure_kinds.get(kind, 0) + 1
                if kind in ("soundness", "empty_follower_set", "estimator_inconsistency"):
                    report.soundness_detections += 1
    return report.to_dict()


def battery(
    runs: int = 100,
    n_min: int = 3,
    n_max: int = 8,
    seed: int = 0,
    inject_fault: bool = False,
    max_workers: Optional[int] = None,
) -> VerifyReport:
    """Execute the randomized battery and return the aggregate report."""
    if n_min < 3 or n_max < n_min:
        raise ValueError(f"invalid agent range [{n_min}, {n_max}]")
    chunks = []
    n_chunks = 4 if runs >= 8 else 1
    per = runs // n_chunks
    extra = runs - per * n_chunks
    start = 0
    for c in range(n_chunks):
        count = per + (1 if c < extra else 0)
        if count:
            chunks.append((seed, n_min, n_max, inject_fault, start, count))
            start += count
    if (max_workers is None or max_workers > 1) and len(chunks) > 1:
        try:
            with ProcessPoolExecutor(max_workers=max_workers) as ex:
                parts = list(ex.map(_battery_chunk, chunks))
        except (OSError, RuntimeError):
            parts = [_battery_chunk(c) for c in chunks]
    else:
        parts = [_battery_chunk(c) for c in chunks]

    total = VerifyReport(
        runs=0,
        ok_runs=0,
        diagnostic_runs=0,
        not_converged_runs=0,
        soundness_detections=0,
        seed=seed,
        inject_fault=inject_fault,
    )
    for p in parts:
        total.runs += p["runs"]
        total.ok_runs += p["ok_runs"]
        total.diagnostic_runs += p["diagnostic_runs"]
        total.not_converged_runs += p["not_converged_runs"]
        total.soundness_detections += p["soundness_detections"]
        for key, v in p["bound_violations"].items():
            total.bound_violations[key] = total.bound_violations.get(key, 0) + v
        total.balance_violations += p["balance_violations"]
        total.cascade_violations += p["cascade_violations"]
        for key, v in p["failure_kinds"].items():
            total.failure_kinds[key] = total.failure_kinds.get(key, 0) + v
    return total
