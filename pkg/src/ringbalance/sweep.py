"""Monte Carlo parameter sweep over (gain, noise) cells.

The default grid varies the push gain over multiples of the cruise speed and
the noise bound over multiples of the gain, running a batch of seeded
independent experiments per cell. Per-gain aggregate rows average the last
agent's settle time over all noise cells and the steady spacing error over
agents and runs, exposing the convergence-speed/accuracy trade-off. Cells
run in parallel when possible; every run owns a derived substream so results
are independent of scheduling.
"""

from __future__ import annotations

import hashlib
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

from .sim import GENERATOR_ID, SimConfig, run

DEFAULT_K_FACTORS = (1, 2, 3, 4)
DEFAULT_PHI_FACTORS = (2, 3, 4, 5)


def derive_seed(base_seed: int, *indices) -> int:
    """Stable, well-mixed substream seed for one run of one cell."""
    text = ":".join(str(x) for x in (base_seed,) + indices)
    digest = hashlib.sha256(text.encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1


@dataclass
class SweepCell:
    k_gain: float
    phi: float
    runs: int
    failures: int
    mean_settle_last: Optional[float]  # mean settle step of the last agent
    mean_steady_error: Optional[float]

    def to_dict(self) -> dict:
        return {
            "k_gain": self.k_gain,
            "phi": self.phi,
            "runs": self.runs,
            "failures": self.failures,
            "mean_settle_last": self.mean_settle_last,
            "mean_steady_error": self.mean_steady_error,
        }


@dataclass
class SweepResult:
    cells: list  # list[SweepCell]
    aggregates: list  # list[dict], one per gain value
    base_seed: int
    generator: str
    runs_per_cell: int

    def to_dict(self) -> dict:
        return {
            "schema": "ringbalance.sweep/1",
            "base_seed": self.base_seed,
            "generator": self.generator,
            "runs_per_cell": self.runs_per_cell,
            "cells": [c.to_dict() for c in self.cells],
            "aggregates": self.aggregates,
        }


def _run_cell(args) -> dict:
    (base_seed, ki, pi, k_gain, phi, runs, n_agents, omega0, theta_max) = args
    settles = []
    errors = []
    failures = 0
    for r in range(runs):
        cfg = SimConfig(
            n_agents=n_agents,
            omega0=omega0,
            k_gain=k_gain,
            phi=phi,
            theta_max=theta_max,
            seed=derive_seed(base_seed, ki, pi, r),
        )
        _, summary = run(cfg, record=False)
        if summary.status != "ok":
            failures += 1
            continue
        settles.append(summary.deactivated_at[n_agents])
        errors.extend(summary.steady_errors.values())
    return {
        "ki": ki,
        "pi": pi,
        "k_gain": k_gain,
        "phi": phi,
        "runs": runs,
        "failures": failures,
        "settles": settles,
        "errors": errors,
    }


def monte_carlo(
    runs_per_cell: int = 100,
    base_seed: int = 0,
    n_agents: int = 6,
    omega0: float = 0.005,
    theta_max: float = math.pi / 4,
    k_factors: Sequence[int] = DEFAULT_K_FACTORS,
    phi_factors: Sequence[int] = DEFAULT_PHI_FACTORS,
    max_workers: Optional[int] = None,
) -> SweepResult:
    """Run the full grid and aggregate per gain value."""
    jobs = []
    for ki, kf in enumerate(k_factors):
        k_gain = kf * omega0
        for pi, pf in enumerate(phi_factors):
            jobs.append(
                (
                    base_seed,
                    ki,
                    pi,
                    k_gain,
                    pf * k_gain,
                    runs_per_cell,
                    n_agents,
                    omega0,
                    theta_max,
                )
            )
    if max_workers is None or max_workers > 1:
        try:
            with ProcessPoolExecutor(max_workers=max_workers) as ex:
                raw = list(ex.map(_run_cell, jobs))
        except (OSError, RuntimeError):
            raw = [_run_cell(j) for j in jobs]
    else:
        raw = [_run_cell(j) for j in jobs]

    cells = []
    for r in raw:
        cells.append(
            SweepCell(
                k_gain=r["k_gain"],
                phi=r["phi"],
                runs=r["runs"],
                failures=r["failures"],
                mean_settle_last=(sum(r["settles"]) / len(r["settles"])) if r["settles"] else None,
                mean_steady_error=(sum(r["errors"]) / len(r["errors"])) if r["errors"] else None,
            )
        )

    aggregates = []
    for ki, kf in enumerate(k_factors):
        settles = []
        errors = []
        failures = 0
        for r in raw:
            if r["ki"] == ki:
                settles.extend(r["settles"])
                errors.extend(r["errors"])
                failures += r["failures"]
        aggregates.append(
            {
                "k_gain": kf * omega0,
                "mean_settle_last": (sum(settles) / len(settles)) if settles else None,
                "mean_steady_error": (sum(errors) / len(errors)) if errors else None,
                "runs": len(settles),
                "failures": failures,
            }
        )
    return SweepResult(
        cells=cells,
        aggregates=aggregates,
        base_seed=base_seed,
        generator=GENERATOR_ID,
        runs_per_cell=runs_per_cell,
    )
