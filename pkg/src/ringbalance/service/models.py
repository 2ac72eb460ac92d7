"""Pydantic request/response models for the simulation service."""

from __future__ import annotations

import math
from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

from ..sim import SimConfig


class ConfigModel(BaseModel):
    """Wire form of a simulation configuration."""

    model_config = ConfigDict(extra="forbid")

    n_agents: int = 6
    omega: float = 0.0
    omega0: float = 0.005
    k_gain: float = 0.005
    phi: float = 0.01
    theta_max: float = math.pi / 4
    horizon: Optional[int] = None
    seed: int = 0
    init: Optional[list[float]] = None  # explicit phases; None samples them
    pacemaker: Union[int, Literal["random"]] = 0
    fault_noise_factor: float = 1.0

    def to_sim(self) -> SimConfig:
        return SimConfig(
            n_agents=self.n_agents,
            omega=self.omega,
            omega0=self.omega0,
            k_gain=self.k_gain,
            phi=self.phi,
            theta_max=self.theta_max,
            horizon=self.horizon,
            seed=self.seed,
            init=tuple(self.init) if self.init is not None else "sampled",
            pacemaker=self.pacemaker,
            fault_noise_factor=self.fault_noise_factor,
        )

    @classmethod
    def from_flat(cls, flat: dict) -> "ConfigModel":
        """Build from the flat key=value file format (string values)."""
        kwargs: dict = {}
        for key, value in flat.items():
            if key in ("n_agents", "seed", "horizon"):
                kwargs[key] = int(value)
            elif key in ("omega", "omega0", "k_gain", "phi", "theta_max", "fault_noise_factor"):
                kwargs[key] = float(value)
            elif key == "init":
                kwargs[key] = None if value == "sampled" else [float(v) for v in value.split(",")]
            elif key == "pacemaker":
                kwargs[key] = value if value == "random" else int(value)
            else:
                raise ValueError(f"unknown configuration key: {key}")
        return cls(**kwargs)

    def to_flat(self) -> dict:
        flat = self.model_dump()
        flat["init"] = "sampled" if self.init is None else list(self.init)
        if flat["horizon"] is None:
            del flat["horizon"]
        return flat


class TrajectoryRow(BaseModel):
    k: int
    phases: list[float]
    consecutive: list[float]
    controls: list[float]
    indicators: list[int]
    hull_lo: list[Optional[float]]
    hull_hi: list[Optional[float]]


class RunRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    config: ConfigModel = Field(default_factory=ConfigModel)
    record_trajectory: bool = True


class RunResponse(BaseModel):
    summary: dict
    trajectory: Optional[list[TrajectoryRow]] = None


class SweepRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    runs_per_cell: int = 100
    base_seed: int = 0
    n_agents: int = 6
    omega0: float = 0.005
    theta_max: float = math.pi / 4
    k_factors: list[int] = Field(default_factory=lambda: [1, 2, 3, 4])
    phi_factors: list[int] = Field(default_factory=lambda: [2, 3, 4, 5])


class SweepResponse(BaseModel):
    table: dict


class VerifyRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    runs: int = 100
    n_min: int = 3
    n_max: int = 8
    seed: int = 0
    inject_fault: bool = False


class VerifyResponse(BaseModel):
    report: dict
    lines: list[str]
