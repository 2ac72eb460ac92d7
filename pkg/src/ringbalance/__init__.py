"""Deterministic simulator and verification harness for decentralized
balancing of phase oscillators on a circle under short-range, noisy,
sign-ambiguous proximity sensing."""

__version__ = "0.1.0"

from .sim import RunSummary, SimConfig, run  # noqa: F401
from .sweep import monte_carlo  # noqa: F401
from .verify import battery  # noqa: F401
