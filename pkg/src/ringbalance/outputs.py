"""File emitters for trajectories, summaries and sweep tables.

All files are reproducible byte-for-byte for a given configuration and seed:
floats are serialized with 17 significant digits (exact double round-trip),
rows are emitted in a fixed order, and nothing time- or host-dependent is
written. Angles are always radians.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Optional, Sequence

TRAJECTORY_FILENAME = "trajectory.csv"
SUMMARY_FILENAME = "summary.json"
SWEEP_FILENAME = "sweep.csv"


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        return format(x, ".17g")
    return str(x)


def trajectory_header(n_agents: int) -> list[str]:
    cols = ["k"]
    cols += [f"theta_{i}" for i in range(1, n_agents + 1)]
    cols += [f"vartheta_{i}_{i - 1}" for i in range(2, n_agents + 1)]
    cols += [f"vartheta_1_{n_agents}"]
    cols += [f"u_{i}" for i in range(1, n_agents + 1)]
    cols += [f"indicator_{i}" for i in range(1, n_agents + 1)]
    cols += [f"hull_lo_{i}" for i in range(2, n_agents + 1)]
    cols += [f"hull_hi_{i}" for i in range(2, n_agents + 1)]
    return cols


def write_trajectory(path: Path, n_agents: int, rows: Sequence[dict]) -> None:
    """Rows carry keys k, phases, consecutive, controls, indicators, hull_lo,
    hull_hi; the pacemaker has no indicator of its own and is written as 0."""
    lines = [",".join(trajectory_header(n_agents))]
    for row in rows:
        cells = [str(row["k"])]
        cells += [fmt(v) for v in row["phases"]]
        cells += [fmt(v) for v in row["consecutive"]]
        cells += [fmt(v) for v in row["controls"]]
        cells += ["0"] + [str(v) for v in row["indicators"]]
        cells += [fmt(v) for v in row["hull_lo"]]
        cells += [fmt(v) for v in row["hull_hi"]]
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n")


def write_summary(path: Path, summary: dict) -> None:
    path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")


def write_sweep(path: Path, sweep: dict) -> None:
    """One row per cell, then one aggregate row per gain (empty phi column)."""
    cols = [
        "row_type",
        "k_gain",
        "phi",
        "runs",
        "failures",
        "mean_settle_last",
        "mean_steady_error",
    ]
    lines = [",".join(cols)]
    for c in sweep["cells"]:
        lines.append(
            ",".join(
                [
                    "cell",
                    fmt(c["k_gain"]),
                    fmt(c["phi"]),
                    str(c["runs"]),
                    str(c["failures"]),
                    fmt(c["mean_settle_last"]),
                    fmt(c["mean_steady_error"]),
                ]
            )
        )
    for a in sweep["aggregates"]:
        lines.append(
            ",".join(
                [
                    "aggregate",
                    fmt(a["k_gain"]),
                    "",
                    str(a["runs"]),
                    str(a["failures"]),
                    fmt(a["mean_settle_last"]),
                    fmt(a["mean_steady_error"]),
                ]
            )
        )
    path.write_text("\n".join(lines) + "\n")


def record_to_row(record) -> dict:
    """Convert a RoundRecord into the row dict used by the writers."""
    nan_to_none = lambda v: None if isinstance(v, float) and math.isnan(v) else v  # noqa: E731
    return {
        "k": record.k,
        "phases": list(record.phases),
        "consecutive": list(record.consecutive),
        "controls": list(record.controls),
        "indicators": list(record.indicators),
        "hull_lo": [nan_to_none(v) for v in record.hull_lo],
        "hull_hi": [nan_to_none(v) for v in record.hull_hi],
    }


def parse_config_text(text: str) -> dict:
    """Flat key=value configuration format; '#' starts a comment."""
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key] = value
    return out


def serialize_config(config: dict) -> str:
    lines = []
    for key in sorted(config):
        value = config[key]
        if value is None:
            continue
        if isinstance(value, (list, tuple)):
            value = ",".join(fmt(v) for v in value)
        elif isinstance(value, float):
            value = fmt(value)
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"
