"""Command-line front end: a thin client of the simulation service.

Subcommands `run`, `sweep` and `verify` build a typed request, execute it
(in-process by default, or against a remote service with --server) and write
the output bundle. Exit codes: 0 success, 2 invalid configuration,
3 diagnostic failure or non-convergence, 4 assertion violations.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import urllib.error
import urllib.request
from pathlib import Path

from .outputs import (
    SUMMARY_FILENAME,
    SWEEP_FILENAME,
    TRAJECTORY_FILENAME,
    parse_config_text,
    serialize_config,
    write_summary,
    write_sweep,
    write_trajectory,
)
from .service import models as m
from .service.app import run_simulation, run_sweep, run_verify
from .sim import InfeasibleInitError, InvalidConfigError

OUT_DIR_ENV = "RINGBALANCE_OUT_DIR"

EXIT_OK = 0
EXIT_INVALID_CONFIG = 2
EXIT_DIAGNOSTIC = 3
EXIT_VIOLATIONS = 4


def _post(server: str, path: str, payload: dict) -> dict:
    req = urllib.request.Request(
        server.rstrip("/") + path,
        data=json.dumps(payload).encode(),
        headers={"Content-Type": "application/json"},
        method="POST",
    )
    with urllib.request.urlopen(req) as resp:
        return json.loads(resp.read().decode())


def _out_dir(args) -> Path:
    out = args.out_dir or os.environ.get(OUT_DIR_ENV) or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _angle(x: float, degrees: bool) -> str:
    return f"{math.degrees(x):.4f} deg" if degrees else f"{x:.6f} rad"


def _build_config(args) -> m.ConfigModel:
    flat: dict = {}
    if args.config:
        flat = parse_config_text(Path(args.config).read_text())
    cfg = m.ConfigModel.from_flat(flat) if flat else m.ConfigModel()
    overrides = {}
    if args.n is not None:
        overrides["n_agents"] = args.n
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.omega0 is not None:
        overrides["omega0"] = args.omega0
    if args.k is not None:
        overrides["k_gain"] = args.k
    if args.phi is not None:
        overrides["phi"] = args.phi
    if args.theta_max is not None:
        overrides["theta_max"] = args.theta_max
    if args.horizon is not None:
        overrides["horizon"] = args.horizon
    if args.omega is not None:
        overrides["omega"] = args.omega
    if overrides:
        cfg = cfg.model_copy(update=overrides)
    return cfg


def cmd_run(args) -> int:
    try:
        cfg = _build_config(args)
    except (ValueError, OSError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_INVALID_CONFIG
    request = m.RunRequest(config=cfg, record_trajectory=True)
    try:
        if args.server:
            raw = _post(args.server, "/run", request.model_dump())
            response = m.RunResponse.model_validate(raw)
        else:
            response = run_simulation(request)
    except (InvalidConfigError, InfeasibleInitError, ValueError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_INVALID_CONFIG
    except urllib.error.HTTPError as exc:
        detail = exc.read().decode(errors="replace")
        print(f"server rejected request ({exc.code}): {detail}", file=sys.stderr)
        return EXIT_INVALID_CONFIG if exc.code == 422 else EXIT_DIAGNOSTIC

    out = _out_dir(args)
    summary = response.summary
    rows = [r.model_dump() for r in response.trajectory or []]
    write_trajectory(out / TRAJECTORY_FILENAME, summary["n_agents"], rows)
    write_summary(out / SUMMARY_FILENAME, summary)
    (out / "config.txt").write_text(serialize_config(cfg.to_flat()))

    deg = args.degrees
    print(f"status: {summary['status']}  steps: {summary['n_steps']}  seed: {summary['seed']}")
    if summary["identified_at"]:
        print("identified_at:", dict(sorted(summary["identified_at"].items(), key=lambda kv: int(kv[0]))))
    if summary["deactivated_at"]:
        print("deactivated_at:", dict(sorted(summary["deactivated_at"].items(), key=lambda kv: int(kv[0]))))
    for label, err in sorted(summary["steady_errors"].items(), key=lambda kv: int(kv[0])):
        print(f"steady error agent {label}: {_angle(err, deg)}")
    if summary["epsilon_achieved"] is not None:
        print(f"epsilon achieved: {_angle(summary['epsilon_achieved'], deg)}")
    print(f"wrote {out / TRAJECTORY_FILENAME} and {out / SUMMARY_FILENAME}")
    if summary["status"] != "ok":
        for d in summary["diagnostics"]:
            print(f"diagnostic: {d}", file=sys.stderr)
        return EXIT_DIAGNOSTIC
    return EXIT_OK


def _parse_int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def cmd_sweep(args) -> int:
    request = m.SweepRequest(
        runs_per_cell=args.runs,
        base_seed=args.seed if args.seed is not None else 0,
        n_agents=args.n if args.n is not None else 6,
        omega0=args.omega0 if args.omega0 is not None else 0.005,
        theta_max=args.theta_max if args.theta_max is not None else math.pi / 4,
        k_factors=_parse_int_list(args.k_factors),
        phi_factors=_parse_int_list(args.phi_factors),
    )
    try:
        if args.server:
            raw = _post(args.server, "/sweep", request.model_dump())
            response = m.SweepResponse.model_validate(raw)
        else:
            response = run_sweep(request)
    except (InvalidConfigError, InfeasibleInitError, ValueError) as exc:
        print(f"invalid sweep configuration: {exc}", file=sys.stderr)
        return EXIT_INVALID_CONFIG
    except urllib.error.HTTPError as exc:
        print(f"server rejected request ({exc.code})", file=sys.stderr)
        return EXIT_INVALID_CONFIG

    out = _out_dir(args)
    table = response.table
    write_sweep(out / SWEEP_FILENAME, table)
    failures = sum(c["failures"] for c in table["cells"])
    print(f"cells: {len(table['cells'])}  aggregates: {len(table['aggregates'])}  failures: {failures}")
    for a in table["aggregates"]:
        print(
            f"k_gain={a['k_gain']:.6g}  mean settle (last agent)={a['mean_settle_last']:.1f}"
            f"  mean steady error={a['mean_steady_error']:.6g}"
        )
    print(f"wrote {out / SWEEP_FILENAME}")
    if failures:
        print(f"warning: {failures} failed runs excluded from averages", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    request = m.VerifyRequest(
        runs=args.runs,
        n_min=args.n_min,
        n_max=args.n_max,
        seed=args.seed if args.seed is not None else 0,
        inject_fault=args.inject_fault,
    )
    try:
        if args.server:
            raw = _post(args.server, "/verify", request.model_dump())
            response = m.VerifyResponse.model_validate(raw)
        else:
            response = run_verify(request)
    except ValueError as exc:
        print(f"invalid verify request: {exc}", file=sys.stderr)
        return EXIT_INVALID_CONFIG
    except urllib.error.HTTPError as exc:
        print(f"server rejected request ({exc.code})", file=sys.stderr)
        return EXIT_INVALID_CONFIG
    for line in response.lines:
        print(line)
    return EXIT_OK if response.report["ok"] else EXIT_VIOLATIONS


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ringbalance",
        description="Simulate and verify decentralized circular-formation balancing.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_grid=False):
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--n", type=int, default=None, help="number of agents")
        p.add_argument("--omega0", type=float, default=None, help="cruise speed (rad/step)")
        p.add_argument("--theta-max", type=float, default=None, help="detection range (rad)")
        p.add_argument("--out-dir", default=None, help=f"output directory (default ${OUT_DIR_ENV} or .)")
        p.add_argument("--server", default=None, help="base URL of a running service")

    p_run = sub.add_parser("run", help="execute one simulation and write its output bundle")
    common(p_run)
    p_run.add_argument("--config", default=None, help="flat key=value configuration file")
    p_run.add_argument("--k", type=float, default=None, help="push gain (rad/step)")
    p_run.add_argument("--phi", type=float, default=None, help="noise bound (rad)")
    p_run.add_argument("--omega", type=float, default=None, help="natural speed (rad/step)")
    p_run.add_argument("--horizon", type=int, default=None)
    p_run.add_argument("--degrees", action="store_true", help="display angles in degrees (files stay radians)")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="Monte Carlo sweep over gain and noise cells")
    common(p_sweep)
    p_sweep.add_argument("--runs", type=int, default=100, help="runs per cell")
    p_sweep.add_argument("--k-factors", default="1,2,3,4", help="gain multiples of omega0")
    p_sweep.add_argument("--phi-factors", default="2,3,4,5", help="noise multiples of the gain")
    p_sweep.set_defaults(func=cmd_sweep)

    p_verify = sub.add_parser("verify", help="randomized assertion battery over full runs")
    p_verify.add_argument("--runs", type=int, default=100)
    p_verify.add_argument("--n-min", type=int, default=3)
    p_verify.add_argument("--n-max", type=int, default=8)
    p_verify.add_argument("--seed", type=int, default=None)
    p_verify.add_argument("--inject-fault", action="store_true",
                          help="draw noise beyond the assumed bound (negative control)")
    p_verify.add_argument("--server", default=None)
    p_verify.set_defaults(func=cmd_verify)

    p_serve = sub.add_parser("serve", help="start the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
