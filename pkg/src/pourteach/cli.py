"""Command-line interface.

Subcommands:
  run          one episode -> trace CSV + metrics JSON
  batch        n seeded episodes -> per-episode traces + summary JSON,
               optionally paired against the fixed-rate baseline
  oracle-check recompute a recorded trace's posterior both ways and compare
  serve        start the live teaching service

Exit codes: 0 success, 1 check failure, 2 config error, 3 degenerate
posterior.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .belief import DegeneratePosteriorError
from .config import ConfigError, load_config
from .episode import (
    read_trace_csv,
    replay_incremental,
    replay_oracle,
    run_episode,
    run_fixed_rate_episode,
    summarize_metrics,
    write_metrics_json,
    write_trace_csv,
)

ORACLE_TOL = 1e-9

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_DEGENERATE = 3


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    trace, metrics = run_episode(cfg)
    write_trace_csv(trace, out / f"trace_{cfg.seed}.csv")
    write_metrics_json(metrics, out / f"metrics_{cfg.seed}.json")
    print(f"episode seed={cfg.seed}: {metrics.terminated} after {len(trace)} ticks, "
          f"final_error={metrics.final_error_g:.3f} g, effort={metrics.human_effort:.4f}")
    return EXIT_OK


def _cmd_batch(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    all_metrics = []
    for i in range(args.episodes):
        c = replace(cfg, seed=args.seed_base + i)
        trace, metrics = run_episode(c)
        write_trace_csv(trace, out / f"trace_{c.seed}.csv")
        all_metrics.append(metrics)
    summary = {"policy": summarize_metrics(all_metrics)}

    if args.baseline == "fixed-rate":
        base_metrics = []
        for i in range(args.episodes):
            c = replace(cfg, seed=args.seed_base + i)
            _, metrics = run_fixed_rate_episode(c)
            base_metrics.append(metrics)
        summary["baseline"] = summarize_metrics(base_metrics)
        med = summary["policy"]["human_effort"]["median"]
        base_med = summary["baseline"]["human_effort"]["median"]
        summary["effort_median_ratio"] = med / base_med if base_med > 0 else None

    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    print(json.dumps(summary, indent=2))
    return EXIT_OK


def _cmd_oracle_check(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    trace = read_trace_csv(args.trace)
    incremental = replay_incremental(trace, cfg)
    oracle = replay_oracle(trace, cfg)
    delta = float(np.max(np.abs(incremental.weights - oracle.weights)))
    print(f"max weight delta: {delta:.3e} (tolerance {ORACLE_TOL:.0e})")
    return EXIT_OK if delta <= ORACLE_TOL else EXIT_FAIL


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(tick_hz=args.tick_hz)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pourteach")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one episode")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--out", required=True)
    p_run.set_defaults(func=_cmd_run)

    p_batch = sub.add_parser("batch", help="run a seeded batch")
    p_batch.add_argument("--config", required=True)
    p_batch.add_argument("--episodes", type=int, required=True)
    p_batch.add_argument("--seed-base", type=int, default=0)
    p_batch.add_argument("--out", required=True)
    p_batch.add_argument("--baseline", choices=["fixed-rate"], default=None)
    p_batch.set_defaults(func=_cmd_batch)

    p_oracle = sub.add_parser("oracle-check", help="verify a recorded trace")
    p_oracle.add_argument("--trace", required=True)
    p_oracle.add_argument("--config", required=True)
    p_oracle.set_defaults(func=_cmd_oracle_check)

    p_serve = sub.add_parser("serve", help="start the live teaching service")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--tick-hz", type=float, default=50.0)
    p_serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DegeneratePosteriorError as exc:
        print(f"degenerate posterior: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
