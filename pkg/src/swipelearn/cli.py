"""Command-line front door: simulate, analyze, report, serve."""

from __future__ import annotations

import argparse
import json
import sys

from .config import DEFAULT_CONFIG, load_config
from .items import load_item_pool
from .service import serve
from .simulator import (
    SimConfig,
    build_report,
    infer_preference,
    load_sidecars,
    render_report,
    simulate,
)


def _parse_policy_mix(spec: str) -> dict[str, float]:
    mix: dict[str, float] = {}
    for part in spec.split(","):
        name, _, weight = part.partition("=")
        if not weight:
            raise argparse.ArgumentTypeError(
                f"policy-mix entries look like kind=weight, got {part!r}"
            )
        mix[name.strip()] = float(weight)
    return mix


def _add_log_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--log", required=True, help="choice-event JSONL file")
    sub.add_argument("--pool", help="item pool JSON (default: <log>.pool.json)")
    sub.add_argument("--config", help="JSON engine config (defaults apply when omitted)")


def _load_inputs(args):
    cfg = load_config(args.config) if args.config else DEFAULT_CONFIG
    if args.pool:
        from .events import read_events

        events = read_events(args.log)
        pool = load_item_pool(args.pool)
        meta = None
    else:
        events, pool, meta = load_sidecars(args.log)
    return cfg, events, pool, meta


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="swipelearn", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a simulated student population")
    sim.add_argument("--students", type=int, default=20)
    sim.add_argument("--items", type=int, default=80)
    sim.add_argument("--steps", type=int, default=60)
    sim.add_argument("--seed", type=int, default=7)
    sim.add_argument(
        "--policy-mix",
        type=_parse_policy_mix,
        default={"challenge_seeking": 0.5, "challenge_averse": 0.5},
        help="comma-separated kind=weight pairs summing to 1",
    )
    sim.add_argument("--out", required=True, help="output JSONL path")
    sim.add_argument("--config", help="JSON engine config")

    ana = sub.add_parser("analyze", help="infer preference labels from a log")
    _add_log_args(ana)
    ana.add_argument("--session", help="restrict to one session id")

    rep = sub.add_parser("report", help="per-policy summary of a log")
    _add_log_args(rep)
    rep.add_argument("--format", choices=("text", "json"), default="text")

    srv = sub.add_parser("serve", help="run the HTTP service")
    srv.add_argument("--config", help="JSON config file")
    srv.add_argument("--addr", help="listen address host:port")

    args = parser.parse_args(argv)
    try:
        if args.command == "simulate":
            cfg = load_config(args.config) if args.config else DEFAULT_CONFIG
            sim_cfg = SimConfig(
                n_students=args.students,
                n_items=args.items,
                steps_per_student=args.steps,
                seed=args.seed,
                policy_mix=args.policy_mix,
                output_path=args.out,
            )
            result = simulate(sim_cfg, cfg)
            print(f"wrote {result.log_path}")
            print(f"wrote {result.pool_path}")
            print(f"wrote {result.meta_path}")
            for policy, row in sorted(result.summary().items()):
                total = row["engaged"] + row["skipped"]
                rate = row["engaged"] / total if total else 0.0
                print(
                    f"{policy}: {row['sessions']} sessions, "
                    f"{total} choices, engagement rate {rate:.3f}"
                )
            return 0
        if args.command == "analyze":
            cfg, events, pool, _ = _load_inputs(args)
            session_ids = (
                [args.session] if args.session else sorted({e.session_id for e in events})
            )
            for sid in session_ids:
                call = infer_preference(events, sid, pool, engine_cfg=cfg)
                print(
                    f"{sid}: {call.label.value} "
                    f"(engaged n={call.n_engaged}, skipped n={call.n_skipped}; {call.reason})"
                )
            return 0
        if args.command == "report":
            cfg, events, pool, meta = _load_inputs(args)
            rows = build_report(events, pool, meta, engine_cfg=cfg)
            if args.format == "json":
                print(json.dumps([row.to_dict() for row in rows], indent=2))
            else:
                print(render_report(rows))
            return 0
        if args.command == "serve":
            serve_args = []
            if args.config:
                serve_args += ["--config", args.config]
            if args.addr:
                serve_args += ["--addr", args.addr]
            return serve(serve_args)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
