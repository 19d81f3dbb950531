"""Command line entry points.

  gamesight simulate --profile P.json --trials N --seed K --out log.jsonl
  gamesight fit --in log.jsonl --out report.json [--child ID]
  gamesight report --child ID --config cfg.json [--format json]
  gamesight serve --config cfg.json
  gamesight replay --in log.jsonl [--check]
"""

import argparse
import json
import sys

from .config import AppConfig, load_config
from .errors import GamesightError, ReplayError
from .jsonutil import canonical_dumps
from .observer import ImpairmentProfile, run_session, write_log
from .store import EventStore, replay_log


def _cmd_simulate(args) -> int:
    profile = ImpairmentProfile.load(args.profile) if args.profile else ImpairmentProfile()
    cfg = load_config(args.config) if args.config else AppConfig()
    records = run_session(
        profile,
        cfg.screen,
        n_trials=args.trials,
        seed=args.seed,
        child_id=args.child,
        session_id=args.session,
        session_config=cfg.session,
    )
    write_log(records, args.out)
    print(f"wrote {len(records)} trials to {args.out}")
    return 0


def _cmd_fit(args) -> int:
    cfg = load_config(args.config) if args.config else AppConfig()
    report = replay_log(getattr(args, "in"), child_id=args.child, cfg=cfg)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(canonical_dumps(report) + "\n")
    flagged = [s["kind"] for s in report["screens"].values() if s["kind"] != "no_flag"]
    print(f"report written to {args.out}; active flags: {flagged or 'none'}")
    return 0


def _cmd_report(args) -> int:
    cfg = load_config(args.config) if args.config else AppConfig()
    store = EventStore(cfg)
    report = store.report(args.child)
    print(canonical_dumps(report))
    return 0


def _cmd_serve(args) -> int:
    from .service import serve

    cfg = load_config(args.config) if args.config else AppConfig()
    serve(cfg, host=args.host)
    return 0


def _cmd_replay(args) -> int:
    path = getattr(args, "in")
    cfg = load_config(args.config) if args.config else AppConfig()
    try:
        report = replay_log(path, cfg=cfg)
    except ReplayError as exc:
        print(f"replay failed: {exc}", file=sys.stderr)
        return 1
    if args.check:
        again = replay_log(path, cfg=cfg)
        if canonical_dumps(report) != canonical_dumps(again):
            print("replay is not deterministic", file=sys.stderr)
            return 1
        print("replay check ok: deterministic report,", len(report["alerts"]), "alerts")
    else:
        print(canonical_dumps(report))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gamesight")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a simulated screening session")
    p.add_argument("--profile", help="impairment profile JSON (default: unimpaired)")
    p.add_argument("--trials", type=int, default=600)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--child", default="sim")
    p.add_argument("--session", default="s1")
    p.add_argument("--config")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("fit", help="derive a report from an event log")
    p.add_argument("--in", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--child", default="sim")
    p.add_argument("--config")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("report", help="print a child's report from the data dir")
    p.add_argument("--child", required=True)
    p.add_argument("--config")
    p.add_argument("--format", choices=["json"], default="json")
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--config")
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("replay", help="replay an event log")
    p.add_argument("--in", required=True)
    p.add_argument("--check", action="store_true")
    p.add_argument("--config")
    p.set_defaults(func=_cmd_replay)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GamesightError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
