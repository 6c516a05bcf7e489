"""Command-line front end: setup, run, audit, bench."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import ConfigurationError, ProtocolFailure
from .points import dumps_points, generate_points, verify_points
from .simulate import (
    SimConfig,
    audit_suite,
    bench,
    bundled_config,
    format_audit_report,
    format_bench,
    format_report,
    simulate,
)


def resolve_config(ref: str) -> Path:
    """A filesystem path, or the name of a bundled config such as ``example_3d``."""
    path = Path(ref)
    if path.exists():
        return path
    bundled = bundled_config(ref)
    if bundled.exists():
        return bundled
    raise ConfigurationError(f"config {ref!r} not found (neither a file nor a bundled config)")


def _load_raw(ref: str) -> dict:
    path = resolve_config(ref)
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config {path} is not valid JSON: {exc}") from exc


def _apply_overrides(raw: dict, pairs: list[str]) -> dict:
    raw = dict(raw)
    for pair in pairs or ():
        key, sep, value = pair.partition("=")
        if not sep:
            raise ConfigurationError(f"--set expects KEY=VALUE, got {pair!r}")
        try:
            raw[key] = json.loads(value)
        except json.JSONDecodeError:
            raw[key] = value
    return raw


def _load_config(args) -> SimConfig:
    raw = _apply_overrides(_load_raw(args.config), args.set)
    if args.seed is not None:
        raw["seed"] = args.seed
    return SimConfig.from_dict(raw)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_setup(args) -> int:
    cfg = _load_config(args)
    pts = generate_points(cfg.params)
    report = verify_points(pts, cfg.params)
    _emit(dumps_points(pts, cfg.params), args.out)
    p = cfg.params
    print(f"E={p.E} Delta={p.delta} L={p.L} S={p.S} F={p.F} q={p.q} "
          f"distinct={report.distinct_count}/{report.expected_count} P1-P4={'ok' if report.ok else 'VIOLATED'}",
          file=sys.stderr if not args.out else sys.stdout)
    return 0 if report.ok else 1


def cmd_run(args) -> int:
    cfg = _load_config(args)
    metrics, transcript, verdict = simulate(cfg)
    _emit(format_report(cfg.params, metrics, verdict), args.out)
    if args.transcript:
        Path(args.transcript).write_text(transcript.dumps())
    return 0 if verdict.ok else 1


def cmd_audit(args) -> int:
    cfg = _load_config(args)
    lines = audit_suite(cfg)
    _emit(format_audit_report(cfg, lines), args.out)
    return 0 if all(ln.passed for ln in lines) else 1


def cmd_bench(args) -> int:
    raw = _load_raw(args.grid)
    rows, skipped = bench(raw, seed=args.seed, workers=args.workers)
    text = format_bench(rows) + f"# {len(rows)} feasible points, {skipped} infeasible skipped\n"
    _emit(text, args.out)
    return 0 if all(r.verdict.ok for r in rows) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sppc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", required=True, help="config path or bundled config name")
            p.add_argument("--set", action="append", metavar="KEY=VALUE",
                           help="override a config key (value parsed as JSON when possible)")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--out", help="write the report here instead of stdout")

    p = sub.add_parser("setup", help="derive parameters and emit the public points fixture")
    common(p)
    p.set_defaults(func=cmd_setup)

    p = sub.add_parser("run", help="simulate one protocol execution and print its metrics")
    common(p)
    p.add_argument("--transcript", help="also write the round transcript to this path")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("audit", help="exact privacy audits on a tiny instance")
    common(p)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("bench", help="sweep a parameter grid and print a rate table")
    common(p, needs_config=False)
    p.add_argument("--grid", required=True, help="grid path or bundled grid name")
    p.add_argument("--workers", type=int, default=4)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"sppc: configuration error: {exc}", file=sys.stderr)
        return 2
    except ProtocolFailure as exc:
        print(f"sppc: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
