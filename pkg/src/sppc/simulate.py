"""Config-driven experiments: single runs, privacy audit suites and parameter sweeps."""

from __future__ import annotations

import concurrent.futures
import itertools
import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

from . import audit as audits
from .adversary import make_adversary
from .errors import ConfigurationError, ProtocolFailure
from .field import FieldContext
from .metrics import (
    Metrics,
    expected_rate_ppc,
    expected_rate_secrecy,
    expected_upload,
    fmt_rational,
    measure,
)
from .mvpoly import MultiPoly, from_text, span_basis
from .params import SystemParams, derive_params
from .protocol import Transcript, plaintext_evaluations, prepare, run_protocol
from .seeding import derive_rng
from .storage import FileSet, random_fileset

CONFIG_DIR = Path(__file__).parent / "configs"

_PARAM_KEYS = ("N", "K", "X", "T", "B", "U", "G", "M")
_KNOWN_KEYS = set(_PARAM_KEYS) | {"q", "seed", "theta", "candidates", "adversary", "files", "audit"}


def bundled_config(name: str) -> Path:
    return CONFIG_DIR / f"{name.removesuffix('.json')}.json"


@dataclass
class SimConfig:
    params: SystemParams
    candidates: list[MultiPoly]
    theta: int = 1
    seed: int = 0
    adversary: dict = field(default_factory=lambda: {"kind": "none"})
    files: FileSet | None = None
    audit: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> "SimConfig":
        if not isinstance(raw, dict):
            raise ConfigurationError("config must be a JSON object")
        unknown = set(raw) - _KNOWN_KEYS
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        missing = [k for k in _PARAM_KEYS + ("candidates",) if k not in raw]
        if missing:
            raise ConfigurationError(f"config is missing keys: {missing}")
        cand_text = raw["candidates"]
        if not isinstance(cand_text, list) or not cand_text:
            raise ConfigurationError("candidates must be a non-empty list of polynomial strings")
        try:
            ints = {k: int(raw[k]) for k in _PARAM_KEYS}
            params = derive_params(ints["N"], ints["K"], ints["X"], ints["T"], ints["B"], ints["U"], ints["G"],
                                   P=len(cand_text), q=raw.get("q"), M=ints["M"])
            candidates = [from_text(str(c), params.M, params.q) for c in cand_text]
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigurationError):
                raise
            raise ConfigurationError(f"malformed config: {exc}") from exc
        ctx = FieldContext(params.q)
        try:
            params = params.with_span(span_basis(ctx, candidates).F)
        except ValueError as exc:
            raise ConfigurationError(str(exc)) from exc
        files = None
        if raw.get("files") is not None:
            files = FileSet.from_lists(raw["files"])
            try:
                files.check_shape(params)
            except ValueError as exc:
                raise ConfigurationError(str(exc)) from exc
        adversary = dict(raw.get("adversary") or {"kind": "none"})
        cfg = cls(params, candidates, int(raw.get("theta", 1)), int(raw.get("seed", 0)), adversary, files,
                  dict(raw.get("audit") or {}))
        if not 1 <= cfg.theta <= params.P:
            raise ConfigurationError(f"theta={cfg.theta} outside [1, {params.P}]")
        return cfg

    @classmethod
    def load(cls, path) -> "SimConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(raw)

    def with_seed(self, seed: int | None) -> "SimConfig":
        return self if seed is None else replace(self, seed=seed)


@dataclass
class Verdict:
    correct: bool
    checks: dict[str, bool]

    @property
    def ok(self) -> bool:
        return self.correct and all(self.checks.values())


def make_plan(cfg: SimConfig):
    a = cfg.adversary
    try:
        return make_adversary(a.get("kind", "none"), cfg.params, seed=cfg.seed, byzantine=a.get("byzantine"),
                              unresponsive=a.get("unresponsive"), strategy=a.get("strategy", "exclude_true"))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigurationError):
            raise
        raise ConfigurationError(f"malformed adversary section: {exc}") from exc


def simulate(cfg: SimConfig) -> tuple[Metrics, Transcript, Verdict]:
    """Run the protocol once and check it against the plaintext oracle and the closed forms."""
    p = cfg.params
    ctx = FieldContext(p.q)
    files = cfg.files or random_fileset(ctx, p, derive_rng(cfg.seed, "files"))
    plan = make_plan(cfg)
    V, transcript = run_protocol(cfg.theta, files, cfg.candidates, p, plan, cfg.seed)
    metrics = measure(transcript)
    expected = plaintext_evaluations(ctx, cfg.candidates[cfg.theta - 1], files, p)
    checks = {
        "rate_secrecy": metrics.rate_secrecy == expected_rate_secrecy(p),
        "upload": metrics.upload_symbols == expected_upload(p),
        "download": metrics.download_symbols == sum(
            p.N - len(plan.faults(s).unresponsive) for s in range(1, p.S + 1)),
    }
    if all(len(plan.faults(s).unresponsive) == p.U for s in range(1, p.S + 1)):
        checks["rate_ppc"] = metrics.rate_ppc == expected_rate_ppc(p)
    return metrics, transcript, Verdict(V == expected, checks)


def format_report(params: SystemParams, metrics: Metrics, verdict: Verdict) -> str:
    p = params
    ops = " ".join(
        f"{role}={c['mul'] + c['add'] + c['inv']}" for role, c in sorted(metrics.field_ops.items()))
    lines = [
        f"params: N={p.N} K={p.K} X={p.X} T={p.T} B={p.B} U={p.U} G={p.G} M={p.M} P={p.P} q={p.q}",
        f"E: {p.E}",
        f"Delta: {p.delta}",
        f"L: {p.L}",
        f"S: {p.S}",
        f"F: {p.F}",
        f"rate_ppc: {fmt_rational(metrics.rate_ppc)}",
        f"rate_secrecy: {fmt_rational(metrics.rate_secrecy)}",
        f"upload_symbols: {metrics.upload_symbols}",
        f"download_symbols: {metrics.download_symbols}",
        f"rounds: {metrics.rounds}",
        "checks: " + " ".join(f"{k}={'ok' if v else 'MISMATCH'}" for k, v in sorted(verdict.checks.items())),
        f"verdict: {'correct' if verdict.ok else 'INCORRECT'}",
        f"field_op_counters: {ops}",
    ]
    return "\n".join(lines) + "\n"


# -- audit suite -------------------------------------------------------------

@dataclass
class AuditLine:
    name: str
    enumeration: int
    cases: int
    passed: bool

    def line(self) -> str:
        return (f"{'PASS' if self.passed else 'FAIL'} {self.name}: "
                f"{self.cases} cases, {self.enumeration} enumerated per table")


def audit_suite(cfg: SimConfig) -> list[AuditLine]:
    """X-security, user privacy and server privacy audits over every subset, row and round."""
    ctx, p, basis, pts = prepare(cfg.candidates, cfg.params)
    opts = cfg.audit
    cap = int(opts.get("cap", audits.DEFAULT_CAP))
    pairs = int(opts.get("file_pairs", 10))
    rng = derive_rng(cfg.seed, "audit")
    out = []

    ok, cases = True, 0
    for _ in range(pairs):
        a, b = random_fileset(ctx, p, rng), random_fileset(ctx, p, rng)
        for xs in itertools.combinations(range(1, p.N + 1), p.X):
            ok &= audits.audit_x_security(ctx, p, pts, a, b, xs, cap)
            cases += 1
    out.append(AuditLine("x_security", ctx.q ** p.X, cases, ok))

    ok, cases = True, 0
    for s in range(1, p.S + 1):
        for ts in itertools.combinations(range(1, p.N + 1), p.T):
            for i in range(1, p.L + 1):
                ok &= audits.audit_user_privacy(ctx, p, pts, basis, ts, i, s, cap)
                cases += 1
    out.append(AuditLine("user_privacy", ctx.q ** (basis.F * p.T), cases, ok))

    ok, cases = True, 0
    phi = cfg.candidates[cfg.theta - 1]
    for _ in range(max(1, pairs // 5)):
        a = random_fileset(ctx, p, rng)
        b = audits.matching_fileset(ctx, phi, a, p, rng)
        for s in range(1, p.S + 1):
            ok &= audits.audit_server_privacy(ctx, p, pts, basis, cfg.theta, a, b, s, seed=cfg.seed, cap=cap)
            cases += 1
    out.append(AuditLine("server_privacy", ctx.q ** p.mask_size, cases, ok))
    return out


def format_audit_report(cfg: SimConfig, lines: list[AuditLine]) -> str:
    p = cfg.params
    head = (f"config: N={p.N} K={p.K} X={p.X} T={p.T} B={p.B} U={p.U} G={p.G} M={p.M} P={p.P} "
            f"F={p.F} q={p.q} theta={cfg.theta} seed={cfg.seed}")
    return "\n".join([head] + [ln.line() for ln in lines]) + "\n"


# -- parameter sweeps --------------------------------------------------------

def expand_grid(raw: dict) -> list[dict]:
    """Grid file: {"base": {...}, "sweep": {"N": [...], ...}} and/or {"points": [{...}, ...]}.

    Sweep entries form a cartesian product over the base config; infeasible
    combinations are skipped.
    """
    base = raw.get("base", {})
    out = [dict(base, **pt) for pt in raw.get("points", [])]
    sweep = raw.get("sweep", {})
    if sweep:
        keys = sorted(sweep)
        for combo in itertools.product(*(sweep[k] for k in keys)):
            out.append(dict(base, **dict(zip(keys, combo))))
    return out


@dataclass
class BenchRow:
    params: SystemParams
    metrics: Metrics
    verdict: Verdict

    def cells(self) -> list[str]:
        p, m = self.params, self.metrics
        return [str(v) for v in (p.N, p.K, p.X, p.T, p.B, p.U, p.G, p.E, p.L, p.S, p.F)] + [
            str(m.rate_ppc), str(expected_rate_ppc(p)), str(m.rate_secrecy), str(m.upload_symbols),
            str(m.download_symbols), "ok" if self.verdict.ok else "FAIL",
        ]


BENCH_HEADER = ["N", "K", "X", "T", "B", "U", "G", "E", "L", "S", "F",
                "rate_ppc", "E/(N-U)", "rate_secrecy", "upload", "download", "verdict"]


def bench(raw_grid: dict, seed: int | None = None, workers: int = 4) -> tuple[list[BenchRow], int]:
    """Simulate every feasible grid point; returns (rows, number of skipped infeasible points)."""
    cfgs, skipped = [], 0
    for i, raw in enumerate(expand_grid(raw_grid)):
        raw = dict(raw)
        if seed is not None:
            raw["seed"] = seed + i
        raw.setdefault("seed", i)
        try:
            cfgs.append(SimConfig.from_dict(raw))
        except ConfigurationError:
            skipped += 1

    def one(cfg):
        m, _, v = simulate(cfg)
        return BenchRow(cfg.params, m, v)

    with concurrent.futures.ThreadPoolExecutor(max(1, workers)) as pool:
        rows = list(pool.map(one, cfgs))
    return rows, skipped


def format_bench(rows: list[BenchRow]) -> str:
    table = [BENCH_HEADER] + [r.cells() for r in rows]
    widths = [max(len(r[i]) for r in table) for i in range(len(BENCH_HEADER))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in table) + "\n"


__all__ = [
    "SimConfig", "Verdict", "simulate", "format_report", "audit_suite", "format_audit_report",
    "bench", "format_bench", "expand_grid", "bundled_config", "ProtocolFailure",
]
