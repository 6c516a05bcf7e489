"""Measured performance of a run and the closed-form values it should match."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .params import SystemParams
from .protocol import Transcript


@dataclass(frozen=True)
class Metrics:
    rate_ppc: Fraction
    rate_secrecy: Fraction
    upload_symbols: int
    download_symbols: int
    rounds: int
    field_ops: dict[str, dict[str, int]]


def measure(transcript: Transcript) -> Metrics:
    """Metrics counted from the traffic actually exchanged in ``transcript``."""
    p = transcript.params
    evals = p.L * p.K
    return Metrics(
        rate_ppc=Fraction(evals, transcript.download_symbols),
        rate_secrecy=Fraction(transcript.shared_randomness, evals),
        upload_symbols=transcript.upload_symbols,
        download_symbols=transcript.download_symbols,
        rounds=len(transcript.rounds),
        field_ops={role: c.as_dict() for role, c in transcript.counters().items()},
    )


def expected_rate_ppc(p: SystemParams) -> Fraction:
    """E / (N - U), attained when exactly U servers stay silent every round."""
    return Fraction(p.E, p.N - p.U)


def expected_rate_secrecy(p: SystemParams) -> Fraction:
    return Fraction(p.mask_size, p.E)


def expected_upload(p: SystemParams) -> int:
    if p.F is None:
        raise ValueError("upload cost needs the span dimension F")
    g = math.gcd(p.K, p.E)
    return p.K * p.N * p.E * p.F // (g * g)


def fmt_rational(x: Fraction) -> str:
    return f"{x} ({float(x):.6f})"
