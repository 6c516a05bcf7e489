"""Byzantine and unresponsive server behaviour, planned per round."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import ConfigurationError
from .field import FieldContext
from .params import SystemParams
from .seeding import derive_rng

KINDS = ("none", "random", "fixed", "worst_slot")
STRATEGIES = ("exclude_true", "possibly_honest")


@dataclass(frozen=True)
class RoundFaults:
    byzantine: frozenset[int] = frozenset()
    unresponsive: frozenset[int] = frozenset()


@dataclass(frozen=True)
class AdversaryPlan:
    """Which servers misbehave in each round, and how Byzantine answers are forged.

    ``exclude_true`` forges a uniform value different from the authentic
    answer, so every Byzantine slot is a real error.  ``possibly_honest``
    forges a uniform value that may coincide with it.
    """

    rounds: tuple[RoundFaults, ...]
    strategy: str = "exclude_true"

    def faults(self, s: int) -> RoundFaults:
        return self.rounds[s - 1]

    def validate(self, params: SystemParams) -> None:
        if self.strategy not in STRATEGIES:
            raise ConfigurationError(f"unknown Byzantine strategy {self.strategy!r}")
        if len(self.rounds) != params.S:
            raise ConfigurationError(f"adversary plan covers {len(self.rounds)} rounds, protocol has {params.S}")
        for s, rf in enumerate(self.rounds, 1):
            ids = rf.byzantine | rf.unresponsive
            if any(not 1 <= n <= params.N for n in ids):
                raise ConfigurationError(f"round {s}: server ids must lie in [1, {params.N}]")
            if len(rf.byzantine) > params.B:
                raise ConfigurationError(f"round {s}: {len(rf.byzantine)} Byzantine servers exceed B={params.B}")
            if len(rf.unresponsive) > params.U:
                raise ConfigurationError(f"round {s}: {len(rf.unresponsive)} unresponsive servers exceed U={params.U}")
            if rf.byzantine & rf.unresponsive:
                raise ConfigurationError(f"round {s}: Byzantine and unresponsive sets overlap")

    def tamper(self, ctx: FieldContext, s: int, server_id: int, authentic: int, rng) -> Optional[int]:
        """What server ``server_id`` actually sends in round ``s``; None means silence."""
        rf = self.faults(s)
        if server_id in rf.unresponsive:
            return None
        if server_id in rf.byzantine:
            if self.strategy == "exclude_true":
                return (authentic + 1 + rng.randrange(ctx.q - 1)) % ctx.q
            return rng.randrange(ctx.q)
        return authentic


def _per_round(sets, S: int) -> list[frozenset[int]]:
    if sets is None:
        return [frozenset()] * S
    sets = list(sets)
    if sets and all(isinstance(x, int) for x in sets):
        return [frozenset(sets)] * S
    if len(sets) != S:
        raise ConfigurationError(f"per-round server sets must list {S} rounds")
    return [frozenset(x) for x in sets]


def make_adversary(kind: str, params: SystemParams, seed: int = 0,
                   byzantine: Sequence | None = None, unresponsive: Sequence | None = None,
                   strategy: str = "exclude_true") -> AdversaryPlan:
    """Build a plan.

    ``random`` draws fresh disjoint sets of exactly B and U servers every
    round; ``worst_slot`` pins servers 1..B as Byzantine and B+1..B+U as
    silent in every round; ``fixed`` takes the caller's sets, either one set
    for all rounds or one set per round.
    """
    S, N, B, U = params.S, params.N, params.B, params.U
    if kind == "none":
        rounds = [RoundFaults() for _ in range(S)]
    elif kind == "random":
        rounds = []
        for s in range(1, S + 1):
            chosen = derive_rng(seed, "adversary-sets", s).sample(range(1, N + 1), B + U)
            rounds.append(RoundFaults(frozenset(chosen[:B]), frozenset(chosen[B:])))
    elif kind == "worst_slot":
        rf = RoundFaults(frozenset(range(1, B + 1)), frozenset(range(B + 1, B + U + 1)))
        rounds = [rf] * S
    elif kind == "fixed":
        rounds = [RoundFaults(b, u) for b, u in zip(_per_round(byzantine, S), _per_round(unresponsive, S))]
    else:
        raise ConfigurationError(f"unknown adversary kind {kind!r}; expected one of {KINDS}")
    plan = AdversaryPlan(tuple(rounds), strategy)
    plan.validate(params)
    return plan
