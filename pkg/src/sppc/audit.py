"""Exact privacy audits by exhaustive enumeration on tiny instances.

Each audit enumerates every value of the relevant randomness, tabulates the
exact distribution of what an adversary observes with rational
probabilities, and compares tables for two secrets that must be
indistinguishable.  Equality is exact.

The audits factor the joint claims into independent pieces: one (file, row)
cell at a time for storage, one row of one round for queries, one round for
answers.  The factoring is sound because the implementation draws the
randomness of each piece from separate, independent RNG calls.

Deliberately broken variants (``broken_*``, ``zero_mask``) are exported so
tests can confirm that each audit detects a real leak.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .errors import EnumerationTooLarge
from .field import FieldContext
from .mvpoly import MultiPoly, SpanBasis, linear_combine, mv_eval
from .params import SystemParams
from .points import PublicPoints
from .protocol import (
    CommonRandomness,
    build_round_queries,
    decode_answer_polynomial,
    gen_mask,
    plaintext_evaluations,
    row_query_polys,
    RoundAnswer,
    server_answer,
)
from .seeding import derive_rng
from .storage import FileSet, encode_row, encode_storage, random_noise

DEFAULT_CAP = 10**6


@dataclass(frozen=True)
class DistributionTable:
    pmf: dict[str, Fraction]

    @classmethod
    def from_counts(cls, counts: Counter) -> "DistributionTable":
        total = sum(counts.values())
        pmf = {k: Fraction(v, total) for k, v in sorted(counts.items())}
        assert sum(pmf.values()) == 1
        return cls(pmf)

    @property
    def support(self) -> int:
        return len(self.pmf)


def _key(obs) -> str:
    return repr(obs)


def _check_cap(size: int, cap: int) -> None:
    if size > cap:
        raise EnumerationTooLarge(size, cap)


def _tabulate(observations: Iterable) -> DistributionTable:
    return DistributionTable.from_counts(Counter(_key(o) for o in observations))


# -- X-security --------------------------------------------------------------

def broken_encode_row(ctx, pts, params, l, data, noise):
    """Encoder that forgets the noise: leaks the files to any X servers."""
    return encode_row(ctx, pts, params, l, data, [0] * len(noise))


def x_security_tables(ctx: FieldContext, params: SystemParams, pts: PublicPoints, files: FileSet,
                      x_set: Sequence[int], cap: int = DEFAULT_CAP,
                      encoder: Callable = encode_row) -> dict[tuple[int, int], DistributionTable]:
    """Distribution of the x_set servers' shares of every (file, row) cell over all storage noise."""
    size = ctx.q ** params.X
    _check_cap(size, cap)
    tables = {}
    for m in range(1, params.M + 1):
        for l in range(1, params.L + 1):
            data = files.files[m - 1][l - 1]

            def views():
                for z in itertools.product(range(ctx.q), repeat=params.X):
                    poly = encoder(ctx, pts, params, l, data, z)
                    yield tuple(ctx.poly_eval(poly, pts.a(n)) for n in x_set)

            tables[(m, l)] = _tabulate(views())
    return tables


def audit_x_security(ctx: FieldContext, params: SystemParams, pts: PublicPoints, fileA: FileSet,
                     fileB: FileSet, x_set: Sequence[int], cap: int = DEFAULT_CAP,
                     encoder: Callable = encode_row) -> bool:
    if len(x_set) != params.X:
        raise ValueError(f"x_set must name exactly X={params.X} servers")
    fileA.check_shape(params)
    fileB.check_shape(params)
    return (x_security_tables(ctx, params, pts, fileA, x_set, cap, encoder)
            == x_security_tables(ctx, params, pts, fileB, x_set, cap, encoder))


# -- user privacy ------------------------------------------------------------

def broken_row_query_polys(ctx, params, pts, basis, theta, s, i, noise_row):
    """Query builder whose noise at alpha_1 is zeroed.

    With T=1 that removes all query noise, so every server other than the
    first sees a deterministic function of theta.
    """
    noise_row = [tuple(0 for _ in noise_row[0])] + list(noise_row[1:])
    return row_query_polys(ctx, params, pts, basis, theta, s, i, noise_row)


def user_privacy_tables(ctx: FieldContext, params: SystemParams, pts: PublicPoints, basis: SpanBasis,
                        t_set: Sequence[int], row_i: int, s: int, cap: int = DEFAULT_CAP,
                        builder: Callable = row_query_polys) -> list[DistributionTable]:
    """Per theta, the distribution of the t_set servers' row-i coordinate vectors over all query noise."""
    F, T = basis.F, params.T
    size = ctx.q ** (F * T)
    _check_cap(size, cap)
    tables = []
    for theta in range(1, basis.P + 1):

        def views():
            for flat in itertools.product(range(ctx.q), repeat=F * T):
                noise_row = [tuple(flat[t * F:(t + 1) * F]) for t in range(T)]
                polys = builder(ctx, params, pts, basis, theta, s, row_i, noise_row)
                yield tuple(tuple(ctx.poly_eval(p, pts.a(n)) for p in polys) for n in t_set)

        tables.append(_tabulate(views()))
    return tables


def audit_user_privacy(ctx: FieldContext, params: SystemParams, pts: PublicPoints, basis: SpanBasis,
                       t_set: Sequence[int], row_i: int, s: int, cap: int = DEFAULT_CAP,
                       builder: Callable = row_query_polys) -> bool:
    if len(t_set) != params.T:
        raise ValueError(f"t_set must name exactly T={params.T} servers")
    if not 1 <= row_i <= params.L:
        raise ValueError(f"row {row_i} outside [1, {params.L}]")
    tables = user_privacy_tables(ctx, params, pts, basis, t_set, row_i, s, cap, builder)
    return all(t == tables[0] for t in tables[1:])


# -- server privacy ----------------------------------------------------------

def zero_mask(ctx, params, s, z, pts):
    """Mask that is identically zero: answers reveal the files beyond V."""
    return []


def decodable_view(ctx: FieldContext, answers: Sequence[RoundAnswer], s: int, pts: PublicPoints,
                   params: SystemParams) -> tuple[int, ...]:
    """Answer polynomial at alpha_1..alpha_{G(K+X-1)+T} followed by the round-s window points.

    These values determine the answer polynomial, hence everything the user
    can compute from the round's answers.
    """
    zeta = decode_answer_polynomial(ctx, answers, pts, params)
    at_alpha = [ctx.poly_eval(zeta, pts.a(j)) for j in range(1, params.mask_size + 1)]
    at_window = [ctx.poly_eval(zeta, b) for _, _, b in pts.window(params, s)]
    return tuple(at_alpha + at_window)


def server_privacy_tables(ctx: FieldContext, params: SystemParams, pts: PublicPoints, basis: SpanBasis,
                          theta: int, files: FileSet, s: int, seed: int = 0, cap: int = DEFAULT_CAP,
                          mask_fn: Callable = gen_mask) -> DistributionTable:
    """Distribution of the decodable view of round ``s`` over all common randomness.

    Queries and storage noise are drawn once from ``seed`` and held fixed, so
    two calls with the same seed differ only in the files.
    """
    size = ctx.q ** params.mask_size
    _check_cap(size, cap)
    noise = random_noise(ctx, params, derive_rng(seed, "storage"))
    servers, _ = encode_storage(ctx, files, pts, params, noise=noise)
    queries, _ = build_round_queries(ctx, params, theta, s, basis, pts, derive_rng(seed, "query", s))
    zeros = tuple((0,) * params.mask_size for _ in range(params.S))

    def views():
        for z in itertools.product(range(ctx.q), repeat=params.mask_size):
            cr = CommonRandomness(zeros[: s - 1] + (tuple(z),) + zeros[s:])
            answers = [
                RoundAnswer(q.server_id, s, server_answer(ctx, servers[q.server_id - 1], q, cr, basis, pts,
                                                          params, mask_fn=mask_fn))
                for q in queries
            ]
            yield decodable_view(ctx, answers, s, pts, params)

    return _tabulate(views())


def audit_server_privacy(ctx: FieldContext, params: SystemParams, pts: PublicPoints, basis: SpanBasis,
                         theta: int, fileA: FileSet, fileB: FileSet, s: int, seed: int = 0,
                         cap: int = DEFAULT_CAP, mask_fn: Callable = gen_mask) -> bool:
    phi = _candidate(ctx, basis, theta)
    if plaintext_evaluations(ctx, phi, fileA, params) != plaintext_evaluations(ctx, phi, fileB, params):
        raise ValueError("file sets must share the desired evaluations")
    return (server_privacy_tables(ctx, params, pts, basis, theta, fileA, s, seed, cap, mask_fn)
            == server_privacy_tables(ctx, params, pts, basis, theta, fileB, s, seed, cap, mask_fn))


def _candidate(ctx: FieldContext, basis: SpanBasis, theta: int) -> MultiPoly:
    return linear_combine(ctx, basis, basis.candidate_coords[theta - 1])


def matching_fileset(ctx: FieldContext, phi: MultiPoly, files: FileSet, params: SystemParams, rng,
                     cap: int = DEFAULT_CAP) -> FileSet:
    """A random file set with the same evaluations of ``phi`` cell by cell, different where possible."""
    _check_cap(ctx.q ** params.M, cap)
    preimages: dict[int, list[tuple[int, ...]]] = {}
    for w in itertools.product(range(ctx.q), repeat=params.M):
        preimages.setdefault(mv_eval(ctx, phi, w), []).append(w)
    cells = {}
    for l in range(1, params.L + 1):
        for k in range(1, params.K + 1):
            w = files.cell(l, k)
            others = [v for v in preimages[mv_eval(ctx, phi, w)] if v != w]
            cells[(l, k)] = rng.choice(others) if others else w
    return FileSet(tuple(
        tuple(tuple(cells[(l, k)][m] for k in range(1, params.K + 1)) for l in range(1, params.L + 1))
        for m in range(params.M)
    ))
