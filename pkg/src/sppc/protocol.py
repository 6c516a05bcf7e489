"""Query construction, server answers and per-round decoding.

Each round ``s`` decodes columns ``(s-1)*Delta+1 .. s*Delta`` of the desired
evaluation matrix.  Per row ``i`` the user interpolates a query polynomial in
alpha whose coefficients live in the candidate span: it equals the desired
function at row ``i``'s window points, zero at the other rows' window
points, and a fresh uniform span member at alpha_1..alpha_T.  Server ``n``
receives the evaluations at alpha_n as span coordinates, applies them to its
stored row values, and adds a mask that vanishes on the window.  The answers
of all servers form one Reed-Solomon codeword of the answer polynomial,
which the user decodes and evaluates at the window points.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .adversary import AdversaryPlan, make_adversary
from .errors import ConfigurationError, DecodeFailure, ProtocolFailure
from .field import FieldContext, OpCounter, counting
from .mvpoly import MultiPoly, SpanBasis, linear_combine, mv_eval, sample_coords, span_basis
from .params import SystemParams
from .points import PublicPoints, generate_points, verify_points
from .rscode import ERASED, ReceivedWord, decode_rs
from .seeding import derive_rng
from .storage import FileSet, ServerState, encode_storage

Vector = tuple[int, ...]


@dataclass(frozen=True)
class RoundQuery:
    server_id: int
    round: int
    coords: tuple[Vector, ...]  # one span-coordinate vector per row


@dataclass(frozen=True)
class QueryNoise:
    """Span coordinates of the noise polynomials of one round, indexed [row][t]."""

    round: int
    coords: tuple[tuple[Vector, ...], ...]


@dataclass(frozen=True)
class CommonRandomness:
    """Symbols shared by the servers and hidden from the user, one vector per round."""

    z: tuple[Vector, ...]

    @classmethod
    def draw(cls, ctx: FieldContext, params: SystemParams, seed: int) -> "CommonRandomness":
        return cls(tuple(
            tuple(ctx.random_vector(derive_rng(seed, "common", s), params.mask_size))
            for s in range(1, params.S + 1)
        ))

    def round(self, s: int) -> Vector:
        return self.z[s - 1]

    @property
    def size(self) -> int:
        return sum(len(v) for v in self.z)


@dataclass(frozen=True)
class RoundAnswer:
    server_id: int
    round: int
    payload: Optional[int]  # None when the server stayed silent


def query_nodes(params: SystemParams, pts: PublicPoints, s: int) -> list[int]:
    """Interpolation nodes of the round-s query polynomials: window betas, then alpha_1..alpha_T."""
    return [v for _, _, v in pts.window(params, s)] + [pts.a(t) for t in range(1, params.T + 1)]


def row_query_polys(ctx: FieldContext, params: SystemParams, pts: PublicPoints, basis: SpanBasis,
                    theta: int, s: int, i: int, noise_row: Sequence[Vector]) -> list[list[int]]:
    """Query polynomial of row ``i`` as F univariate polynomials, one per span coordinate."""
    target = basis.candidate_coords[theta - 1]
    zero = (0,) * basis.F
    values = [target if l == i else zero for l, _, _ in pts.window(params, s)]
    values += list(noise_row)
    nodes = query_nodes(params, pts, s)
    return [ctx.lagrange_interpolate([(x, v[f]) for x, v in zip(nodes, values)]) for f in range(basis.F)]


def build_round_queries(ctx: FieldContext, params: SystemParams, theta: int, s: int, basis: SpanBasis,
                        pts: PublicPoints, rng=None,
                        noise: QueryNoise | None = None) -> tuple[list[RoundQuery], QueryNoise]:
    """Queries of round ``s`` for all N servers, plus the noise that produced them."""
    if not 1 <= theta <= basis.P:
        raise ValueError(f"theta={theta} outside [1, {basis.P}]")
    params.window(s)
    if noise is None:
        if rng is None:
            raise ValueError("build_round_queries needs an rng or explicit noise")
        noise = QueryNoise(s, tuple(
            tuple(tuple(sample_coords(ctx, basis, rng)) for _ in range(params.T))
            for _ in range(params.L)
        ))
    per_row = []
    for i in range(1, params.L + 1):
        polys = row_query_polys(ctx, params, pts, basis, theta, s, i, noise.coords[i - 1])
        per_row.append([ctx.multipoint_eval(p, pts.alpha) for p in polys])
    queries = [
        RoundQuery(n, s, tuple(tuple(per_row[i][f][n - 1] for f in range(basis.F)) for i in range(params.L)))
        for n in range(1, params.N + 1)
    ]
    return queries, noise


def gen_mask(ctx: FieldContext, params: SystemParams, s: int, z: Sequence[int], pts: PublicPoints) -> list[int]:
    """Mask polynomial: zero on the round-s window, z_j at alpha_j for j <= G(K+X-1)+T."""
    if len(z) != params.mask_size:
        raise ValueError(f"round randomness must have {params.mask_size} symbols, got {len(z)}")
    nodes = [(v, 0) for _, _, v in pts.window(params, s)]
    nodes += [(pts.a(j), z[j - 1]) for j in range(1, params.mask_size + 1)]
    return ctx.lagrange_interpolate(nodes)


def server_answer(ctx: FieldContext, state: ServerState, query: RoundQuery, cr: CommonRandomness,
                  basis: SpanBasis, pts: PublicPoints, params: SystemParams, mask_fn=None) -> int:
    mask_fn = mask_fn or gen_mask
    if query.server_id != state.server_id:
        raise ValueError(f"query for server {query.server_id} delivered to server {state.server_id}")
    if not 1 <= query.round <= len(cr.z):
        raise ValueError(f"no common randomness for round {query.round}")
    if len(query.coords) != params.L:
        raise ValueError(f"query carries {len(query.coords)} rows, expected {params.L}")
    total = 0
    for i, coords in enumerate(query.coords, 1):
        rho = linear_combine(ctx, basis, coords)
        total += mv_eval(ctx, rho, state.row_shares(i, params.M))
    mask = mask_fn(ctx, params, query.round, cr.round(query.round), pts)
    return (total + ctx.poly_eval(mask, pts.a(state.server_id))) % ctx.q


def decode_answer_polynomial(ctx: FieldContext, answers: Sequence[RoundAnswer], pts: PublicPoints,
                             params: SystemParams) -> list[int]:
    by_id = {a.server_id: a.payload for a in answers}
    word = ReceivedWord(pts.alpha, tuple(by_id.get(n, ERASED) for n in range(1, params.N + 1)))
    return decode_rs(ctx, word, params.code_dimension, params.B)


def decode_round(ctx: FieldContext, answers: Sequence[RoundAnswer], s: int, pts: PublicPoints,
                 params: SystemParams) -> dict[tuple[int, int], int]:
    """Desired evaluations {(l, k): v_{l,k}} of round ``s``'s window."""
    if any(a.round != s for a in answers):
        raise ValueError(f"answers from another round passed to round {s}")
    try:
        zeta = decode_answer_polynomial(ctx, answers, pts, params)
    except DecodeFailure as exc:
        raise ProtocolFailure(s, exc) from exc
    return {(l, k): ctx.poly_eval(zeta, b) for l, k, b in pts.window(params, s)}


# -- transcripts ----------------------------------------------------------

@dataclass(frozen=True)
class Record:
    round: int
    direction: str  # query | answer | fault | decoded
    server_id: int | None
    payload: str

    def line(self) -> str:
        sid = "-" if self.server_id is None else str(self.server_id)
        return f"round={self.round} direction={self.direction} server_id={sid} payload={self.payload}"


def _vecs(vs: Sequence[Vector]) -> str:
    return "|".join(",".join(map(str, v)) for v in vs)


@dataclass
class RoundResult:
    round: int
    values: dict[tuple[int, int], int]
    records: list[Record]
    counters: dict[str, OpCounter]
    upload_symbols: int
    download_symbols: int
    shared_randomness: int


@dataclass
class Transcript:
    params: SystemParams
    theta: int
    seed: int
    rounds: list[RoundResult] = field(default_factory=list)
    storage_ops: OpCounter = field(default_factory=OpCounter)

    @property
    def records(self) -> list[Record]:
        return [r for rr in self.rounds for r in rr.records]

    def counters(self) -> dict[str, OpCounter]:
        out = {"storage": OpCounter(**self.storage_ops.as_dict())}
        for rr in self.rounds:
            for role, c in rr.counters.items():
                acc = out.setdefault(role, OpCounter())
                acc.mul += c.mul
                acc.add += c.add
                acc.inv += c.inv
        return out

    @property
    def upload_symbols(self) -> int:
        return sum(rr.upload_symbols for rr in self.rounds)

    @property
    def download_symbols(self) -> int:
        return sum(rr.download_symbols for rr in self.rounds)

    @property
    def shared_randomness(self) -> int:
        return sum(rr.shared_randomness for rr in self.rounds)

    def dumps(self) -> str:
        p = self.params
        head = (f"# sppc transcript N={p.N} K={p.K} X={p.X} T={p.T} B={p.B} U={p.U} G={p.G} "
                f"M={p.M} P={p.P} F={p.F} q={p.q} theta={self.theta} seed={self.seed}")
        return "\n".join([head] + [r.line() for r in self.records]) + "\n"


def run_round(ctx: FieldContext, params: SystemParams, theta: int, s: int, basis: SpanBasis,
              pts: PublicPoints, servers: Sequence[ServerState], cr: CommonRandomness,
              adversary: AdversaryPlan, seed: int) -> RoundResult:
    """One complete round; pure given its inputs, so rounds may run in any order."""
    counters = {role: OpCounter() for role in ("query", "server", "decode")}
    records: list[Record] = []
    with counting(counters["query"]):
        queries, _ = build_round_queries(ctx, params, theta, s, basis, pts, derive_rng(seed, "query", s))
    records += [Record(s, "query", q.server_id, _vecs(q.coords)) for q in queries]

    tamper_rng = derive_rng(seed, "forge", s)
    answers = []
    with counting(counters["server"]):
        for q in queries:
            authentic = server_answer(ctx, servers[q.server_id - 1], q, cr, basis, pts, params)
            sent = adversary.tamper(ctx, s, q.server_id, authentic, tamper_rng)
            if sent is None:
                records.append(Record(s, "fault", q.server_id, "unresponsive"))
            elif sent != authentic:
                records.append(Record(s, "fault", q.server_id, f"byzantine authentic={authentic} sent={sent}"))
            elif q.server_id in adversary.faults(s).byzantine:
                records.append(Record(s, "fault", q.server_id, f"byzantine authentic={authentic} sent={sent}"))
            answers.append(RoundAnswer(q.server_id, s, sent))
    delivered = [a for a in answers if a.payload is not None]
    records += [Record(s, "answer", a.server_id, str(a.payload)) for a in delivered]

    with counting(counters["decode"]):
        values = decode_round(ctx, delivered, s, pts, params)
    records.append(Record(s, "decoded", None, " ".join(f"{l},{k}:{v}" for (l, k), v in sorted(values.items()))))
    return RoundResult(
        round=s,
        values=values,
        records=records,
        counters=counters,
        upload_symbols=sum(len(v) for q in queries for v in q.coords),
        download_symbols=len(delivered),
        shared_randomness=len(cr.round(s)),
    )


def prepare(candidates: Sequence[MultiPoly], params: SystemParams,
            pts: PublicPoints | None = None) -> tuple[FieldContext, SystemParams, SpanBasis, PublicPoints]:
    """Validate the candidates against the parameters, build the span basis and public points."""
    ctx = FieldContext(params.q)
    if len(candidates) != params.P:
        raise ConfigurationError(f"P={params.P} but {len(candidates)} candidates were given")
    for u, c in enumerate(candidates, 1):
        if c.nvars != params.M:
            raise ConfigurationError(f"candidate {u} has {c.nvars} variables, M={params.M}")
        if c.total_degree > params.G:
            raise ConfigurationError(f"candidate {u} has degree {c.total_degree} > G={params.G}")
    basis = span_basis(ctx, candidates)
    if params.F is None:
        params = params.with_span(basis.F)
    elif params.F != basis.F:
        raise ConfigurationError(f"F={params.F} but the candidates span dimension {basis.F}")
    if pts is None:
        pts = generate_points(params)
    elif not verify_points(pts, params).ok:
        raise ConfigurationError("supplied public points violate P1-P4")
    return ctx, params, basis, pts


def run_protocol(theta: int, files: FileSet, candidates: Sequence[MultiPoly], params: SystemParams,
                 adversary: AdversaryPlan | None = None, seed: int = 0, *, pts: PublicPoints | None = None,
                 common_seed: int | None = None, workers: int = 1):
    """Encode the files, run every round, and assemble the desired evaluations.

    Returns (V, transcript) where V is the L x K matrix of desired
    evaluations.  ``common_seed`` overrides the stream of the servers'
    shared randomness (defaults to ``seed``); ``workers > 1`` runs rounds on
    a thread pool.
    """
    ctx, params, basis, pts = prepare(candidates, params, pts)
    if not 1 <= theta <= params.P:
        raise ValueError(f"theta={theta} outside [1, {params.P}]")
    if adversary is None:
        adversary = make_adversary("none", params)
    adversary.validate(params)

    transcript = Transcript(params, theta, seed)
    with counting(transcript.storage_ops):
        servers, _ = encode_storage(ctx, files, pts, params, rng=derive_rng(seed, "storage"))
    cr = CommonRandomness.draw(ctx, params, seed if common_seed is None else common_seed)

    def one(s):
        return run_round(ctx, params, theta, s, basis, pts, servers, cr, adversary, seed)

    rounds = range(1, params.S + 1)
    if workers > 1:
        with concurrent.futures.ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(one, rounds))
    else:
        results = [one(s) for s in rounds]
    transcript.rounds = sorted(results, key=lambda r: r.round)

    V = [[0] * params.K for _ in range(params.L)]
    for rr in transcript.rounds:
        for (l, k), v in rr.values.items():
            V[l - 1][k - 1] = v
    return tuple(tuple(r) for r in V), transcript


def plaintext_evaluations(ctx: FieldContext, phi: MultiPoly, files: FileSet, params: SystemParams):
    """V computed directly from the files; the reference every protocol run is checked against."""
    return tuple(
        tuple(mv_eval(ctx, phi, files.cell(l, k)) for k in range(1, params.K + 1))
        for l in range(1, params.L + 1)
    )
