"""X-secure Lagrange storage of the M files across N servers.

Row ``l`` of file ``m`` is encoded by the polynomial of degree at most
K+X-1 taking the file symbols at beta_{l,1..K} and uniform noise at
beta_{l,K+1..K+X}; server ``n`` stores every such polynomial evaluated at
alpha_n.  Any K+X servers recover the files, any X servers see uniform
noise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .field import FieldContext
from .params import SystemParams
from .points import PublicPoints

Matrix = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class FileSet:
    files: tuple[Matrix, ...]  # M matrices of shape L x K

    @classmethod
    def from_lists(cls, files) -> "FileSet":
        return cls(tuple(tuple(tuple(int(v) for v in row) for row in f) for f in files))

    @property
    def M(self) -> int:
        return len(self.files)

    def cell(self, l: int, k: int) -> tuple[int, ...]:
        """(w^(1)_{l,k}, ..., w^(M)_{l,k}) with 1-based indices."""
        return tuple(f[l - 1][k - 1] for f in self.files)

    def check_shape(self, params: SystemParams) -> None:
        if self.M != params.M or any(
            len(f) != params.L or any(len(r) != params.K for r in f) for f in self.files
        ):
            raise ValueError(f"file set must have shape M x L x K = {params.M} x {params.L} x {params.K}")


def random_fileset(ctx: FieldContext, params: SystemParams, rng) -> FileSet:
    return FileSet(
        tuple(
            tuple(tuple(ctx.random_vector(rng, params.K)) for _ in range(params.L))
            for _ in range(params.M)
        )
    )


@dataclass(frozen=True)
class StorageNoise:
    z: tuple[Matrix, ...]  # M x L x X


def random_noise(ctx: FieldContext, params: SystemParams, rng) -> StorageNoise:
    return StorageNoise(
        tuple(
            tuple(tuple(ctx.random_vector(rng, params.X)) for _ in range(params.L))
            for _ in range(params.M)
        )
    )


@dataclass(frozen=True)
class ServerState:
    server_id: int  # 1-based
    shares: tuple[int, ...]  # M*L values, row index outer, file index inner

    def share(self, l: int, m: int, M: int) -> int:
        return self.shares[(l - 1) * M + (m - 1)]

    def row_shares(self, l: int, M: int) -> tuple[int, ...]:
        """Stored values of row ``l`` of every file, i.e. the point at which row-l queries are evaluated."""
        return self.shares[(l - 1) * M : l * M]


def encode_row(ctx: FieldContext, pts: PublicPoints, params: SystemParams, l: int,
               data: Sequence[int], noise: Sequence[int]) -> list[int]:
    nodes = [(pts.b(l, k), data[k - 1]) for k in range(1, params.K + 1)]
    nodes += [(pts.b(l, params.K + j), noise[j - 1]) for j in range(1, params.X + 1)]
    return ctx.lagrange_interpolate(nodes)


def storage_polynomials(ctx: FieldContext, files: FileSet, noise: StorageNoise,
                        pts: PublicPoints, params: SystemParams) -> dict[tuple[int, int], list[int]]:
    """The encoding polynomial for every (file m, row l), 1-based keys."""
    return {
        (m, l): encode_row(ctx, pts, params, l, files.files[m - 1][l - 1], noise.z[m - 1][l - 1])
        for m in range(1, params.M + 1)
        for l in range(1, params.L + 1)
    }


def encode_storage(ctx: FieldContext, files: FileSet, pts: PublicPoints, params: SystemParams,
                   rng=None, noise: StorageNoise | None = None) -> tuple[list[ServerState], StorageNoise]:
    """Encode the files; returns the N server states and the storage noise used.

    Either ``rng`` or an explicit ``noise`` must be supplied.
    """
    files.check_shape(params)
    if noise is None:
        if rng is None:
            raise ValueError("encode_storage needs an rng or explicit noise")
        noise = random_noise(ctx, params, rng)
    polys = storage_polynomials(ctx, files, noise, pts, params)
    columns = {key: ctx.multipoint_eval(p, pts.alpha) for key, p in polys.items()}
    servers = []
    for n in range(1, params.N + 1):
        shares = tuple(
            columns[(m, l)][n - 1] for l in range(1, params.L + 1) for m in range(1, params.M + 1)
        )
        servers.append(ServerState(n, shares))
    return servers, noise


def reconstruct_files(ctx: FieldContext, servers: Iterable[ServerState], pts: PublicPoints,
                      params: SystemParams) -> FileSet:
    by_id = {s.server_id: s for s in servers}
    need = params.K + params.X
    if len(by_id) < need:
        raise ValueError(f"reconstruction needs {need} distinct servers, got {len(by_id)}")
    chosen = [by_id[i] for i in sorted(by_id)[:need]]
    files = []
    for m in range(1, params.M + 1):
        rows = []
        for l in range(1, params.L + 1):
            poly = ctx.lagrange_interpolate([(pts.a(s.server_id), s.share(l, m, params.M)) for s in chosen])
            rows.append(tuple(ctx.poly_eval(poly, pts.b(l, k)) for k in range(1, params.K + 1)))
        files.append(tuple(rows))
    return FileSet(tuple(files))


def noise_weight_matrix(ctx: FieldContext, pts: PublicPoints, params: SystemParams, l: int,
                        server_ids: Sequence[int]) -> list[list[int]]:
    """X x X matrix of the noise Lagrange basis of row ``l`` evaluated at the given servers' alphas."""
    nodes = [pts.b(l, k) for k in range(1, params.K + params.X + 1)]
    rows = []
    for n in server_ids:
        x = pts.a(n)
        row = []
        for i in range(params.K, params.K + params.X):
            num, den = 1, 1
            for j, bj in enumerate(nodes):
                if j != i:
                    num = num * (x - bj) % ctx.q
                    den = den * (nodes[i] - bj) % ctx.q
            row.append(num * ctx.inv(den) % ctx.q)
        rows.append(row)
    return rows


def dump_server_state(state: ServerState) -> str:
    return f"{state.server_id}: " + " ".join(map(str, state.shares))


def parse_server_state(line: str) -> ServerState:
    head, _, rest = line.partition(":")
    return ServerState(int(head), tuple(int(v) for v in rest.split()))
