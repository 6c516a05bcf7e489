"""Public evaluation points: the beta matrix and the alpha vector.

Requirements on the points:

* P1 - entries of every beta row are pairwise distinct;
* P2 - within each round's column window, all L*Delta entries are distinct;
* P3 - the alphas are pairwise distinct;
* P4 - no alpha equals a beta entry in the first K columns.

:func:`generate_points` builds them deterministically from the field
elements 0, 1, 2, ... and uses exactly N + max(K, E) distinct values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TextIO

from .errors import ConfigurationError
from .params import SystemParams


@dataclass(frozen=True)
class PublicPoints:
    beta: tuple[tuple[int, ...], ...]  # L rows of K+X entries
    alpha: tuple[int, ...]  # N entries

    def b(self, l: int, k: int) -> int:
        """beta_{l,k} with 1-based indices."""
        return self.beta[l - 1][k - 1]

    def a(self, n: int) -> int:
        """alpha_n with a 1-based index."""
        return self.alpha[n - 1]

    def window(self, params: SystemParams, s: int) -> list[tuple[int, int, int]]:
        """(l, k, beta_{l,k}) for every point of round ``s``'s window, row-major."""
        return [(l, k, self.b(l, k)) for l in range(1, params.L + 1) for k in params.window(s)]

    def distinct_values(self) -> set[int]:
        return {v for row in self.beta for v in row} | set(self.alpha)


@dataclass(frozen=True)
class PointsReport:
    p1: bool
    p2: bool
    p3: bool
    p4: bool
    distinct_count: int
    expected_count: int

    @property
    def ok(self) -> bool:
        return self.p1 and self.p2 and self.p3 and self.p4


def generate_points(params: SystemParams) -> PublicPoints:
    K, X, N, E, L, S, D = params.K, params.X, params.N, params.E, params.L, params.S, params.delta
    if params.q < params.field_bound:
        raise ConfigurationError(f"q={params.q} below N+max(K,E)={params.field_bound}")

    # step 1: data columns
    if K >= E:
        first = list(range(K))
        rows = [first[(l * D) % K :] + first[: (l * D) % K] for l in range(L)]
        used = K
    else:
        block = [[l * D + k for k in range(D)] for l in range(L)]
        rows = [[] for _ in range(L)]
        for s in range(S):
            for l in range(L):
                rows[l].extend(block[(l + s) % L])
        used = E

    # step 2: noise columns, shared by all rows
    noise = list(range(used, used + X))
    beta = tuple(tuple(r + noise) for r in rows)

    # step 3: the first X alphas reuse the noise points
    alpha = tuple(noise + list(range(used + X, used + N)))
    return PublicPoints(beta, alpha)


def verify_points(pts: PublicPoints, params: SystemParams) -> PointsReport:
    K, X, N, L = params.K, params.X, params.N, params.L
    if len(pts.beta) != L or any(len(r) != K + X for r in pts.beta) or len(pts.alpha) != N:
        raise ValueError(
            f"points have shape {len(pts.beta)}x{len(pts.beta[0]) if pts.beta else 0} / {len(pts.alpha)},"
            f" expected {L}x{K + X} / {N}"
        )
    if any(not 0 <= v < params.q for v in pts.distinct_values()):
        raise ValueError("point values must be field elements")
    p1 = all(len(set(r)) == len(r) for r in pts.beta)
    p2 = True
    for s in range(1, params.S + 1):
        vals = [v for _, _, v in pts.window(params, s)]
        p2 &= len(set(vals)) == len(vals)
    p3 = len(set(pts.alpha)) == N
    data = {v for r in pts.beta for v in r[:K]}
    p4 = not (set(pts.alpha) & data)
    return PointsReport(p1, p2, p3, p4, len(pts.distinct_values()), params.field_bound)


def write_points(pts: PublicPoints, params: SystemParams, fh: TextIO) -> None:
    p = params
    fh.write(f"{p.q} {p.N} {p.K} {p.X} {p.L} {p.S} {p.delta}\n")
    for row in pts.beta:
        fh.write(" ".join(map(str, row)) + "\n")
    fh.write(" ".join(map(str, pts.alpha)) + "\n")


def dumps_points(pts: PublicPoints, params: SystemParams) -> str:
    import io

    buf = io.StringIO()
    write_points(pts, params, buf)
    return buf.getvalue()


def read_points(fh: TextIO, params: SystemParams | None = None) -> tuple[PublicPoints, dict]:
    """Parse a points fixture; if ``params`` is given the header and P1-P4 are checked."""
    lines = [ln.split() for ln in fh.read().splitlines() if ln.strip()]
    if not lines or len(lines[0]) != 7:
        raise ValueError("points fixture header must be 'q N K X L S Delta'")
    q, N, K, X, L, S, D = map(int, lines[0])
    header = dict(q=q, N=N, K=K, X=X, L=L, S=S, Delta=D)
    if len(lines) != L + 2:
        raise ValueError(f"expected {L} beta rows and one alpha row")
    beta = tuple(tuple(int(v) for v in r) for r in lines[1 : L + 1])
    alpha = tuple(int(v) for v in lines[L + 1])
    pts = PublicPoints(beta, alpha)
    if params is not None:
        expect = dict(q=params.q, N=params.N, K=params.K, X=params.X, L=params.L, S=params.S, Delta=params.delta)
        if header != expect:
            raise ValueError(f"fixture header {header} does not match parameters {expect}")
        report = verify_points(pts, params)
        if not report.ok:
            raise ValueError(f"fixture violates the point properties: {report}")
    return pts, header
