"""Reed-Solomon decoding with simultaneous errors and erasures.

Erased positions are punctured first; the shortened word is decoded with
Gao's key-equation decoder (partial extended Euclid between the vanishing
polynomial of the positions and the interpolant of the received values).
Every decode ends with a re-evaluation pass, so a result with more than the
allowed number of disagreements is reported as :class:`DecodeFailure`
instead of being returned.

Beyond the error budget a word can still sit within distance ``b`` of a
*different* codeword; such a miscorrection is indistinguishable from a
legitimate decode and no decoder can flag it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import AmbiguousDecode, DecodeFailure, InfeasibleDecode
from .field import FieldContext

ERASED = None


@dataclass(frozen=True)
class ReceivedWord:
    positions: tuple[int, ...]  # evaluation points
    slots: tuple[Optional[int], ...]  # received symbol or ERASED

    def __post_init__(self):
        if len(self.positions) != len(self.slots):
            raise ValueError("positions and slots differ in length")
        if len(set(self.positions)) != len(self.positions):
            raise ValueError("evaluation points must be distinct")

    @property
    def erasures(self) -> int:
        return sum(v is ERASED for v in self.slots)

    def present(self) -> list[tuple[int, int]]:
        return [(x, y) for x, y in zip(self.positions, self.slots) if y is not ERASED]


def disagreements(ctx: FieldContext, poly: Sequence[int], pts: Sequence[tuple[int, int]]) -> int:
    return sum(ctx.poly_eval(poly, x) != y % ctx.q for x, y in pts)


def decode_rs(ctx: FieldContext, word: ReceivedWord, d: int, b: int) -> list[int]:
    """Return the polynomial of degree < d within distance b of the received word.

    Raises InfeasibleDecode if fewer than d + 2b symbols survive, and
    DecodeFailure if no codeword lies within distance b.
    """
    pts = word.present()
    n = len(pts)
    if d < 1:
        raise ValueError("code dimension must be at least 1")
    if n < d + 2 * b:
        raise InfeasibleDecode(f"{n} unerased symbols cannot correct {b} errors at dimension {d}")

    g0 = ctx.vanishing_poly(x for x, _ in pts)
    g1 = ctx.lagrange_interpolate(pts)
    r0, r1 = g0, g1
    v0, v1 = [], [1]
    # stop once deg(r1) < (n + d) / 2
    while 2 * ctx.degree(r1) >= n + d:
        quo, rem = ctx.poly_divmod(r0, r1)
        r0, r1 = r1, rem
        v0, v1 = v1, ctx.poly_sub(v0, ctx.poly_mul(quo, v1))
    f, rem = ctx.poly_divmod(r1, v1)
    if rem or ctx.degree(f) >= d:
        raise DecodeFailure("received word is not within the decoding radius of any codeword")
    bad = disagreements(ctx, f, pts)
    if bad > b:
        raise DecodeFailure(f"decoded polynomial disagrees with {bad} symbols, budget is {b}")
    return f


def brute_force_decode(ctx: FieldContext, word: ReceivedWord, d: int, b: int, max_n: int = 12) -> list[int]:
    """Exhaustive decoder over all error supports of size <= b."""
    pts = word.present()
    n = len(pts)
    if n > max_n:
        raise ValueError(f"brute force limited to {max_n} unerased symbols, got {n}")
    if n < d:
        raise InfeasibleDecode(f"{n} unerased symbols cannot determine dimension {d}")
    found: set[tuple[int, ...]] = set()
    for size in range(0, b + 1):
        for errs in itertools.combinations(range(n), size):
            keep = [p for i, p in enumerate(pts) if i not in errs]
            if len(keep) < d:
                continue
            f = ctx.lagrange_interpolate(keep[:d])
            if all(ctx.poly_eval(f, x) == y % ctx.q for x, y in keep[d:]):
                found.add(tuple(f))
    if not found:
        raise DecodeFailure("no codeword within distance b")
    if len(found) > 1:
        raise AmbiguousDecode(f"{len(found)} codewords within distance {b}")
    return list(found.pop())
