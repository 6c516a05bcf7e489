"""Sparse multivariate polynomials and the span of a candidate function set.

Monomials are ordered by graded lexicographic order (total degree first,
then exponent vectors lexicographically).  This order fixes the row
reduction in :func:`span_basis`, so the basis and every coordinate vector
are reproducible across runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .field import FieldContext, _tally

Exponent = tuple[int, ...]


def grlex_key(exp: Exponent):
    return (sum(exp), exp)


@dataclass(frozen=True)
class MultiPoly:
    """Polynomial in ``nvars`` variables with terms kept in descending grlex order."""

    nvars: int
    terms: tuple[tuple[Exponent, int], ...] = ()

    @classmethod
    def from_dict(cls, terms: Mapping[Sequence[int], int], nvars: int, q: int) -> "MultiPoly":
        acc: dict[Exponent, int] = {}
        for exp, c in terms.items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != nvars or any(e < 0 for e in exp):
                raise ValueError(f"bad exponent vector {exp} for {nvars} variables")
            acc[exp] = (acc.get(exp, 0) + c) % q
        items = sorted(((e, c) for e, c in acc.items() if c), key=lambda t: grlex_key(t[0]), reverse=True)
        return cls(nvars, tuple(items))

    @classmethod
    def zero(cls, nvars: int) -> "MultiPoly":
        return cls(nvars, ())

    @classmethod
    def variable(cls, j: int, nvars: int, q: int) -> "MultiPoly":
        """The polynomial x_{j+1} (``j`` is 0-based)."""
        exp = [0] * nvars
        exp[j] = 1
        return cls.from_dict({tuple(exp): 1}, nvars, q)

    @property
    def total_degree(self) -> int:
        return max((sum(e) for e, _ in self.terms), default=-1)

    def as_dict(self) -> dict[Exponent, int]:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __str__(self) -> str:
        return to_text(self)


def to_text(p: MultiPoly) -> str:
    """Canonical text form: space separated ``e1,...,eM:c`` terms, or ``0``."""
    if not p.terms:
        return "0"
    return " ".join(",".join(str(e) for e in exp) + f":{c}" for exp, c in p.terms)


def from_text(text: str, nvars: int, q: int) -> MultiPoly:
    text = text.strip()
    if text in ("", "0"):
        return MultiPoly.zero(nvars)
    terms: dict[Exponent, int] = {}
    for tok in text.split():
        try:
            exp_s, c_s = tok.split(":")
            exp = tuple(int(e) for e in exp_s.split(","))
            c = int(c_s)
        except ValueError as exc:
            raise ValueError(f"malformed polynomial term {tok!r}") from exc
        if exp in terms:
            raise ValueError(f"repeated monomial {exp} in {text!r}")
        terms[exp] = c
    return MultiPoly.from_dict(terms, nvars, q)


def mv_eval(ctx: FieldContext, p: MultiPoly, point: Sequence[int]) -> int:
    if len(point) != p.nvars:
        raise ValueError(f"point has {len(point)} coordinates, polynomial has {p.nvars} variables")
    q = ctx.q
    powers: list[dict[int, int]] = [{0: 1} for _ in range(p.nvars)]
    muls = 0
    total = 0
    for exp, c in p.terms:
        term = c
        for j, e in enumerate(exp):
            if e:
                cache = powers[j]
                v = cache.get(e)
                if v is None:
                    v = pow(point[j], e, q)
                    cache[e] = v
                    muls += e
                term = term * v % q
                muls += 1
        total += term
    _tally(mul=muls, add=len(p.terms))
    return total % q


@dataclass(frozen=True)
class SpanBasis:
    """Row-reduced basis of the space spanned by the candidate functions."""

    nvars: int
    monomials: tuple[Exponent, ...]
    basis: tuple[MultiPoly, ...]
    pivots: tuple[int, ...]
    candidate_coords: tuple[tuple[int, ...], ...]

    @property
    def F(self) -> int:
        return len(self.basis)

    @property
    def P(self) -> int:
        return len(self.candidate_coords)


def span_basis(ctx: FieldContext, candidates: Sequence[MultiPoly]) -> SpanBasis:
    """Row-reduce the candidates' coefficient matrix into a basis of their span."""
    if not candidates:
        raise ValueError("candidate list is empty")
    nvars = candidates[0].nvars
    if any(c.nvars != nvars for c in candidates):
        raise ValueError("candidates disagree on the number of variables")
    support = sorted({e for c in candidates for e, _ in c.terms}, key=grlex_key, reverse=True)
    col = {e: i for i, e in enumerate(support)}
    rows = []
    for c in candidates:
        r = [0] * len(support)
        for e, v in c.terms:
            r[col[e]] = v
        rows.append(r)
    reduced, pivots = ctx.rref(rows)
    if not reduced:
        raise ValueError("candidate functions span only the zero polynomial")
    basis = tuple(
        MultiPoly.from_dict({support[j]: v for j, v in enumerate(r) if v}, nvars, ctx.q)
        for r in reduced
    )
    proto = SpanBasis(nvars, tuple(support), basis, tuple(pivots), ())
    coords = tuple(tuple(span_coordinates(ctx, c, proto)) for c in candidates)
    return SpanBasis(nvars, tuple(support), basis, tuple(pivots), coords)


def linear_combine(ctx: FieldContext, basis: SpanBasis, coords: Sequence[int]) -> MultiPoly:
    if len(coords) != basis.F:
        raise ValueError(f"expected {basis.F} coordinates, got {len(coords)}")
    acc: dict[Exponent, int] = {}
    for a, b in zip(coords, basis.basis):
        if a % ctx.q == 0:
            continue
        for e, v in b.terms:
            acc[e] = acc.get(e, 0) + a * v
        _tally(mul=len(b.terms), add=len(b.terms))
    return MultiPoly.from_dict(acc, basis.nvars, ctx.q)


def span_coordinates(ctx: FieldContext, p: MultiPoly, basis: SpanBasis) -> list[int]:
    """Coordinates of ``p`` in the basis; ValueError if ``p`` lies outside the span."""
    if p.nvars != basis.nvars:
        raise ValueError("polynomial and basis disagree on the number of variables")
    d = p.as_dict()
    # the basis is in reduced echelon form, so coordinates sit at the pivot monomials
    coords = [d.get(basis.monomials[j], 0) for j in basis.pivots]
    if linear_combine(ctx, basis, coords) != p:
        raise ValueError(f"polynomial {to_text(p)!r} is not in the candidate span")
    return coords


def in_span(ctx: FieldContext, p: MultiPoly, basis: SpanBasis) -> bool:
    try:
        span_coordinates(ctx, p, basis)
    except ValueError:
        return False
    return True


def sample_coords(ctx: FieldContext, basis: SpanBasis, rng) -> list[int]:
    return ctx.random_vector(rng, basis.F)


def sample_span(ctx: FieldContext, basis: SpanBasis, rng) -> MultiPoly:
    """Uniform draw from the span: F independent uniform coordinates."""
    return linear_combine(ctx, basis, sample_coords(ctx, basis, rng))
