"""Prime field arithmetic and univariate polynomial helpers.

Field elements are plain Python ints in ``[0, q)``.  Univariate polynomials
are lists of coefficients, lowest degree first, with no trailing zeros; the
zero polynomial is the empty list.

Arithmetic performed by the polynomial and linear-algebra routines is tallied
into the active :class:`OpCounter` (see :func:`counting`), which is how the
simulator reports field-operation counts per protocol role.
"""

from __future__ import annotations

import contextlib
import contextvars
from dataclasses import dataclass
from typing import Iterable, Sequence

import sympy


@dataclass
class OpCounter:
    mul: int = 0
    add: int = 0
    inv: int = 0

    @property
    def total(self) -> int:
        return self.mul + self.add + self.inv

    def as_dict(self) -> dict:
        return {"mul": self.mul, "add": self.add, "inv": self.inv}


_active_counter: contextvars.ContextVar[OpCounter | None] = contextvars.ContextVar(
    "sppc_op_counter", default=None
)


@contextlib.contextmanager
def counting(counter: OpCounter):
    """Route operation tallies of the enclosed block into ``counter``."""
    token = _active_counter.set(counter)
    try:
        yield counter
    finally:
        _active_counter.reset(token)


def _tally(mul: int = 0, add: int = 0, inv: int = 0) -> None:
    c = _active_counter.get()
    if c is not None:
        c.mul += mul
        c.add += add
        c.inv += inv


def smallest_prime_at_least(n: int) -> int:
    if n <= 2:
        return 2
    return n if sympy.isprime(n) else int(sympy.nextprime(n))


@dataclass(frozen=True)
class FieldContext:
    """Arithmetic over the prime field F_q."""

    q: int

    def __post_init__(self):
        from .errors import ConfigurationError

        if not isinstance(self.q, int) or self.q < 2 or not sympy.isprime(self.q):
            raise ConfigurationError(f"field modulus must be a prime >= 2, got {self.q!r}")

    # -- scalar arithmetic -------------------------------------------------

    def elem(self, a: int) -> int:
        return a % self.q

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.q

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.q

    def neg(self, a: int) -> int:
        return (-a) % self.q

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.q

    def pow(self, a: int, e: int) -> int:
        return pow(a, e, self.q)

    def inv(self, a: int) -> int:
        a %= self.q
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse in F_{self.q}")
        _tally(inv=1)
        return pow(a, -1, self.q)

    def div(self, a: int, b: int) -> int:
        return (a * self.inv(b)) % self.q

    def random_element(self, rng) -> int:
        return rng.randrange(self.q)

    def random_vector(self, rng, n: int) -> list[int]:
        return [rng.randrange(self.q) for _ in range(n)]

    # -- univariate polynomials -------------------------------------------

    @staticmethod
    def trim(p: Sequence[int]) -> list[int]:
        p = list(p)
        while p and p[-1] == 0:
            p.pop()
        return p

    @staticmethod
    def degree(p: Sequence[int]) -> int:
        """Degree of a trimmed polynomial; -1 for the zero polynomial."""
        return len(p) - 1

    def poly_add(self, a: Sequence[int], b: Sequence[int]) -> list[int]:
        n = max(len(a), len(b))
        _tally(add=n)
        out = [
            ((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % self.q
            for i in range(n)
        ]
        return self.trim(out)

    def poly_sub(self, a: Sequence[int], b: Sequence[int]) -> list[int]:
        n = max(len(a), len(b))
        _tally(add=n)
        out = [
            ((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % self.q
            for i in range(n)
        ]
        return self.trim(out)

    def poly_scale(self, a: Sequence[int], c: int) -> list[int]:
        _tally(mul=len(a))
        return self.trim([(x * c) % self.q for x in a])

    def poly_mul(self, a: Sequence[int], b: Sequence[int]) -> list[int]:
        if not a or not b:
            return []
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
        _tally(mul=len(a) * len(b), add=len(a) * len(b))
        return self.trim([x % self.q for x in out])

    def poly_divmod(self, a: Sequence[int], b: Sequence[int]) -> tuple[list[int], list[int]]:
        b = self.trim(b)
        if not b:
            raise ZeroDivisionError("polynomial division by zero")
        rem = [x % self.q for x in a]
        rem = self.trim(rem)
        if len(rem) < len(b):
            return [], rem
        lead_inv = self.inv(b[-1])
        quot = [0] * (len(rem) - len(b) + 1)
        for shift in range(len(rem) - len(b), -1, -1):
            c = (rem[shift + len(b) - 1] * lead_inv) % self.q
            quot[shift] = c
            if c:
                for j, bj in enumerate(b):
                    rem[shift + j] = (rem[shift + j] - c * bj) % self.q
        _tally(mul=len(quot) * (len(b) + 1), add=len(quot) * len(b))
        return self.trim(quot), self.trim(rem[: len(b) - 1])

    def poly_eval(self, p: Sequence[int], x: int) -> int:
        y = 0
        for c in reversed(p):
            y = (y * x + c) % self.q
        _tally(mul=len(p), add=len(p))
        return y

    def multipoint_eval(self, p: Sequence[int], xs: Iterable[int]) -> list[int]:
        return [self.poly_eval(p, x) for x in xs]

    def vanishing_poly(self, xs: Iterable[int]) -> list[int]:
        """Monic polynomial with a simple root at every element of ``xs``."""
        root = [1]
        for x in xs:
            nxt = [0] * (len(root) + 1)
            for i, c in enumerate(root):
                nxt[i + 1] += c
                nxt[i] -= c * x
            root = [c % self.q for c in nxt]
            _tally(mul=len(root), add=len(root))
        return root

    def lagrange_interpolate(self, pts: Sequence[tuple[int, int]]) -> list[int]:
        """Unique polynomial of degree < len(pts) through the given points.

        Raises ValueError on an empty point list or a repeated x.
        """
        if not pts:
            raise ValueError("interpolation needs at least one point")
        xs = [x % self.q for x, _ in pts]
        ys = [y % self.q for _, y in pts]
        if len(set(xs)) != len(xs):
            raise ValueError("interpolation points must have distinct x values")
        n = len(xs)
        master = self.vanishing_poly(xs)
        out = [0] * n
        for xi, yi in zip(xs, ys):
            # synthetic division of master by (X - xi)
            num = [0] * n
            carry = master[n]
            for j in range(n - 1, -1, -1):
                num[j] = carry
                carry = (master[j] + carry * xi) % self.q
            denom = self.poly_eval(num, xi)
            if yi == 0:
                continue
            scale = (yi * self.inv(denom)) % self.q
            for j in range(n):
                out[j] += num[j] * scale
        _tally(mul=2 * n * n, add=2 * n * n)
        return self.trim([c % self.q for c in out])

    def interpolate_at(self, pts: Sequence[tuple[int, int]], x: int) -> int:
        """Value at ``x`` of the polynomial interpolating ``pts``."""
        return self.poly_eval(self.lagrange_interpolate(pts), x)

    # -- dense linear algebra ---------------------------------------------

    def rref(self, rows: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[int]]:
        """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
        m = [[x % self.q for x in r] for r in rows]
        if not m:
            return [], []
        ncols = len(m[0])
        pivots: list[int] = []
        r = 0
        for c in range(ncols):
            piv = next((i for i in range(r, len(m)) if m[i][c]), None)
            if piv is None:
                continue
            m[r], m[piv] = m[piv], m[r]
            inv = self.inv(m[r][c])
            m[r] = [(x * inv) % self.q for x in m[r]]
            for i in range(len(m)):
                if i != r and m[i][c]:
                    f = m[i][c]
                    m[i] = [(a - f * b) % self.q for a, b in zip(m[i], m[r])]
            _tally(mul=len(m) * ncols, add=len(m) * ncols)
            pivots.append(c)
            r += 1
            if r == len(m):
                break
        return m[:r], pivots

    def rank(self, rows: Sequence[Sequence[int]]) -> int:
        return len(self.rref(rows)[1])

    def is_invertible(self, rows: Sequence[Sequence[int]]) -> bool:
        n = len(rows)
        return all(len(r) == n for r in rows) and self.rank(rows) == n
