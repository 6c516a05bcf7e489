"""System parameters and their derived quantities."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

import sympy

from .errors import ConfigurationError
from .field import smallest_prime_at_least


@dataclass(frozen=True)
class SystemParams:
    """Protocol parameter bundle.

    N servers, M files of L x K symbols, X-secure storage, T-colluding
    user privacy, B Byzantine and U unresponsive servers per round, P
    candidate functions of total degree at most G spanning an F-dimensional
    space, all over the prime field F_q.
    """

    N: int
    K: int
    X: int
    T: int
    B: int
    U: int
    G: int
    M: int = 1
    P: int = 1
    q: int = 0
    F: int | None = None

    def __post_init__(self):
        for name in ("N", "K", "X", "T", "B", "U", "G", "M", "P", "q"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise ConfigurationError(f"{name} must be a nonnegative integer, got {v!r}")
        for name in ("K", "T", "G", "M", "P"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be at least 1")
        overhead = self.G * (self.K + self.X - 1) + self.T + 2 * self.B + self.U
        if self.N <= overhead:
            raise ConfigurationError(
                f"infeasible: N={self.N} must exceed G(K+X-1)+T+2B+U={overhead}"
            )
        bound = self.field_bound
        if not sympy.isprime(self.q):
            raise ConfigurationError(f"field modulus q={self.q} is not prime")
        if self.q < bound:
            raise ConfigurationError(f"q={self.q} is below the required field size N+max(K,E)={bound}")
        if self.F is not None and not 1 <= self.F <= self.P:
            raise ConfigurationError(f"span dimension F={self.F} must lie in [1, P={self.P}]")

    @property
    def E(self) -> int:
        return self.N - (self.G * (self.K + self.X - 1) + self.T + 2 * self.B + self.U)

    @property
    def delta(self) -> int:
        return math.gcd(self.K, self.E)

    @property
    def L(self) -> int:
        return self.E // self.delta

    @property
    def S(self) -> int:
        return self.K // self.delta

    @property
    def field_bound(self) -> int:
        return self.N + max(self.K, self.E)

    @property
    def mask_size(self) -> int:
        """Shared random symbols per round, G(K+X-1)+T."""
        return self.G * (self.K + self.X - 1) + self.T

    @property
    def code_dimension(self) -> int:
        """Dimension G(K+X-1)+E+T of the per-round answer code."""
        return self.mask_size + self.E

    def window(self, s: int) -> range:
        """1-based file columns decoded in round ``s``."""
        if not 1 <= s <= self.S:
            raise ValueError(f"round {s} outside [1, {self.S}]")
        return range((s - 1) * self.delta + 1, s * self.delta + 1)

    def with_span(self, F: int, P: int | None = None) -> "SystemParams":
        return replace(self, F=F, P=self.P if P is None else P)

    def as_dict(self) -> dict:
        d = asdict(self)
        d.update(E=self.E, Delta=self.delta, L=self.L, S=self.S)
        return d


def derive_params(N, K, X, T, B, U, G, P=1, q=None, M=1, F=None) -> SystemParams:
    """Build a validated :class:`SystemParams`; picks the smallest admissible prime if ``q`` is None."""
    if q is None:
        E = N - (G * (K + X - 1) + T + 2 * B + U)
        q = smallest_prime_at_least(N + max(K, E))
    return SystemParams(N=N, K=K, X=X, T=T, B=B, U=U, G=G, M=M, P=P, q=q, F=F)
