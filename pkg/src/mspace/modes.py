"""Counting arguments for mode entanglement of indistinguishable particles.

With n particles spread over m modes and only particle-number measurements
available, the measurement space has one axis per composition of n into m
nonnegative ordered parts, i.e. binom(n+m-1, m-1) axes. Useful bipartite
entanglement is then capped by how evenly that count factors into two
integers: log2(N / p) bits, where p is the smallest divisor of N at or above
sqrt(N). A prime count cannot be factored at all, forcing the cap to zero.
"""

from __future__ import annotations

import dataclasses
import math


def composition_count(n: int, m: int) -> int:
    """Number of ordered ways to write n as a sum of m nonnegative integers.

    Exact integer arithmetic; equals binom(n+m-1, m-1).
    """
    n, m = int(n), int(m)
    if n < 1:
        raise ValueError(f"particle count must be >= 1, got {n}")
    if m < 2:
        raise ValueError(f"mode count must be >= 2, got {m}")
    return math.comb(n + m - 1, m - 1)


def is_prime(n: int) -> bool:
    """Deterministic trial-division primality check."""
    n = int(n)
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def divisor_infimum(n: int) -> int:
    """Smallest divisor of n that is >= sqrt(n).

    Equivalently: over all factorizations n = k * l, the minimum of
    max(k, l). Equals n exactly when n is prime.
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"need a positive integer, got {n}")
    for d in range(math.isqrt(n), 0, -1):
        if n % d == 0:
            return n // d
    raise AssertionError("unreachable: 1 divides every positive integer")


@dataclasses.dataclass(frozen=True)
class ModeSystem:
    """Mode-counting data for n particles over m modes.

    ``count`` is the number of particle-number outcomes, ``p`` the divisor
    infimum, ``bound_bits`` the useful-entanglement cap log2(count / p) and
    ``weak_bound_bits`` the always-valid but looser cap log2(count / 2).
    For prime counts the strong cap is 0 while the weak one stays positive,
    so the weak form is not tight there.
    """

    n: int
    m: int
    count: int
    p: int
    prime: bool
    bound_bits: float
    weak_bound_bits: float

    def __post_init__(self):
        if self.count < 2:
            raise ValueError(f"outcome count must be >= 2, got {self.count}")
        if self.count % self.p != 0 or self.p * self.p < self.count:
            raise ValueError(f"p = {self.p} is not a divisor of {self.count} at or above its root")
        if self.bound_bits < 0 or self.bound_bits > self.weak_bound_bits + 1e-12:
            raise ValueError("bound ordering violated")
        if self.prime and self.bound_bits != 0.0:
            raise ValueError("a prime outcome count forces a zero bound")


def useful_entanglement_bound(n: int, m: int) -> ModeSystem:
    """Upper bounds (bits) on useful mode entanglement for (n, m)."""
    count = composition_count(n, m)
    p = divisor_infimum(count)
    return ModeSystem(
        n=int(n),
        m=int(m),
        count=count,
        p=p,
        prime=is_prime(count),
        bound_bits=math.log2(count / p),
        weak_bound_bits=math.log2(count / 2),
    )
