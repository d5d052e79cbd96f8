"""Cusp enumeration and fan widths for the congruence groups Gamma0(N), Gamma1(N).

Gamma0(N) uses the divisor-indexed representative set x/d (d | N, x coprime
to d, distinct mod (d, N/d)) with fan width N/(N, d^2).

Gamma1(N) representatives come from the orbit structure of coprime pairs
(a, c) mod N under (a, c) -> +-(a + n*c, c): that relation is exactly cusp
equivalence mod Gamma1(N), so enumerating orbits of (Z/N)^2 gives a complete
inequivalent set without relying on any printed selection table.  The count
is cross-checked against (1/2) sum_{d|N} phi(d) phi(N/d) in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd


class CuspError(Exception):
    pass


@dataclass(frozen=True)
class Cusp:
    """Reduced fraction a/c with c >= 0; infinity is 1/0."""

    a: int
    c: int

    def __post_init__(self):
        if (self.a, self.c) == (0, 0):
            raise CuspError("0/0 is not a cusp")
        if self.c < 0:
            raise CuspError("denominator must be nonnegative")
        if gcd(self.a, self.c) != 1:
            raise CuspError(f"{self.a}/{self.c} is not reduced")
        if self.c == 0 and self.a != 1:
            raise CuspError("infinity is represented as 1/0")

    @classmethod
    def make(cls, a: int, c: int) -> "Cusp":
        if c < 0:
            a, c = -a, -c
        if c == 0:
            return cls(1, 0)
        g = gcd(abs(a), c)
        return cls(a // g, c // g)

    @classmethod
    def infinity(cls) -> "Cusp":
        return cls(1, 0)

    @property
    def is_infinity(self) -> bool:
        return self.c == 0

    def as_fraction(self) -> Fraction:
        if self.is_infinity:
            raise CuspError("infinity is not a finite rational")
        return Fraction(self.a, self.c)

    def __str__(self) -> str:
        return f"{self.a}/{self.c}"

    def sort_key(self):
        return (self.c, self.a)


@dataclass(frozen=True)
class CuspTable:
    group: str  # "gamma0" or "gamma1"
    level: int
    entries: tuple[tuple[Cusp, int], ...]  # (cusp, fan width)

    def cusps(self) -> list[Cusp]:
        return [c for c, _ in self.entries]

    def width_of(self, cusp: Cusp) -> int:
        for c, w in self.entries:
            if c == cusp:
                return w
        raise CuspError(f"{cusp} is not a table representative")

    def to_json(self):
        return [{"cusp": str(c), "width": w} for c, w in self.entries]


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


# ---------------------------------------------------------------------------
# Gamma0(N)
# ---------------------------------------------------------------------------


def width_gamma0(N: int, cusp: Cusp) -> int:
    """Fan width N/(N, c^2); the c = 0 case falls out of gcd(N, 0) = N."""
    return N // gcd(N, cusp.c * cusp.c)


@lru_cache(maxsize=None)
def cusps_gamma0(N: int) -> CuspTable:
    """Divisor-indexed complete set of inequivalent cusps with widths."""
    if N < 1:
        raise CuspError("level must be a positive integer")
    entries = []
    for d in divisors(N):
        e = gcd(d, N // d)
        seen = set()
        for x in range(d) if d > 1 else [0]:
            if gcd(x, d) != 1 and d > 1:
                continue
            if x % e in seen:
                continue
            seen.add(x % e)
            cusp = Cusp.make(x, d)
            entries.append((cusp, width_gamma0(N, cusp)))
    entries.sort(key=lambda t: t[0].sort_key())
    return CuspTable("gamma0", N, tuple(entries))


def equivalent_gamma0(N: int, x: Cusp, y: Cusp) -> bool:
    """Gamma0(N)-equivalence of cusps via the bottom-row unit criterion.

    gamma in Gamma0(N) acts on column (a, c) mod N by (u*a + b*c, u^{-1}*c)
    for a unit u and arbitrary b, up to global sign.
    """
    g1 = gcd(x.c, N)
    for u in range(1, N + 1):
        if gcd(u, N) != 1:
            continue
        uinv = pow(u, -1, N)
        for s in (1, -1):
            if (y.c - s * uinv * x.c) % N == 0 and (y.a - s * u * x.a) % g1 == 0:
                return True
    return False


# ---------------------------------------------------------------------------
# Gamma1(N)
# ---------------------------------------------------------------------------


def equivalent_gamma1(N: int, x: Cusp, y: Cusp) -> bool:
    """a/c ~ a'/c' mod Gamma1(N) iff (a', c') = +-(a + n*c, c) mod N."""
    for n in range(N):
        an = (x.a + n * x.c) % N
        if (y.a - an) % N == 0 and (y.c - x.c) % N == 0:
            return True
        if (y.a + an) % N == 0 and (y.c + x.c) % N == 0:
            return True
    return False


def width_gamma1(N: int, cusp: Cusp) -> int:
    if N == 4 and gcd(cusp.c, 4) == 2:
        return 1
    return N // gcd(cusp.c, N)


@lru_cache(maxsize=None)
def _gamma1_orbit_key(N: int):
    """Map each coprime pair (a, c) mod N to a canonical orbit key."""
    keys = {}
    for c in range(N):
        for a in range(N):
            if gcd(gcd(a, c), N) != 1:
                continue
            if (a, c) in keys:
                continue
            orbit = set()
            for n in range(N):
                p = ((a + n * c) % N, c)
                orbit.add(p)
                orbit.add(((-p[0]) % N, (-c) % N))
            key = min(orbit)
            for member in orbit:
                keys[member] = key
    return keys


@lru_cache(maxsize=None)
def cusps_gamma1(N: int) -> CuspTable:
    """Complete set of inequivalent cusps mod Gamma1(N), smallest (c, a) reps."""
    if N < 1:
        raise CuspError("level must be a positive integer")
    keys = _gamma1_orbit_key(N)
    wanted = set(keys.values())
    reps: dict[tuple[int, int], Cusp] = {}
    for c in range(N + 1):
        if len(reps) == len(wanted):
            break
        seen_residues = set()
        candidates = [1] if c == 0 else range(4 * N + 1)
        for a in candidates:
            if gcd(a, c) != 1:
                continue
            a0 = a % N
            if a0 in seen_residues:
                continue
            seen_residues.add(a0)
            key = keys.get((a0, c % N))
            if key is None or key in reps:
                continue
            reps[key] = Cusp(a, c)
    if len(reps) != len(wanted):
        raise CuspError(f"orbit enumeration for Gamma1({N}) missed representatives")
    entries = [(cusp, width_gamma1(N, cusp)) for cusp in reps.values()]
    entries.sort(key=lambda t: t[0].sort_key())
    return CuspTable("gamma1", N, tuple(entries))


def cusp_table(group: str, N: int) -> CuspTable:
    if group == "gamma0":
        return cusps_gamma0(N)
    if group == "gamma1":
        return cusps_gamma1(N)
    raise CuspError(f"unknown group tag {group!r}")


def width(group: str, N: int, cusp: Cusp) -> int:
    if group == "gamma0":
        return width_gamma0(N, cusp)
    if group == "gamma1":
        return width_gamma1(N, cusp)
    raise CuspError(f"unknown group tag {group!r}")


def equivalent_to_infinity(group: str, N: int, cusp: Cusp) -> bool:
    if group == "gamma0":
        return cusp.c % N == 0
    return cusp.c % N == 0 and (cusp.a % N in (1 % N, (-1) % N))


def gamma0_index(N: int) -> int:
    """[Gamma(1) : Gamma0(N)] = N * prod_{p | N} (1 + 1/p)."""
    idx = Fraction(N)
    p, n = 2, N
    while p * p <= n:
        if n % p == 0:
            idx *= 1 + Fraction(1, p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        idx *= 1 + Fraction(1, n)
    return int(idx)
