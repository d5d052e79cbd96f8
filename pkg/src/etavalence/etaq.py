"""Eta-quotients, generalized eta-quotients, and theta blocks.

Symbolic product descriptions together with their exact q-expansions.
The building blocks:

  eta(d*tau)            = q^(d/24) * prod_{n>=1} (1 - q^(d*n))
  J_b  = (q^b; q^b)_oo                      (Euler product, pentagonal fill)
  J_{a,b} = (q^a, q^(b-a), q^b; q^b)_oo     (Jacobi triple product fill)
  eta_[delta,g]  = q^((delta/2) P2(g/delta)) prod_{m = +-g mod delta} (1 - q^m)

where P2 is the second periodic Bernoulli polynomial.  All exponent
bookkeeping is exact rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import ceil, gcd

from .series import ExactSeries, SeriesError


class QuotientError(SeriesError):
    """Malformed eta-quotient description."""


def periodic_bernoulli_2(x) -> Fraction:
    """P2(x) = {x}^2 - {x} + 1/6 with {x} the fractional part."""
    u = Fraction(x)
    u -= u.numerator // u.denominator  # floor for Fractions
    return u * u - u + Fraction(1, 6)


# ---------------------------------------------------------------------------
# theta blocks
# ---------------------------------------------------------------------------


def jb(b: int, prec: int) -> ExactSeries:
    """(q^b; q^b)_oo to q^prec, filled by Euler's pentagonal number theorem."""
    if b < 1:
        raise QuotientError("J_b needs b >= 1")
    coeffs = [0] * prec
    if prec > 0:
        coeffs[0] = 1
    k = 1
    while True:
        e1 = b * k * (3 * k - 1) // 2
        e2 = b * k * (3 * k + 1) // 2
        if e1 >= prec and e2 >= prec:
            break
        s = -1 if k % 2 else 1
        if e1 < prec:
            coeffs[e1] = s
        if e2 < prec:
            coeffs[e2] = s
        k += 1
    return ExactSeries(coeffs, lo=0, prec=prec)


def jab(a: int, b: int, prec: int) -> ExactSeries:
    """(q^a, q^(b-a), q^b; q^b)_oo = sum_k (-1)^k q^(b*k(k-1)/2 + a*k)."""
    if not 0 < a < b:
        raise QuotientError("J_{a,b} needs 0 < a < b")
    coeffs = [0] * prec
    k = 0
    while True:
        e = b * k * (k - 1) // 2 + a * k
        if e >= prec and k > 0:
            break
        if e < prec:
            coeffs[e] += -1 if k % 2 else 1
        k += 1
    k = -1
    while True:
        e = b * k * (k - 1) // 2 + a * k
        if e >= prec:
            break
        coeffs[e] += -1 if k % 2 else 1
        k -= 1
    return ExactSeries(coeffs, lo=0, prec=prec)


def j_quotient(exps: dict[int, int], prec: int) -> ExactSeries:
    """prod_b J_b^{m_b} expanded to q^prec (order-zero unit series)."""
    num = ExactSeries.one(prec)
    den = ExactSeries.one(prec)
    for b, m in sorted(exps.items()):
        if m > 0:
            num = num * jb(b, prec).pow(m)
        elif m < 0:
            den = den * jb(b, prec).pow(-m)
    return num * den.invert()


def eta_expand(d: int, precision) -> ExactSeries:
    """q-expansion of eta(d*tau): leading exponent d/24, then pentagonal tail."""
    shift = Fraction(d, 24)
    rel = max(0, ceil(Fraction(precision) - shift))
    return jb(d, rel).shift(shift)


def _progression_product(delta: int, residue: int, prec: int) -> ExactSeries:
    """prod over m > 0, m = residue (mod delta), of (1 - q^m), to q^prec."""
    coeffs = [0] * max(prec, 1)
    coeffs[0] = 1
    r = residue % delta
    for m in range(r or delta, prec, delta):
        for i in range(prec - 1, m - 1, -1):
            coeffs[i] -= coeffs[i - m]
    return ExactSeries(coeffs, lo=0, prec=prec)


# ---------------------------------------------------------------------------
# symbolic quotients
# ---------------------------------------------------------------------------


def _canonical_exps(mapping, validate):
    out = []
    for key, m in sorted(mapping.items()):
        if m:
            validate(key, m)
            out.append((key, m))
    return tuple(out)


@dataclass(frozen=True)
class EtaQuotient:
    """prod_{d | N} eta(d*tau)^{m_d} at ambient level N.

    An empty exponent map is the constant 1 (useful as the constant term of
    an identity).
    """

    level: int
    exps: tuple[tuple[int, int], ...]

    @classmethod
    def make(cls, level: int, exps: dict[int, int]) -> "EtaQuotient":
        if level < 1:
            raise QuotientError("level must be a positive integer")

        def validate(d, m):
            if d < 1 or level % d != 0:
                raise QuotientError(f"divisor {d} does not divide level {level}")

        return cls(level, _canonical_exps(exps, validate))

    @property
    def exponent_map(self) -> dict[int, int]:
        return dict(self.exps)

    def order_at_infinity(self) -> Fraction:
        """Leading q-exponent sum_d d*m_d / 24."""
        return Fraction(sum(d * m for d, m in self.exps), 24)

    def expand(self, precision) -> ExactSeries:
        shift = self.order_at_infinity()
        rel = max(1, ceil(Fraction(precision) - shift))
        return j_quotient(self.exponent_map, rel).shift(shift)

    def dilate(self, k: int, level: int | None = None) -> "EtaQuotient":
        """Substitute tau -> k*tau (divisors scale by k)."""
        return EtaQuotient.make(level if level else k * self.level,
                                {k * d: m for d, m in self.exps})

    def at_level(self, level: int) -> "EtaQuotient":
        return EtaQuotient.make(level, self.exponent_map)

    def __mul__(self, other: "EtaQuotient") -> "EtaQuotient":
        if self.level % other.level and other.level % self.level:
            raise QuotientError("incomparable levels")
        merged = self.exponent_map
        for d, m in other.exps:
            merged[d] = merged.get(d, 0) + m
        return EtaQuotient.make(max(self.level, other.level), merged)

    def pow(self, k: int) -> "EtaQuotient":
        return EtaQuotient.make(self.level, {d: k * m for d, m in self.exps})


@dataclass(frozen=True)
class GeneralizedEtaQuotient:
    """prod eta_[delta,g]^{r_{delta,g}} at ambient level N.

    The q-product runs over both congruence branches m = +g and m = -g mod
    delta; at the symmetric index g = delta/2 the branches coincide and the
    single progression is counted twice.  That squaring is what makes a
    half-integer exponent legal there: eta_[delta,delta/2]^(1/2) expands as
    one copy of (q^(delta/2); q^delta)_oo with a rational q-prefactor.
    """

    level: int
    exps: tuple[tuple[tuple[int, int], Fraction], ...]

    @classmethod
    def make(cls, level: int, exps: dict[tuple[int, int], int | Fraction]) -> "GeneralizedEtaQuotient":
        if level < 1:
            raise QuotientError("level must be a positive integer")

        def validate(key, r):
            delta, g = key
            if delta < 1 or level % delta != 0:
                raise QuotientError(f"delta {delta} does not divide level {level}")
            if not 0 < g < delta:
                raise QuotientError(f"need 0 < g < delta, got ({delta},{g})")
            if r.denominator == 2 and 2 * g != delta:
                raise QuotientError(f"half-integer exponent only allowed at g = delta/2, got ({delta},{g})")
            if r.denominator > 2:
                raise QuotientError("exponents must be integers or half-integers")

        frac = {k: Fraction(v) for k, v in exps.items()}
        return cls(level, _canonical_exps(frac, validate))

    @property
    def exponent_map(self) -> dict[tuple[int, int], Fraction]:
        return dict(self.exps)

    def order_at_infinity(self) -> Fraction:
        """Leading q-exponent sum r * (delta/2) * P2(g/delta)."""
        return sum(
            (r * Fraction(delta, 2) * periodic_bernoulli_2(Fraction(g, delta))
             for (delta, g), r in self.exps),
            Fraction(0),
        )

    def expand(self, precision) -> ExactSeries:
        shift = self.order_at_infinity()
        rel = max(1, ceil(Fraction(precision) - shift))
        out = ExactSeries.one(rel)
        for (delta, g), r in self.exps:
            if 2 * g == delta:
                # both branches coincide: one progression at doubled exponent
                out = out * _progression_product(delta, g, rel).pow(int(2 * r))
            else:
                base = _progression_product(delta, g, rel) * _progression_product(
                    delta, delta - g, rel
                )
                out = out * base.pow(int(r))
        return out.shift(shift)

    def __mul__(self, other: "GeneralizedEtaQuotient") -> "GeneralizedEtaQuotient":
        if self.level % other.level and other.level % self.level:
            raise QuotientError("incomparable levels")
        merged = self.exponent_map
        for key, r in other.exps:
            merged[key] = merged.get(key, Fraction(0)) + r
        return GeneralizedEtaQuotient.make(max(self.level, other.level), merged)

    def pow(self, k: int) -> "GeneralizedEtaQuotient":
        return GeneralizedEtaQuotient.make(self.level, {key: k * r for key, r in self.exps})


Quotient = EtaQuotient | GeneralizedEtaQuotient


# ---------------------------------------------------------------------------
# linear combinations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Term:
    """coef * q^shift * quotient; quotient None means the constant 1."""

    coef: Fraction
    quotient: Quotient | None = None
    shift: Fraction = Fraction(0)

    def order_at_infinity(self) -> Fraction:
        base = self.quotient.order_at_infinity() if self.quotient else Fraction(0)
        return base + self.shift

    def expand(self, precision) -> ExactSeries:
        if self.quotient is None:
            s = ExactSeries.one(Fraction(precision) - self.shift)
        else:
            s = self.quotient.expand(Fraction(precision) - self.shift)
        return s.shift(self.shift)


@dataclass(frozen=True)
class LinearCombination:
    level: int
    terms: tuple[Term, ...]

    @classmethod
    def make(cls, level, terms) -> "LinearCombination":
        built = []
        for t in terms:
            if not isinstance(t, Term):
                coef, quotient = t[0], t[1]
                shift = t[2] if len(t) > 2 else 0
                t = Term(Fraction(coef), quotient, Fraction(shift))
            if t.quotient is not None and t.quotient.level != level:
                raise QuotientError(
                    f"term level {t.quotient.level} differs from ambient level {level}"
                )
            built.append(t)
        if not built:
            raise QuotientError("empty linear combination")
        return cls(level, tuple(built))

    def expand(self, precision) -> ExactSeries:
        """Exact expansion of sum coef * q^shift * term to the given bound.

        Rational coefficients are cleared through a common denominator and
        divided back out at the end; the result must have integer
        coefficients or NonIntegralCoefficient is raised.
        """
        den = 1
        for t in self.terms:
            den = den * t.coef.denominator // gcd(den, t.coef.denominator)
        acc = ExactSeries.zero(precision)
        for t in self.terms:
            c = int(t.coef * den)
            acc = acc + t.expand(precision).scale(c)
        if den == 1:
            return acc
        return acc.scale(Fraction(1, den))


def expand_combination(combination: LinearCombination, precision) -> ExactSeries:
    return combination.expand(precision)


def gen_expand(quotient: GeneralizedEtaQuotient, precision) -> ExactSeries:
    return quotient.expand(precision)


def expand(quotient: EtaQuotient, precision) -> ExactSeries:
    return quotient.expand(precision)


# ---------------------------------------------------------------------------
# named level-10/20/50/100 objects used throughout the U5 calculus
# ---------------------------------------------------------------------------

#: Hauptmodul of the genus-zero group of level 10:
#: t = eta(tau)^2 eta(10 tau)^4 / (eta(2 tau)^4 eta(5 tau)^2).
HAUPTMODUL_EXPS = {1: 2, 10: 4, 2: -4, 5: -2}


def hauptmodul_quotient(level: int = 10) -> EtaQuotient:
    return EtaQuotient.make(level, HAUPTMODUL_EXPS)


@lru_cache(maxsize=None)
def hauptmodul_series(prec: int) -> ExactSeries:
    """t = q - 2q^2 + 3q^3 - 6q^4 + 11q^5 - ... to q^prec."""
    return hauptmodul_quotient().expand(prec)
