"""Modularity tests and exact cusp orders for eta-quotients.

Modularity on Gamma0(N) is decided by the four classical divisor-sum
conditions; invariant orders at cusps come from the gcd-weighted divisor sum

    ord(f; b/c) = sum_{d | N} (d, c)^2 m_d / (24 d),

and the generalized counterpart

    ord(eta_[delta,g]; a/c) = (eps^2 / (2 delta)) P2(a g / eps),  eps = (delta, c).

ORD denotes the width-scaled order used by the valence formula; reports carry
both.  The generalized modularity test implements sufficient conditions only:
a False answer means "not certified", not "proved non-modular".
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

from .cusps import Cusp, CuspTable, cusp_table, width
from .etaq import (
    EtaQuotient,
    GeneralizedEtaQuotient,
    LinearCombination,
    Term,
    periodic_bernoulli_2,
)


class NotModular(Exception):
    """A term failed its modularity test, so order formulas do not apply."""


def _is_square(n: int) -> bool:
    if n < 0:
        return False
    r = isqrt(n)
    return r * r == n


def newman_conditions(f: EtaQuotient) -> list[str]:
    """Violated conditions for f to be a modular function on Gamma0(level)."""
    N = f.level
    exps = f.exponent_map
    violations = []
    if sum(exps.values()) != 0:
        violations.append("sum of exponents is nonzero")
    if sum(d * m for d, m in exps.items()) % 24 != 0:
        violations.append("sum of d*m_d is not 0 mod 24")
    if sum((N // d) * m for d, m in exps.items()) % 24 != 0:
        violations.append("sum of (N/d)*m_d is not 0 mod 24")
    prod = 1
    for d, m in exps.items():
        prod *= d ** abs(m)
    if not _is_square(prod):
        violations.append("product of d^|m_d| is not a square")
    return violations


def newman_is_modular(f: EtaQuotient) -> tuple[bool, list[str]]:
    violations = newman_conditions(f)
    return not violations, violations


def ligozat_ord(f: EtaQuotient, cusp: Cusp) -> Fraction:
    """Invariant order of a Newman-modular eta-quotient at a cusp.

    gcd(d, 0) = d makes the same sum valid at infinity, where it reduces to
    the leading q-exponent sum d*m_d/24.
    """
    ok, violations = newman_is_modular(f)
    if not ok:
        raise NotModular(f"eta-quotient is not modular on Gamma0({f.level}): {violations}")
    c = cusp.c
    return sum(
        (Fraction(gcd(d, c) ** 2 * m, 24 * d) for d, m in f.exps),
        Fraction(0),
    )


def robins_is_modular(f: GeneralizedEtaQuotient) -> bool:
    """Sufficient conditions for modularity on Gamma1(level).

    Both divisor sums must be even integers; P2(0) = 1/6.
    """
    N = f.level
    cond1 = sum(
        (delta * periodic_bernoulli_2(Fraction(g, delta)) * r for (delta, g), r in f.exps),
        Fraction(0),
    )
    cond2 = sum(
        (Fraction(N, delta) * Fraction(1, 6) * r for (delta, g), r in f.exps),
        Fraction(0),
    )
    return all(v.denominator == 1 and v.numerator % 2 == 0 for v in (cond1, cond2))


def robins_ord(delta: int, g: int, cusp: Cusp) -> Fraction:
    """Invariant order of eta_[delta,g] at cusp a/c."""
    if not 0 < g < delta:
        raise ValueError("need 0 < g < delta")
    c = cusp.c
    eps = gcd(delta, c) if c else delta
    return Fraction(eps * eps, 2 * delta) * periodic_bernoulli_2(Fraction(cusp.a * g, eps))


def gen_ord(f: GeneralizedEtaQuotient, cusp: Cusp) -> Fraction:
    """Invariant order of a generalized eta-quotient at a cusp."""
    return sum((r * robins_ord(delta, g, cusp) for (delta, g), r in f.exps), Fraction(0))


def invariant_order(term, cusp: Cusp) -> Fraction:
    if isinstance(term, Term):
        base = invariant_order(term.quotient, cusp) if term.quotient else Fraction(0)
        if term.shift:
            raise NotModular("monomial-shifted terms have no cusp order formula")
        return base
    if term is None:
        return Fraction(0)
    if isinstance(term, EtaQuotient):
        return ligozat_ord(term, cusp)
    return gen_ord(term, cusp)


@dataclass(frozen=True)
class OrderReport:
    """Per-cusp order data for one term of an identity."""

    term_id: str
    group: str
    level: int
    rows: tuple[tuple[str, int, Fraction, Fraction], ...]  # (cusp, width, ord, ORD)

    def to_json(self):
        return {
            "term": self.term_id,
            "group": self.group,
            "level": self.level,
            "orders": [
                {"cusp": c, "width": w, "ord": str(o), "ORD": str(O)}
                for c, w, o, O in self.rows
            ],
        }


def order_report(term, term_id: str, table: CuspTable) -> OrderReport:
    rows = []
    for cusp, w in table.entries:
        o = invariant_order(term, cusp)
        rows.append((str(cusp), w, o, w * o))
    return OrderReport(term_id, table.group, table.level, tuple(rows))


def order_table(combination: LinearCombination, table: CuspTable) -> list[OrderReport]:
    return [
        order_report(t.quotient, f"term{i}", table)
        for i, t in enumerate(combination.terms)
    ]
