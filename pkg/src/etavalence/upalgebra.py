"""U5 operator calculus on the level-10 Hauptmodul t.

The modular equation t^5 + sum_j sigma_j(5 tau) t^j = 0 turns U5 into a
five-term recursion on Laurent polynomials in t: once U5(u t^k) = v p_k(t)
is known for five consecutive k, it is known for all larger k via

    p_k = - sum_{j=0..4} sigma_j * p_{k+j-5}.

The ten seed identities (U_A on P_A t^k and U_B on P_B t^k, -4 <= k <= 0)
are hard-coded below and re-certified at construction both by the
valence-formula U_p prover and by raw series comparison.  A valuation ledger
tracks the 5-adic size of every coefficient; the sigma coefficients satisfy
nu5(s(j,l)) >= floor((3l+j)/4), which is what drives the growth of 5-powers
through the recursion.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import ceil

from .etaq import EtaQuotient, LinearCombination, Term, hauptmodul_series
from .prover import CertificationFailed, ProofCertificate, prove_eta_identity, prove_up_identity
from .series import ExactSeries, SeriesError

INF = float("inf")  # nu5 sentinel for a vanished coefficient


class ReductionError(SeriesError):
    pass


class NonTerminating(ReductionError):
    """Leading-term elimination ran past the precision-implied degree bound."""


class ResidualNonzero(ReductionError):
    """The input was not v * p(t) within the available precision."""


def nu5(n: int):
    """5-adic valuation; +inf for 0."""
    if n == 0:
        return INF
    v = 0
    while n % 5 == 0:
        n //= 5
        v += 1
    return v


# ---------------------------------------------------------------------------
# Laurent polynomials in t
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TPoly:
    """Laurent polynomial in t with integer coefficients, finite support."""

    coeffs: tuple[tuple[int, int], ...]  # sorted (power, coefficient), coefficient != 0

    @classmethod
    def make(cls, mapping: dict[int, int]) -> "TPoly":
        return cls(tuple(sorted((n, c) for n, c in mapping.items() if c)))

    @classmethod
    def zero(cls) -> "TPoly":
        return cls(())

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def as_dict(self) -> dict[int, int]:
        return dict(self.coeffs)

    def ord_t(self):
        return self.coeffs[0][0] if self.coeffs else None

    def deg_t(self):
        return self.coeffs[-1][0] if self.coeffs else None

    def __add__(self, other: "TPoly") -> "TPoly":
        out = self.as_dict()
        for n, c in other.coeffs:
            out[n] = out.get(n, 0) + c
        return TPoly.make(out)

    def __neg__(self) -> "TPoly":
        return TPoly(tuple((n, -c) for n, c in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, int):
            return TPoly(tuple((n, c * other) for n, c in self.coeffs)) if other else TPoly.zero()
        out: dict[int, int] = {}
        for n, c in self.coeffs:
            for m, d in other.coeffs:
                out[n + m] = out.get(n + m, 0) + c * d
        return TPoly.make(out)

    __rmul__ = __mul__

    def shift(self, k: int) -> "TPoly":
        return TPoly(tuple((n + k, c) for n, c in self.coeffs))

    def valuations(self) -> dict[int, int | float]:
        return {n: nu5(c) for n, c in self.coeffs}

    def evaluate(self, t: ExactSeries) -> ExactSeries:
        """p(t) for a series t of order 1, by Horner from the top degree."""
        if self.is_zero:
            return ExactSeries.zero(t.precision)
        lo = self.ord_t()
        table = self.as_dict()
        acc = ExactSeries.zero(t.precision)
        for n in range(self.deg_t(), lo - 1, -1):
            acc = acc * t
            c = table.get(n, 0)
            if c:
                acc = acc + ExactSeries.monomial(c, 0, acc.precision)
        if lo:
            acc = acc * t.pow(lo)
        return acc


# ---------------------------------------------------------------------------
# the sigma set and the five-term recursion
# ---------------------------------------------------------------------------

_SIGMA_DATA = (
    {1: -1},
    {1: 2 * 5, 2: -5},
    {1: -7 * 5, 2: 2 * 25, 3: -25},
    {1: 12 * 5, 2: -7 * 25, 3: 2 * 125, 4: -125},
    {1: -11 * 5, 2: 12 * 25, 3: -7 * 125, 4: 2 * 625, 5: -625},
)


@lru_cache(maxsize=None)
def sigma_set() -> tuple[TPoly, ...]:
    """The five reduction polynomials sigma_0..sigma_4, valuation-checked."""
    sigmas = tuple(TPoly.make(d) for d in _SIGMA_DATA)
    for j, s in enumerate(sigmas):
        for l, c in s.coeffs:
            if nu5(c) < (3 * l + j) // 4:
                raise CertificationFailed(
                    f"sigma_{j} coefficient at t^{l} violates its 5-adic bound"
                )
    return sigmas


def fundamental_step(window) -> TPoly:
    """p_k from the five predecessors (p_{k-5}, ..., p_{k-1})."""
    window = tuple(window)
    if len(window) != 5:
        raise ValueError("need exactly five consecutive polynomials")
    sigmas = sigma_set()
    acc = TPoly.zero()
    for j in range(5):
        acc = acc + sigmas[j] * window[j]
    return -acc


def extend_table(seeds: dict[int, TPoly], kmax: int) -> dict[int, TPoly]:
    """Extend {k: p_k} upward to kmax using the five-term recursion."""
    table = dict(seeds)
    k0 = max(seeds) + 1
    for k in range(k0, kmax + 1):
        table[k] = fundamental_step([table[k + j - 5] for j in range(5)])
    return table


# ---------------------------------------------------------------------------
# the four levels of the iteration: P_A, P_B, A, B
# ---------------------------------------------------------------------------

P_A_TERMS = ((1, {10: 2, 5: 1, 2: 6, 20: -1, 4: -3, 1: -5}),
             (-4, {20: 1, 5: 2, 4: 3, 10: -1, 2: -3, 1: -2}))
P_B_TERMS = ((1, {10: 6, 2: 2, 1: 1, 20: -3, 5: -5, 4: -1}),
             (4, {20: 3, 4: 1, 1: 2, 10: -3, 5: -2, 2: -1}))
A_EXPS = {50: 2, 1: 4, 25: -4, 2: -2}
B_EXPS = {25: 1, 1: -1}
T_EXPS = {1: 2, 10: 4, 2: -4, 5: -2}


def _combo(level: int, parts, extra: dict[int, int] | None = None) -> LinearCombination:
    terms = []
    for coef, exps in parts:
        merged = dict(exps)
        for d, m in (extra or {}).items():
            merged[d] = merged.get(d, 0) + m
        terms.append(Term(Fraction(coef), EtaQuotient.make(level, merged)))
    return LinearCombination.make(level, terms)


def p_a_combination(level: int = 20) -> LinearCombination:
    return _combo(level, P_A_TERMS)


def p_b_combination(level: int = 20) -> LinearCombination:
    return _combo(level, P_B_TERMS)


@lru_cache(maxsize=None)
def p_a_series(prec: int) -> ExactSeries:
    return p_a_combination().expand(prec)


@lru_cache(maxsize=None)
def p_b_series(prec: int) -> ExactSeries:
    return p_b_combination().expand(prec)


@lru_cache(maxsize=None)
def a_series(prec: int) -> ExactSeries:
    return EtaQuotient.make(100, A_EXPS).expand(prec)


@lru_cache(maxsize=None)
def b_series(prec: int) -> ExactSeries:
    return EtaQuotient.make(100, B_EXPS).expand(prec)


def u_p_series(f: ExactSeries, p: int) -> ExactSeries:
    """Series-level U_p: keep the coefficients at exponent multiples of p."""
    return f.u_p(p)


def u_a(f: ExactSeries) -> ExactSeries:
    """U_5(A * f) with precision propagated through the product."""
    return (a_series(ceil(f.precision)) * f).u_p(5)


def u_b(f: ExactSeries) -> ExactSeries:
    """U_5(B * f); B has a simple pole at infinity, so expand one term deeper."""
    return (b_series(ceil(f.precision) + 1) * f).u_p(5)


# ---------------------------------------------------------------------------
# seed tables (Group I: U_A(P_A t^k), Group II: U_B(P_B t^k), -4 <= k <= 0)
# ---------------------------------------------------------------------------

GROUP_I_DATA = {
    0: {5: 5**4, 4: -7 * 5**3, 3: 14 * 5**2, 2: -2 * 5**2, 1: 1},
    -1: {1: -1},
    -2: {2: -5},
    -3: {3: -(5**2)},
    -4: {4: -(5**3)},
}
GROUP_II_DATA = {
    0: {0: 1},
    -1: {1: -5, 0: 2},
    -2: {2: 5**2, 1: -8 * 5, 0: 8},
    -3: {3: 5**3, 1: -34 * 5, 0: 34},
    -4: {4: -(5**4), 3: 16 * 5**3, 2: -36 * 5**2, 1: -128 * 5, 0: 6 * 5**2},
}


def _t_power_map(k: int) -> dict[int, int]:
    return {d: k * m for d, m in T_EXPS.items()}


def seed_identity(group: str, k: int):
    """The U_5 identity behind one seed entry, as (g_combo, f_combo, poly).

    Group I:  U_5(A * P_A * t^k) = P_B * p(t) at levels (100, 20).
    Group II: U_5(B * P_B * t^k) = P_A * p(t).
    """
    if group == "I":
        left, right, poly = P_A_TERMS, P_B_TERMS, TPoly.make(GROUP_I_DATA[k])
        outer = A_EXPS
    elif group == "II":
        left, right, poly = P_B_TERMS, P_A_TERMS, TPoly.make(GROUP_II_DATA[k])
        outer = B_EXPS
    else:
        raise ValueError("group must be 'I' or 'II'")
    g_terms = []
    for coef, exps in left:
        merged = dict(exps)
        for d, m in list(outer.items()) + list(_t_power_map(k).items()):
            merged[d] = merged.get(d, 0) + m
        g_terms.append(Term(Fraction(coef), EtaQuotient.make(100, merged)))
    f_terms = []
    for n, c in poly.coeffs:
        for coef, exps in right:
            merged = dict(exps)
            for d, m in _t_power_map(n).items():
                merged[d] = merged.get(d, 0) + m
            f_terms.append(Term(Fraction(c * coef), EtaQuotient.make(20, merged)))
    return (
        LinearCombination.make(100, g_terms),
        LinearCombination.make(20, f_terms),
        poly,
    )


def certify_seed(group: str, k: int, series_depth: int = 50) -> ProofCertificate:
    """Valence-formula proof plus raw series comparison for one seed entry."""
    g_combo, f_combo, poly = seed_identity(group, k)
    cert = prove_up_identity(5, g_combo, f_combo)
    if not cert.proven:
        raise CertificationFailed(f"group {group} seed k={k}: prover verdict {cert.verdict}")
    left = g_combo.expand(5 * series_depth).u_p(5)
    prefactor = p_b_series if group == "I" else p_a_series
    right = prefactor(series_depth + 2) * poly.evaluate(hauptmodul_series(series_depth + 6))
    diff = left - right
    if not diff.is_zero or diff.precision < series_depth:
        raise CertificationFailed(
            f"group {group} seed k={k}: series mismatch near q^{diff.order() if not diff.is_zero else diff.precision}"
        )
    return cert


@lru_cache(maxsize=1)
def initial_tables(certify: bool = True):
    """The two certified seed tables {k: p_k}, -4 <= k <= 0."""
    group1 = {k: TPoly.make(d) for k, d in GROUP_I_DATA.items()}
    group2 = {k: TPoly.make(d) for k, d in GROUP_II_DATA.items()}
    if certify:
        for k in sorted(GROUP_I_DATA):
            certify_seed("I", k)
            certify_seed("II", k)
    return group1, group2


# ---------------------------------------------------------------------------
# reduction of a series to a t-polynomial multiple of a prefactor
# ---------------------------------------------------------------------------


def reduce_to_tpoly(s: ExactSeries, v: ExactSeries, floor_t_order: int) -> TPoly:
    """The unique Laurent polynomial p with s = v * p(t), ord_t(p) >= floor.

    Iterated leading-term elimination: divide by v, then repeatedly strip
    c * t^n off the front (t is monic of q-order 1, so the leading q-exponent
    of the remainder names the next t-power directly).
    """
    w = s * v.invert()
    if w.is_zero:
        return TPoly.zero()
    degree_bound = ceil(w.precision) - 1
    t = hauptmodul_series(max(ceil(w.precision), 2))
    t_pow: dict[int, ExactSeries] = {}
    out: dict[int, int] = {}
    floor = floor_t_order
    while not w.is_zero:
        n = w.order()
        if n.denominator != 1:
            raise ResidualNonzero(f"remainder has fractional leading exponent {n}")
        n = int(n)
        if n < floor:
            raise ResidualNonzero(
                f"remainder has q-order {n} below the promised t-order floor {floor_t_order}"
            )
        if n > degree_bound:
            raise NonTerminating(
                f"support would exceed the precision-implied degree bound {degree_bound}"
            )
        c = w.leading_coefficient()
        if n not in t_pow:
            t_pow[n] = t.pow(n)
        out[n] = c
        w = w - t_pow[n].scale(c)
        floor = n + 1
    return TPoly.make(out)


# ---------------------------------------------------------------------------
# ledger utilities
# ---------------------------------------------------------------------------


def valuation_ledger(family: dict[int, TPoly]) -> dict[tuple[int, int], int | float]:
    """Map (k, n) -> nu5 of the t^n coefficient of p_k."""
    return {(k, n): nu5(c) for k, p in family.items() for n, c in p.coeffs}


def check_valuation_bounds(ledger, bound) -> bool:
    """True iff every ledger entry meets bound(k, n); inf always passes."""
    return all(v >= bound(k, n) for (k, n), v in ledger.items())


# ---------------------------------------------------------------------------
# the modular equation itself
# ---------------------------------------------------------------------------


def modular_equation_combination(mutate: tuple[int, int, int] | None = None) -> LinearCombination:
    """1 + sum_j sigma_j(5 tau) t^(j-5) = 0 as eta-quotients on level 50.

    `mutate` replaces the (j, l) coefficient for soundness testing.
    """
    terms = [Term(Fraction(1), None)]
    for j, data in enumerate(_SIGMA_DATA):
        for l, s in data.items():
            if mutate and mutate[:2] == (j, l):
                s = mutate[2]
            exps = {5 * d: l * m for d, m in T_EXPS.items()}
            for d, m in _t_power_map(j - 5).items():
                exps[d] = exps.get(d, 0) + m
            terms.append(Term(Fraction(s), EtaQuotient.make(50, exps)))
    return LinearCombination.make(50, terms)


def verify_modular_equation(series_depth: int = 200) -> ProofCertificate:
    """Prove the t-recursion's modular equation and confirm it numerically."""
    cert = prove_eta_identity(modular_equation_combination())
    if not cert.proven:
        raise CertificationFailed(f"modular equation prover verdict: {cert.verdict}")
    t = hauptmodul_series(series_depth + 6)
    t5 = t.truncate((series_depth + 6) // 5 + 1).substitute_power(5)
    residual = t.pow(5)
    for j, data in enumerate(_SIGMA_DATA):
        residual = residual + TPoly.make(data).evaluate(t5) * t.pow(j)
    if not residual.is_zero or residual.precision < series_depth:
        raise CertificationFailed("modular equation residual is nonzero")
    return cert
