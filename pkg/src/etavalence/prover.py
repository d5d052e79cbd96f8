"""Valence-formula certification of eta-quotient identities.

Three proving routes share the same skeleton: check modularity of every
term, tabulate exact cusp orders (or lower bounds for U_p images), sum the
per-cusp minima over the non-infinite cusps into the constant B, and then
verify that the q-expansion of the combination vanishes far enough past the
bound.  Because the valence formula is an if-and-only-if statement, a
certificate is sound: vanishing through the bound forces the identity, and
any corrupted identity must leave a nonzero coefficient inside the window.

Conventions recorded in each certificate:
  * gamma0 / U_p route: B = sum over cusps != oo of min ORD (typically
    negative); coefficients must vanish for exponents <= floor(-B).
  * gamma1 route: the identity is normalized to "sum + 1 = 0"; each cusp
    minimum is additionally capped at 0, and the reported B is the positive
    vanishing threshold (-1 times the capped sum), so coefficients must
    vanish for exponents <= floor(B).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor, gcd

from .cusps import Cusp, CuspTable, cusps_gamma0, cusps_gamma1, equivalent_to_infinity, width_gamma0
from .etaq import EtaQuotient, GeneralizedEtaQuotient, LinearCombination, Term
from .orders import NotModular, gen_ord, ligozat_ord, newman_is_modular, robins_is_modular
from .series import ExactSeries, PrecisionExceeded

CERTIFICATE_FORMAT = "etavalence-certificate/1"

VERDICT_PROVEN = "proven"
VERDICT_COUNTEREXAMPLE = "counterexample"
VERDICT_INSUFFICIENT = "insufficient-precision"

#: Interior points contribute nothing to the valence sum for these functions.
NO_INTERIOR_ZEROS = "eta-products are zero-free on the upper half-plane"


class ProverError(Exception):
    pass


class NormalizationRequired(ProverError):
    """The gamma1 route needs a constant term and none could be produced."""


class CaseError(ProverError):
    """U_p preconditions (primality, p | N) are not satisfied."""


class CertificationFailed(ProverError):
    """A construction-time self-check did not come back proven."""


def _frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _term_desc(term: Term) -> str:
    q = term.quotient
    if q is None:
        body = "1"
    elif isinstance(q, EtaQuotient):
        body = " ".join(f"eta({d}t)^{m}" for d, m in q.exps)
    else:
        body = " ".join(f"eta[{d},{g}]^{_frac_str(r)}" for (d, g), r in q.exps)
    shift = f" q^{_frac_str(term.shift)}" if term.shift else ""
    return f"{_frac_str(term.coef)} *{shift} {body}"


@dataclass
class ProofCertificate:
    """Machine-checkable record of one valence-formula proof."""

    group: str
    level: int
    kind: str  # "eta", "gen", or "up"
    terms: list[str]
    cusps: list[str]
    widths: list[int]
    ord_table: list[list[Fraction]]  # invariant orders, per term per cusp
    big_ord_table: list[list[Fraction]]  # width-scaled orders
    lower_bound_table: list[list[Fraction]] | None  # U_p images only
    sum_min: Fraction  # literal per-cusp-minimum sum over cusps != oo
    b_value: Fraction  # headline B in the route's reporting convention
    vanish_through: int  # all exponents <= this must vanish
    required_depth: int  # vanish_through + 1 safety margin
    verified_through: Fraction  # expansion guaranteed strictly below this
    verdict: str
    counterexample: tuple[Fraction, int] | None = None
    boundary_flags: list[str] = field(default_factory=list)
    assumptions: list[str] = field(default_factory=lambda: [NO_INTERIOR_ZEROS])
    notes: list[str] = field(default_factory=list)

    @property
    def proven(self) -> bool:
        return self.verdict == VERDICT_PROVEN

    def to_json(self) -> dict:
        def table(rows):
            return [[_frac_str(x) for x in row] for row in rows]

        out = {
            "format": CERTIFICATE_FORMAT,
            "group": self.group,
            "level": self.level,
            "kind": self.kind,
            "terms": self.terms,
            "cusps": self.cusps,
            "widths": self.widths,
            "invariant_orders": table(self.ord_table),
            "orders": table(self.big_ord_table),
            "sum_min": _frac_str(self.sum_min),
            "B": _frac_str(self.b_value),
            "vanish_through": self.vanish_through,
            "required_depth": self.required_depth,
            "verified_through": _frac_str(self.verified_through),
            "verdict": self.verdict,
            "assumptions": self.assumptions,
            "boundary_flags": self.boundary_flags,
            "notes": self.notes,
        }
        if self.lower_bound_table is not None:
            out["up_lower_bounds"] = table(self.lower_bound_table)
        if self.counterexample is not None:
            e, c = self.counterexample
            out["counterexample"] = {"exponent": _frac_str(e), "coefficient": str(c)}
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


# ---------------------------------------------------------------------------
# shared machinery
# ---------------------------------------------------------------------------


def _scan_vanishing(series: ExactSeries, vanish_through: int):
    """First nonzero coefficient at exponent <= vanish_through, or None."""
    for e, c in series.terms():
        if e > vanish_through:
            break
        return (e, c)
    return None


def _finish(cert: ProofCertificate, residual: ExactSeries) -> ProofCertificate:
    cert.verified_through = residual.precision
    if residual.precision <= cert.vanish_through:
        cert.verdict = VERDICT_INSUFFICIENT
        return cert
    hit = _scan_vanishing(residual, cert.vanish_through)
    if hit is None:
        cert.verdict = VERDICT_PROVEN
    else:
        cert.verdict = VERDICT_COUNTEREXAMPLE
        cert.counterexample = hit
    return cert


def _depth_guard(required: int, depth_cap: int | None) -> int:
    if depth_cap is not None and depth_cap < required:
        raise PrecisionExceeded(
            f"proof needs expansion depth {required}, caller capped at {depth_cap}"
        )
    return required


# ---------------------------------------------------------------------------
# classical eta-product identities on Gamma0(N)
# ---------------------------------------------------------------------------


def prove_eta_identity(
    combination: LinearCombination, depth_cap: int | None = None
) -> ProofCertificate:
    """Certify sum coef_j * f_j = 0 for eta-quotients modular on Gamma0(N)."""
    N = combination.level
    for term in combination.terms:
        if term.shift:
            raise NotModular("monomial-shifted terms are not modular functions")
        if term.quotient is None:
            continue
        ok, violations = newman_is_modular(term.quotient)
        if not ok:
            raise NotModular(f"term {_term_desc(term)} not modular on Gamma0({N}): {violations}")
    table = cusps_gamma0(N)
    ords = [
        [ligozat_ord(t.quotient, c) if t.quotient else Fraction(0) for c, _ in table.entries]
        for t in combination.terms
    ]
    big = [[w * o for (c, w), o in zip(table.entries, row)] for row in ords]
    sum_min = Fraction(0)
    for j, (cusp, w) in enumerate(table.entries):
        if equivalent_to_infinity("gamma0", N, cusp):
            continue
        sum_min += min(row[j] for row in big)
    vanish_through = floor(-sum_min)
    required = vanish_through + 1
    _depth_guard(required, depth_cap)
    residual = combination.expand(required + 1)
    cert = ProofCertificate(
        group="gamma0",
        level=N,
        kind="eta",
        terms=[_term_desc(t) for t in combination.terms],
        cusps=[str(c) for c in table.cusps()],
        widths=[w for _, w in table.entries],
        ord_table=ords,
        big_ord_table=big,
        lower_bound_table=None,
        sum_min=sum_min,
        b_value=sum_min,
        vanish_through=vanish_through,
        required_depth=required,
        verified_through=Fraction(0),
        verdict=VERDICT_INSUFFICIENT,
    )
    return _finish(cert, residual)


# ---------------------------------------------------------------------------
# generalized eta-product identities on Gamma1(N)
# ---------------------------------------------------------------------------


def _normalize_gen(combination: LinearCombination) -> tuple[LinearCombination, list[str]]:
    """Bring the identity to "sum alpha_j f_j + 1 = 0" form.

    Without a constant term, divide through by the term of minimal order at
    infinity (exponent maps subtract, so this stays symbolic and exact).
    """
    notes = []
    constants = [t for t in combination.terms if t.quotient is None]
    if not constants:
        pivot = min(combination.terms, key=lambda t: t.order_at_infinity())
        if pivot.coef == 0:
            raise NormalizationRequired("cannot normalize by a zero-coefficient term")
        notes.append(f"normalized by dividing through {_term_desc(pivot)}")
        new_terms = []
        for t in combination.terms:
            if t is pivot:
                new_terms.append(Term(Fraction(1), None, Fraction(0)))
                continue
            q = t.quotient * pivot.quotient.pow(-1) if t.quotient else pivot.quotient.pow(-1)
            new_terms.append(Term(t.coef / pivot.coef, q, t.shift - pivot.shift))
        return LinearCombination.make(combination.level, new_terms), notes
    if len(constants) > 1:
        raise NormalizationRequired("more than one constant term")
    c0 = constants[0].coef
    if c0 == 1:
        return combination, notes
    notes.append(f"scaled identity by {_frac_str(Fraction(1) / c0)} to make the constant 1")
    new_terms = [Term(t.coef / c0, t.quotient, t.shift) for t in combination.terms]
    return LinearCombination.make(combination.level, new_terms), notes


def prove_gen_identity(
    combination: LinearCombination, depth_cap: int | None = None
) -> ProofCertificate:
    """Certify "sum alpha_j f_j + 1 = 0" for generalized eta-quotients on Gamma1(N)."""
    N = combination.level
    combination, notes = _normalize_gen(combination)
    for term in combination.terms:
        if term.shift:
            raise NotModular("monomial-shifted terms are not modular functions")
        if term.quotient is None:
            continue
        if not robins_is_modular(term.quotient):
            raise NotModular(
                f"term {_term_desc(term)}: modularity on Gamma1({N}) not certified "
                "(sufficient conditions failed)"
            )
    table = cusps_gamma1(N)
    ords = [
        [gen_ord(t.quotient, c) if t.quotient else Fraction(0) for c, _ in table.entries]
        for t in combination.terms
    ]
    big = [[w * o for (c, w), o in zip(table.entries, row)] for row in ords]
    sum_min = Fraction(0)
    for j, (cusp, w) in enumerate(table.entries):
        if equivalent_to_infinity("gamma1", N, cusp):
            continue
        sum_min += min(min(row[j] for row in big), Fraction(0))
    b_value = -sum_min  # positive vanishing threshold, the prose convention
    vanish_through = floor(b_value)
    required = vanish_through + 1
    _depth_guard(required, depth_cap)
    residual = combination.expand(required + 1)
    cert = ProofCertificate(
        group="gamma1",
        level=N,
        kind="gen",
        terms=[_term_desc(t) for t in combination.terms],
        cusps=[str(c) for c in table.cusps()],
        widths=[w for _, w in table.entries],
        ord_table=ords,
        big_ord_table=big,
        lower_bound_table=None,
        sum_min=sum_min,
        b_value=b_value,
        vanish_through=vanish_through,
        required_depth=required,
        verified_through=Fraction(0),
        verdict=VERDICT_INSUFFICIENT,
        notes=notes,
    )
    return _finish(cert, residual)


# ---------------------------------------------------------------------------
# U_p identities
# ---------------------------------------------------------------------------


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def _nu(p: int, n: int) -> int:
    if n == 0:
        raise CaseError("nu_p(0) is undefined here")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class UpLowerBound:
    value: Fraction
    case: int  # 1, 2 or 3 in the order of the three-case theorem
    boundary: bool  # the nu_p(delta) = nu_p(N)/2 boundary was hit


def _big_ord_at(f: EtaQuotient, cusp: Cusp) -> Fraction:
    return width_gamma0(f.level, cusp) * ligozat_ord(f, cusp)


def gordon_hughes_bound(p: int, N: int, f: EtaQuotient, cusp: Cusp) -> UpLowerBound:
    """Lower bound for ORD(U_p f, cusp, Gamma0(N)), f modular on Gamma0(pN).

    The cusp must be given with denominator dividing N (as the divisor-indexed
    tables do); the three cases split on nu_p of that denominator.
    """
    if not _is_prime(p):
        raise CaseError(f"{p} is not prime")
    if N % p != 0:
        raise CaseError(f"p = {p} must divide N = {N}")
    if f.level != p * N:
        raise CaseError(f"expected the U_p argument at level {p * N}, got {f.level}")
    delta = cusp.c if cusp.c else N
    if N % delta != 0:
        raise CaseError(f"cusp denominator {delta} does not divide N = {N}")
    nu_delta = _nu(p, delta) if delta else 0
    nu_N = _nu(p, N)
    boundary = 2 * nu_delta == nu_N
    if 2 * nu_delta >= nu_N:
        inner = Cusp.make(cusp.a, cusp.c * p)
        return UpLowerBound(Fraction(1, p) * _big_ord_at(f, inner), 1, boundary)
    if nu_delta > 0:
        inner = Cusp.make(cusp.a, cusp.c * p)
        return UpLowerBound(_big_ord_at(f, inner), 2, boundary)
    values = []
    for k in range(p):
        inner = Cusp.make(cusp.a + k * cusp.c, cusp.c * p)
        values.append(_big_ord_at(f, inner))
    return UpLowerBound(min(values), 3, boundary)


def prove_up_identity(
    p: int,
    g_combination: LinearCombination,
    f_combination: LinearCombination,
    depth_cap: int | None = None,
) -> ProofCertificate:
    """Certify U_p(g) = f with g on Gamma0(pN) and f on Gamma0(N)."""
    N = f_combination.level
    if not _is_prime(p):
        raise CaseError(f"{p} is not prime")
    if N % p != 0:
        raise CaseError(f"p = {p} must divide the target level N = {N}")
    if g_combination.level != p * N:
        raise CaseError(
            f"left block must live at level pN = {p * N}, got {g_combination.level}"
        )
    for combo, n in ((f_combination, N), (g_combination, p * N)):
        for term in combo.terms:
            if term.shift:
                raise NotModular("monomial-shifted terms are not modular functions")
            if term.quotient is None:
                continue
            ok, violations = newman_is_modular(term.quotient)
            if not ok:
                raise NotModular(
                    f"term {_term_desc(term)} not modular on Gamma0({n}): {violations}"
                )
    table = cusps_gamma0(N)
    f_ords = [
        [ligozat_ord(t.quotient, c) if t.quotient else Fraction(0) for c, _ in table.entries]
        for t in f_combination.terms
    ]
    f_big = [[w * o for (c, w), o in zip(table.entries, row)] for row in f_ords]
    g_bounds = []
    flags = []
    for i, t in enumerate(g_combination.terms):
        row = []
        for cusp, _ in table.entries:
            if t.quotient is None:
                raise NotModular("constant terms are not allowed in the U_p left block")
            b = gordon_hughes_bound(p, N, t.quotient, cusp)
            if b.boundary:
                flags.append(f"g-term {i} at cusp {cusp}: nu_p boundary case, case 1 taken")
            row.append(b.value)
        g_bounds.append(row)
    sum_min = Fraction(0)
    for j, (cusp, w) in enumerate(table.entries):
        if equivalent_to_infinity("gamma0", N, cusp):
            continue
        candidates = [row[j] for row in f_big] + [row[j] for row in g_bounds]
        sum_min += min(candidates)
    vanish_through = floor(-sum_min)
    required = vanish_through + 1
    _depth_guard(required, depth_cap)
    g_series = g_combination.expand(p * (required + 1))
    residual = g_series.u_p(p) - f_combination.expand(required + 1)
    cert = ProofCertificate(
        group="gamma0",
        level=N,
        kind="up",
        terms=[f"U_{p}[{_term_desc(t)}]" for t in g_combination.terms]
        + [_term_desc(t) for t in f_combination.terms],
        cusps=[str(c) for c in table.cusps()],
        widths=[w for _, w in table.entries],
        ord_table=f_ords,
        big_ord_table=f_big,
        lower_bound_table=g_bounds,
        sum_min=sum_min,
        b_value=sum_min,
        vanish_through=vanish_through,
        required_depth=required,
        verified_through=Fraction(0),
        verdict=VERDICT_INSUFFICIENT,
        boundary_flags=flags,
    )
    return _finish(cert, residual)
