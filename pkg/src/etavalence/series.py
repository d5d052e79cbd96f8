"""Exact truncated Laurent series in fractional powers of q.

A series lives on an exponent grid q^(1/D): exponents are integer numerators
over a fixed positive denominator D.  Coefficients are arbitrary-precision
Python ints; every operation tracks the tightest sound truncation bound, so a
coefficient inside the guaranteed range is exact, never an approximation.
No floating point is used anywhere.

Multiplication packs coefficient arrays into huge integers (Kronecker
substitution) and multiplies them with GMP, which keeps the dense
convolutions fast even at tens of thousands of terms.
"""

from __future__ import annotations

from fractions import Fraction
from math import ceil, gcd

import gmpy2


class SeriesError(Exception):
    """Base class for series-ring failures."""


class NonUnitLeading(SeriesError):
    """Inversion requires a leading coefficient of +1 or -1."""


class PrecisionExceeded(SeriesError):
    """A coefficient beyond the guaranteed truncation bound was requested."""


class ZeroUpToPrecision(SeriesError):
    """The order of a series that vanishes up to its precision is undefined."""


class GridError(SeriesError):
    """Operation requires exponents on the integer grid."""


class NonIntegralCoefficient(SeriesError):
    """Exact rational scaling did not produce integer coefficients."""


# ---------------------------------------------------------------------------
# integer convolution
# ---------------------------------------------------------------------------

_SCHOOLBOOK_CUTOFF = 48


def _convolve_schoolbook(a, b):
    if len(a) > len(b):
        a, b = b, a
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    out[i + j] += ai * bj
    return out


def _pack(coeffs, width_bytes):
    # Signed packing as a difference of two nonnegative packings; this keeps
    # both to_bytes passes branch-free and exact.
    pos = b"".join((c if c > 0 else 0).to_bytes(width_bytes, "little") for c in coeffs)
    neg = b"".join((-c if c < 0 else 0).to_bytes(width_bytes, "little") for c in coeffs)
    return int.from_bytes(pos, "little") - int.from_bytes(neg, "little")


def _convolve_kronecker(a, b):
    bound = max(map(abs, a)) * max(map(abs, b)) * min(len(a), len(b))
    n = len(a) + len(b) - 1
    if bound == 0:
        return [0] * n
    w8 = (bound.bit_length() + 2 + 7) // 8  # slot width in bytes, sign bit included
    prod = int(gmpy2.mpz(_pack(a, w8)) * gmpy2.mpz(_pack(b, w8)))
    negate = prod < 0
    if negate:
        prod = -prod
    raw = prod.to_bytes((n + 1) * w8, "little")
    half = 1 << (8 * w8 - 1)
    full = half << 1
    out = []
    carry = 0
    for i in range(n):
        v = int.from_bytes(raw[i * w8 : (i + 1) * w8], "little") + carry
        if v >= half:
            v -= full
            carry = 1
        else:
            carry = 0
        out.append(-v if negate else v)
    if int.from_bytes(raw[n * w8 :], "little") != carry:
        raise AssertionError("Kronecker slot width overflow")  # pragma: no cover
    return out


def _convolve(a, b):
    """Exact convolution of two integer coefficient lists."""
    if not a or not b:
        return []
    if min(len(a), len(b)) <= _SCHOOLBOOK_CUTOFF:
        return _convolve_schoolbook(a, b)
    return _convolve_kronecker(a, b)


# ---------------------------------------------------------------------------
# the series ring
# ---------------------------------------------------------------------------


def _as_grid_units(exponent, grid):
    """Exponent (int or Fraction) -> integer numerator on the given grid."""
    e = Fraction(exponent) * grid
    if e.denominator != 1:
        raise GridError(f"exponent {exponent} does not lie on grid 1/{grid}")
    return e.numerator


class ExactSeries:
    """Truncated Laurent series sum_i c_i q^((lo+i)/grid) with int coefficients.

    Coefficients at exponents e with e*grid < prec are guaranteed exact;
    nothing is known at or beyond prec/grid.  Instances are immutable and
    normalized: minimal grid, nonzero leading and trailing stored
    coefficients, and the zero series stores nothing (lo == prec).
    """

    __slots__ = ("grid", "lo", "coeffs", "prec")

    def __init__(self, coeffs, lo=0, prec=None, grid=1):
        if grid < 1:
            raise GridError("grid denominator must be a positive integer")
        coeffs = list(coeffs)
        if prec is None:
            prec = lo + len(coeffs)
        if len(coeffs) > prec - lo:
            coeffs = coeffs[: prec - lo]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        lead = 0
        while lead < len(coeffs) and coeffs[lead] == 0:
            lead += 1
        coeffs = coeffs[lead:]
        lo += lead
        if not coeffs:
            # zero up to prec: canonical form is grid 1, lo == prec
            p = -(-prec // grid)
            self.grid = 1
            self.lo = p
            self.coeffs = ()
            self.prec = p
            return
        g = grid
        for i, c in enumerate(coeffs):
            if c:
                g = gcd(g, lo + i)
                if g == 1:
                    break
        if g > 1:
            coeffs = coeffs[::g]
            lo //= g
            prec = -(-prec // g)
            grid //= g
        self.grid = grid
        self.lo = lo
        self.coeffs = tuple(coeffs)
        self.prec = prec
        if lo + len(self.coeffs) > prec:
            raise AssertionError("stored coefficients exceed precision bound")

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, precision):
        """The zero series, guaranteed up to (but excluding) `precision`."""
        p = Fraction(precision)
        return cls([], lo=0, prec=p.numerator, grid=p.denominator)

    @classmethod
    def one(cls, precision):
        p = Fraction(precision)
        return cls([1], lo=0, prec=p.numerator, grid=p.denominator)

    @classmethod
    def from_terms(cls, terms, precision):
        """Build from {exponent: coefficient}; exponents int or Fraction."""
        p = Fraction(precision)
        grid = p.denominator
        for e in terms:
            grid = grid * Fraction(e).denominator // gcd(grid, Fraction(e).denominator)
        nums = {_as_grid_units(e, grid): c for e, c in terms.items()}
        prec = _as_grid_units(p, grid)
        nums = {n: c for n, c in nums.items() if n < prec and c}
        if not nums:
            return cls([], lo=0, prec=prec, grid=grid)
        lo = min(nums)
        hi = max(nums)
        coeffs = [0] * (hi - lo + 1)
        for n, c in nums.items():
            coeffs[n - lo] = c
        return cls(coeffs, lo=lo, prec=prec, grid=grid)

    @classmethod
    def monomial(cls, coefficient, exponent, precision):
        return cls.from_terms({exponent: coefficient}, precision)

    # -- basic queries ----------------------------------------------------

    @property
    def is_zero(self):
        return not self.coeffs

    @property
    def precision(self):
        """Exponent bound: coefficients are guaranteed strictly below this."""
        return Fraction(self.prec, self.grid)

    def order(self):
        """Exponent of the first nonzero coefficient."""
        if self.is_zero:
            raise ZeroUpToPrecision(f"series vanishes up to q^{self.precision}")
        return Fraction(self.lo, self.grid)

    def leading_coefficient(self):
        if self.is_zero:
            raise ZeroUpToPrecision("zero series has no leading coefficient")
        return self.coeffs[0]

    def coefficient(self, exponent):
        """Exact coefficient of q^exponent; raises beyond the known range."""
        e = Fraction(exponent)
        if e >= self.precision:
            raise PrecisionExceeded(
                f"coefficient of q^{e} requested, guaranteed only below q^{self.precision}"
            )
        n = e * self.grid
        if n.denominator != 1:
            return 0
        i = n.numerator - self.lo
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return 0

    def terms(self):
        """Yield (exponent, coefficient) for stored nonzero coefficients."""
        for i, c in enumerate(self.coeffs):
            if c:
                yield Fraction(self.lo + i, self.grid), c

    # -- arithmetic -------------------------------------------------------

    def _on_grid(self, g):
        """Raw (lo, coeffs, prec) view with numerators rescaled to grid g."""
        k = g // self.grid
        if k == 1:
            return self.lo, list(self.coeffs), self.prec
        if self.is_zero:
            return self.prec * k, [], self.prec * k
        coeffs = [0] * ((len(self.coeffs) - 1) * k + 1)
        coeffs[::k] = self.coeffs
        return self.lo * k, coeffs, self.prec * k

    def __add__(self, other):
        if not isinstance(other, ExactSeries):
            return NotImplemented
        g = self.grid * other.grid // gcd(self.grid, other.grid)
        alo, ac, aprec = self._on_grid(g)
        blo, bc, bprec = other._on_grid(g)
        prec = min(aprec, bprec)
        if not ac and not bc:
            return ExactSeries([], lo=0, prec=prec, grid=g)
        if not ac:
            return ExactSeries(bc, lo=blo, prec=prec, grid=g)
        if not bc:
            return ExactSeries(ac, lo=alo, prec=prec, grid=g)
        lo = min(alo, blo)
        hi = max(alo + len(ac), blo + len(bc))
        out = [0] * (hi - lo)
        out[alo - lo : alo - lo + len(ac)] = ac
        for i, c in enumerate(bc):
            out[blo - lo + i] += c
        return ExactSeries(out, lo=lo, prec=prec, grid=g)

    def __neg__(self):
        return ExactSeries([-c for c in self.coeffs], lo=self.lo, prec=self.prec, grid=self.grid)

    def __sub__(self, other):
        if not isinstance(other, ExactSeries):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, ExactSeries):
            return NotImplemented
        g = self.grid * other.grid // gcd(self.grid, other.grid)
        alo, ac, aprec = self._on_grid(g)
        blo, bc, bprec = other._on_grid(g)
        # lo doubles as the order numerator (prec itself for a zero operand)
        prec = min(aprec + blo, bprec + alo)
        if not ac or not bc:
            return ExactSeries([], lo=0, prec=prec, grid=g)
        out = _convolve(ac, bc)
        return ExactSeries(out, lo=alo + blo, prec=prec, grid=g)

    __rmul__ = __mul__

    def scale(self, c):
        """Exact scalar multiple; a Fraction must divide every coefficient."""
        if isinstance(c, int):
            if c == 0:
                return ExactSeries([], lo=0, prec=self.prec, grid=self.grid)
            return ExactSeries([c * x for x in self.coeffs], lo=self.lo, prec=self.prec, grid=self.grid)
        c = Fraction(c)
        if c == 0:
            return ExactSeries([], lo=0, prec=self.prec, grid=self.grid)
        out = []
        for x in self.coeffs:
            y = x * c
            if y.denominator != 1:
                raise NonIntegralCoefficient(f"{c} * {x} is not an integer")
            out.append(y.numerator)
        return ExactSeries(out, lo=self.lo, prec=self.prec, grid=self.grid)

    def invert(self):
        """Multiplicative inverse; requires leading coefficient +-1."""
        if self.is_zero:
            raise NonUnitLeading("cannot invert a series that vanishes up to its precision")
        u0 = self.coeffs[0]
        if u0 not in (1, -1):
            raise NonUnitLeading(f"leading coefficient {u0} is not a unit in Z")
        n = self.prec - self.lo  # relative precision
        u = list(self.coeffs) + [0] * (n - len(self.coeffs))
        inv = [u0]
        m = 1
        while m < n:
            m2 = min(2 * m, n)
            s = _convolve(u[:m2], inv)
            d = [-c for c in s[:m2]] + [0] * (m2 - len(s))
            d[0] += 2
            inv = _convolve(inv, d)[:m2]
            m = m2
        return ExactSeries(inv, lo=-self.lo, prec=self.prec - 2 * self.lo, grid=self.grid)

    def pow(self, k):
        """Exact k-th power; negative k goes through invert()."""
        if k == 0:
            return ExactSeries([1], lo=0, prec=self.prec - self.lo, grid=self.grid)
        base = self if k > 0 else self.invert()
        k = abs(k)
        result = None
        while k:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __pow__(self, k):
        return self.pow(k)

    def shift(self, exponent):
        """Multiply by the monomial q^exponent."""
        e = Fraction(exponent)
        if e == 0:
            return self
        g = self.grid * e.denominator // gcd(self.grid, e.denominator)
        lo, coeffs, prec = self._on_grid(g)
        d = _as_grid_units(e, g)
        return ExactSeries(coeffs, lo=lo + d, prec=prec + d, grid=g)

    def substitute_power(self, k):
        """Substitute q -> q^k for a positive integer k."""
        if k < 1:
            raise GridError("substitution power must be a positive integer")
        if k == 1:
            return self
        if self.is_zero:
            return ExactSeries([], lo=0, prec=k * (self.prec - 1) + 1, grid=self.grid)
        coeffs = [0] * ((len(self.coeffs) - 1) * k + 1)
        coeffs[::k] = self.coeffs
        return ExactSeries(coeffs, lo=self.lo * k, prec=k * (self.prec - 1) + 1, grid=self.grid)

    def u_p(self, p):
        """Coefficient extraction at multiples of p: sum a(p*m) q^m."""
        if self.grid != 1:
            raise GridError("U_p requires a series on the integer exponent grid")
        new_prec = -(-self.prec // p)
        lo = -(-self.lo // p)
        out = []
        for m in range(lo, new_prec):
            i = p * m - self.lo
            out.append(self.coeffs[i] if 0 <= i < len(self.coeffs) else 0)
        return ExactSeries(out, lo=lo, prec=new_prec, grid=1)

    def truncate(self, precision):
        """Restrict the guaranteed range to exponents strictly below `precision`."""
        p = Fraction(precision)
        new = ceil(p * self.grid)
        if new >= self.prec:
            return self
        return ExactSeries(self.coeffs[: max(0, new - self.lo)], lo=self.lo, prec=new, grid=self.grid)

    # -- comparison and display -------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, ExactSeries):
            return NotImplemented
        return (self.grid, self.lo, self.coeffs, self.prec) == (
            other.grid,
            other.lo,
            other.coeffs,
            other.prec,
        )

    def __hash__(self):
        return hash((self.grid, self.lo, self.coeffs, self.prec))

    def agrees_with(self, other):
        """Equality of all coefficients below the smaller precision bound."""
        return (self - other).is_zero

    def __repr__(self):
        bits = []
        for e, c in list(self.terms())[:8]:
            bits.append(f"{c:+d}*q^({e})")
        shown = " ".join(bits) if bits else "0"
        if len(self.coeffs) > 8:
            shown += " ..."
        return f"<ExactSeries {shown} + O(q^({self.precision}))>"

    def __setattr__(self, name, value):
        if hasattr(self, "prec") and name in self.__slots__:
            raise AttributeError("ExactSeries is immutable")
        object.__setattr__(self, name, value)
