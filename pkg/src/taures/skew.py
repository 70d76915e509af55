"""Twisted Laurent arithmetic in the Frobenius tau and its inverse sigma.

Elements are kept in right-coefficient normal form sum_i tau^i * a_i with
a_i in the perfection of F_q(theta); sigma = tau^(-1) occupies the negative
exponents.  The defining relation tau*a = a^q*tau makes the product rule

    coeff_k(f*g) = sum_{i+j=k} a_i^(q^-j) * b_j.

Truncation is tracked by ``floor``: all coefficients at tau-degree < floor
are unknown.  Exact elements carry floor = -inf (stored as None).  The
product floor is max(floor_f + deg_tau(g), floor_g + deg_tau(f)), which is
the exact frontier below which an unknown tail can contaminate the result;
everything at or above the floor is exact, never approximate.
"""

from __future__ import annotations

from .errors import FieldError, PrecisionError
from .fields import PerfElement, PerfField, needs_parens

NEG_INF = float("-inf")


class SkewLaurent:
    """A (possibly truncated) twisted Laurent element in normal form."""

    __slots__ = ("pf", "coeffs", "floor")

    def __init__(self, pf: PerfField, coeffs, floor=None):
        self.pf = pf
        if floor is None:
            self.coeffs = {e: c for e, c in coeffs.items() if c}
            self.floor = None
        else:
            self.coeffs = {e: c for e, c in coeffs.items()
                           if c and e >= floor}
            self.floor = floor

    # --- constructors ---

    @classmethod
    def zero(cls, pf):
        return cls(pf, {})

    @classmethod
    def one(cls, pf):
        return cls(pf, {0: pf.one()})

    @classmethod
    def tau(cls, pf, k=1):
        return cls(pf, {k: pf.one()})

    @classmethod
    def sigma(cls, pf, k=1):
        return cls(pf, {-k: pf.one()})

    @classmethod
    def scalar(cls, pf, a: PerfElement):
        return cls(pf, {0: a} if a else {})

    @classmethod
    def from_right_coeffs(cls, pf, terms):
        """terms: iterable of (coefficient, exponent), already right-normal."""
        coeffs = {}
        for a, e in terms:
            if a:
                s = coeffs.get(e)
                coeffs[e] = s + a if s is not None else a
        return cls(pf, coeffs)

    @classmethod
    def from_left_coeffs(cls, pf, terms):
        """Normalize sum_i a_i tau^i: each a*tau^i becomes tau^i * a^(q^-i)."""
        coeffs = {}
        for a, e in terms:
            if a:
                a = a.q_power_iter(-e)
                s = coeffs.get(e)
                coeffs[e] = s + a if s is not None else a
        return cls(pf, coeffs)

    # --- structure ---

    def is_exact(self):
        return self.floor is None

    def floor_value(self):
        return NEG_INF if self.floor is None else self.floor

    def deg_tau(self):
        """Max stored exponent; -inf for (known-)zero."""
        return max(self.coeffs) if self.coeffs else NEG_INF

    def order(self):
        """Min stored exponent; +inf for zero (no stored terms)."""
        return min(self.coeffs) if self.coeffs else float("inf")

    def coeff(self, i) -> PerfElement:
        if self.floor is not None and i < self.floor:
            raise PrecisionError(
                "coefficient of tau^{} is below the precision floor {}"
                .format(i, self.floor))
        c = self.coeffs.get(i)
        return c if c is not None else self.pf.zero()

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        """Structural equality: same stored coefficients and same floor."""
        return (isinstance(other, SkewLaurent) and self.floor == other.floor
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.floor, frozenset(self.coeffs.items())))

    def agrees_with(self, other) -> bool:
        """Equality to precision: compare above the common floor only."""
        lo = max(self.floor_value(), other.floor_value())
        for e, c in self.coeffs.items():
            if e >= lo and other.coeffs.get(e) != c:
                return False
        for e, c in other.coeffs.items():
            if e >= lo and e not in self.coeffs:
                return False
        return True

    # --- ring operations ---

    def __add__(self, other):
        floor = self._add_floor(other)
        coeffs = dict(self.coeffs)
        for e, c in other.coeffs.items():
            s = coeffs.get(e)
            coeffs[e] = s + c if s is not None else c
        return SkewLaurent(self.pf, coeffs, floor)

    def __sub__(self, other):
        floor = self._add_floor(other)
        coeffs = dict(self.coeffs)
        for e, c in other.coeffs.items():
            s = coeffs.get(e)
            coeffs[e] = s - c if s is not None else -c
        return SkewLaurent(self.pf, coeffs, floor)

    def _add_floor(self, other):
        if self.floor is None:
            return other.floor
        if other.floor is None:
            return self.floor
        return max(self.floor, other.floor)

    def __neg__(self):
        return SkewLaurent(self.pf, {e: -c for e, c in self.coeffs.items()},
                           self.floor)

    def __mul__(self, other):
        coeffs = {}
        for i, a in self.coeffs.items():
            for j, b in other.coeffs.items():
                c = a.q_power_iter(-j) * b
                if not c:
                    continue
                k = i + j
                s = coeffs.get(k)
                coeffs[k] = s + c if s is not None else c
        floor = self._mul_floor(other)
        return SkewLaurent(self.pf, coeffs, floor)

    def _mul_floor(self, other):
        # unknown tail of f can contaminate degrees < floor_f + deg_tau(g)
        cands = []
        if self.floor is not None:
            dg = other.deg_tau()
            if dg != NEG_INF:
                cands.append(self.floor + dg)
        if other.floor is not None:
            df = self.deg_tau()
            if df != NEG_INF:
                cands.append(other.floor + df)
        return max(cands) if cands else None

    def __pow__(self, n):
        if n < 0:
            raise FieldError("negative skew power; use invert_scalar")
        result = SkewLaurent.one(self.pf)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scal_left(self, a: PerfElement):
        """Left multiplication by a scalar: a * f."""
        return SkewLaurent.scalar(self.pf, a) * self

    def scal_right(self, a: PerfElement):
        return self * SkewLaurent.scalar(self.pf, a)

    def truncate(self, floor):
        """Impose a precision floor (may only lose knowledge)."""
        if self.floor is not None and self.floor > floor:
            floor = self.floor
        return SkewLaurent(self.pf, self.coeffs, floor)

    def twist(self, j=1):
        """Coefficientwise q^j-power (t-side Frobenius on coefficients)."""
        return SkewLaurent(self.pf,
                           {e: c.q_power_iter(j)
                            for e, c in self.coeffs.items()}, self.floor)

    def sigma_free(self):
        return all(e >= 0 for e in self.coeffs)

    def max_level(self):
        return max((c.perfection_level() for c in self.coeffs.values()),
                   default=0)

    def __str__(self):
        return render_skew(self)

    def __repr__(self):
        return "SkewLaurent({})".format(self)


def invert_scalar(f: SkewLaurent, precision) -> SkewLaurent:
    """Invert a nonzero element of R((sigma)) to ``precision`` sigma-orders.

    Factor f = tau^d * (1 + h) * u with u = leading coefficient and
    ord_sigma(h) >= 1, then expand (1+h)^-1 as a truncated geometric
    series.  The result g carries floor deg_tau(f^-1) - precision + 1 and
    satisfies f*g == 1 == g*f above the floors the product rule reports.
    """
    if precision < 1:
        raise PrecisionError("inversion precision must be >= 1")
    if not f:
        raise FieldError("cannot invert zero (or zero-to-precision)")
    pf = f.pf
    d = f.deg_tau()
    if f.floor is not None and f.floor > d - precision + 1:
        raise PrecisionError(
            "operand known to sigma^{} only; sigma^{} needed".format(
                d - f.floor, precision - 1))
    u = f.coeffs[d]
    u_inv = pf.one() / u
    # h = sum_{s>=1} sigma^s * (a_{d-s} / u); exact polynomial part of f
    h_terms = {}
    for e, a in f.coeffs.items():
        if e == d:
            continue
        h_terms[e - d] = a / u
    h = SkewLaurent(pf, h_terms)
    one = SkewLaurent.one(pf)
    acc = one
    series = one
    for _ in range(1, precision):
        acc = acc * (-h)
        if not acc:
            break
        series = series + acc
    series = series.truncate(-(precision - 1))
    # f^-1 = u^-1 * series * sigma^d
    out = SkewLaurent.scalar(pf, u_inv) * series
    return out * SkewLaurent(pf, {-d: pf.one()})


def render_skew(f: SkewLaurent) -> str:
    """Canonical rendering: increasing tau-degree, sigma^k/tau^k powers,
    right coefficient after an explicit '*'; truncated values append
    ' + O(sigma^P)'."""
    parts = []
    for e in sorted(f.coeffs):
        c = f.coeffs[e]
        if e == 0:
            parts.append(str(c))
            continue
        if e > 0:
            v = "tau" if e == 1 else "tau^{}".format(e)
        else:
            v = "sigma" if e == -1 else "sigma^{}".format(-e)
        if c.is_one():
            parts.append(v)
        else:
            cs = str(c)
            if needs_parens(cs):
                cs = "({})".format(cs)
            parts.append("{} * {}".format(v, cs))
    body = " + ".join(parts) if parts else "0"
    if f.floor is not None:
        body += " + O(sigma^{})".format(1 - f.floor)
    return body
