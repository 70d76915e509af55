"""Exact arithmetic in the coefficient fields.

Three layers live here:

* ``Fq`` -- the finite field F_q = F_p[z]/(modulus), q = p^m, with elements
  stored as coefficient tuples in the polynomial basis.  The q-power map
  fixes F_q pointwise, which downstream code relies on.
* ``SPoly`` -- sparse univariate polynomials over any coefficient ring that
  exposes ``zero()``/``one()`` and whose elements overload +, -, *, /.
  The same class serves F_p[z], F_q[x], k[t], F_q[t] and (nested through
  ``PolyRing``) F_q[t][T].
* ``PerfElement`` -- an element of the perfection of F_q(theta): a reduced
  rational function num/den over F_q together with a level e >= 0, the value
  being (num/den)(theta^(1/q^e)).  Frobenius and its inverse are exact and
  cheap: q-power at level 0 scales exponents by q (coefficients are
  Frobenius-fixed), q-root bumps the level and re-minimizes.

Everything is immutable after construction; operations are pure.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from math import gcd as gcd_int

from .errors import FieldError


def _is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _factor_prime_power(q):
    """Return (p, m) with q = p^m, or raise."""
    if q < 2:
        raise FieldError("q must be a prime power >= 2, got {}".format(q))
    p = 2
    while q % p:
        p += 1
        if p * p > q:
            p = q
            break
    m = 0
    n = q
    while n % p == 0:
        n //= p
        m += 1
    if n != 1 or not _is_prime(p):
        raise FieldError("q = {} is not a prime power".format(q))
    return p, m


class FqElement:
    """An element of F_q in the polynomial basis w.r.t. the field modulus.

    ``idx`` is the mixed-radix encoding sum coeffs[i] * p^i; once the field
    has built its lookup tables, arithmetic is a table access returning an
    interned instance, which matters in the coefficient-heavy inner loops.
    """

    __slots__ = ("field", "coeffs", "idx")

    def __init__(self, field, coeffs):
        self.field = field
        self.coeffs = tuple(coeffs)
        idx = 0
        for c in reversed(self.coeffs):
            idx = idx * field.p + c
        self.idx = idx

    def __bool__(self):
        return self.idx != 0

    def __eq__(self, other):
        return (isinstance(other, FqElement) and self.field is other.field
                and self.idx == other.idx)

    def __hash__(self):
        return hash((self.field.q, self.idx))

    def __add__(self, other):
        f = self.field
        if f._tables:
            return f._elems[f._add_t[self.idx * f.q + other.idx]]
        p = f.p
        return FqElement(f, tuple((a + b) % p for a, b in
                                  zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        f = self.field
        if f._tables:
            return f._elems[f._neg_t[self.idx]]
        return FqElement(f, tuple((-a) % f.p for a in self.coeffs))

    def __mul__(self, other):
        f = self.field
        if f._tables:
            return f._elems[f._mul_t[self.idx * f.q + other.idx]]
        return f._mul(self, other)

    def __truediv__(self, other):
        if not other:
            raise FieldError("division by zero in F_q")
        return self * other.inverse()

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self):
        if not self:
            raise FieldError("zero has no inverse in F_q")
        f = self.field
        if f._tables:
            return f._elems[f._inv_t[self.idx]]
        # Fermat: a^(q-2); q is desk-scale so square-and-multiply is fine.
        return self ** (f.q - 2)

    def is_one(self):
        return self.idx == 1

    def __str__(self):
        return render_poly_in_var(
            {i: c for i, c in enumerate(self.coeffs) if c},
            self.field.gen_name, lambda c: str(c), lambda c: c == 1)

    def __repr__(self):
        return "FqElement({})".format(self)


class Fq:
    """The finite field F_q = F_p[z]/(modulus), modulus monic irreducible.

    ``modulus`` is a list of m+1 residues mod p, constant term first,
    leading coefficient 1.  For m = 1 the default modulus is z, i.e. the
    prime field itself.
    """

    def __init__(self, q, modulus=None, gen_name="z"):
        p, m = _factor_prime_power(q)
        self.p = p
        self.m = m
        self.q = q
        self.gen_name = gen_name
        if modulus is None:
            if m != 1:
                raise FieldError(
                    "q = {} needs an explicit degree-{} modulus".format(q, m))
            modulus = [0, 1]
        modulus = [c % p for c in modulus]
        if len(modulus) != m + 1 or modulus[-1] != 1:
            raise FieldError(
                "modulus must be monic of degree {} over F_{}".format(m, p))
        self.modulus = tuple(modulus)
        if m > 1:
            self._check_irreducible()
        # reduction table: z^k for k in [m, 2m-2] as coefficient tuples
        self._red = []
        tail = [(-c) % p for c in modulus[:-1]]  # z^m
        cur = tail[:]
        for _ in range(m, 2 * m - 1):
            self._red.append(tuple(cur))
            overflow = cur[-1]
            cur = [0] + cur[:-1]
            if overflow:
                cur = [(a + overflow * t) % p for a, t in zip(cur, tail)]
        self._tables = False
        if q <= 512:
            self._build_tables()

    def _build_tables(self):
        q = self.q
        elems = list(self.elements())
        self._elems = elems
        add_t = [0] * (q * q)
        mul_t = [0] * (q * q)
        neg_t = [0] * q
        inv_t = [0] * q
        p, m = self.p, self.m
        for a in elems:
            ai = a.idx
            neg = tuple((-c) % p for c in a.coeffs)
            ni = 0
            for c in reversed(neg):
                ni = ni * p + c
            neg_t[ai] = ni
            for b in elems:
                bi = b.idx
                s = tuple((x + y) % p for x, y in zip(a.coeffs, b.coeffs))
                si = 0
                for c in reversed(s):
                    si = si * p + c
                add_t[ai * q + bi] = si
                mul_t[ai * q + bi] = self._mul(a, b).idx
        for a in elems:
            if a.idx:
                for b in elems:
                    if mul_t[a.idx * q + b.idx] == 1:
                        inv_t[a.idx] = b.idx
                        break
        self._add_t = add_t
        self._mul_t = mul_t
        self._neg_t = neg_t
        self._inv_t = inv_t
        self._tables = True

    def _check_irreducible(self):
        # Trial factorization over F_p: enumerate monic divisors of degree
        # <= m // 2.  Desk scale: p^(m//2) stays tiny.
        p, m = self.p, self.m
        if p ** (m // 2) > 10 ** 5:
            raise FieldError("modulus too large for trial factorization")
        for deg in range(1, m // 2 + 1):
            for idx in range(p ** deg):
                div = []
                k = idx
                for _ in range(deg):
                    div.append(k % p)
                    k //= p
                div.append(1)
                if self._poly_divides(div):
                    raise FieldError(
                        "modulus is reducible over F_{}".format(p))

    def _poly_divides(self, div):
        rem = list(self.modulus)
        p = self.p
        dd = len(div) - 1
        while len(rem) - 1 >= dd and any(rem):
            while rem and rem[-1] == 0:
                rem.pop()
            if len(rem) - 1 < dd:
                break
            c = rem[-1]  # div is monic
            shift = len(rem) - 1 - dd
            for i, dc in enumerate(div):
                rem[shift + i] = (rem[shift + i] - c * dc) % p
        return not any(rem)

    def zero(self):
        return FqElement(self, (0,) * self.m)

    def one(self):
        return FqElement(self, (1,) + (0,) * (self.m - 1))

    def gen(self):
        if self.m == 1:
            raise FieldError("prime field has no generator z")
        return FqElement(self, (0, 1) + (0,) * (self.m - 2))

    def from_int(self, n):
        return FqElement(self, (n % self.p,) + (0,) * (self.m - 1))

    def element(self, coeffs):
        coeffs = list(coeffs)[: self.m]
        coeffs += [0] * (self.m - len(coeffs))
        return FqElement(self, tuple(c % self.p for c in coeffs))

    def elements(self):
        for idx in range(self.q):
            coeffs = []
            k = idx
            for _ in range(self.m):
                coeffs.append(k % self.p)
                k //= self.p
            yield FqElement(self, tuple(coeffs))

    def _mul(self, a, b):
        p, m = self.p, self.m
        if m == 1:
            return FqElement(self, ((a.coeffs[0] * b.coeffs[0]) % p,))
        prod = [0] * (2 * m - 1)
        for i, ca in enumerate(a.coeffs):
            if ca:
                for j, cb in enumerate(b.coeffs):
                    if cb:
                        prod[i + j] = (prod[i + j] + ca * cb) % p
        res = prod[:m]
        for k in range(m, 2 * m - 1):
            c = prod[k]
            if c:
                red = self._red[k - m]
                res = [(r + c * t) % p for r, t in zip(res, red)]
        return FqElement(self, tuple(res))

    def __repr__(self):
        return "Fq({})".format(self.q)


class PolyRing:
    """Ring context turning SPoly values into coefficients of another SPoly."""

    def __init__(self, coeff_ring, var):
        self.coeff_ring = coeff_ring
        self.var = var

    def zero(self):
        return SPoly(self.coeff_ring, {})

    def one(self):
        return SPoly(self.coeff_ring, {0: self.coeff_ring.one()})


class SPoly:
    """Sparse univariate polynomial over a coefficient ring.

    Stored as {exponent: nonzero coefficient}.  Exponents may be huge
    (Frobenius substitutions scale them by q^j), so density is never
    materialized; division and gcd walk exponents sparsely.
    """

    __slots__ = ("ring", "terms")

    def __init__(self, ring, terms):
        self.ring = ring
        self.terms = {e: c for e, c in terms.items() if c}

    @classmethod
    def const(cls, ring, c):
        return cls(ring, {0: c})

    @classmethod
    def gen(cls, ring):
        return cls(ring, {1: ring.one()})

    def degree(self):
        """Degree, or -1 for the zero polynomial."""
        return max(self.terms) if self.terms else -1

    def valuation(self):
        return min(self.terms) if self.terms else -1

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        return isinstance(other, SPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = terms.get(e)
            terms[e] = s + c if s is not None else c
        return SPoly(self.ring, terms)

    def __sub__(self, other):
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = terms.get(e)
            terms[e] = s - c if s is not None else -c
        return SPoly(self.ring, terms)

    def __neg__(self):
        return SPoly(self.ring, {e: -c for e, c in self.terms.items()})

    def __mul__(self, other):
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                prod = c1 * c2
                s = terms.get(e)
                terms[e] = s + prod if s is not None else prod
        return SPoly(self.ring, terms)

    def __pow__(self, n):
        if n < 0:
            raise FieldError("negative polynomial power")
        result = SPoly(self.ring, {0: self.ring.one()})
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c):
        return SPoly(self.ring, {e: v * c for e, v in self.terms.items()})

    def coeff(self, e):
        c = self.terms.get(e)
        return c if c is not None else self.ring.zero()

    def shift(self, k):
        """Multiply by var^k (k may be negative if valuation allows)."""
        return SPoly(self.ring, {e + k: c for e, c in self.terms.items()})

    def map_coeffs(self, f):
        return SPoly(self.ring, {e: f(c) for e, c in self.terms.items()})

    def leading(self):
        d = self.degree()
        return self.terms[d]

    def is_one(self):
        return self.terms == {0: self.ring.one()} or (
            len(self.terms) == 1 and 0 in self.terms
            and self.terms[0] == self.ring.one())

    # --- field-coefficient operations (divmod and friends) ---

    def divmod(self, other):
        if not other:
            raise FieldError("polynomial division by zero")
        oterms = other.terms
        dd = max(oterms)
        lead_inv = oterms[dd].inverse()
        if len(oterms) == 1:
            # monomial divisor: pure exponent split
            quo = {}
            rem = {}
            for e, c in self.terms.items():
                if e >= dd:
                    quo[e - dd] = c * lead_inv
                else:
                    rem[e] = c
            return SPoly(self.ring, quo), SPoly(self.ring, rem)
        gap = 0
        for e in oterms:
            gap = gcd_int(gap, e)
        if gap > 1:
            # divisor is g(x^gap): Frobenius-substituted divisors split the
            # division into small independent residue-class divisions
            classes = {}
            for e, c in self.terms.items():
                classes.setdefault(e % gap, {})[e // gap] = c
            osub = SPoly(self.ring,
                         {e // gap: c for e, c in oterms.items()})
            quo = {}
            rem = {}
            for v, cls in classes.items():
                q_v, r_v = SPoly(self.ring, cls).divmod(osub)
                for e, c in q_v.terms.items():
                    quo[e * gap + v] = c
                for e, c in r_v.terms.items():
                    rem[e * gap + v] = c
            return SPoly(self.ring, quo), SPoly(self.ring, rem)
        # sparse long division; a heap tracks the live leading exponent so
        # huge Frobenius-scaled exponents never force dense scans
        rem = dict(self.terms)
        heap = [-e for e in rem]
        heapq.heapify(heap)
        quo = {}
        while heap:
            d = -heap[0]
            if d not in rem:
                heapq.heappop(heap)
                continue
            if d < dd:
                break
            heapq.heappop(heap)
            c = rem.pop(d) * lead_inv
            shift = d - dd
            quo[shift] = c
            for e, oc in oterms.items():
                if e == dd:
                    continue
                k = e + shift
                v = rem.get(k)
                nv = (v - c * oc) if v is not None else -(c * oc)
                if nv:
                    if v is None:
                        heapq.heappush(heap, -k)
                    rem[k] = nv
                elif v is not None:
                    del rem[k]
        return SPoly(self.ring, quo), SPoly(self.ring, rem)

    def __mod__(self, other):
        return self.divmod(other)[1]

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def monic(self):
        if not self:
            return self
        inv = self.leading().inverse()
        return self.scale(inv)

    def gcd(self, other):
        """Monic gcd over field coefficients, with sparse fast paths."""
        a, b = self, other
        if not a:
            return b.monic()
        if not b:
            return a.monic()
        # common valuation splits off as a monomial factor; primitive parts
        # of monomials are constants, so the monomial case never hits Euclid
        v = min(a.valuation(), b.valuation())
        a = a.shift(-a.valuation())
        b = b.shift(-b.valuation())
        if len(a.terms) == 1 or len(b.terms) == 1:
            g = SPoly(self.ring, {0: self.ring.one()})
        else:
            while b:
                a, b = b, a % b
            g = a.monic()
        return g.shift(v) if v > 0 else g

    def evaluate(self, x):
        acc = self.ring.zero()
        for e, c in self.terms.items():
            acc = acc + c * (x ** e)
        return acc

    def subst_power(self, k):
        """Substitute var -> var^k (k >= 1): exponent scaling."""
        return SPoly(self.ring, {e * k: c for e, c in self.terms.items()})

    def exponents_divisible_by(self, k):
        return all(e % k == 0 for e in self.terms)

    def subst_root(self, k):
        """Substitute var^k -> var; exponents must be divisible by k."""
        return SPoly(self.ring, {e // k: c for e, c in self.terms.items()})

    def render(self, var, coeff_str=str, coeff_is_one=None):
        if coeff_is_one is None:
            coeff_is_one = lambda c: getattr(c, "is_one")()
        return render_poly_in_var(self.terms, var, coeff_str, coeff_is_one)

    def __str__(self):
        return self.render("x")

    def __repr__(self):
        return "SPoly({})".format(self)


def needs_parens(s):
    return " + " in s or " - " in s


def render_poly_in_var(terms, var, coeff_str, coeff_is_one):
    """Canonical rendering: decreasing exponent, '*' between coefficient
    and variable power, unit coefficients omitted on proper powers."""
    if not terms:
        return "0"
    parts = []
    for e in sorted(terms, reverse=True):
        c = terms[e]
        cs = coeff_str(c)
        if e == 0:
            parts.append(cs)
        else:
            v = var if e == 1 else "{}^{}".format(var, e)
            if coeff_is_one(c):
                parts.append(v)
            else:
                if needs_parens(cs):
                    cs = "({})".format(cs)
                parts.append("{}*{}".format(cs, v))
    return " + ".join(parts)


def irreducible_over(field, poly):
    """Trial-factorization irreducibility over a finite coefficient field."""
    n = poly.degree()
    if n <= 0:
        return False
    if n == 1:
        return True
    size = 1
    for _ in range(n // 2):
        size *= field.q if isinstance(field, Fq) else field.size
    if size > 10 ** 5:
        raise FieldError("modulus too large for trial factorization")
    ring = poly.ring
    # enumerate monic polynomials of degree deg for deg in 1..n//2
    elems = list(field.elements())
    for deg in range(1, n // 2 + 1):
        def rec(coeffs):
            if len(coeffs) == deg:
                div = SPoly(ring, {deg: ring.one()})
                for i, c in enumerate(coeffs):
                    if c:
                        div = div + SPoly(ring, {i: c})
                if not (poly % div):
                    return True
                return False
            return any(rec(coeffs + [c]) for c in elems)
        if rec([]):
            return False
    return True


def find_irreducible(field, degree):
    """Deterministic search: lexicographically first monic irreducible."""
    elems = list(field.elements())
    counters = [0] * degree
    while True:
        terms = {degree: field.one()}
        for i, idx in enumerate(counters):
            c = elems[idx]
            if c:
                terms[i] = c
        cand = SPoly(field, terms)
        if irreducible_over(field, cand):
            return cand
        i = 0
        while i < degree:
            counters[i] += 1
            if counters[i] < len(elems):
                break
            counters[i] = 0
            i += 1
        if i == degree:
            raise FieldError("no irreducible of degree {} found".format(degree))


class ExtField:
    """Extension k = F_q[w]/(ext modulus): the base field for L-series.

    Elements are tuples of FqElement in the power basis (1, w, .., w^(n-1)),
    which is exactly the F_q-basis restriction of scalars works over.
    """

    def __init__(self, base: Fq, modulus: SPoly, gen_name="w"):
        self.base = base
        self.gen_name = gen_name
        n = modulus.degree()
        if n < 1:
            raise FieldError("extension modulus must have degree >= 1")
        lead = modulus.leading()
        if not lead.is_one():
            raise FieldError("extension modulus must be monic")
        if n > 1 and not irreducible_over(base, modulus):
            raise FieldError("extension modulus is reducible over F_q")
        self.modulus = modulus
        self.n = n
        self.q = base.q
        self.size = base.q ** n
        tail = [-(modulus.coeff(i)) for i in range(n)]
        self._red = []
        cur = tail[:]
        for _ in range(n, 2 * n - 1):
            self._red.append(tuple(cur))
            lead = cur[-1]
            cur = [base.zero()] + cur[:-1]
            if lead:
                cur = [a + lead * t for a, t in zip(cur, tail)]

    def zero(self):
        return ExtElement(self, (self.base.zero(),) * self.n)

    def one(self):
        return ExtElement(self, (self.base.one(),) +
                          (self.base.zero(),) * (self.n - 1))

    def gen(self):
        if self.n == 1:
            return self.embed(-self.modulus.coeff(0))
        coeffs = [self.base.zero()] * self.n
        coeffs[1] = self.base.one()
        return ExtElement(self, tuple(coeffs))

    def embed(self, c: FqElement):
        coeffs = [c] + [self.base.zero()] * (self.n - 1)
        return ExtElement(self, tuple(coeffs))

    def element(self, coeffs):
        coeffs = list(coeffs)[: self.n]
        coeffs += [self.base.zero()] * (self.n - len(coeffs))
        return ExtElement(self, tuple(coeffs))

    def elements(self):
        def rec(i):
            if i == self.n:
                yield []
                return
            for rest in rec(i + 1):
                for c in self.base.elements():
                    yield [c] + rest
        for coeffs in rec(0):
            yield ExtElement(self, tuple(coeffs))

    def _mul(self, a, b):
        n = self.n
        if n == 1:
            return ExtElement(self, (a.coeffs[0] * b.coeffs[0],))
        zero = self.base.zero()
        prod = [zero] * (2 * n - 1)
        for i, ca in enumerate(a.coeffs):
            if ca:
                for j, cb in enumerate(b.coeffs):
                    if cb:
                        prod[i + j] = prod[i + j] + ca * cb
        res = prod[:n]
        for k in range(n, 2 * n - 1):
            c = prod[k]
            if c:
                red = self._red[k - n]
                res = [r + c * t for r, t in zip(res, red)]
        return ExtElement(self, tuple(res))

    def __repr__(self):
        return "ExtField(q={}, n={})".format(self.q, self.n)


class ExtElement:
    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        self.field = field
        self.coeffs = tuple(coeffs)

    def __bool__(self):
        return any(self.coeffs)

    def __eq__(self, other):
        return (isinstance(other, ExtElement) and self.field is other.field
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        return ExtElement(self.field, tuple(a + b for a, b in
                                            zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        return ExtElement(self.field, tuple(a - b for a, b in
                                            zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return ExtElement(self.field, tuple(-a for a in self.coeffs))

    def __mul__(self, other):
        return self.field._mul(self, other)

    def __truediv__(self, other):
        if not other:
            raise FieldError("division by zero in extension field")
        return self * other.inverse()

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self):
        if not self:
            raise FieldError("zero has no inverse")
        return self ** (self.field.size - 2)

    def frobenius(self):
        """x -> x^q: the twist tau restricted to k."""
        return self ** self.field.q

    def frobenius_inv(self):
        return self ** (self.field.size // self.field.q)

    def is_one(self):
        return self.coeffs[0].is_one() and not any(self.coeffs[1:])

    def __str__(self):
        terms = {i: c for i, c in enumerate(self.coeffs) if c}
        return render_poly_in_var(terms, self.field.gen_name, str,
                                  lambda c: c.is_one())

    def __repr__(self):
        return "ExtElement({})".format(self)


class PerfField:
    """Context for the perfection of F_q(theta) (or the degenerate
    finite-field base where every element is an F_q constant)."""

    def __init__(self, fq: Fq):
        self.fq = fq
        self.q = fq.q

    def zero(self):
        return PerfElement(self, SPoly(self.fq, {}), self._one_poly(), 0)

    def one(self):
        return PerfElement(self, self._one_poly(), self._one_poly(), 0)

    def _one_poly(self):
        return SPoly(self.fq, {0: self.fq.one()})

    def theta(self):
        return PerfElement(self, SPoly(self.fq, {1: self.fq.one()}),
                           self._one_poly(), 0)

    def from_fq(self, c: FqElement):
        return PerfElement(self, SPoly(self.fq, {0: c} if c else {}),
                           self._one_poly(), 0)

    def from_int(self, n):
        return self.from_fq(self.fq.from_int(n))

    def __repr__(self):
        return "PerfField(q={})".format(self.q)


class PerfElement:
    """num/den evaluated at theta^(1/q^level), in minimal canonical form.

    Canonical: gcd(num, den) = 1, den monic, and when level > 0 not all
    exponents of num and den are divisible by q (else the level strips).
    Structural equality of canonical forms is value equality.
    """

    __slots__ = ("pf", "num", "den", "level")

    def __init__(self, pf, num, den, level, _canonical=False):
        self.pf = pf
        if _canonical:
            self.num, self.den, self.level = num, den, level
            return
        if not den:
            raise FieldError("zero denominator")
        if not num:
            self.num = num
            self.den = pf._one_poly()
            self.level = 0
            return
        if not den.is_one():
            g = num.gcd(den)
            if not g.is_one():
                num = num // g
                den = den // g
            lead = den.leading()
            if not lead.is_one():
                inv = lead.inverse()
                num = num.scale(inv)
                den = den.scale(inv)
        q = pf.q
        while level > 0 and num.exponents_divisible_by(q) \
                and den.exponents_divisible_by(q):
            num = num.subst_root(q)
            den = den.subst_root(q)
            level -= 1
        self.num = num
        self.den = den
        self.level = level

    # --- predicates ---

    def __bool__(self):
        return bool(self.num)

    def is_one(self):
        return self.level == 0 and self.den.is_one() and self.num.is_one()

    def is_constant(self):
        return self.level == 0 and self.den.is_one() and self.num.degree() <= 0

    def as_fq(self):
        if not self.is_constant():
            raise FieldError("not an F_q constant: {}".format(self))
        return self.num.coeff(0)

    def __eq__(self, other):
        return (isinstance(other, PerfElement) and self.level == other.level
                and self.num == other.num and self.den == other.den)

    def __hash__(self):
        return hash((self.level, self.num, self.den))

    # --- arithmetic ---

    @classmethod
    def _reduced(cls, pf, num, den, level):
        """Construct from an already-reduced monic-den fraction: only the
        level minimization scan runs (no gcd)."""
        if not num:
            return cls(pf, num, pf._one_poly(), 0, _canonical=True)
        q = pf.q
        while level > 0 and num.exponents_divisible_by(q) \
                and den.exponents_divisible_by(q):
            num = num.subst_root(q)
            den = den.subst_root(q)
            level -= 1
        return cls(pf, num, den, level, _canonical=True)

    def _common_level(self, other):
        e = max(self.level, other.level)
        q = self.pf.q
        a = self
        b = other
        if a.level < e:
            k = q ** (e - a.level)
            a = (a.num.subst_power(k), a.den.subst_power(k))
        else:
            a = (a.num, a.den)
        if b.level < e:
            k = q ** (e - b.level)
            b = (b.num.subst_power(k), b.den.subst_power(k))
        else:
            b = (b.num, b.den)
        return a, b, e

    def __add__(self, other):
        # radicals are Frobenius-substitution invariants, so coprimality
        # of the raw denominators already certifies the lifted sum reduced
        fast = self.den.is_one() and other.den.is_one() or \
            self.den.gcd(other.den).is_one()
        (n1, d1), (n2, d2), e = self._common_level(other)
        if fast:
            return PerfElement._reduced(self.pf, n1 * d2 + n2 * d1,
                                        d1 * d2, e)
        return PerfElement(self.pf, n1 * d2 + n2 * d1, d1 * d2, e)

    def __sub__(self, other):
        fast = self.den.is_one() and other.den.is_one() or \
            self.den.gcd(other.den).is_one()
        (n1, d1), (n2, d2), e = self._common_level(other)
        if fast:
            return PerfElement._reduced(self.pf, n1 * d2 - n2 * d1,
                                        d1 * d2, e)
        return PerfElement(self.pf, n1 * d2 - n2 * d1, d1 * d2, e)

    def __neg__(self):
        return PerfElement(self.pf, -self.num, self.den, self.level,
                           _canonical=True)

    def __mul__(self, other):
        fast = (self.den.is_one() or other.num.gcd(self.den).is_one()) and \
            (other.den.is_one() or self.num.gcd(other.den).is_one())
        (n1, d1), (n2, d2), e = self._common_level(other)
        if fast:
            return PerfElement._reduced(self.pf, n1 * n2, d1 * d2, e)
        return PerfElement(self.pf, n1 * n2, d1 * d2, e)

    def __truediv__(self, other):
        if not other:
            raise FieldError("division by zero")
        fast = (self.den.is_one() or other.den.gcd(self.den).is_one()) and \
            (not self.num or other.num.gcd(self.num).is_one())
        (n1, d1), (n2, d2), e = self._common_level(other)
        if fast:
            num = n1 * d2
            den = d1 * n2
            lead = den.leading()
            if not lead.is_one():
                inv = lead.inverse()
                num = num.scale(inv)
                den = den.scale(inv)
            return PerfElement._reduced(self.pf, num, den, e)
        return PerfElement(self.pf, n1 * d2, d1 * n2, e)

    def __pow__(self, n):
        if n < 0:
            return (self.pf.one() / self) ** (-n)
        result = self.pf.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # --- Frobenius tower ---

    def q_pow(self):
        """a -> a^q.  Level decrements; at level 0 exponents scale by q."""
        if self.level > 0:
            return PerfElement(self.pf, self.num, self.den, self.level - 1,
                               _canonical=True)
        q = self.pf.q
        return PerfElement(self.pf, self.num.subst_power(q),
                           self.den.subst_power(q), 0, _canonical=True)

    def q_root(self):
        """a -> a^(1/q).  Level increments then re-minimizes; the fraction
        itself is untouched, so no reduction is needed."""
        return PerfElement._reduced(self.pf, self.num, self.den,
                                    self.level + 1)

    def q_power_iter(self, j):
        """a^(q^j) for any integer j (negative = roots)."""
        a = self
        if j >= 0:
            for _ in range(j):
                a = a.q_pow()
        else:
            for _ in range(-j):
                a = a.q_root()
        return a

    def perfection_level(self):
        return self.level

    # --- rendering ---

    def _render_side(self, poly):
        q = self.pf.q
        e = self.level
        qe = q ** e

        def var_for(exp):
            frac = Fraction(exp, qe)
            if frac == 1:
                return "theta"
            if frac.denominator == 1:
                return "theta^{}".format(frac.numerator)
            return "theta^({}/{})".format(frac.numerator, frac.denominator)

        if not poly:
            return "0"
        parts = []
        for exp in sorted(poly.terms, reverse=True):
            c = poly.terms[exp]
            if exp == 0:
                parts.append(str(c))
                continue
            v = var_for(exp)
            if c.is_one():
                parts.append(v)
            else:
                cs = str(c)
                if needs_parens(cs):
                    cs = "({})".format(cs)
                parts.append("{}*{}".format(cs, v))
        return " + ".join(parts)

    def __str__(self):
        ns = self._render_side(self.num)
        if self.den.is_one():
            return ns
        ds = self._render_side(self.den)
        if needs_parens(ns):
            ns = "({})".format(ns)
        if needs_parens(ds) or "*" in ds:
            ds = "({})".format(ds)
        return "{}/{}".format(ns, ds)

    def __repr__(self):
        return "PerfElement({})".format(self)
