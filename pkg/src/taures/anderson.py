"""Anderson t-modules: axiom validation, the action of F_q[t] and of
negative powers of t, and the convergence constant k1 that turns the
pairing's infinite sum into a finite one.

A module is the data (field, theta, d, phi_t, declared motive/comotive
bases).  Bases are declared, not computed: the Gram-unit certificate in
the pairing module retroactively certifies them.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional

from .errors import ConvergenceError, DimensionError, FieldError
from .fields import Fq, PerfElement, PerfField, needs_parens
from .skew import NEG_INF, SkewLaurent
from .skewmat import SkewMatrix, invert_series_matrix, mat_mul, sigma_order


class TPoly:
    """Commutative polynomial in t with coefficients in the perfection.

    A sparse map {t-exponent: nonzero PerfElement}; this is the ring
    A tensor R realized as R[t].
    """

    __slots__ = ("pf", "terms")

    def __init__(self, pf: PerfField, terms):
        self.pf = pf
        self.terms = {e: c for e, c in terms.items() if c}

    @classmethod
    def zero(cls, pf):
        return cls(pf, {})

    @classmethod
    def const(cls, pf, c: PerfElement):
        return cls(pf, {0: c})

    @classmethod
    def t(cls, pf):
        return cls(pf, {1: pf.one()})

    def degree(self):
        return max(self.terms) if self.terms else -1

    def coeff(self, e) -> PerfElement:
        c = self.terms.get(e)
        return c if c is not None else self.pf.zero()

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        return isinstance(other, TPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = terms.get(e)
            terms[e] = s + c if s is not None else c
        return TPoly(self.pf, terms)

    def __sub__(self, other):
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = terms.get(e)
            terms[e] = s - c if s is not None else -c
        return TPoly(self.pf, terms)

    def __neg__(self):
        return TPoly(self.pf, {e: -c for e, c in self.terms.items()})

    def __mul__(self, other):
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                p = c1 * c2
                s = terms.get(e)
                terms[e] = s + p if s is not None else p
        return TPoly(self.pf, terms)

    def scale(self, c: PerfElement):
        return TPoly(self.pf, {e: v * c for e, v in self.terms.items()})

    def twist(self, j=1):
        """Raise every coefficient to the q^j power; t is fixed."""
        return TPoly(self.pf,
                     {e: c.q_power_iter(j) for e, c in self.terms.items()})

    def is_constant(self):
        return self.degree() <= 0

    def max_level(self):
        return max((c.perfection_level() for c in self.terms.values()),
                   default=0)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            cs = str(c)
            if e == 0:
                parts.append(cs)
                continue
            v = "t" if e == 1 else "t^{}".format(e)
            if c.is_one():
                parts.append(v)
            else:
                if needs_parens(cs) or "/" in cs:
                    cs = "({})".format(cs)
                parts.append("{}*{}".format(cs, v))
        return " + ".join(parts)

    def __repr__(self):
        return "TPoly({})".format(self)


class Differential:
    """An element of Omega tensor R realized as R[t] dt.

    The tau-action raises coefficients to the q-th power and fixes t.
    """

    __slots__ = ("poly",)

    def __init__(self, poly: TPoly):
        self.poly = poly

    @classmethod
    def zero(cls, pf):
        return cls(TPoly.zero(pf))

    def __eq__(self, other):
        return isinstance(other, Differential) and self.poly == other.poly

    def __hash__(self):
        return hash(self.poly)

    def __add__(self, other):
        return Differential(self.poly + other.poly)

    def __sub__(self, other):
        return Differential(self.poly - other.poly)

    def __neg__(self):
        return Differential(-self.poly)

    def __bool__(self):
        return bool(self.poly)

    def scale(self, a):
        if isinstance(a, TPoly):
            return Differential(self.poly * a)
        return Differential(self.poly.scale(a))

    def twist(self, j=1):
        return Differential(self.poly.twist(j))

    def max_level(self):
        return self.poly.max_level()

    def __str__(self):
        return "{} dt".format(self.poly)

    def __repr__(self):
        return "Differential({})".format(self)


@dataclass
class ValidationReport:
    ok: bool
    failure: Optional[str] = None
    checks: list = dc_field(default_factory=list)

    def __str__(self):
        lines = ["{}: {}".format("pass" if ok else "FAIL", name)
                 for name, ok in self.checks]
        head = "valid" if self.ok else "invalid: {}".format(self.failure)
        return "\n".join([head] + lines)


@dataclass
class AndersonModule:
    """An Anderson t-module with declared motive/comotive bases.

    phi_t is a d x d matrix over R[tau]; motive_basis entries are 1 x d
    rows, comotive_basis entries d x 1 columns, both over R[tau].
    """

    field: Fq
    pf: PerfField
    theta: PerfElement
    dim: int
    phi_t: SkewMatrix
    motive_basis: list
    comotive_basis: list
    rank_hint: Optional[int] = None
    name: str = ""

    @property
    def rank(self):
        return len(self.motive_basis)

    def max_basis_deg(self):
        dm = max((row.max_deg_tau() for row in self.motive_basis),
                 default=NEG_INF)
        dn = max((col.max_deg_tau() for col in self.comotive_basis),
                 default=NEG_INF)
        dm = 0 if dm == NEG_INF else int(max(dm, 0))
        dn = 0 if dn == NEG_INF else int(max(dn, 0))
        return dm, dn


def validate(module: AndersonModule) -> ValidationReport:
    """Check the module axioms; diagnostics are returned, never thrown."""
    checks = []
    failure = None

    d = module.dim
    ok_shape = (module.phi_t.rows == d and module.phi_t.cols == d)
    checks.append(("phi_t is {0}x{0}".format(d), ok_shape))
    if not ok_shape and failure is None:
        failure = "phi_t has shape {}x{}, expected {}x{}".format(
            module.phi_t.rows, module.phi_t.cols, d, d)

    ok_sigma = module.phi_t.sigma_free() and module.phi_t.is_exact()
    checks.append(("phi_t lies in R[tau]", ok_sigma))
    if not ok_sigma and failure is None:
        failure = "phi(t) must lie in R[tau] (no sigma terms)"

    ok_len = len(module.motive_basis) == len(module.comotive_basis) \
        and len(module.motive_basis) >= 1
    checks.append(("basis lengths match and are >= 1", ok_len))
    if not ok_len and failure is None:
        failure = "motive basis has {} rows, comotive {} columns".format(
            len(module.motive_basis), len(module.comotive_basis))

    ok_rows = all(b.rows == 1 and b.cols == d for b in module.motive_basis)
    ok_cols = all(b.rows == d and b.cols == 1 for b in module.comotive_basis)
    checks.append(("basis shapes are 1x{0} rows / {0}x1 columns".format(d),
                   ok_rows and ok_cols))
    if not (ok_rows and ok_cols) and failure is None:
        failure = "basis entries have wrong shape"

    ok_basis = all(b.sigma_free() and b.is_exact()
                   for b in module.motive_basis + module.comotive_basis)
    checks.append(("bases lie in R[tau]", ok_basis))
    if not ok_basis and failure is None:
        failure = "basis entries must lie in R[tau]"

    nilpotent = False
    if ok_shape and ok_sigma:
        # constant term of phi_t minus theta*I must be nilpotent
        pf = module.pf
        n0 = [[module.phi_t[i, j].coeff(0) -
               (module.theta if i == j else pf.zero())
               for j in range(d)] for i in range(d)]
        power = n0
        for _ in range(d - 1):
            power = _const_mat_mul(pf, power, n0)
        nilpotent = all(not power[i][j] for i in range(d) for j in range(d))
    checks.append(("Lie(t) - theta is nilpotent", nilpotent))
    if not nilpotent and failure is None:
        failure = "constant term of phi(t) minus theta*I is not nilpotent"

    return ValidationReport(ok=failure is None, failure=failure,
                            checks=checks)


def _const_mat_mul(pf, a, b):
    n = len(a)
    out = [[pf.zero() for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for k in range(n):
            if a[i][k]:
                for j in range(n):
                    out[i][j] = out[i][j] + a[i][k] * b[k][j]
    return out


def phi_of_poly(module: AndersonModule, a: TPoly) -> SkewMatrix:
    """Extend phi to F_q[t]: evaluate a at phi_t, constants embed as c*I."""
    pf = module.pf
    d = module.dim
    for e, c in a.terms.items():
        if not c.is_constant():
            raise FieldError(
                "phi only extends to F_q[t]; coefficient of t^{} is {}"
                .format(e, c))
    result = SkewMatrix.zeros(pf, d, d)
    power = SkewMatrix.identity(pf, d)
    for e in range(a.degree() + 1):
        c = a.coeff(e)
        if c:
            scal = SkewLaurent.scalar(pf, c)
            result = result + power.map(lambda x, s=scal: s * x)
        if e < a.degree():
            power = mat_mul(power, module.phi_t)
    return result


def phi_inverse_power(module: AndersonModule, k, precision,
                      inv=None) -> SkewMatrix:
    """Phi(t)^-k to the requested precision, with floor bookkeeping.

    The inverse is computed once at an escalated precision so that the
    k-th power still clears the target floor; the loop re-escalates when
    degree growth eats the margin.
    """
    if k < 1:
        raise DimensionError("k must be >= 1")
    work = precision
    for _ in range(4):
        base = inv if inv is not None and -inv.max_floor() >= work \
            else invert_series_matrix(module.phi_t, work)
        acc = base
        for _ in range(k - 1):
            acc = mat_mul(acc, base)
        if acc.max_floor() <= -precision:
            return acc.truncate(-precision)
        work *= 2
        inv = None
    raise ConvergenceError(
        "phi(t)^-{} did not reach precision {}".format(k, precision))


def find_k1(module: AndersonModule, cap=64):
    """Least k1 <= cap with sigma_order(phi(t)^-k1) >= 1.

    Submultiplicativity of the norm then gives
    sigma_order(phi(t)^(-k1*j)) >= j, the pairing's termination bound.
    Shallow precision suffices: the order test only reads stored degrees,
    and floors are re-escalated if power products erode them.
    """
    precision = 3
    inv = invert_series_matrix(module.phi_t, precision)
    acc = inv
    for k in range(1, cap + 1):
        if sigma_order(acc) >= 1:
            return k
        acc = mat_mul(acc, inv)
        if acc.max_floor() > -1:
            precision *= 2
            inv = invert_series_matrix(module.phi_t, precision)
            acc = phi_inverse_power(module, k + 1, precision, inv=inv)
    raise ConvergenceError(
        "convergence not certified within cap {}".format(cap))


def termination_bound(module: AndersonModule, k1) -> int:
    """Cut-off K for the pairing sums.

    K = k1 * (2 + max deg_tau over motive basis + same over comotive),
    extended when phi(t)^-1 has entries of positive tau-degree (never the
    case in the built-in examples) so the vanishing bound stays valid.
    """
    dm, dn = module.max_basis_deg()
    base = 2 + dm + dn
    s1 = sigma_order(invert_series_matrix(module.phi_t, 2))
    slack = 0
    if s1 < 0:
        slack = (k1 - 1) * int(-s1)
    return k1 * (base + slack)


# --- built-in example constructors ---

def drinfeld(pf: PerfField, theta: PerfElement, g, field: Fq = None,
             name="drinfeld") -> AndersonModule:
    """Drinfeld module of rank r: phi(t) = theta + g_1 tau + .. + g_r tau^r,
    with standard bases (1, tau, .., tau^(r-1)) on both sides."""
    g = list(g)
    r = len(g)
    if r < 1 or not g[-1]:
        raise FieldError("drinfeld module needs g_r != 0")
    fq = field if field is not None else pf.fq
    terms = [(theta, 0)] + [(gi, i + 1) for i, gi in enumerate(g)]
    phi = SkewMatrix(pf, [[SkewLaurent.from_left_coeffs(pf, terms)]])
    motive = [SkewMatrix(pf, [[SkewLaurent.tau(pf, i) if i else
                               SkewLaurent.one(pf)]]) for i in range(r)]
    comotive = [SkewMatrix(pf, [[SkewLaurent.tau(pf, j) if j else
                                 SkewLaurent.one(pf)]]) for j in range(r)]
    return AndersonModule(field=fq, pf=pf, theta=theta, dim=1, phi_t=phi,
                          motive_basis=motive, comotive_basis=comotive,
                          rank_hint=r, name=name)


def carlitz(pf: PerfField, theta: PerfElement, field: Fq = None):
    """The Carlitz module: phi(t) = theta + tau."""
    return drinfeld(pf, theta, [pf.one()], field=field, name="carlitz")


def carlitz_tensor(pf: PerfField, theta: PerfElement, d,
                   field: Fq = None) -> AndersonModule:
    """d-th tensor power of the Carlitz module in canonical coordinates:
    theta on the diagonal, 1 on the superdiagonal, tau in the corner;
    motive basis projection-to-first, comotive basis inclusion-at-last."""
    if d < 1:
        raise DimensionError("tensor power must be >= 1")
    fq = field if field is not None else pf.fq
    zero = SkewLaurent.zero(pf)
    one = SkewLaurent.one(pf)
    ent = [[zero for _ in range(d)] for _ in range(d)]
    for i in range(d):
        ent[i][i] = SkewLaurent.scalar(pf, theta)
        if i + 1 < d:
            ent[i][i + 1] = one
    ent[d - 1][0] = ent[d - 1][0] + SkewLaurent.tau(pf)
    phi = SkewMatrix(pf, ent)
    motive = [SkewMatrix(pf, [[one if j == 0 else zero for j in range(d)]])]
    comotive = [SkewMatrix(pf, [[one] if i == d - 1 else [zero]
                                for i in range(d)])]
    return AndersonModule(field=fq, pf=pf, theta=theta, dim=d, phi_t=phi,
                          motive_basis=motive, comotive_basis=comotive,
                          rank_hint=1, name="carlitz-tensor-{}".format(d))


def maurischat(pf: PerfField, theta: PerfElement,
               field: Fq = None) -> AndersonModule:
    """The dimension-2, rank-3 module with
    phi(t) = [[theta + tau^2, tau^3], [1 + tau, theta + tau^2]] and the
    declared bases e = (tau k2, k2, k1), e-check = (k1 tau, k1, k2)."""
    fq = field if field is not None else pf.fq
    zero = SkewLaurent.zero(pf)
    one = SkewLaurent.one(pf)
    tau = SkewLaurent.tau(pf)
    th = SkewLaurent.scalar(pf, theta)
    phi = SkewMatrix(pf, [
        [th + SkewLaurent.tau(pf, 2), SkewLaurent.tau(pf, 3)],
        [one + tau, th + SkewLaurent.tau(pf, 2)],
    ])
    k1_row = [one, zero]
    k2_row = [zero, one]
    motive = [
        SkewMatrix(pf, [[tau * e for e in k2_row]]),   # e1 = tau k2
        SkewMatrix(pf, [k2_row]),                      # e2 = k2
        SkewMatrix(pf, [k1_row]),                      # e3 = k1
    ]
    comotive = [
        SkewMatrix(pf, [[tau], [zero]]),               # e1-check = k1 tau
        SkewMatrix(pf, [[one], [zero]]),               # e2-check = k1
        SkewMatrix(pf, [[zero], [one]]),               # e3-check = k2
    ]
    return AndersonModule(field=fq, pf=pf, theta=theta, dim=2, phi_t=phi,
                          motive_basis=motive, comotive_basis=comotive,
                          rank_hint=3, name="maurischat")
